#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "framekit/errors.hpp"
#include "framekit/linalg.hpp"
#include "framekit/matrix.hpp"

namespace framekit {

/// A finite sequence f_1..f_m of vectors in C^n.
class FrameSequence {
 public:
  FrameSequence(std::size_t ambient_dim, std::vector<Vector> vectors)
      : ambient_dim_(ambient_dim), vectors_(std::move(vectors)) {
    if (ambient_dim_ == 0) throw InvalidInput("FrameSequence: ambient dimension must be positive");
    if (vectors_.empty()) throw InvalidInput("FrameSequence: at least one vector is required");
    for (std::size_t k = 0; k < vectors_.size(); ++k) {
      if (vectors_[k].size() != ambient_dim_)
        throw DimensionMismatch("FrameSequence: vector " + std::to_string(k) + " has length " +
                                std::to_string(vectors_[k].size()) + ", expected " + std::to_string(ambient_dim_));
      if (!is_finite(vectors_[k]))
        throw InvalidInput("FrameSequence: vector " + std::to_string(k) + " has non-finite entries");
    }
  }

  /// The sequence formed by the columns of an n x m synthesis matrix.
  static FrameSequence from_synthesis(const Matrix& t) {
    std::vector<Vector> v;
    v.reserve(t.cols());
    for (std::size_t k = 0; k < t.cols(); ++k) v.push_back(t.column(k));
    return FrameSequence(t.rows(), std::move(v));
  }

  std::size_t ambient_dim() const noexcept { return ambient_dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  const std::vector<Vector>& vectors() const noexcept { return vectors_; }
  const Vector& operator[](std::size_t k) const { return vectors_.at(k); }

  /// n x m matrix with f_k as its k-th column.
  Matrix synthesis() const { return Matrix::from_columns(ambient_dim_, vectors_); }

 private:
  std::size_t ambient_dim_;
  std::vector<Vector> vectors_;
};

/// Every operator associated with a frame sequence, extended to the whole
/// signal space C^n and the whole coefficient space C^m.
struct OperatorBundle {
  Matrix synthesis;        // T, n x m
  Matrix analysis;         // U = T^*, m x n
  Matrix frame_op;         // S = T U, n x n
  Matrix gram;             // G = U T, m x m
  Matrix signal_proj;      // P, projector onto span{f_k}
  Matrix coeff_proj;       // Q, projector onto range(T^*) = ker(T)^perp
  Matrix synthesis_pinv;   // T^+, m x n
  Matrix frame_op_pinv;    // S^+
  Matrix gram_pinv;        // G^+
  std::vector<double> singular_values;  // kept singular values of T
  std::size_t span_dim = 0;
  Tolerance tol;
};

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool tight = false;
  bool parseval = false;
};

struct FrameClassification {
  bool is_frame_for_space = false;  // T surjective, P = I
  bool is_riesz_basis = false;      // T injective, Q = I
  bool is_tight = false;
  bool is_parseval = false;
  std::size_t span_dim = 0;
  std::size_t count = 0;
  std::optional<double> redundancy;  // count / span_dim; absent when span_dim == 0
  std::optional<FrameBounds> bounds;

  bool degenerate() const noexcept { return span_dim == 0; }
};

/// The frame restricted to V = span{f_k}, in coordinates of an orthonormal basis of V.
struct RestrictedOperators {
  Matrix basis;          // W, n x r, orthonormal columns; inclusion V -> C^n is W * (.)
  Matrix synthesis;      // W^* T, r x m
  Matrix analysis;       // T^* W, m x r
  Matrix frame_op;       // r x r, Hermitian positive definite
  Matrix frame_op_inv;
};

namespace detail {

inline FrameBounds bounds_from_singular_values(std::span<const double> sv, const Tolerance& tol) {
  if (sv.empty()) throw DegenerateSpan("frame bounds are undefined: the vectors span {0}");
  FrameBounds b;
  b.upper = sv.front() * sv.front();
  b.lower = sv.back() * sv.back();
  b.tight = b.upper / b.lower - 1.0 <= tol.tightness_rel;
  b.parseval = b.tight && std::abs(b.lower - 1.0) <= tol.tightness_rel;
  return b;
}

}  // namespace detail

/// Materializes T, U, S, G, P, Q and the pseudoinverses of T, S and G.
///
/// S^+ and G^+ are truncated at the rank of T: S and G have the squared
/// singular values of T, which fall under the relative rank cutoff long
/// before those of T do.
inline OperatorBundle build_bundle(const FrameSequence& f, const Tolerance& tol = {}) {
  tol.validate();
  OperatorBundle b;
  b.tol = tol;
  b.synthesis = f.synthesis();
  b.analysis = adjoint(b.synthesis);
  b.frame_op = b.synthesis * b.analysis;
  b.gram = b.analysis * b.synthesis;

  const SvdFactors tf = svd(b.synthesis, tol);
  b.span_dim = tf.rank;
  b.singular_values = tf.values;
  b.signal_proj = projector_from(tf);
  b.synthesis_pinv = detail::pinv_from(tf, b.synthesis.rows(), b.synthesis.cols());
  b.coeff_proj = range_projector(b.analysis, tol);
  b.frame_op_pinv = pinv_truncated(b.frame_op, b.span_dim);
  b.gram_pinv = pinv_truncated(b.gram, b.span_dim);
  return b;
}

inline FrameBounds frame_bounds(const OperatorBundle& b) {
  return detail::bounds_from_singular_values(b.singular_values, b.tol);
}

/// Optimal bounds A = ||T^+||^-2 and B = ||T||^2. Throws DegenerateSpan if the
/// vectors are all numerically zero.
inline FrameBounds frame_bounds(const FrameSequence& f, const Tolerance& tol = {}) {
  tol.validate();
  return detail::bounds_from_singular_values(svd(f.synthesis(), tol).values, tol);
}

inline FrameClassification classify(const OperatorBundle& b) {
  FrameClassification c;
  c.span_dim = b.span_dim;
  c.count = b.synthesis.cols();
  c.is_frame_for_space = b.span_dim == b.synthesis.rows();
  c.is_riesz_basis = b.span_dim == b.synthesis.cols();
  if (b.span_dim > 0) {
    c.redundancy = static_cast<double>(c.count) / static_cast<double>(b.span_dim);
    c.bounds = frame_bounds(b);
    c.is_tight = c.bounds->tight;
    c.is_parseval = c.bounds->parseval;
  }
  // In finite dimensions range(T) is closed and equals span{f_k}: P fixes every f_k.
  const double dev = scaled_deviation(b.signal_proj * b.synthesis, b.synthesis);
  if (dev > b.tol.identity_abs)
    throw NumericalFailure("classify: projector onto range(T) does not fix the frame vectors (deviation " +
                           std::to_string(dev) + ")");
  return c;
}

inline FrameClassification classify(const FrameSequence& f, const Tolerance& tol = {}) {
  return classify(build_bundle(f, tol));
}

/// Canonical dual frame {S^+ f_k}.
///
/// The vectors are taken as the columns of (T^+)^*, which equal S^+ f_k
/// exactly. Multiplying by the formed S^+ instead loses accuracy like
/// eps * kappa^2, because S = T T^* squares the condition number of T.
inline FrameSequence canonical_dual(const OperatorBundle& b) {
  if (b.span_dim == 0) throw DegenerateSpan("canonical dual is undefined: the vectors span {0}");
  return FrameSequence::from_synthesis(adjoint(b.synthesis_pinv));
}

inline FrameSequence canonical_dual(const FrameSequence& f, const Tolerance& tol = {}) {
  return canonical_dual(build_bundle(f, tol));
}

inline RestrictedOperators restricted(const FrameSequence& f, const Tolerance& tol = {}) {
  tol.validate();
  const Matrix t = f.synthesis();
  const SvdFactors tf = svd(t, tol);
  if (tf.rank == 0) throw DegenerateSpan("restricted operators are undefined: the vectors span {0}");
  RestrictedOperators r;
  r.basis = tf.left;
  r.synthesis = adjoint(r.basis) * t;
  r.analysis = adjoint(r.synthesis);
  r.frame_op = r.synthesis * r.analysis;
  r.frame_op_inv = inverse_hpd(r.frame_op);
  return r;
}

/// S^+, through (1/A) P when the frame is tight.
inline Matrix pseudo_frame_operator(const OperatorBundle& b) {
  const FrameBounds fb = frame_bounds(b);
  if (fb.tight) return (1.0 / fb.lower) * b.signal_proj;
  return b.frame_op_pinv;
}

inline Matrix pseudo_frame_operator(const FrameSequence& f, const Tolerance& tol = {}) {
  return pseudo_frame_operator(build_bundle(f, tol));
}

/// G^+, through (1/A) Q when the frame is tight.
inline Matrix pseudo_gram(const OperatorBundle& b) {
  const FrameBounds fb = frame_bounds(b);
  if (fb.tight) return (1.0 / fb.lower) * b.coeff_proj;
  return b.gram_pinv;
}

inline Matrix pseudo_gram(const FrameSequence& f, const Tolerance& tol = {}) {
  return pseudo_gram(build_bundle(f, tol));
}

/// A finite prefix of an infinite sequence together with the caller-supplied
/// tail energy sum_{k>m} ||f_k||^2. Operators are built from the prefix only;
/// no convergence claim is made about the tail.
struct TruncatedSequence {
  FrameSequence prefix;
  double tail_energy = 0.0;
};

/// Keeps the first `m` of `vectors` and records `tail_energy` for the rest.
inline TruncatedSequence truncate_sequence(std::size_t ambient_dim, std::span<const Vector> vectors, std::size_t m,
                                           double tail_energy) {
  if (!(tail_energy >= 0.0) || !std::isfinite(tail_energy))
    throw InvalidInput("truncate_sequence: tail energy must be finite and nonnegative");
  if (m > vectors.size()) throw InvalidInput("truncate_sequence: fewer vectors than the requested prefix");
  return {FrameSequence(ambient_dim, std::vector<Vector>(vectors.begin(), vectors.begin() + static_cast<std::ptrdiff_t>(m))),
          tail_energy};
}

}  // namespace framekit
