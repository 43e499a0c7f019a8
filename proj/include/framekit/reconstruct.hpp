#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include "framekit/errors.hpp"
#include "framekit/frame.hpp"
#include "framekit/matrix.hpp"

namespace framekit {

/// An element of the m-dimensional coefficient space.
class CoefficientVector {
 public:
  explicit CoefficientVector(Vector entries) : entries_(std::move(entries)) {
    if (!is_finite(entries_)) throw InvalidInput("CoefficientVector: non-finite entries");
  }

  std::size_t size() const noexcept { return entries_.size(); }
  const Vector& entries() const noexcept { return entries_; }
  const Complex& operator[](std::size_t k) const { return entries_.at(k); }

 private:
  Vector entries_;
};

/// (||x0||^2, ||x - x0||^2) for a minimum-norm solution x0 and another
/// solution x of the same problem; the two parts add up to ||x||^2.
using NormSplit = std::pair<double, double>;

inline NormSplit norm_split(const Vector& minimal, const Vector& other) {
  return {norm_squared(minimal), norm_squared(other - minimal)};
}

struct MinNormSolution {
  Vector solution;
  double residual_norm = 0.0;  // ||f - Pf|| or ||c - Qc||
  std::optional<NormSplit> split;
};

namespace detail {

inline void require_length(std::size_t got, std::size_t want, const char* who) {
  if (got != want)
    throw DimensionMismatch(std::string(who) + ": expected length " + std::to_string(want) + ", got " +
                            std::to_string(got));
}

inline void require_span(const OperatorBundle& b, const char* who) {
  if (b.span_dim == 0) throw DegenerateSpan(std::string(who) + ": the vectors span {0}");
}

}  // namespace detail

/// c0 = (<f, S^+ f_k>)_k, the coefficient sequence of least norm that synthesizes Pf.
inline MinNormSolution min_norm_coefficients(const OperatorBundle& b, const Vector& f) {
  detail::require_length(f.size(), b.synthesis.rows(), "min_norm_coefficients");
  detail::require_span(b, "min_norm_coefficients");
  const std::size_t m = b.synthesis.cols();
  MinNormSolution out;
  out.solution.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Vector dual_k = b.frame_op_pinv * b.synthesis.column(k);
    out.solution[k] = inner(f, dual_k);
  }
  out.residual_norm = norm(f - b.signal_proj * f);
  return out;
}

/// Same, also reporting the split of ||candidate||^2 for another synthesizing sequence.
inline MinNormSolution min_norm_coefficients(const OperatorBundle& b, const Vector& f, const Vector& candidate) {
  detail::require_length(candidate.size(), b.synthesis.cols(), "min_norm_coefficients");
  MinNormSolution out = min_norm_coefficients(b, f);
  out.split = norm_split(out.solution, candidate);
  return out;
}

inline MinNormSolution min_norm_coefficients(const FrameSequence& fs, const Vector& f, const Tolerance& tol = {}) {
  return min_norm_coefficients(build_bundle(fs, tol), f);
}

/// f0 = S^+ T c = sum_k c_k S^+ f_k, the signal of least norm whose analysis is Qc.
inline MinNormSolution min_norm_preimage(const OperatorBundle& b, const CoefficientVector& c) {
  detail::require_length(c.size(), b.synthesis.cols(), "min_norm_preimage");
  detail::require_span(b, "min_norm_preimage");
  MinNormSolution out;
  out.solution = b.frame_op_pinv * (b.synthesis * c.entries());
  out.residual_norm = norm(c.entries() - b.coeff_proj * c.entries());
  return out;
}

inline MinNormSolution min_norm_preimage(const FrameSequence& fs, const CoefficientVector& c,
                                         const Tolerance& tol = {}) {
  return min_norm_preimage(build_bundle(fs, tol), c);
}

/// Same, also reporting the split of ||candidate||^2 for another signal with the same analysis.
inline MinNormSolution min_norm_preimage(const OperatorBundle& b, const CoefficientVector& c, const Vector& candidate) {
  detail::require_length(candidate.size(), b.synthesis.rows(), "min_norm_preimage");
  MinNormSolution out = min_norm_preimage(b, c);
  out.split = norm_split(out.solution, candidate);
  return out;
}

/// The series sum_k <f, S^+ f_k> f_k, summed in index order.
inline Vector signal_series(const OperatorBundle& b, const Vector& f) {
  detail::require_length(f.size(), b.synthesis.rows(), "signal_series");
  const std::size_t n = b.synthesis.rows();
  Vector sum(n);
  for (std::size_t k = 0; k < b.synthesis.cols(); ++k) {
    const Vector fk = b.synthesis.column(k);
    const Complex coef = inner(f, b.frame_op_pinv * fk);
    for (std::size_t i = 0; i < n; ++i) sum[i] += coef * fk[i];
  }
  return sum;
}

/// The series sum_k <c, G^+ T^* f_k> e_k.
inline Vector coefficient_series(const OperatorBundle& b, const Vector& c) {
  detail::require_length(c.size(), b.synthesis.cols(), "coefficient_series");
  const std::size_t m = b.synthesis.cols();
  Vector sum(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Vector gram_col = b.analysis * b.synthesis.column(k);  // T^* f_k
    sum[k] = inner(c, b.gram_pinv * gram_col);
  }
  return sum;
}

/// Pf evaluated through its series, checked against the projector matrix.
inline Vector project_signal(const OperatorBundle& b, const Vector& f) {
  Vector sum = signal_series(b, f);
  const double scale = std::max(1.0, norm(f));
  if (max_abs_diff(sum, b.signal_proj * f) > b.tol.identity_abs * scale)
    throw NumericalFailure("project_signal: series and projector disagree");
  return sum;
}

inline Vector project_signal(const FrameSequence& fs, const Vector& f, const Tolerance& tol = {}) {
  return project_signal(build_bundle(fs, tol), f);
}

/// Qc evaluated through its series, checked against the projector matrix.
inline CoefficientVector project_coefficients(const OperatorBundle& b, const CoefficientVector& c) {
  Vector sum = coefficient_series(b, c.entries());
  const double scale = std::max(1.0, norm(c.entries()));
  if (max_abs_diff(sum, b.coeff_proj * c.entries()) > b.tol.identity_abs * scale)
    throw NumericalFailure("project_coefficients: series and projector disagree");
  return CoefficientVector(std::move(sum));
}

inline CoefficientVector project_coefficients(const FrameSequence& fs, const CoefficientVector& c,
                                              const Tolerance& tol = {}) {
  return project_coefficients(build_bundle(fs, tol), c);
}

}  // namespace framekit
