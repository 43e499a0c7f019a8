#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "framekit/errors.hpp"
#include "framekit/matrix.hpp"

namespace framekit {

/// Numerical thresholds shared by every operation.
///
/// `rank_rel` is multiplied by max(rows, cols) and by the largest singular
/// value to obtain the absolute rank cutoff. `identity_abs` bounds the
/// deviation accepted by identity checks. `tightness_rel` bounds B/A - 1 for a
/// frame to be reported tight.
struct Tolerance {
  double rank_rel = 1e-12;
  double identity_abs = 1e-10;
  double tightness_rel = 1e-8;

  void validate() const {
    if (!(rank_rel > 0.0 && rank_rel < 1.0)) throw InvalidInput("Tolerance: rank_rel must lie in (0, 1)");
    if (!(identity_abs > 0.0) || !std::isfinite(identity_abs))
      throw InvalidInput("Tolerance: identity_abs must be positive and finite");
    if (!(tightness_rel > 0.0) || !std::isfinite(tightness_rel))
      throw InvalidInput("Tolerance: tightness_rel must be positive and finite");
  }

  /// Same cutoffs with identity_abs multiplied by `factor` (>= 1).
  Tolerance scaled(double factor) const {
    Tolerance t = *this;
    t.identity_abs *= std::max(1.0, factor);
    return t;
  }
};

/// Thin SVD restricted to the numerical rank: M ~= left * diag(values) * right^*.
struct SvdFactors {
  Matrix left;                  // rows x r, orthonormal columns
  std::vector<double> values;   // r entries, strictly positive, nonincreasing
  Matrix right;                 // cols x r, orthonormal columns
  std::size_t rank = 0;
  double largest = 0.0;         // sigma_max before truncation (0 for the zero matrix)
};

namespace detail {

struct JacobiResult {
  Matrix columns;               // M * V, mutually orthogonal columns
  Matrix rotations;             // V, unitary
};

// One-sided (Hestenes) Jacobi on the columns of a tall matrix. Each step
// rephases column q so that <a_p, a_q> is real and then applies a real plane
// rotation that zeroes it.
inline JacobiResult one_sided_jacobi(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  Matrix a = m;
  Matrix v = Matrix::identity(cols);

  const double eps = std::numeric_limits<double>::epsilon();
  const double converge = eps * std::sqrt(static_cast<double>(std::max<std::size_t>(rows, 1)));
  const double floor = std::pow(eps * frobenius_norm(m), 2);
  constexpr int kMaxSweeps = 100;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0.0, beta = 0.0;
        Complex gamma{};
        for (std::size_t i = 0; i < rows; ++i) {
          alpha += std::norm(a(i, p));
          beta += std::norm(a(i, q));
          gamma += std::conj(a(i, p)) * a(i, q);
        }
        const double g = std::abs(gamma);
        if (alpha <= floor || beta <= floor || g <= converge * std::sqrt(alpha * beta)) continue;
        rotated = true;

        const Complex phase = std::conj(gamma / g);
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        for (std::size_t i = 0; i < rows; ++i) {
          const Complex ap = a(i, p);
          const Complex aq = a(i, q) * phase;
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        for (std::size_t i = 0; i < cols; ++i) {
          const Complex vp = v(i, p);
          const Complex vq = v(i, q) * phase;
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) return {std::move(a), std::move(v)};
  }
  throw NumericalFailure("svd: one-sided Jacobi did not converge within " + std::to_string(kMaxSweeps) +
                         " sweeps");
}

// Full set of (sigma, u, v) triples for a tall matrix, sorted by decreasing sigma.
struct SortedTriples {
  std::vector<double> sigma;
  Matrix left;   // rows x cols (columns with sigma == 0 are left zero)
  Matrix right;  // cols x cols
};

inline SortedTriples tall_svd(const Matrix& m) {
  auto [a, v] = one_sided_jacobi(m);
  const std::size_t cols = m.cols();
  std::vector<double> norms(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += std::norm(a(i, j));
    norms[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  SortedTriples out{std::vector<double>(cols), Matrix(m.rows(), cols), Matrix(cols, cols)};
  for (std::size_t k = 0; k < cols; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = norms[j];
    for (std::size_t i = 0; i < cols; ++i) out.right(i, k) = v(i, j);
    if (norms[j] > 0.0)
      for (std::size_t i = 0; i < m.rows(); ++i) out.left(i, k) = a(i, j) / norms[j];
  }
  return out;
}

inline void require_finite(const Matrix& m, const char* who) {
  if (!m.is_finite()) throw InvalidInput(std::string(who) + ": matrix has non-finite entries");
}

inline double rank_cutoff(const Matrix& m, double sigma_max, const Tolerance& tol) {
  return tol.rank_rel * sigma_max * static_cast<double>(std::max(m.rows(), m.cols()));
}

// Factors keeping exactly `keep` leading triples (keep <= min(rows, cols)).
inline SvdFactors truncated_factors(const Matrix& m, std::optional<std::size_t> keep, const Tolerance& tol) {
  require_finite(m, "svd");
  const bool wide = m.cols() > m.rows();
  SortedTriples t = wide ? tall_svd(adjoint(m)) : tall_svd(m);
  Matrix& left_full = wide ? t.right : t.left;
  Matrix& right_full = wide ? t.left : t.right;

  SvdFactors f;
  f.largest = t.sigma.empty() ? 0.0 : t.sigma.front();
  std::size_t r = 0;
  if (keep) {
    r = std::min(*keep, t.sigma.size());
    while (r > 0 && !(t.sigma[r - 1] > 0.0)) --r;
  } else {
    const double cutoff = rank_cutoff(m, f.largest, tol);
    while (r < t.sigma.size() && t.sigma[r] > cutoff) ++r;
  }
  f.rank = r;
  f.values.assign(t.sigma.begin(), t.sigma.begin() + static_cast<std::ptrdiff_t>(r));
  f.left = Matrix(m.rows(), r);
  f.right = Matrix(m.cols(), r);
  for (std::size_t k = 0; k < r; ++k) {
    // Make the first largest-modulus entry of each right vector real positive.
    std::size_t pivot = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < m.cols(); ++i) {
      const double mag = std::abs(right_full(i, k));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    const Complex z = right_full(pivot, k);
    const Complex phase = best > 0.0 ? std::conj(z) / std::abs(z) : Complex{1.0};
    for (std::size_t i = 0; i < m.cols(); ++i) f.right(i, k) = right_full(i, k) * phase;
    for (std::size_t i = 0; i < m.rows(); ++i) f.left(i, k) = left_full(i, k) * phase;
    f.right(pivot, k) = std::abs(z);
  }
  return f;
}

inline Matrix pinv_from(const SvdFactors& f, std::size_t rows, std::size_t cols) {
  Matrix p(cols, rows);
  for (std::size_t k = 0; k < f.rank; ++k) {
    const double inv = 1.0 / f.values[k];
    for (std::size_t i = 0; i < cols; ++i) {
      const Complex vik = f.right(i, k) * inv;
      for (std::size_t j = 0; j < rows; ++j) p(i, j) += vik * std::conj(f.left(j, k));
    }
  }
  return p;
}

}  // namespace detail

/// Thin SVD truncated at the numerical rank: singular values not exceeding
/// rank_rel * sigma_max * max(rows, cols) are dropped.
inline SvdFactors svd(const Matrix& m, const Tolerance& tol = {}) {
  tol.validate();
  return detail::truncated_factors(m, std::nullopt, tol);
}

/// Thin SVD keeping exactly the `rank` leading singular triples (fewer if
/// trailing singular values are exactly zero).
inline SvdFactors svd_truncated(const Matrix& m, std::size_t rank) {
  return detail::truncated_factors(m, rank, Tolerance{});
}

/// Moore-Penrose pseudoinverse right * diag(1/sigma) * left^*. pinv of a zero
/// matrix is the zero matrix of transposed shape.
inline Matrix pinv(const Matrix& m, const Tolerance& tol = {}) {
  return detail::pinv_from(svd(m, tol), m.rows(), m.cols());
}

/// Pseudoinverse of the best rank-`rank` approximation of m.
inline Matrix pinv_truncated(const Matrix& m, std::size_t rank) {
  return detail::pinv_from(svd_truncated(m, rank), m.rows(), m.cols());
}

/// Orthogonal projector onto the column space of the factored matrix.
inline Matrix projector_from(const SvdFactors& f) {
  const std::size_t n = f.left.rows();
  Matrix p(n, n);
  for (std::size_t k = 0; k < f.rank; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const Complex uik = f.left(i, k);
      for (std::size_t j = 0; j < n; ++j) p(i, j) += uik * std::conj(f.left(j, k));
    }
  return p;
}

/// Orthogonal projector M M^+ onto the range of m.
inline Matrix range_projector(const Matrix& m, const Tolerance& tol = {}) { return projector_from(svd(m, tol)); }

/// Spectral norm (largest singular value); 0 for the zero matrix.
inline double op_norm(const Matrix& m) {
  if (m.empty()) return 0.0;
  return svd(m).largest;
}

inline std::size_t numerical_rank(const Matrix& m, const Tolerance& tol = {}) { return svd(m, tol).rank; }

/// Inverse of a Hermitian positive definite matrix through its Cholesky factor.
inline Matrix inverse_hpd(const Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionMismatch("inverse_hpd: matrix is not square");
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0)) throw NumericalFailure("inverse_hpd: matrix is not positive definite");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  // Solve L L^* X = I column by column.
  Matrix inv(n, n);
  Vector y(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      Complex s = (i == c) ? Complex{1.0} : Complex{};
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
      y[i] = s / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
      Complex s = y[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= std::conj(l(k, i)) * inv(k, c);
      inv(i, c) = s / l(i, i).real();
    }
  }
  return inv;
}

}  // namespace framekit
