#pragma once

// Test-only oracles. Everything here is computed independently of the
// library's SVD route: Eigen's decompositions, a hand-written Gaussian
// elimination, and plain enumeration.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "framekit/framekit.hpp"

namespace framekit::testing {

inline Eigen::MatrixXcd to_eigen(const Matrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Matrix from_eigen(const Eigen::MatrixXcd& e) {
  Matrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

/// All singular values, descending, from Eigen's two-sided Jacobi SVD.
inline std::vector<double> eigen_singular_values(const Matrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m));
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

/// Eigenvalues of a Hermitian matrix, ascending.
inline std::vector<double> hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m), Eigen::EigenvaluesOnly);
  const auto& v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

/// Solves A X = B by Gaussian elimination with partial pivoting.
inline Matrix gauss_solve(Matrix a, Matrix b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n) throw std::invalid_argument("gauss_solve: shape");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
    if (std::abs(a(piv, col)) == 0.0) throw std::runtime_error("gauss_solve: singular");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(piv, j));
    }
    for (std::size_t i = col + 1; i < n; ++i) {
      const Complex f = a(i, col) / a(col, col);
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(col, j);
    }
  }
  Matrix x(n, b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = n; i-- > 0;) {
      Complex s = b(i, j);
      for (std::size_t k = i + 1; k < n; ++k) s -= a(i, k) * x(k, j);
      x(i, j) = s / a(i, i);
    }
  return x;
}

/// (M^* M)^{-1} M^* for M of full column rank.
inline Matrix normal_equation_pinv(const Matrix& m) {
  const Matrix mh = adjoint(m);
  return gauss_solve(mh * m, mh);
}

/// Complex gaussian matrix with a prescribed rank (product of two thin factors).
inline Matrix random_rank_matrix(Random& rng, std::size_t rows, std::size_t cols, std::size_t rank) {
  return rng.complex_gaussian_matrix(rows, rank) * rng.complex_gaussian_matrix(rank, cols);
}

/// Plain uniform sampling of the frame ratio over the span, with the span
/// basis taken from Eigen's SVD.
struct UniformEnvelope {
  double min = 1e300;
  double max = 0.0;
};

inline UniformEnvelope uniform_rayleigh_envelope(const FrameSequence& f, std::size_t samples, std::uint64_t seed) {
  const Matrix t = f.synthesis();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(t), Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > 1e-10 * sv(0)) ++r;
  const Eigen::MatrixXcd basis = svd.matrixU().leftCols(r);
  Random rng(seed);
  UniformEnvelope env;
  const Eigen::MatrixXcd te = to_eigen(t);
  for (std::size_t s = 0; s < samples; ++s) {
    Eigen::VectorXcd z(r);
    for (Eigen::Index i = 0; i < r; ++i) z(i) = rng.complex_gaussian();
    const Eigen::VectorXcd x = basis * z;
    const double q = (te.adjoint() * x).squaredNorm() / x.squaredNorm();
    env.min = std::min(env.min, q);
    env.max = std::max(env.max, q);
  }
  return env;
}

inline Vector real_vector(std::initializer_list<double> xs) {
  Vector v;
  for (double x : xs) v.emplace_back(x, 0.0);
  return v;
}

inline FrameSequence real_frame(std::size_t n, std::initializer_list<std::initializer_list<double>> vectors) {
  std::vector<Vector> vs;
  for (const auto& v : vectors) {
    Vector x;
    for (double d : v) x.emplace_back(d, 0.0);
    vs.push_back(std::move(x));
  }
  return FrameSequence(n, std::move(vs));
}

/// The three-vector "Mercedes-Benz" frame in R^2, tight with A = 3/2.
inline FrameSequence mercedes_benz() {
  const double h = std::sqrt(3.0) / 2.0;
  return real_frame(2, {{0.0, 1.0}, {h, -0.5}, {-h, -0.5}});
}

}  // namespace framekit::testing
