#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "framekit/linalg.hpp"
#include "framekit/matrix.hpp"
#include "framekit/random.hpp"
#include "support/oracles.hpp"

using namespace framekit;
using framekit::testing::hermitian_eigenvalues;
using framekit::testing::normal_equation_pinv;
using framekit::testing::random_rank_matrix;

namespace {

constexpr double kTol = 1e-10;

void expect_matrix_near(const Matrix& a, const Matrix& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  EXPECT_LE(max_abs_diff(a, b), tol);
}

double moore_penrose_deviation(const Matrix& m, const Matrix& p) {
  return std::max({scaled_deviation(m * p * m, m), scaled_deviation(p * m * p, p),
                   scaled_deviation(adjoint(m * p), m * p), scaled_deviation(adjoint(p * m), p * m)});
}

}  // namespace

TEST(Svd, DiagonalWithZero) {
  const std::vector<double> d{3.0, 0.0};
  const SvdFactors f = svd(Matrix::diagonal(d));
  ASSERT_EQ(f.rank, 1u);
  EXPECT_NEAR(f.values[0], 3.0, 1e-15);
}

TEST(Svd, Identity) {
  const SvdFactors f = svd(Matrix::identity(4));
  ASSERT_EQ(f.rank, 4u);
  for (double s : f.values) EXPECT_NEAR(s, 1.0, 1e-15);
}

TEST(Svd, ColumnOfOnes) {
  const Matrix m{{1.0}, {1.0}};
  // Oracle: the only eigenvalue of M^*M is that 1x1 product itself.
  const double expected = std::sqrt((adjoint(m) * m)(0, 0).real());
  const SvdFactors f = svd(m);
  ASSERT_EQ(f.rank, 1u);
  EXPECT_NEAR(f.values[0], expected, 1e-15);
  EXPECT_NEAR(expected, std::sqrt(2.0), 1e-15);
}

TEST(Svd, ZeroMatrixHasRankZero) {
  const SvdFactors f = svd(Matrix(3, 2));
  EXPECT_EQ(f.rank, 0u);
  EXPECT_EQ(f.left.rows(), 3u);
  EXPECT_EQ(f.left.cols(), 0u);
  EXPECT_EQ(f.largest, 0.0);
}

TEST(Svd, RejectsNonFiniteInput) {
  Matrix m(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(svd(m), InvalidInput);
}

TEST(Svd, RejectsBadTolerance) {
  Tolerance t;
  t.rank_rel = 1.5;
  EXPECT_THROW(svd(Matrix::identity(2), t), InvalidInput);
  t = Tolerance{};
  t.identity_abs = 0.0;
  EXPECT_THROW(svd(Matrix::identity(2), t), InvalidInput);
}

TEST(Svd, FactorInvariantsOnRandomShapes) {
  Random rng(11);
  for (auto [rows, cols] : std::vector<std::pair<int, int>>{{7, 3}, {3, 7}, {6, 6}, {1, 5}, {5, 1}}) {
    const Matrix m = rng.complex_gaussian_matrix(rows, cols);
    const SvdFactors f = svd(m);
    ASSERT_EQ(f.rank, static_cast<std::size_t>(std::min(rows, cols)));
    for (std::size_t k = 0; k + 1 < f.rank; ++k) EXPECT_GE(f.values[k], f.values[k + 1]);
    for (double s : f.values) EXPECT_GT(s, 0.0);
    expect_matrix_near(adjoint(f.left) * f.left, Matrix::identity(f.rank), kTol);
    expect_matrix_near(adjoint(f.right) * f.right, Matrix::identity(f.rank), kTol);
    expect_matrix_near(f.left * Matrix::diagonal(f.values) * adjoint(f.right), m, kTol);

    const std::vector<double> ref = framekit::testing::eigen_singular_values(m);
    for (std::size_t k = 0; k < f.rank; ++k) EXPECT_NEAR(f.values[k], ref[k], 1e-12 * ref[0]);
  }
}

TEST(Svd, RightVectorsFollowSignConvention) {
  Random rng(5);
  const Matrix m = rng.complex_gaussian_matrix(5, 4);
  const SvdFactors f = svd(m);
  for (std::size_t k = 0; k < f.rank; ++k) {
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < f.right.rows(); ++i)
      if (std::abs(f.right(i, k)) > std::abs(f.right(pivot, k))) pivot = i;
    EXPECT_EQ(f.right(pivot, k).imag(), 0.0);
    EXPECT_GT(f.right(pivot, k).real(), 0.0);
  }
}

TEST(Svd, RankCutoffScalesWithShape) {
  // sigma = (1, 5e-12): kept for a 1x1-scaled cutoff of 1e-12, dropped once
  // the cutoff is multiplied by max(rows, cols) = 10.
  Matrix m(10, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 5e-12;
  EXPECT_EQ(numerical_rank(m), 1u);
  Matrix small(2, 2);
  small(0, 0) = 1.0;
  small(1, 1) = 5e-12;
  EXPECT_EQ(numerical_rank(small), 2u);
}

TEST(Pinv, DiagonalWithZero) {
  const std::vector<double> d{2.0, 0.0};
  const std::vector<double> e{0.5, 0.0};
  expect_matrix_near(pinv(Matrix::diagonal(d)), Matrix::diagonal(e), 1e-15);
}

TEST(Pinv, Identity) { expect_matrix_near(pinv(Matrix::identity(3)), Matrix::identity(3), 1e-15); }

TEST(Pinv, ColumnOfOnesMatchesNormalEquations) {
  const Matrix m{{1.0}, {1.0}};
  const Matrix oracle = normal_equation_pinv(m);
  expect_matrix_near(oracle, Matrix{{0.5, 0.5}}, 1e-15);
  expect_matrix_near(pinv(m), oracle, 1e-15);
}

TEST(Pinv, ZeroMatrixGivesTransposedZero) {
  const Matrix p = pinv(Matrix(2, 3));
  EXPECT_EQ(p.rows(), 3u);
  EXPECT_EQ(p.cols(), 2u);
  EXPECT_EQ(max_abs(p), 0.0);
}

TEST(Pinv, MoorePenroseOnRandomShapes) {
  Random rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const auto rows = 1 + static_cast<std::size_t>(rng.uniform() * 20);
    const auto cols = 1 + static_cast<std::size_t>(rng.uniform() * 20);
    Matrix m;
    switch (trial % 4) {
      case 0: m = rng.complex_gaussian_matrix(rows, rows); break;
      case 1: m = rng.complex_gaussian_matrix(rows + cols, cols); break;
      case 2: m = rng.complex_gaussian_matrix(rows, rows + cols); break;
      default: {
        const std::size_t r = 1 + static_cast<std::size_t>(rng.uniform() * std::min(rows, cols));
        m = random_rank_matrix(rng, rows + 1, cols + 1, r);
        EXPECT_EQ(numerical_rank(m), r);
      }
    }
    const Matrix p = pinv(m);
    EXPECT_LE(moore_penrose_deviation(m, p), kTol) << "trial " << trial;
    EXPECT_LE(scaled_deviation(pinv(adjoint(m)), adjoint(p)), kTol);
    EXPECT_LE(scaled_deviation(pinv(p), m), kTol);
  }
}

TEST(Pinv, FullColumnRankMatchesNormalEquations) {
  Random rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cols = 1 + static_cast<std::size_t>(rng.uniform() * 10);
    const Matrix m = rng.complex_gaussian_matrix(cols + 3, cols);
    const Matrix oracle = normal_equation_pinv(m);
    EXPECT_LE(max_abs_diff(pinv(m), oracle), 1e-8 * max_abs(oracle));
  }
}

TEST(Pinv, TruncatedKeepsRequestedRank) {
  const std::vector<double> d{4.0, 2.0, 1e-14};
  const Matrix p = pinv_truncated(Matrix::diagonal(d), 2);
  const std::vector<double> e{0.25, 0.5, 0.0};
  expect_matrix_near(p, Matrix::diagonal(e), 1e-15);
}

TEST(Adjoint, ConjugateTranspose) {
  const Complex i{0.0, 1.0};
  const Matrix m{{i, 0.0}, {0.0, 1.0}};
  EXPECT_EQ(adjoint(m), (Matrix{{-i, 0.0}, {0.0, 1.0}}));

  const Matrix sym{{1.0, 2.0}, {2.0, 5.0}};
  EXPECT_EQ(adjoint(sym), sym);

  Random rng(3);
  const Matrix r = rng.complex_gaussian_matrix(2, 3);
  const Matrix a = adjoint(r);
  ASSERT_EQ(a.rows(), 3u);
  ASSERT_EQ(a.cols(), 2u);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(a(j, k), std::conj(r(k, j)));
  EXPECT_EQ(adjoint(a), r);
}

TEST(RangeProjector, CoordinateSubspace) {
  const Matrix m{{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}};
  const std::vector<double> d{1.0, 1.0, 0.0};
  expect_matrix_near(range_projector(m), Matrix::diagonal(d), 1e-15);
}

TEST(RangeProjector, ZeroMatrix) { EXPECT_EQ(max_abs(range_projector(Matrix(3, 2))), 0.0); }

TEST(RangeProjector, RankOneColumn) {
  const Vector v{1.0, 1.0};
  const Matrix col = Matrix::column_vector(v);
  // Oracle: v v^* / ||v||^2.
  const Matrix oracle = (1.0 / norm_squared(v)) * (col * adjoint(col));
  expect_matrix_near(range_projector(col), oracle, 1e-15);
  expect_matrix_near(oracle, Matrix{{0.5, 0.5}, {0.5, 0.5}}, 1e-15);
}

TEST(RangeProjector, IdempotentSelfAdjointAndFixesRange) {
  Random rng(9);
  for (int trial = 0; trial < 25; ++trial) {
    const auto rows = 2 + static_cast<std::size_t>(rng.uniform() * 12);
    const auto cols = 1 + static_cast<std::size_t>(rng.uniform() * 12);
    const std::size_t r = 1 + static_cast<std::size_t>(rng.uniform() * std::min(rows, cols));
    const Matrix m = random_rank_matrix(rng, rows, cols, r);
    const Matrix p = range_projector(m);
    EXPECT_LE(scaled_deviation(p * p, p), kTol);
    EXPECT_LE(scaled_deviation(adjoint(p), p), kTol);
    EXPECT_LE(scaled_deviation(p * m, m), kTol);
  }
}

TEST(OpNorm, Examples) {
  const std::vector<double> d{1.0, 3.0};
  EXPECT_NEAR(op_norm(Matrix::diagonal(d)), 3.0, 1e-15);
  EXPECT_EQ(op_norm(Matrix(3, 3)), 0.0);

  const Matrix m{{1.0, 0.0, 1.0}, {0.0, 1.0, 1.0}};
  // Oracle: largest eigenvalue of M M^* = [[2, 1], [1, 2]].
  const std::vector<double> ev = hermitian_eigenvalues(m * adjoint(m));
  EXPECT_NEAR(ev.back(), 3.0, 1e-14);
  EXPECT_NEAR(op_norm(m), std::sqrt(ev.back()), 1e-14);
}

TEST(NumericalRank, Examples) {
  EXPECT_EQ(numerical_rank(Matrix::identity(5)), 5u);
  EXPECT_EQ(numerical_rank(Matrix(4, 4)), 0u);
  EXPECT_EQ(numerical_rank(Matrix{{1.0, 1.0}, {1.0, 1.0}}), 1u);
}

TEST(InverseHpd, MatchesGaussianElimination) {
  Random rng(41);
  const Matrix b = rng.complex_gaussian_matrix(6, 6);
  const Matrix a = b * adjoint(b) + Matrix::identity(6);
  const Matrix oracle = framekit::testing::gauss_solve(a, Matrix::identity(6));
  EXPECT_LE(scaled_deviation(inverse_hpd(a), oracle), 1e-12);
  EXPECT_THROW(inverse_hpd(Matrix{{1.0, 2.0}, {2.0, 1.0}}), NumericalFailure);
}

TEST(MatrixOps, ShapeErrors) {
  EXPECT_THROW(Matrix(2, 3) * Matrix(2, 3), DimensionMismatch);
  EXPECT_THROW(Matrix(2, 2) + Matrix(3, 3), DimensionMismatch);
  EXPECT_THROW((Matrix{{1.0, 2.0}, {3.0}}), InvalidInput);
}
