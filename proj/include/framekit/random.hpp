#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "framekit/matrix.hpp"

namespace framekit {

/// Seedable source with a fully specified output sequence:
///   - raw 64-bit words from std::mt19937_64 seeded with `seed`;
///   - uniform(): top 53 bits of one word times 2^-53, in [0, 1);
///   - gaussian(): Box-Muller on (1 - u1, u2), the cosine branch first and the
///     sine branch cached for the next call;
///   - complex_gaussian(): real and imaginary parts gaussian() / sqrt(2), in that order.
/// std::*_distribution is avoided because its output is library-dependent.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_word() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    cached_ = true;
    return radius * std::cos(angle);
  }

  Complex complex_gaussian() {
    const double re = gaussian() * std::numbers::sqrt2 / 2.0;
    const double im = gaussian() * std::numbers::sqrt2 / 2.0;
    return {re, im};
  }

  Vector complex_gaussian_vector(std::size_t n) {
    Vector v(n);
    for (auto& z : v) z = complex_gaussian();
    return v;
  }

  Matrix complex_gaussian_matrix(std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = complex_gaussian();
    return m;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool cached_ = false;
};

}  // namespace framekit
