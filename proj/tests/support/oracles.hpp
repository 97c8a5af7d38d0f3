#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

// Test-only reference implementations, kept independent of the library's
// linear-algebra path so they can act as oracles for it.
namespace oracles {

inline constexpr double kZ975 = 1.959963984540054;  // Phi^-1(0.975)

inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

/// Ridge regression with unit ridge: solves (I + X'X) beta = X'y by
/// Gauss-Jordan elimination with partial pivoting on long double
/// accumulators. Brute force, no factorizations.
inline std::vector<double> ridge_unit(
    const std::vector<std::vector<double>>& rows,
    const std::vector<double>& y) {
  if (rows.size() != y.size() || rows.empty()) {
    throw std::invalid_argument("ridge_unit: shape mismatch");
  }
  const std::size_t d = rows.front().size();
  std::vector<std::vector<long double>> a(d,
                                          std::vector<long double>(d + 1, 0));
  for (std::size_t i = 0; i < d; ++i) a[i][i] = 1.0L;  // the ridge
  for (std::size_t n = 0; n < rows.size(); ++n) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        a[i][j] += static_cast<long double>(rows[n][i]) * rows[n][j];
      }
      a[i][d] += static_cast<long double>(rows[n][i]) * y[n];
    }
  }
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::fabs(static_cast<double>(a[r][col])) >
          std::fabs(static_cast<double>(a[pivot][col]))) {
        pivot = r;
      }
    }
    std::swap(a[col], a[pivot]);
    const long double diag = a[col][col];
    if (diag == 0.0L) throw std::runtime_error("ridge_unit: singular system");
    for (std::size_t j = col; j <= d; ++j) a[col][j] /= diag;
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const long double factor = a[r][col];
      for (std::size_t j = col; j <= d; ++j) a[r][j] -= factor * a[col][j];
    }
  }
  std::vector<double> beta(d);
  for (std::size_t i = 0; i < d; ++i) beta[i] = static_cast<double>(a[i][d]);
  return beta;
}

}  // namespace oracles
