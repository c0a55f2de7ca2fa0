#pragma once

#include <cmath>
#include <random>

#include "mcv/sim.hpp"

namespace mcv::testing {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  std::normal_distribution<double> z;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = z(rng);
  return m;
}

inline Vector random_vector(Eigen::Index d, RngStream& rng) { return random_matrix(d, 1, rng); }

/// Well-conditioned SPD matrix: G G' / d + 0.5 I.
inline Matrix random_spd(Eigen::Index d, RngStream& rng) {
  const Matrix g = random_matrix(d, d, rng);
  return g * g.transpose() / static_cast<double>(d) + 0.5 * Matrix::Identity(d, d);
}

inline Sample normal_sample(const Vector& mu, const Matrix& sigma, Eigen::Index n, RngStream& rng) {
  return generate_sample(Distribution::normal, mu, sigma, n, rng);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Kolmogorov distance between a sample and a continuous CDF.
template <class Cdf>
double ks_distance(std::vector<double> x, Cdf&& cdf) {
  std::sort(x.begin(), x.end());
  const double m = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

}  // namespace mcv::testing
