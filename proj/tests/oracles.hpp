#pragma once

// Independent reference computations used by the unit and acceptance tests.
// They deliberately use textbook formulas (general determinant and inverse,
// no symmetry shortcuts) so they do not share code paths with the library.

#include <cmath>

#include "mcv/estimation.hpp"

namespace mcv::oracle {

/// MCV as a function of the mean and the (possibly unsymmetric) covariance.
inline double phi(Variant v, const Vector& mu, const Matrix& cov) {
  const double q = mu.squaredNorm();
  const auto d = static_cast<double>(mu.size());
  switch (v) {
    case Variant::rr: return std::sqrt(std::pow(cov.determinant(), 1.0 / d) / q);
    case Variant::vv: return std::sqrt(cov.trace() / q);
    case Variant::vn: return std::sqrt(1.0 / mu.dot(cov.inverse() * mu));
    case Variant::az: return std::sqrt(mu.dot(cov * mu) / (q * q));
  }
  return NAN;
}

/// g(mu, M2) = phi(mu, M2 - mu mu'), the MCV in terms of first and raw
/// second moments. Argument layout: (mu, vec(M2)) with vec index a*d + r.
inline double g(Variant v, const Vector& theta, Eigen::Index d) {
  const Vector mu = theta.head(d);
  Matrix m2(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index r = 0; r < d; ++r) m2(a, r) = theta(d + a * d + r);
  return phi(v, mu, m2 - mu * mu.transpose());
}

/// Central finite-difference gradient of g at (mu, vec(cov + mu mu')).
inline RowVector fd_gradient(Variant v, const Vector& mu, const Matrix& cov, double rel_step = 1e-6) {
  const Eigen::Index d = mu.size();
  Vector theta(d + d * d);
  theta.head(d) = mu;
  const Matrix m2 = cov + mu * mu.transpose();
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index r = 0; r < d; ++r) theta(d + a * d + r) = m2(a, r);
  const double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());
  const double h = rel_step * scale;
  RowVector grad(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    Vector up = theta, down = theta;
    up(j) += h;
    down(j) -= h;
    grad(j) = (g(v, up, d) - g(v, down, d)) / (2 * h);
  }
  return grad;
}

/// Covariance of (x, vec(x x')) for x ~ N(mu, cov), from Isserlis' theorem.
inline Matrix gaussian_moment_covariance(const Vector& mu, const Matrix& s) {
  const Eigen::Index d = mu.size();
  Matrix out(d + d * d, d + d * d);
  out.topLeftCorner(d, d) = s;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index r = 0; r < d; ++r) {
      const Eigen::Index i = d + a * d + r;
      for (Eigen::Index c = 0; c < d; ++c) {
        const double v = mu(a) * s(r, c) + mu(r) * s(a, c);
        out(i, c) = v;
        out(c, i) = v;
      }
      for (Eigen::Index b = 0; b < d; ++b)
        for (Eigen::Index t = 0; t < d; ++t) {
          out(i, d + b * d + t) = s(a, b) * s(r, t) + s(a, t) * s(r, b) + mu(a) * mu(b) * s(r, t) +
                                  mu(a) * mu(t) * s(r, b) + mu(r) * mu(b) * s(a, t) + mu(r) * mu(t) * s(a, b);
        }
    }
  return out;
}

/// Delta-method variance of sqrt(n)(c_hat - c) at the true Gaussian moments.
inline double gaussian_mcv_variance(Variant v, const Vector& mu, const Matrix& cov) {
  const RowVector grad = fd_gradient(v, mu, cov);
  return (grad * gaussian_moment_covariance(mu, cov) * grad.transpose())(0, 0);
}

/// Univariate CV s/m (divisor n) and its delta-method variance in (m, E X^2).
struct UnivariateCv {
  double c;
  double var_c;
};

inline UnivariateCv univariate_cv(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    m1 += v / n;
    m2 += v * v / n;
    m3 += v * v * v / n;
    m4 += v * v * v * v / n;
  }
  const double s = std::sqrt(m2 - m1 * m1);
  const double dm = -1.0 / s - s / (m1 * m1);  // d(s/m)/dm with E X^2 fixed
  const double dm2 = 1.0 / (2.0 * s * m1);     // d(s/m)/dE X^2
  const double v11 = m2 - m1 * m1, v12 = m3 - m1 * m2, v22 = m4 - m2 * m2;
  return {s / m1, dm * dm * v11 + 2 * dm * dm2 * v12 + dm2 * dm2 * v22};
}

}  // namespace mcv::oracle
