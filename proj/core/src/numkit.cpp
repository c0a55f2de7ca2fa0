#include "mcv/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <fmt/core.h>

#include "mcv/error.hpp"

namespace mcv {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector vec(const Matrix& a) {
  if (a.rows() != a.cols())
    throw InputError(fmt::format("vec: expected a square matrix, got {}x{}", a.rows(), a.cols()));
  const Eigen::Index d = a.rows();
  Vector out(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index r = 0; r < d; ++r) out(i * d + r) = a(i, r);
  return out;
}

Matrix unvec(const Vector& v) {
  const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size())
    throw InputError(fmt::format("unvec: length {} is not a perfect square", v.size()));
  Matrix out(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index r = 0; r < d; ++r) out(i, r) = v(i * d + r);
  return out;
}

namespace {

double rank_threshold(const Vector& singular, Eigen::Index rows, Eigen::Index cols, double tol) {
  const double largest = singular.size() > 0 ? singular.maxCoeff() : 0.0;
  return tol * largest * static_cast<double>(std::max(rows, cols));
}

}  // namespace

Matrix pinv(const Matrix& a, double tol) {
  if (a.size() == 0) return Matrix(a.cols(), a.rows());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cut = rank_threshold(s, a.rows(), a.cols(), tol);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

std::size_t numeric_rank(const Matrix& a, double tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  const double cut = rank_threshold(s, a.rows(), a.cols(), tol);
  return static_cast<std::size_t>((s.array() > cut).count());
}

Matrix sym_sqrt(const Matrix& a, double tol) {
  if (a.rows() != a.cols())
    throw InputError(fmt::format("sym_sqrt: expected a square matrix, got {}x{}", a.rows(), a.cols()));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  if (eig.info() != Eigen::Success) throw InputError("sym_sqrt: eigendecomposition failed");
  Vector lambda = eig.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -tol * scale)
      throw InputError(fmt::format("sym_sqrt: matrix is not positive semidefinite (eigenvalue {:.3g})",
                                   lambda(i)));
    lambda(i) = lambda(i) > 0 ? std::sqrt(lambda(i)) : 0.0;
  }
  const Matrix& v = eig.eigenvectors();
  Matrix out = v * lambda.asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

double normal_cdf(double x) {
  return boost::math::cdf(boost::math::normal_distribution<double>(), x);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw InputError(fmt::format("normal_quantile: probability {} outside (0, 1)", p));
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double chisq_cdf(double x, double df) {
  if (x <= 0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(df / 2.0, x / 2.0);
}

double chisq_sf(double x, double df) {
  if (x <= 0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

double chisq_quantile(double p, double df) {
  if (!(p >= 0.0 && p < 1.0))
    throw InputError(fmt::format("chisq_quantile: probability {} outside [0, 1)", p));
  if (!(df >= 1.0)) throw InputError(fmt::format("chisq_quantile: degrees of freedom {} < 1", df));
  if (p == 0.0) return 0.0;
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), p);
}

double upper_order_statistic(std::vector<double> values, double alpha) {
  const auto m = values.size();
  // The small offset keeps (m + 1)(1 - alpha) from rounding up past an exact integer.
  const double position = std::ceil(static_cast<double>(m + 1) * (1.0 - alpha) - 1e-9);
  if (position > static_cast<double>(m) || m == 0) return std::numeric_limits<double>::infinity();
  const auto k = static_cast<std::size_t>(std::max(1.0, position)) - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  return values[k];
}

MaxAbsNormalSample::MaxAbsNormalSample(const Matrix& correlation, std::size_t draws,
                                       RngStream& rng) {
  if (correlation.rows() != correlation.cols() || correlation.rows() == 0)
    throw InputError("equicoordinate quantile: correlation matrix must be square and nonempty");
  const Matrix root = sym_sqrt(correlation);
  const Eigen::Index r = correlation.rows();
  std::normal_distribution<double> normal;
  Vector z(r);
  values_.resize(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    for (Eigen::Index l = 0; l < r; ++l) z(l) = normal(rng);
    values_[i] = (root * z).cwiseAbs().maxCoeff();
  }
  std::sort(values_.begin(), values_.end());
}

double MaxAbsNormalSample::quantile(double alpha) const {
  const auto m = values_.size();
  const double position = std::ceil(static_cast<double>(m + 1) * (1.0 - alpha) - 1e-9);
  if (position > static_cast<double>(m) || m == 0) return std::numeric_limits<double>::infinity();
  return values_[static_cast<std::size_t>(std::max(1.0, position)) - 1];
}

double MaxAbsNormalSample::exceedance(double x) const {
  if (values_.empty()) return 1.0;
  const auto first = std::lower_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(values_.end() - first) / static_cast<double>(values_.size());
}

double mvn_equicoordinate_quantile(const Matrix& correlation, double alpha, std::size_t draws,
                                   RngStream& rng) {
  if (draws < 10000)
    throw InputError(fmt::format("equicoordinate quantile: need at least 10^4 draws, got {}", draws));
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw InputError(fmt::format("equicoordinate quantile: alpha {} outside [0, 1)", alpha));
  return MaxAbsNormalSample(correlation, draws, rng).quantile(alpha);
}

}  // namespace mcv
