#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "mcv/rng.hpp"

namespace mcv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Kronecker product: block (i, j) of the result is a(i, j) * b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Stacks a square d x d matrix into a d^2 vector; entry a*d + r holds
/// A(a, r) (zero-based). Throws InputError for non-square input.
Vector vec(const Matrix& a);

/// Inverse of vec for a length-d^2 vector.
Matrix unvec(const Vector& v);

/// Moore-Penrose inverse via SVD. Singular values at or below
/// tol * sigma_max * max(rows, cols) are treated as zero.
Matrix pinv(const Matrix& a, double tol = kEps);

/// Number of singular values above tol * sigma_max * max(rows, cols).
std::size_t numeric_rank(const Matrix& a, double tol = kEps);

/// Symmetric square root of a symmetric PSD matrix. Eigenvalues in
/// [-tol * max(1, lambda_max), 0) are clamped to zero; anything more
/// negative throws InputError.
Matrix sym_sqrt(const Matrix& a, double tol = 1e-10);

double normal_cdf(double x);
double normal_quantile(double p);

double chisq_cdf(double x, double df);
/// Upper tail 1 - F(x), computed without cancellation.
double chisq_sf(double x, double df);
/// x with F_df(x) = p for p in [0, 1); throws InputError otherwise.
double chisq_quantile(double p, double df);

/// Sorted Monte Carlo sample of max_l |Z_l| for Z ~ N(0, R).
///
/// Holding on to the sample lets the quantile for several alpha levels and
/// the exceedance probability of an observed maximum come from one shared
/// draw set.
class MaxAbsNormalSample {
public:
  MaxAbsNormalSample(const Matrix& correlation, std::size_t draws, RngStream& rng);

  /// The ceil((draws + 1)(1 - alpha))-th order statistic; +inf when that
  /// index exceeds the number of draws.
  double quantile(double alpha) const;

  /// Fraction of draws with max |Z| >= x.
  double exceedance(double x) const;

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }

private:
  std::vector<double> values_;
};

/// Equicoordinate two-sided (1 - alpha) quantile of N(0, R) by plain Monte
/// Carlo. Requires draws >= 10^4.
double mvn_equicoordinate_quantile(const Matrix& correlation, double alpha,
                                   std::size_t draws, RngStream& rng);

/// The k-th (1-based) order statistic of a sample, k = ceil((m + 1)(1 - alpha)),
/// or +inf when k > m. The input need not be sorted.
double upper_order_statistic(std::vector<double> values, double alpha);

}  // namespace mcv
