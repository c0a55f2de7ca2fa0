#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcv/error.hpp"
#include "mcv/numkit.hpp"

namespace mcv {

/// n x d observation matrix, one observation per row.
using Sample = Matrix;

/// The four multivariate coefficient of variation definitions:
///   RR  sqrt(det(S)^(1/d) / m'm)    Reyment
///   VV  sqrt(tr(S) / m'm)           Van Valen
///   VN  sqrt(1 / m' S^-1 m)         Voinov-Nikulin
///   AZ  sqrt(m' S m / (m'm)^2)      Albert-Zhang
/// All reduce to sigma/mu for d = 1.
enum class Variant { rr, vv, vn, az };

inline constexpr std::array<Variant, 4> kAllVariants{Variant::rr, Variant::vv, Variant::vn,
                                                     Variant::az};

std::string_view to_string(Variant v) noexcept;
/// Accepts rr/vv/vn/az in any case.
Variant parse_variant(std::string_view text);

/// Plug-in moments of one sample. All sums use divisor n.
///
/// psi3 is d^2 x d with psi3(a*d + r, s) = mean(x_a x_r x_s) - mean(x_a x_r) mean(x_s);
/// psi4 is d^2 x d^2 with psi4(a*d + r, b*d + s) =
///   mean(x_a x_r x_b x_s) - mean(x_a x_r) mean(x_b x_s).
/// Together with cov they form the covariance matrix of (x, vec(x x')).
struct MomentSet {
  Vector mean;
  Matrix cov;
  Matrix raw2;
  Matrix psi3;
  Matrix psi4;
  std::size_t n = 0;
};

struct EstimateResult {
  Variant variant{};
  double c = 0;      ///< MCV estimate
  double b = 0;      ///< standardized mean, 1 / c
  double var_c = 0;  ///< asymptotic variance of sqrt(n)(c_hat - c)
  double var_b = 0;  ///< var_c / c^4
  std::size_t n = 0;
  std::vector<std::string> warnings;
};

struct Interval {
  double lower = 0;
  double upper = 0;

  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

struct OneSampleCi {
  Interval c;
  Interval b;
};

struct VarianceEstimate {
  double var_c = 0;
  double var_b = 0;
};

MomentSet sample_moments(const Sample& x);

/// d^2 x d matrix with entry (a*d + r, s) =
///   -x_r [s = a != r] - 2 x_s [s = r = a] - x_a [r = s != a],
/// i.e. the derivative of vec(S) in the mean when raw moments are held fixed.
Matrix dtilde(const Vector& x);

/// MCV value for the given mean and covariance. Throws DegenerateError when
/// the variant's moment conditions fail.
double mcv(Variant variant, const Vector& mean, const Matrix& cov);

/// Row vector (mean block | second-moment block) of length d + d^2 whose
/// quadratic form with the (x, vec(x x')) covariance gives the delta-method
/// variance up to the factor s_factor / 4. Literal closed forms per variant.
RowVector a_matrix(Variant variant, const Vector& mean, const Matrix& cov);

/// RR: d^-2 c^(2 - 4d); VV, AZ: c^-2; VN: c^6.
double s_factor(Variant variant, double c, Eigen::Index d);

/// Gradient of the MCV with respect to (mean, vec(raw second moments)),
/// computed from closed forms that avoid forming det(S) explicitly.
RowVector mcv_gradient(Variant variant, const Vector& mean, const Matrix& cov);

/// Delta-method variance from a moment set. Values in [-1e-10, 0) clamp to
/// zero; below that DegenerateError(negative_variance) is thrown.
VarianceEstimate asymptotic_variance(Variant variant, const MomentSet& m);

EstimateResult estimate(Variant variant, const Sample& x);

/// Wald intervals c_hat +- z sigma_c / sqrt(n) and likewise for b.
OneSampleCi one_sample_ci(Variant variant, const Sample& x, double alpha);

/// Estimate and variance without exceptions, for resampling loops.
///
/// The variance is the empirical variance of the influence values
/// g'(x_j, vec(x_j x_j')) with g = mcv_gradient, which equals the
/// moment-set quadratic form at a fraction of the cost.
struct Fit {
  double c = 0;
  double var_c = 0;
  std::optional<Degeneracy> failure;

  bool ok() const noexcept { return !failure.has_value(); }
};

Fit fit_mcv(Variant variant, const Eigen::Ref<const Matrix>& x);

}  // namespace mcv
