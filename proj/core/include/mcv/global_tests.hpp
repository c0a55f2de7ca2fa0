#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mcv/design.hpp"
#include "mcv/grouped_data.hpp"

namespace mcv {

/// Per-group point estimates theta_i and the diagonal of
/// Sigma_hat = diag((n / n_i) sigma_i^2).
struct GroupEstimates {
  Vector theta;
  Vector sigma;

  Matrix covariance() const { return sigma.asDiagonal(); }
};

/// Throws DegenerateError naming the first group that fails the variant's
/// moment conditions.
GroupEstimates group_estimates(Target target, const GroupedData& data);

struct WaldStatistic {
  double statistic = 0;
  std::size_t rank = 0;  ///< numeric rank of H Sigma_hat H'
};

/// S = n (H theta)' (H Sigma_hat H')^+ (H theta).
WaldStatistic wald_statistic(const GroupEstimates& est, const Matrix& h, Eigen::Index n);
WaldStatistic wald_statistic(Target target, const GroupedData& data, const ContrastMatrix& h);

enum class Method { asymptotic, permutation, bootstrap };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view text);

/// How resampling procedures draw. Resample b always uses
/// RngStream(seed, b), so results do not depend on `threads`.
struct ResampleOptions {
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  ///< 0 = MCV_THREADS or hardware concurrency
};

struct TestResult {
  Target target;
  Method method = Method::asymptotic;
  double statistic = 0;
  std::size_t rank = 0;
  double p_value = 1;
  double alpha = 0.05;
  bool reject = false;  ///< p_value < alpha
  std::size_t resamples_used = 0;
  std::size_t resamples_degenerate = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

/// Chi-square calibration with rank(H Sigma_hat H') degrees of freedom.
TestResult asymptotic_test(Target target, const GroupedData& data, const ContrastMatrix& h,
                           double alpha);

/// Wald statistics recomputed on resampled data (rows drawn from the pooled
/// sample without replacement for permutation, with replacement for
/// bootstrap, then split into groups of the original sizes). Degenerate
/// resamples yield +inf.
std::vector<double> resampled_wald_statistics(Target target, const GroupedData& data,
                                              const ContrastMatrix& h, Method scheme,
                                              const ResampleOptions& options);

/// p = (1 + #{S* >= S_obs}) / (B + 1); reject iff p < alpha.
TestResult permutation_test(Target target, const GroupedData& data, const ContrastMatrix& h,
                            double alpha, const ResampleOptions& options);
TestResult bootstrap_test(Target target, const GroupedData& data, const ContrastMatrix& h,
                          double alpha, const ResampleOptions& options);

}  // namespace mcv
