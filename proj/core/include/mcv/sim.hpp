#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mcv/multiple_tests.hpp"

namespace mcv {

/// Innovation laws, each standardized to mean 0 and variance 1:
/// N(0, 1), t_5 / sqrt(5/3), (chi2_10 - 10) / sqrt(20).
enum class Distribution { normal, student5, chisq10 };

std::string_view to_string(Distribution d) noexcept;
Distribution parse_distribution(std::string_view text);

enum class TestKind { wald_asymptotic, wald_permutation, wald_bootstrap, mct_asymptotic, mct_bootstrap };

std::string_view to_string(TestKind t) noexcept;
/// wald-asym, wald-perm, wald-boot, mct-asym, mct-boot.
TestKind parse_test_kind(std::string_view text);

enum class ContrastFamily { ksample, tukey, dunnett };

std::string_view to_string(ContrastFamily f) noexcept;
ContrastFamily parse_contrast_family(std::string_view text);
ContrastMatrix make_contrasts(ContrastFamily family, Eigen::Index k);

/// Settings shared by size/power scenarios and moment-mimicking runs.
struct SimulationSettings {
  std::string name = "scenario";
  Distribution distribution = Distribution::normal;
  std::vector<Variant> variants{Variant::vv};
  std::vector<Quantity> quantities{Quantity::c};
  std::vector<TestKind> tests{TestKind::wald_permutation};
  ContrastFamily wald_contrasts = ContrastFamily::ksample;
  ContrastFamily mct_contrasts = ContrastFamily::tukey;
  double alpha = 0.05;
  std::size_t replicates = 1000;
  std::size_t resamples = 500;
  std::size_t mc_draws = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  ///< execution only; never affects results
};

/// One cell of the size/power grid: k groups sharing mean mu, covariance
/// a_i^v ((1 - rho) I + rho 11') rescaled so group i's MCV of variant v
/// equals targets[i].
struct ScenarioConfig {
  SimulationSettings settings;
  Eigen::Index d = 5;
  std::vector<Eigen::Index> n;
  double rho = 0.1;
  Vector mu;
  std::vector<double> targets;

  Eigen::Index groups() const noexcept { return static_cast<Eigen::Index>(n.size()); }
  /// Throws InputError describing the first invalid field.
  void validate() const;
};

struct GroupModel {
  Vector mu;
  Matrix sigma;
  Eigen::Index n = 0;
};

/// Heterogeneous per-group moments, e.g. taken from a real data set.
struct MimicConfig {
  SimulationSettings settings;
  std::vector<GroupModel> groups;

  void validate() const;
};

/// Aggregate for one (variant, target, test) combination.
struct ScenarioRow {
  Variant variant{};
  Quantity quantity{};
  TestKind test{};
  std::size_t replicates = 0;
  std::size_t valid = 0;  ///< replicates whose observed statistic was computable
  std::size_t rejections = 0;
  double proportion = 0;
  Interval band95;
  Interval band99;
  bool in_band95 = false;
  bool in_band99 = false;
  std::size_t degenerate_observed = 0;
  std::size_t degenerate_resamples = 0;
};

struct ScenarioResult {
  std::string name;
  Eigen::Index k = 0;
  Eigen::Index d = 0;
  std::vector<Eigen::Index> n;
  std::string distribution;
  std::string rho;      ///< "-" for moment-mimicking runs
  std::string targets;  ///< ";"-joined, "-" for moment-mimicking runs
  double alpha = 0.05;
  std::vector<ScenarioRow> rows;
  double wall_seconds = 0;

  const ScenarioRow& row(Variant v, Quantity q, TestKind t) const;
};

/// (1 - rho) I_d + rho 1 1'; requires -1/(d-1) < rho < 1.
Matrix compound_symmetric(Eigen::Index d, double rho);

/// a * sigma with a = (target / mcv(variant, mu, sigma))^2.
Matrix scale_to_target(Variant variant, const Vector& mu, const Matrix& sigma, double target);

/// n x d standardized innovations of the given law.
Matrix innovations(Distribution dist, Eigen::Index n, Eigen::Index d, RngStream& rng);

/// Rows mu + sigma^(1/2) z_j with standardized i.i.d. coordinates z_j.
Sample generate_sample(Distribution dist, const Vector& mu, const Matrix& sigma, Eigen::Index n,
                       RngStream& rng);

/// Two-sided binomial band alpha -+ z sqrt(alpha (1 - alpha) / m), rounded
/// outward to 0.1 percentage points (gives [3.6%, 6.4%] and [3.2%, 6.8%]
/// for alpha = 5%, m = 1000).
Interval binomial_band(double alpha, std::size_t m, double level);

/// Seed of the fixed mean vector shared by the named grid presets.
inline constexpr std::uint64_t kGridMeanSeed = 20230607;
/// d standard normal draws from RngStream(seed, 0).
Vector grid_mean(Eigen::Index d, std::uint64_t seed = kGridMeanSeed);

/// Replicate r draws its data from RngStream(seed, r); the resamples of the
/// test in slot s use seeds derive_seed(derive_seed(seed, r), s).
ScenarioResult run_scenario(const ScenarioConfig& cfg);
ScenarioResult run_moment_mimic(const MimicConfig& cfg);

/// Named configurations: smoke, paper-size-small, paper-power-small,
/// paper-size-nightly, paper-power-nightly, paper-full (270 cells).
std::vector<ScenarioConfig> preset(std::string_view name);
std::vector<std::string> preset_names();

/// Tidy CSV, one row per scenario x variant x target x test. Contains no
/// timing so reruns with the same seed are byte-identical.
void write_tidy_csv(std::ostream& out, const std::vector<ScenarioResult>& results);

}  // namespace mcv
