#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcv/io.hpp"

namespace mcv::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitDegenerate = 3;

struct EstimateOptions {
  std::filesystem::path data;
  std::vector<Variant> variants{kAllVariants.begin(), kAllVariants.end()};
  double alpha = 0.05;
};

struct TestOptions {
  std::filesystem::path data;
  std::vector<Variant> variants{Variant::vv};
  std::vector<Quantity> quantities{Quantity::c};
  std::string contrasts = "ksample";
  std::optional<std::string> factors;
  Method method = Method::permutation;
  double alpha = 0.05;
  std::size_t resamples = 1000;
  std::size_t mc_draws = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// Per-group estimates, variances and one-sample intervals. A single group is
/// allowed. Degenerate groups raise DegenerateError naming the group.
json cmd_estimate(const EstimateOptions& opt);
/// Global Wald-type test for every requested (variant, target).
json cmd_test(const TestOptions& opt);
/// Multiple contrast test with simultaneous intervals; method is asymptotic
/// or bootstrap.
json cmd_mct(const TestOptions& opt);

struct SimulateOutput {
  json report;
  std::string csv;
};

/// Runs every scenario of a config file; threads > 0 overrides the config.
SimulateOutput cmd_simulate(const std::filesystem::path& config, unsigned threads = 0);

DataFile cmd_ilr(const std::filesystem::path& data);

/// Wide table: one row per MCV variant (C^RR, ...), one column per group.
void write_estimate_table(std::ostream& out, const json& report);
/// comparison, variant, target, method, estimate, lower, upper, significant.
void write_mct_table(std::ostream& out, const json& report);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcv::cli
