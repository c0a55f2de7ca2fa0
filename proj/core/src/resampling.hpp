#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mcv/global_tests.hpp"
#include "mcv/rng.hpp"

namespace mcv::detail {

/// Shuffle (without replacement) or draw with replacement n pooled row
/// indices; consecutive blocks of the result form the resampled groups.
void draw_rows(Method scheme, Eigen::Index n, RngStream& rng, std::vector<Eigen::Index>& rows);

/// Group estimates for the rows selected by `rows` (blocks of data.sizes()).
/// Returns nullopt when any group is degenerate, including a zero variance.
std::optional<GroupEstimates> estimates_for_rows(Target target, const GroupedData& data,
                                                 std::span<const Eigen::Index> rows,
                                                 Matrix& scratch);

/// Per-group fit on the original grouping, or the first failure.
struct GroupFit {
  std::optional<GroupEstimates> estimates;
  Eigen::Index failed_group = -1;
  Degeneracy reason = Degeneracy::zero_mean;
};
GroupFit fit_groups(Target target, const GroupedData& data);

double to_target(Quantity q, double c) noexcept;
double variance_to_target(Quantity q, double c, double var_c) noexcept;

}  // namespace mcv::detail
