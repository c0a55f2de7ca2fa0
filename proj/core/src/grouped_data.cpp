#include "mcv/grouped_data.hpp"

#include <fmt/core.h>

namespace mcv {

GroupedData::GroupedData(const std::vector<Sample>& samples, std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  if (samples.size() < 2) throw InputError(fmt::format("need k >= 2 groups, got {}", samples.size()));
  const Eigen::Index d = samples.front().cols();
  if (d < 1) throw InputError("samples have no columns");
  Eigen::Index n = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].cols() != d)
      throw InputError(fmt::format("group {} has dimension {}, expected {}", i + 1, samples[i].cols(), d));
    if (samples[i].rows() < 2)
      throw InputError(fmt::format("group {} has {} observations, need at least 2", i + 1, samples[i].rows()));
    if (!samples[i].allFinite()) throw InputError(fmt::format("group {} has non-finite values", i + 1));
    offsets_.push_back(n);
    sizes_.push_back(samples[i].rows());
    n += samples[i].rows();
  }
  pooled_.resize(n, d);
  for (std::size_t i = 0; i < samples.size(); ++i) pooled_.middleRows(offsets_[i], sizes_[i]) = samples[i];

  if (labels_.empty()) {
    for (std::size_t i = 0; i < samples.size(); ++i) labels_.push_back(std::to_string(i + 1));
  } else if (labels_.size() != samples.size()) {
    throw InputError(fmt::format("{} labels given for {} groups", labels_.size(), samples.size()));
  }
}

std::string_view to_string(Quantity q) noexcept { return q == Quantity::c ? "C" : "B"; }

Quantity parse_quantity(std::string_view text) {
  if (text == "c" || text == "C") return Quantity::c;
  if (text == "b" || text == "B") return Quantity::b;
  throw InputError(fmt::format("unknown target '{}' (expected c or b)", text));
}

std::string to_string(Target t) {
  return fmt::format("{}^{}", to_string(t.quantity), to_string(t.variant));
}

}  // namespace mcv
