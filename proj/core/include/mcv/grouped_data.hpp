#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mcv/estimation.hpp"

namespace mcv {

/// k independent samples of d-dimensional observations, stored as one pooled
/// n x d matrix with the groups in consecutive row blocks.
class GroupedData {
public:
  /// Requires k >= 2 samples of equal dimension, each with at least two rows.
  /// Missing labels become "1", "2", ...
  explicit GroupedData(const std::vector<Sample>& samples, std::vector<std::string> labels = {});

  Eigen::Index groups() const noexcept { return static_cast<Eigen::Index>(sizes_.size()); }
  Eigen::Index dim() const noexcept { return pooled_.cols(); }
  Eigen::Index total() const noexcept { return pooled_.rows(); }
  Eigen::Index size(Eigen::Index i) const { return sizes_.at(static_cast<std::size_t>(i)); }
  Eigen::Index offset(Eigen::Index i) const { return offsets_.at(static_cast<std::size_t>(i)); }
  const std::vector<Eigen::Index>& sizes() const noexcept { return sizes_; }

  const Matrix& pooled() const noexcept { return pooled_; }
  Sample sample(Eigen::Index i) const { return pooled_.middleRows(offset(i), size(i)); }

  const std::vector<std::string>& labels() const noexcept { return labels_; }

private:
  Matrix pooled_;
  std::vector<Eigen::Index> sizes_;
  std::vector<Eigen::Index> offsets_;
  std::vector<std::string> labels_;
};

/// Whether inference targets the MCV itself (C) or its reciprocal, the
/// standardized mean (B).
enum class Quantity { c, b };

struct Target {
  Quantity quantity = Quantity::c;
  Variant variant = Variant::vv;
};

std::string_view to_string(Quantity q) noexcept;
Quantity parse_quantity(std::string_view text);
/// e.g. "C^VV", "B^RR".
std::string to_string(Target t);

}  // namespace mcv
