#include "mcv/design.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/core.h>

#include "mcv/error.hpp"

namespace mcv {

ContrastMatrix::ContrastMatrix(Matrix h, std::vector<std::string> labels)
    : h_(std::move(h)), labels_(std::move(labels)) {}

ContrastMatrix ContrastMatrix::permuted_columns(const std::vector<std::size_t>& order) const {
  if (static_cast<Eigen::Index>(order.size()) != h_.cols())
    throw InputError("permuted_columns: order length does not match the number of groups");
  Matrix out(h_.rows(), h_.cols());
  for (std::size_t j = 0; j < order.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = h_.col(static_cast<Eigen::Index>(order[j]));
  return ContrastMatrix(std::move(out), labels_);
}

ContrastMatrix validate_contrast(const Matrix& h, std::vector<std::string> labels) {
  if (h.rows() < 1 || h.cols() < 2)
    throw InputError(fmt::format("contrast matrix must have r >= 1 rows and k >= 2 columns, got {}x{}",
                                 h.rows(), h.cols()));
  if (!h.allFinite()) throw InputError("contrast matrix has non-finite entries");
  for (Eigen::Index l = 0; l < h.rows(); ++l) {
    const double scale = h.row(l).cwiseAbs().maxCoeff();
    if (scale == 0.0) throw InputError(fmt::format("contrast row {} is all zero", l + 1));
    const double sum = h.row(l).sum();
    if (std::abs(sum) > 1e-12 * std::max(1.0, scale))
      throw InputError(fmt::format("contrast row {} has nonzero row sum {:.3g}", l + 1, sum));
  }
  if (labels.empty()) {
    for (Eigen::Index l = 0; l < h.rows(); ++l) labels.push_back(fmt::format("h{}", l + 1));
  } else if (static_cast<Eigen::Index>(labels.size()) != h.rows()) {
    throw InputError(fmt::format("{} labels given for {} contrast rows", labels.size(), h.rows()));
  }
  return ContrastMatrix(h, std::move(labels));
}

Matrix centering_matrix(Eigen::Index k) {
  if (k < 2) throw InputError(fmt::format("centering matrix needs k >= 2, got {}", k));
  return Matrix::Identity(k, k) - Matrix::Constant(k, k, 1.0 / static_cast<double>(k));
}

namespace {

std::vector<std::string> group_names(Eigen::Index k, const std::vector<std::string>& names) {
  if (names.empty()) {
    std::vector<std::string> out;
    for (Eigen::Index i = 0; i < k; ++i) out.push_back(std::to_string(i + 1));
    return out;
  }
  if (static_cast<Eigen::Index>(names.size()) != k)
    throw InputError(fmt::format("{} group names given for k = {}", names.size(), k));
  return names;
}

}  // namespace

ContrastMatrix ksample_contrasts(Eigen::Index k) {
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < k; ++i) labels.push_back(fmt::format("P{}", i + 1));
  return validate_contrast(centering_matrix(k), std::move(labels));
}

ContrastMatrix tukey_contrasts(Eigen::Index k, const std::vector<std::string>& names) {
  if (k < 2) throw InputError(fmt::format("Tukey contrasts need k >= 2, got {}", k));
  const auto g = group_names(k, names);
  Matrix h = Matrix::Zero(k * (k - 1) / 2, k);
  std::vector<std::string> labels;
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j, ++row) {
      h(row, i) = -1;
      h(row, j) = 1;
      labels.push_back(g[static_cast<std::size_t>(j)] + "-" + g[static_cast<std::size_t>(i)]);
    }
  return validate_contrast(h, std::move(labels));
}

ContrastMatrix dunnett_contrasts(Eigen::Index k, const std::vector<std::string>& names) {
  if (k < 2) throw InputError(fmt::format("Dunnett contrasts need k >= 2, got {}", k));
  const auto g = group_names(k, names);
  Matrix h = Matrix::Zero(k - 1, k);
  std::vector<std::string> labels;
  for (Eigen::Index j = 1; j < k; ++j) {
    h(j - 1, 0) = -1;
    h(j - 1, j) = 1;
    labels.push_back(g[static_cast<std::size_t>(j)] + "-" + g[0]);
  }
  return validate_contrast(h, std::move(labels));
}

FactorLayout::FactorLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw InputError("factor layout needs at least one factor");
  std::set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.levels < 2)
      throw InputError(fmt::format("factor '{}' needs at least 2 levels, got {}", f.name, f.levels));
    if (!seen.insert(f.name).second) throw InputError(fmt::format("duplicate factor '{}'", f.name));
  }
}

Eigen::Index FactorLayout::groups() const noexcept {
  Eigen::Index k = 1;
  for (const auto& f : factors_) k *= f.levels;
  return k;
}

ContrastMatrix factorial_effect_matrix(const FactorLayout& layout,
                                       const std::vector<std::string>& effect) {
  if (effect.empty()) throw InputError("factorial effect must name at least one factor");
  std::set<std::string> wanted(effect.begin(), effect.end());
  for (const auto& name : wanted) {
    const bool known = std::any_of(layout.factors().begin(), layout.factors().end(),
                                   [&](const Factor& f) { return f.name == name; });
    if (!known) throw InputError(fmt::format("unknown factor '{}' in effect", name));
  }

  Matrix h = Matrix::Ones(1, 1);
  std::string label;
  for (const auto& f : layout.factors()) {
    if (wanted.count(f.name)) {
      h = kron(h, centering_matrix(f.levels));
      label += label.empty() ? f.name : "*" + f.name;
    } else {
      h = kron(h, Matrix::Constant(1, f.levels, 1.0 / static_cast<double>(f.levels)));
    }
  }
  std::vector<std::string> labels;
  for (Eigen::Index l = 0; l < h.rows(); ++l) labels.push_back(fmt::format("{}[{}]", label, l + 1));
  return validate_contrast(h, std::move(labels));
}

}  // namespace mcv
