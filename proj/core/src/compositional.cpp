#include "mcv/compositional.hpp"

#include <cmath>

#include <fmt/core.h>

#include "mcv/error.hpp"

namespace mcv {

Matrix ilr(const Matrix& compositions) {
  const Eigen::Index parts = compositions.cols();
  if (parts < 2) throw InputError(fmt::format("ilr needs at least 2 parts, got {}", parts));
  Matrix out(compositions.rows(), parts - 1);
  for (Eigen::Index r = 0; r < compositions.rows(); ++r) {
    for (Eigen::Index c = 0; c < parts; ++c) {
      const double x = compositions(r, c);
      if (!std::isfinite(x) || x <= 0)
        throw InputError(fmt::format("ilr: row {} column {} is not strictly positive ({})", r + 1, c + 1, x));
    }
    const double total = compositions.row(r).sum();
    double log_sum = 0;  // running sum of ln x_1..x_j
    for (Eigen::Index j = 1; j < parts; ++j) {
      log_sum += std::log(compositions(r, j - 1) / total);
      const double jd = static_cast<double>(j);
      out(r, j - 1) = std::sqrt(jd / (jd + 1.0)) * (log_sum / jd - std::log(compositions(r, j) / total));
    }
  }
  return out;
}

}  // namespace mcv
