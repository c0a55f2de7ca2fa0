#include "mcv/error.hpp"

namespace mcv {

const char* describe(Degeneracy reason) noexcept {
  switch (reason) {
    case Degeneracy::zero_mean: return "mean vector zero";
    case Degeneracy::singular_covariance: return "covariance matrix singular";
    case Degeneracy::zero_trace: return "covariance matrix zero";
    case Degeneracy::zero_quadratic_form: return "quadratic form m'Sm is zero";
    case Degeneracy::negative_variance: return "numerically inconsistent moments (negative variance)";
    case Degeneracy::zero_variance: return "asymptotic variance zero";
    case Degeneracy::too_few_observations: return "too few observations";
  }
  return "degenerate data";
}

namespace {
std::string message(Degeneracy reason, const std::string& context) {
  std::string out = describe(reason);
  if (!context.empty()) out = context + ": " + out;
  return out;
}
}  // namespace

DegenerateError::DegenerateError(Degeneracy reason, const std::string& context)
    : Error(message(reason, context)), reason_(reason) {}

}  // namespace mcv
