#pragma once

#include <stdexcept>
#include <string>

namespace mcv {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, parse failures, invalid arguments.
class InputError : public Error {
public:
  using Error::Error;
};

/// Why a set of moments cannot support an MCV estimate.
enum class Degeneracy {
  zero_mean,
  singular_covariance,
  zero_trace,
  zero_quadratic_form,
  negative_variance,
  zero_variance,
  too_few_observations,
};

const char* describe(Degeneracy reason) noexcept;

/// The data violate the moment conditions an MCV variant needs
/// (nonzero mean, regular or nonzero covariance, ...).
class DegenerateError : public Error {
public:
  DegenerateError(Degeneracy reason, const std::string& context = {});

  Degeneracy reason() const noexcept { return reason_; }

private:
  Degeneracy reason_;
};

}  // namespace mcv
