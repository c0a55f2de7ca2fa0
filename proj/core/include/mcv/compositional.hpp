#pragma once

#include "mcv/numkit.hpp"

namespace mcv {

/// Isometric log-ratio coordinates in the balance basis
/// z_j = sqrt(j / (j + 1)) ln(gm(x_1..x_j) / x_{j+1}), j = 1..D-1.
/// Rows are closed to sum 1 first (the coordinates are scale invariant).
/// Throws InputError on nonpositive or non-finite entries or D < 2.
Matrix ilr(const Matrix& compositions);

}  // namespace mcv
