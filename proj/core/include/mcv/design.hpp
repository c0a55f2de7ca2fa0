#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mcv/numkit.hpp"

namespace mcv {

/// r x k matrix with zero row sums; row l is the contrast h_l.
class ContrastMatrix {
public:
  const Matrix& h() const noexcept { return h_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  Eigen::Index rows() const noexcept { return h_.rows(); }
  Eigen::Index groups() const noexcept { return h_.cols(); }

  /// Same contrasts with columns reordered: column j of the result is
  /// column order[j] of this matrix.
  ContrastMatrix permuted_columns(const std::vector<std::size_t>& order) const;

private:
  friend ContrastMatrix validate_contrast(const Matrix&, std::vector<std::string>);
  ContrastMatrix(Matrix h, std::vector<std::string> labels);

  Matrix h_;
  std::vector<std::string> labels_;
};

/// Wraps h after checking |row sum| <= 1e-12 (relative to the row's
/// magnitude) and that no row is all zero. Missing labels become "h1", "h2", ...
ContrastMatrix validate_contrast(const Matrix& h, std::vector<std::string> labels = {});

/// P_k = I_k - J_k / k.
Matrix centering_matrix(Eigen::Index k);

/// P_k wrapped as a contrast family (the k-sample global hypothesis).
ContrastMatrix ksample_contrasts(Eigen::Index k);

/// All pairs (i < j): -1 at i, +1 at j. Labels read "<j>-<i>", the
/// difference the row estimates.
ContrastMatrix tukey_contrasts(Eigen::Index k, const std::vector<std::string>& names = {});

/// Many-to-one against the first group: -1 at 0, +1 at j.
ContrastMatrix dunnett_contrasts(Eigen::Index k, const std::vector<std::string>& names = {});

/// Crossed factorial layout. Subgroups are ordered lexicographically by
/// factor order with the last factor varying fastest, so a two-factor layout
/// (A with a levels, E with e levels) lists (A1,E1), (A1,E2), ..., (Aa,Ee).
struct Factor {
  std::string name;
  Eigen::Index levels = 0;
};

class FactorLayout {
public:
  explicit FactorLayout(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  Eigen::Index groups() const noexcept;

private:
  std::vector<Factor> factors_;
};

/// Kronecker product over the layout's factors: P_levels for factors in the
/// effect, (1/levels) 1' for the others. {A} gives the A main effect,
/// {A, E} the A x E interaction.
ContrastMatrix factorial_effect_matrix(const FactorLayout& layout,
                                       const std::vector<std::string>& effect);

}  // namespace mcv
