#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcv/sim.hpp"

namespace mcv {

/// Grouped observations as read from CSV: a `group` column plus numeric
/// coordinate columns. Groups keep their order of first appearance.
struct DataFile {
  std::vector<std::string> columns;  ///< coordinate column names
  std::vector<std::string> groups;
  std::vector<Sample> samples;       ///< samples[i] belongs to groups[i]

  Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(columns.size()); }
  /// Throws InputError for fewer than two groups or groups with < 2 rows.
  GroupedData grouped() const;
};

DataFile parse_data_csv(std::istream& in, std::string_view source = "<input>");
DataFile read_data_csv(const std::filesystem::path& path);
void write_data_csv(std::ostream& out, const DataFile& data);

/// Numeric grid without header, one contrast per line.
Matrix parse_matrix_csv(std::istream& in, std::string_view source = "<input>");
Matrix read_matrix_csv(const std::filesystem::path& path);

/// "A=2,E=3" -> crossed layout with factors A (2 levels) and E (3 levels).
FactorLayout parse_factor_layout(std::string_view text);

/// ksample | tukey | dunnett | factorial:<A or A*E> | csv:<path>. Relative
/// csv paths are resolved against base_dir. Factorial specs need a layout
/// whose subgroup count equals k.
ContrastMatrix parse_contrast_spec(std::string_view spec, const std::vector<std::string>& group_names,
                                   const std::optional<FactorLayout>& layout = std::nullopt,
                                   const std::filesystem::path& base_dir = {});

/// Runs requested by a simulation config: a list of grid scenarios, or a
/// single run whose group moments mimic a data file.
struct SimulationPlan {
  std::vector<ScenarioConfig> scenarios;
  std::optional<MimicConfig> mimic;
};

/// `key = value` lines, `#` starts a comment. `preset = <name>` loads a named
/// configuration that the remaining keys override; `mimic_data = <csv>` with
/// `mimic_mode = size|power` builds a moment-mimicking run instead.
SimulationPlan parse_simulation_config(std::istream& in, const std::filesystem::path& base_dir = {},
                                       std::string_view source = "<config>");
SimulationPlan read_simulation_config(const std::filesystem::path& path);

/// Mean and covariance (divisor n - 1) of each group, or of the pooled data
/// for every group when pooled is set (null-hypothesis mimicry).
MimicConfig mimic_from_data(const DataFile& data, bool pooled, SimulationSettings settings);

/// Comma-separated list helpers shared by the config reader and the CLI.
std::vector<std::string> split_list(std::string_view text, char sep = ',');
std::vector<Variant> parse_variant_list(std::string_view text);  ///< accepts "all"
std::vector<Quantity> parse_quantity_list(std::string_view text);

}  // namespace mcv
