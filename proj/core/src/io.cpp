#include "mcv/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <fmt/core.h>
#include <fmt/format.h>

namespace mcv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits one CSV record; double quotes protect separators, "" is a literal quote.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.emplace_back(trim(field));
  return out;
}

double parse_number(std::string_view text, std::string_view where) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
    throw InputError(fmt::format("{}: '{}' is not a finite number", where, text));
  return value;
}

long long parse_integer(std::string_view text, std::string_view where) {
  text = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw InputError(fmt::format("{}: '{}' is not an integer", where, text));
  return value;
}

std::size_t parse_count(std::string_view text, std::string_view where) {
  const long long v = parse_integer(text, where);
  if (v < 0) throw InputError(fmt::format("{}: {} must not be negative", where, v));
  return static_cast<std::size_t>(v);
}

bool blank_or_comment(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

}  // namespace

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(sep, start), text.size());
    const auto item = trim(text.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

std::vector<Variant> parse_variant_list(std::string_view text) {
  if (trim(text) == "all") return {kAllVariants.begin(), kAllVariants.end()};
  std::vector<Variant> out;
  for (const auto& item : split_list(text)) {
    const Variant v = parse_variant(item);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  if (out.empty()) throw InputError("empty variant list");
  return out;
}

std::vector<Quantity> parse_quantity_list(std::string_view text) {
  std::vector<Quantity> out;
  for (const auto& item : split_list(text)) {
    const Quantity q = parse_quantity(item);
    if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
  }
  if (out.empty()) throw InputError("empty target list");
  return out;
}

GroupedData DataFile::grouped() const {
  if (samples.size() < 2)
    throw InputError(fmt::format("need at least 2 groups, found {}", samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].rows() < 2)
      throw InputError(fmt::format("group '{}' has {} observation(s); at least 2 required", groups[i],
                                   samples[i].rows()));
  return GroupedData(samples, groups);
}

DataFile parse_data_csv(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    header = split_record(line);
    break;
  }
  if (header.empty()) throw InputError(fmt::format("{}: no header row", source));
  const auto group_it = std::find(header.begin(), header.end(), "group");
  if (group_it == header.end()) throw InputError(fmt::format("{}: header lacks a 'group' column", source));
  const auto group_col = static_cast<std::size_t>(group_it - header.begin());

  DataFile data;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != group_col) data.columns.push_back(header[c]);
  if (data.columns.empty()) throw InputError(fmt::format("{}: no numeric columns", source));

  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::vector<double>>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    const auto fields = split_record(line);
    const std::string where = fmt::format("{}:{}", source, line_no);
    if (fields.size() != header.size())
      throw InputError(fmt::format("{}: expected {} fields, found {}", where, header.size(), fields.size()));
    const std::string& label = fields[group_col];
    if (label.empty()) throw InputError(fmt::format("{}: empty group label", where));
    auto [it, inserted] = index.try_emplace(label, data.groups.size());
    if (inserted) {
      data.groups.push_back(label);
      rows.emplace_back();
    }
    std::vector<double> obs;
    for (std::size_t c = 0; c < fields.size(); ++c)
      if (c != group_col) obs.push_back(parse_number(fields[c], where));
    rows[it->second].push_back(std::move(obs));
  }
  if (data.groups.empty()) throw InputError(fmt::format("{}: no data rows", source));

  const auto d = static_cast<Eigen::Index>(data.columns.size());
  for (const auto& group_rows : rows) {
    Sample x(static_cast<Eigen::Index>(group_rows.size()), d);
    for (std::size_t r = 0; r < group_rows.size(); ++r)
      for (Eigen::Index c = 0; c < d; ++c) x(static_cast<Eigen::Index>(r), c) = group_rows[r][static_cast<std::size_t>(c)];
    data.samples.push_back(std::move(x));
  }
  return data;
}

DataFile read_data_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_data_csv(in, path.string());
}

void write_data_csv(std::ostream& out, const DataFile& data) {
  out << "group";
  for (const auto& c : data.columns) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const Sample& x = data.samples[i];
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      out << data.groups[i];
      for (Eigen::Index c = 0; c < x.cols(); ++c) out << fmt::format(",{:.17g}", x(r, c));
      out << '\n';
    }
  }
}

Matrix parse_matrix_csv(std::istream& in, std::string_view source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    const std::string where = fmt::format("{}:{}", source, line_no);
    std::vector<double> row;
    for (const auto& f : split_record(line)) row.push_back(parse_number(f, where));
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError(fmt::format("{}: expected {} columns, found {}", where, rows.front().size(), row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(fmt::format("{}: empty matrix", source));
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_matrix_csv(in, path.string());
}

FactorLayout parse_factor_layout(std::string_view text) {
  std::vector<Factor> factors;
  for (const auto& item : split_list(text)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw InputError(fmt::format("factor '{}' must read NAME=LEVELS", item));
    const auto name = std::string(trim(std::string_view(item).substr(0, eq)));
    const auto levels = parse_integer(std::string_view(item).substr(eq + 1), "factor levels");
    factors.push_back({name, static_cast<Eigen::Index>(levels)});
  }
  if (factors.empty()) throw InputError("empty factor layout");
  return FactorLayout(std::move(factors));
}

ContrastMatrix parse_contrast_spec(std::string_view spec, const std::vector<std::string>& group_names,
                                   const std::optional<FactorLayout>& layout,
                                   const std::filesystem::path& base_dir) {
  spec = trim(spec);
  const auto k = static_cast<Eigen::Index>(group_names.size());
  if (spec == "ksample") return ksample_contrasts(k);
  if (spec == "tukey") return tukey_contrasts(k, group_names);
  if (spec == "dunnett") return dunnett_contrasts(k, group_names);
  if (spec.substr(0, 10) == "factorial:") {
    if (!layout) throw InputError("factorial contrasts need a factor layout (e.g. --factors A=2,E=3)");
    if (layout->groups() != k)
      throw InputError(fmt::format("factor layout has {} subgroups but the data have {}", layout->groups(), k));
    const auto effect = split_list(spec.substr(10), '*');
    if (effect.empty()) throw InputError("factorial contrast names no effect");
    return factorial_effect_matrix(*layout, effect);
  }
  if (spec.substr(0, 4) == "csv:") {
    std::filesystem::path path(std::string(spec.substr(4)));
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    const Matrix h = read_matrix_csv(path);
    if (h.cols() != k)
      throw InputError(fmt::format("contrast file '{}' has {} columns but the data have {} groups",
                                   path.string(), h.cols(), k));
    return validate_contrast(h);
  }
  throw InputError(fmt::format(
      "unknown contrast spec '{}' (expected ksample, tukey, dunnett, factorial:<effect> or csv:<path>)", spec));
}

MimicConfig mimic_from_data(const DataFile& data, bool pooled, SimulationSettings settings) {
  const GroupedData grouped = data.grouped();
  auto moments = [](const Matrix& x) {
    const Vector mu = x.colwise().mean().transpose();
    const Matrix centered = x.rowwise() - mu.transpose();
    const Matrix sigma = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
    return std::pair{mu, sigma};
  };
  MimicConfig cfg;
  cfg.settings = std::move(settings);
  const auto all = moments(grouped.pooled());
  for (Eigen::Index i = 0; i < grouped.groups(); ++i) {
    const auto own = pooled ? all : moments(grouped.sample(i));
    cfg.groups.push_back({own.first, own.second, grouped.size(i)});
  }
  return cfg;
}

namespace {

template <class T, class F>
std::vector<T> parse_values(std::string_view text, F&& parse) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse(item));
  if (out.empty()) throw InputError(fmt::format("empty list '{}'", text));
  return out;
}

void apply_settings(SimulationSettings& s, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    const std::string where = fmt::format("config key '{}'", key);
    if (key == "name") s.name = value;
    else if (key == "distribution") s.distribution = parse_distribution(value);
    else if (key == "variant" || key == "variants") s.variants = parse_variant_list(value);
    else if (key == "target" || key == "quantities") s.quantities = parse_quantity_list(value);
    else if (key == "tests")
      s.tests = parse_values<TestKind>(value, [](const std::string& t) { return parse_test_kind(t); });
    else if (key == "wald_contrasts") s.wald_contrasts = parse_contrast_family(value);
    else if (key == "mct_contrasts") s.mct_contrasts = parse_contrast_family(value);
    else if (key == "alpha") s.alpha = parse_number(value, where);
    else if (key == "replicates") s.replicates = parse_count(value, where);
    else if (key == "resamples") s.resamples = parse_count(value, where);
    else if (key == "mc_draws") s.mc_draws = parse_count(value, where);
    else if (key == "seed") s.seed = static_cast<std::uint64_t>(parse_count(value, where));
    else if (key == "threads") s.threads = static_cast<unsigned>(parse_count(value, where));
  }
}

const std::vector<std::string> kSettingKeys{"name", "distribution", "variant", "variants", "target",
                                            "quantities", "tests", "wald_contrasts", "mct_contrasts",
                                            "alpha", "replicates", "resamples", "mc_draws", "seed",
                                            "threads"};
const std::vector<std::string> kScenarioKeys{"k", "d", "n", "rho", "mu", "mu_seed", "mcv_targets"};
const std::vector<std::string> kMimicKeys{"mimic_data", "mimic_mode"};

bool known(const std::vector<std::string>& keys, const std::string& key) {
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

// Broadcasts a single value to k entries.
template <class T>
std::vector<T> broadcast(std::vector<T> v, std::size_t k, std::string_view what) {
  if (v.size() == 1 && k > 1) v.assign(k, v.front());
  if (v.size() != k)
    throw InputError(fmt::format("{} has {} entries for k = {} groups", what, v.size(), k));
  return v;
}

void apply_scenario(ScenarioConfig& cfg, const std::map<std::string, std::string>& kv) {
  auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  const bool has_d = get("d") != nullptr;
  if (has_d) {
    const auto d = parse_integer(*get("d"), "config key 'd'");
    if (d < 1) throw InputError(fmt::format("d = {} must be at least 1", d));
    cfg.d = static_cast<Eigen::Index>(d);
  }
  if (const auto* rho = get("rho")) cfg.rho = parse_number(*rho, "config key 'rho'");

  std::size_t k = cfg.n.size();
  if (const auto* kk = get("k")) {
    const auto v = parse_integer(*kk, "config key 'k'");
    if (v < 2) throw InputError(fmt::format("k = {} must be at least 2", v));
    k = static_cast<std::size_t>(v);
  }
  if (const auto* n = get("n")) {
    auto sizes = parse_values<Eigen::Index>(*n, [](const std::string& t) {
      return static_cast<Eigen::Index>(parse_integer(t, "config key 'n'"));
    });
    if (!get("k")) k = sizes.size() == 1 ? std::max<std::size_t>(k, 2) : sizes.size();
    cfg.n = broadcast(std::move(sizes), k, "n");
  } else if (!cfg.n.empty()) {
    cfg.n = broadcast(std::vector<Eigen::Index>{cfg.n.front()}, k, "n");
  }
  if (const auto* t = get("mcv_targets")) {
    cfg.targets = broadcast(parse_values<double>(*t, [](const std::string& x) {
                              return parse_number(x, "config key 'mcv_targets'");
                            }),
                            k, "mcv_targets");
  } else if (cfg.targets.size() != k && !cfg.targets.empty()) {
    // Changing k keeps the null layout of the first target.
    cfg.targets.assign(k, cfg.targets.front());
  }

  if (const auto* mu = get("mu")) {
    const auto values = parse_values<double>(*mu, [](const std::string& x) { return parse_number(x, "config key 'mu'"); });
    cfg.mu = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  } else if (const auto* seed = get("mu_seed")) {
    cfg.mu = grid_mean(cfg.d, static_cast<std::uint64_t>(parse_count(*seed, "config key 'mu_seed'")));
  } else if (has_d || cfg.mu.size() != cfg.d) {
    cfg.mu = grid_mean(cfg.d);
  }
}

}  // namespace

SimulationPlan parse_simulation_config(std::istream& in, const std::filesystem::path& base_dir,
                                       std::string_view source) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
      throw InputError(fmt::format("{}:{}: expected 'key = value'", source, line_no));
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    if (key.empty()) throw InputError(fmt::format("{}:{}: missing key", source, line_no));
    if (key != "preset" && !known(kSettingKeys, key) && !known(kScenarioKeys, key) && !known(kMimicKeys, key))
      throw InputError(fmt::format("{}:{}: unknown key '{}'", source, line_no, key));
    if (!kv.emplace(key, value).second)
      throw InputError(fmt::format("{}:{}: key '{}' given twice", source, line_no, key));
  }

  SimulationPlan plan;
  if (const auto it = kv.find("mimic_data"); it != kv.end()) {
    for (const auto& key : kScenarioKeys)
      if (kv.count(key)) throw InputError(fmt::format("{}: key '{}' cannot be combined with mimic_data", source, key));
    if (kv.count("preset")) throw InputError(fmt::format("{}: preset cannot be combined with mimic_data", source));
    std::filesystem::path path(it->second);
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    const auto mode_it = kv.find("mimic_mode");
    const std::string mode = mode_it == kv.end() ? "size" : mode_it->second;
    if (mode != "size" && mode != "power")
      throw InputError(fmt::format("{}: mimic_mode '{}' must be size or power", source, mode));
    SimulationSettings settings;
    settings.name = "mimic-" + mode;
    apply_settings(settings, kv);
    plan.mimic = mimic_from_data(read_data_csv(path), mode == "size", std::move(settings));
    plan.mimic->validate();
    return plan;
  }
  if (kv.count("mimic_mode")) throw InputError(fmt::format("{}: mimic_mode requires mimic_data", source));

  if (const auto it = kv.find("preset"); it != kv.end()) {
    plan.scenarios = preset(it->second);
  } else {
    ScenarioConfig cfg;
    cfg.settings.name = "custom";
    cfg.n.assign(4, 30);
    cfg.targets.assign(4, 0.5);
    plan.scenarios.push_back(std::move(cfg));
  }
  for (auto& cfg : plan.scenarios) {
    const std::string preset_name = cfg.settings.name;
    apply_settings(cfg.settings, kv);
    if (plan.scenarios.size() > 1 && kv.count("name"))
      cfg.settings.name = kv.at("name") + "/" + preset_name;
    apply_scenario(cfg, kv);
    cfg.validate();
  }
  return plan;
}

SimulationPlan read_simulation_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_simulation_config(in, path.parent_path(), path.string());
}

}  // namespace mcv
