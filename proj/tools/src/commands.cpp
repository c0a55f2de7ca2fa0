#include "mcv_cli/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/core.h>

#include "mcv/compositional.hpp"

namespace mcv::cli {

namespace {

constexpr const char* kVersion = "0.3.0";

json header(const char* command) {
  return json{{"tool", "mcv"}, {"version", kVersion}, {"command", command}};
}

json to_json(const Interval& i) { return json{{"lower", i.lower}, {"upper", i.upper}}; }

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class T>
json names(const std::vector<T>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(std::string(to_string(v)));
  return out;
}

json group_table(const GroupedData& data) {
  json out = json::array();
  for (Eigen::Index i = 0; i < data.groups(); ++i)
    out.push_back({{"label", data.labels()[static_cast<std::size_t>(i)]}, {"n", data.size(i)}});
  return out;
}

std::optional<FactorLayout> layout_of(const TestOptions& opt) {
  if (!opt.factors) return std::nullopt;
  return parse_factor_layout(*opt.factors);
}

json common_inputs(const TestOptions& opt, const ContrastMatrix& h) {
  json in{{"data", opt.data.string()},
          {"variants", names(opt.variants)},
          {"targets", names(opt.quantities)},
          {"contrasts", opt.contrasts},
          {"method", std::string(to_string(opt.method))},
          {"alpha", opt.alpha},
          {"seed", opt.seed}};
  if (opt.factors) in["factors"] = *opt.factors;
  if (opt.method != Method::asymptotic) in["resamples"] = opt.resamples;
  in["contrast_matrix"] = {{"labels", h.labels()}, {"h", to_json(h.h())}};
  return in;
}

}  // namespace

json cmd_estimate(const EstimateOptions& opt) {
  const DataFile file = read_data_csv(opt.data);
  json report = header("estimate");
  report["inputs"] = {{"data", opt.data.string()}, {"variants", names(opt.variants)}, {"alpha", opt.alpha}};
  report["columns"] = file.columns;
  json groups = json::array();
  for (std::size_t i = 0; i < file.groups.size(); ++i) {
    json g{{"label", file.groups[i]}, {"n", file.samples[i].rows()}};
    json est = json::array();
    for (auto v : opt.variants) {
      try {
        const EstimateResult r = estimate(v, file.samples[i]);
        const OneSampleCi ci = one_sample_ci(v, file.samples[i], opt.alpha);
        est.push_back({{"variant", std::string(to_string(v))},
                       {"c", r.c},
                       {"b", r.b},
                       {"var_c", r.var_c},
                       {"var_b", r.var_b},
                       {"ci_c", to_json(ci.c)},
                       {"ci_b", to_json(ci.b)},
                       {"warnings", r.warnings}});
      } catch (const DegenerateError& e) {
        throw DegenerateError(e.reason(), fmt::format("group '{}', variant {}", file.groups[i], to_string(v)));
      }
    }
    g["estimates"] = std::move(est);
    groups.push_back(std::move(g));
  }
  report["groups"] = std::move(groups);
  return report;
}

json cmd_test(const TestOptions& opt) {
  const DataFile file = read_data_csv(opt.data);
  const GroupedData data = file.grouped();
  const ContrastMatrix h = parse_contrast_spec(opt.contrasts, data.labels(), layout_of(opt),
                                               std::filesystem::current_path());
  json report = header("test");
  report["inputs"] = common_inputs(opt, h);
  report["groups"] = group_table(data);
  json results = json::array();
  const ResampleOptions ro{opt.resamples, opt.seed, opt.threads};
  for (auto v : opt.variants)
    for (auto q : opt.quantities) {
      const Target target{q, v};
      TestResult r;
      switch (opt.method) {
        case Method::asymptotic: r = asymptotic_test(target, data, h, opt.alpha); break;
        case Method::permutation: r = permutation_test(target, data, h, opt.alpha, ro); break;
        case Method::bootstrap: r = bootstrap_test(target, data, h, opt.alpha, ro); break;
      }
      json row{{"target", to_string(target)},
               {"variant", std::string(to_string(v))},
               {"quantity", std::string(to_string(q))},
               {"method", std::string(to_string(r.method))},
               {"statistic", r.statistic},
               {"rank", r.rank},
               {"p_value", r.p_value},
               {"alpha", r.alpha},
               {"reject", r.reject},
               {"decision", r.reject ? "reject" : "fail to reject"},
               {"warnings", r.warnings}};
      if (opt.method != Method::asymptotic) {
        row["resamples_used"] = r.resamples_used;
        row["resamples_degenerate"] = r.resamples_degenerate;
        row["seed"] = r.seed;
      }
      results.push_back(std::move(row));
    }
  report["results"] = std::move(results);
  return report;
}

json cmd_mct(const TestOptions& opt) {
  if (opt.method == Method::permutation)
    throw InputError("mct supports methods asymptotic and bootstrap");
  const DataFile file = read_data_csv(opt.data);
  const GroupedData data = file.grouped();
  const ContrastMatrix h = parse_contrast_spec(opt.contrasts, data.labels(), layout_of(opt),
                                               std::filesystem::current_path());
  json report = header("mct");
  report["inputs"] = common_inputs(opt, h);
  if (opt.method == Method::asymptotic) report["inputs"]["mc_draws"] = opt.mc_draws;
  report["groups"] = group_table(data);
  json results = json::array();
  for (auto v : opt.variants)
    for (auto q : opt.quantities) {
      const Target target{q, v};
      MctResult r;
      if (opt.method == Method::asymptotic) {
        RngStream rng(opt.seed, 0);
        r = asymptotic_mct(target, data, h, opt.alpha, opt.mc_draws, rng);
      } else {
        r = bootstrap_mct(target, data, h, opt.alpha, {opt.resamples, opt.seed, opt.threads});
      }
      json rows = json::array();
      for (std::size_t l = 0; l < r.labels.size(); ++l) {
        const auto li = static_cast<Eigen::Index>(l);
        rows.push_back({{"comparison", r.labels[l]},
                        {"estimate", r.estimate(li)},
                        {"std_error", r.std_error(li)},
                        {"t", r.t(li)},
                        {"lower", r.sci[l].lower},
                        {"upper", r.sci[l].upper},
                        {"significant", static_cast<bool>(r.decisions[l])}});
      }
      json row{{"target", to_string(target)},
               {"variant", std::string(to_string(v))},
               {"quantity", std::string(to_string(q))},
               {"method", std::string(to_string(r.method))},
               {"critical_value", r.critical_value},
               {"max_abs_t", r.max_abs_t()},
               {"global_p", mct_global_p(r)},
               {"alpha", r.alpha},
               {"correlation", to_json(r.correlation)},
               {"contrasts", std::move(rows)},
               {"seed", r.seed}};
      if (opt.method == Method::bootstrap) {
        row["resamples_used"] = r.resamples_used;
        row["resamples_degenerate"] = r.resamples_degenerate;
      }
      results.push_back(std::move(row));
    }
  report["results"] = std::move(results);
  return report;
}

SimulateOutput cmd_simulate(const std::filesystem::path& config, unsigned threads) {
  SimulationPlan plan = read_simulation_config(config);
  std::vector<ScenarioResult> results;
  if (plan.mimic) {
    if (threads) plan.mimic->settings.threads = threads;
    results.push_back(run_moment_mimic(*plan.mimic));
  } else {
    for (auto& cfg : plan.scenarios) {
      if (threads) cfg.settings.threads = threads;
      results.push_back(run_scenario(cfg));
    }
  }
  std::ostringstream csv;
  write_tidy_csv(csv, results);

  json report = header("simulate");
  report["inputs"] = {{"config", config.string()}};
  json scenarios = json::array();
  for (const auto& res : results) {
    json rows = json::array();
    for (const auto& row : res.rows)
      rows.push_back({{"variant", std::string(to_string(row.variant))},
                      {"target", std::string(to_string(row.quantity))},
                      {"test", std::string(to_string(row.test))},
                      {"valid", row.valid},
                      {"rejections", row.rejections},
                      {"proportion", row.proportion},
                      {"band95", to_json(row.band95)},
                      {"band99", to_json(row.band99)},
                      {"in_band95", row.in_band95},
                      {"in_band99", row.in_band99},
                      {"degenerate_observed", row.degenerate_observed},
                      {"degenerate_resamples", row.degenerate_resamples}});
    scenarios.push_back({{"name", res.name},
                         {"k", res.k},
                         {"d", res.d},
                         {"n", res.n},
                         {"distribution", res.distribution},
                         {"rho", res.rho},
                         {"targets", res.targets},
                         {"alpha", res.alpha},
                         {"rows", std::move(rows)}});
  }
  report["scenarios"] = std::move(scenarios);
  return {std::move(report), csv.str()};
}

DataFile cmd_ilr(const std::filesystem::path& data) {
  DataFile file = read_data_csv(data);
  if (file.dim() < 2) throw InputError("ilr needs at least 2 parts");
  for (auto& x : file.samples) x = ilr(x);
  std::vector<std::string> columns;
  for (Eigen::Index j = 1; j < static_cast<Eigen::Index>(file.columns.size()); ++j)
    columns.push_back(fmt::format("ilr{}", j));
  file.columns = std::move(columns);
  return file;
}

void write_estimate_table(std::ostream& out, const json& report) {
  const auto& groups = report.at("groups");
  out << "mcv";
  for (const auto& g : groups) out << ',' << g.at("label").get<std::string>();
  out << '\n';
  if (groups.empty()) return;
  const std::size_t variants = groups.front().at("estimates").size();
  for (std::size_t v = 0; v < variants; ++v) {
    std::string name = groups.front().at("estimates")[v].at("variant").get<std::string>();
    for (auto& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    out << "C^" << name;
    for (const auto& g : groups) out << fmt::format(",{:.4f}", g.at("estimates")[v].at("c").get<double>());
    out << '\n';
  }
}

void write_mct_table(std::ostream& out, const json& report) {
  out << "comparison,variant,target,method,estimate,lower,upper,significant\n";
  for (const auto& r : report.at("results"))
    for (const auto& c : r.at("contrasts"))
      out << fmt::format("{},{},{},{},{:.6g},{:.6g},{:.6g},{}\n", c.at("comparison").get<std::string>(),
                         r.at("variant").get<std::string>(), r.at("quantity").get<std::string>(),
                         r.at("method").get<std::string>(), c.at("estimate").get<double>(),
                         c.at("lower").get<double>(), c.at("upper").get<double>(),
                         c.at("significant").get<bool>() ? "true" : "false");
}

}  // namespace mcv::cli
