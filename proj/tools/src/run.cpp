#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "mcv_cli/commands.hpp"

namespace mcv::cli {

namespace {

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot write '" + path + "'");
  file << text;
}

template <class Writer>
void emit_table(const std::string& path, std::ostream& out, Writer&& write) {
  std::ostringstream s;
  write(s);
  emit(s.str(), path, out);
}

struct Common {
  std::string data;
  std::string variant = "vv";
  std::string target = "c";
  std::string method;
  std::string out;
  std::string table;
  std::string factors;
};

void add_test_flags(CLI::App* cmd, Common& c, TestOptions& opt, const char* default_method) {
  c.method = default_method;
  cmd->add_option("data", c.data, "CSV with a 'group' column")->required()->check(CLI::ExistingFile);
  cmd->add_option("--variant", c.variant, "rr, vv, vn, az, all or a comma list")->capture_default_str();
  cmd->add_option("--target", c.target, "c (MCV), b (standardized mean) or c,b")->capture_default_str();
  cmd->add_option("--contrasts", opt.contrasts,
                  "ksample | tukey | dunnett | factorial:<A or A*E> | csv:<path>")
      ->capture_default_str();
  cmd->add_option("--factors", c.factors, "factor layout for factorial contrasts, e.g. A=2,E=3");
  cmd->add_option("--method", c.method)->capture_default_str();
  cmd->add_option("--alpha", opt.alpha)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--B", opt.resamples, "resampling iterations")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opt.seed)->capture_default_str();
  cmd->add_option("--threads", opt.threads, "worker threads (0: MCV_THREADS or all cores)");
  cmd->add_option("--out", c.out, "JSON report path (default stdout)");
}

void finish_test_options(const Common& c, TestOptions& opt) {
  opt.data = c.data;
  opt.variants = parse_variant_list(c.variant);
  opt.quantities = parse_quantity_list(c.target);
  opt.method = parse_method(c.method);
  if (!c.factors.empty()) opt.factors = c.factors;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inference for multivariate coefficients of variation across k groups", "mcv"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mcv 0.3.0");

  Common c;
  EstimateOptions est;
  TestOptions test_opt;
  TestOptions mct_opt;
  mct_opt.resamples = 1000;
  std::string config;
  std::string report_path;
  unsigned sim_threads = 0;

  auto* est_cmd = app.add_subcommand("estimate", "Per-group MCV estimates with one-sample intervals");
  est_cmd->add_option("data", c.data, "CSV with a 'group' column")->required()->check(CLI::ExistingFile);
  std::string est_variant = "all";
  est_cmd->add_option("--variant", est_variant, "rr, vv, vn, az, all or a comma list")->capture_default_str();
  est_cmd->add_option("--alpha", est.alpha)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  est_cmd->add_option("--out", c.out, "JSON report path (default stdout)");
  est_cmd->add_option("--table", c.table, "write the variant x group table as CSV");

  auto* test_cmd = app.add_subcommand("test", "Global Wald-type test of H theta = 0");
  add_test_flags(test_cmd, c, test_opt, "permutation");

  auto* mct_cmd = app.add_subcommand("mct", "Multiple contrast test with simultaneous intervals");
  add_test_flags(mct_cmd, c, mct_opt, "bootstrap");
  mct_opt.contrasts = "tukey";
  mct_cmd->get_option("--contrasts")->default_str("tukey");
  mct_cmd->add_option("--mc-draws", mct_opt.mc_draws, "Monte Carlo draws for the asymptotic quantile")
      ->capture_default_str();
  mct_cmd->add_option("--table", c.table, "write comparison/estimate/interval rows as CSV");

  auto* sim_cmd = app.add_subcommand("simulate", "Size/power simulation from a config file");
  sim_cmd->add_option("config", config, "key = value config file")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", c.out, "tidy CSV path (default stdout)");
  sim_cmd->add_option("--report", report_path, "JSON report path");
  sim_cmd->add_option("--threads", sim_threads, "worker threads (results do not depend on it)");

  auto* ilr_cmd = app.add_subcommand("ilr", "Isometric log-ratio transform of compositional data");
  ilr_cmd->add_option("data", c.data, "CSV with a 'group' column and D positive parts")
      ->required()
      ->check(CLI::ExistingFile);
  ilr_cmd->add_option("--out", c.out, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*est_cmd) {
      est.data = c.data;
      est.variants = parse_variant_list(est_variant);
      const json report = cmd_estimate(est);
      emit(report.dump(2) + "\n", c.out, out);
      if (!c.table.empty()) emit_table(c.table, out, [&](std::ostream& s) { write_estimate_table(s, report); });
    } else if (*test_cmd) {
      finish_test_options(c, test_opt);
      emit(cmd_test(test_opt).dump(2) + "\n", c.out, out);
    } else if (*mct_cmd) {
      finish_test_options(c, mct_opt);
      const json report = cmd_mct(mct_opt);
      emit(report.dump(2) + "\n", c.out, out);
      if (!c.table.empty()) emit_table(c.table, out, [&](std::ostream& s) { write_mct_table(s, report); });
    } else if (*sim_cmd) {
      const SimulateOutput res = cmd_simulate(config, sim_threads);
      emit(res.csv, c.out, out);
      if (!report_path.empty()) emit(res.report.dump(2) + "\n", report_path, out);
    } else if (*ilr_cmd) {
      std::ostringstream s;
      write_data_csv(s, cmd_ilr(c.data));
      emit(s.str(), c.out, out);
    }
  } catch (const DegenerateError& e) {
    err << "mcv: degenerate data: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const InputError& e) {
    err << "mcv: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "mcv: internal error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}

}  // namespace mcv::cli
