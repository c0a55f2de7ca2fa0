#include "mcv/sim.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include <fmt/core.h>
#include <fmt/format.h>

#include "mcv/parallel.hpp"

namespace mcv {

std::string_view to_string(Distribution d) noexcept {
  switch (d) {
    case Distribution::normal: return "normal";
    case Distribution::student5: return "t5";
    case Distribution::chisq10: return "chisq10";
  }
  return "?";
}

Distribution parse_distribution(std::string_view text) {
  if (text == "normal" || text == "N") return Distribution::normal;
  if (text == "t5" || text == "student5") return Distribution::student5;
  if (text == "chisq10" || text == "chi2_10") return Distribution::chisq10;
  throw InputError(fmt::format("unknown distribution '{}' (expected normal, t5 or chisq10)", text));
}

std::string_view to_string(TestKind t) noexcept {
  switch (t) {
    case TestKind::wald_asymptotic: return "wald-asym";
    case TestKind::wald_permutation: return "wald-perm";
    case TestKind::wald_bootstrap: return "wald-boot";
    case TestKind::mct_asymptotic: return "mct-asym";
    case TestKind::mct_bootstrap: return "mct-boot";
  }
  return "?";
}

TestKind parse_test_kind(std::string_view text) {
  for (auto t : {TestKind::wald_asymptotic, TestKind::wald_permutation, TestKind::wald_bootstrap,
                 TestKind::mct_asymptotic, TestKind::mct_bootstrap})
    if (text == to_string(t)) return t;
  throw InputError(fmt::format(
      "unknown test '{}' (expected wald-asym, wald-perm, wald-boot, mct-asym or mct-boot)", text));
}

std::string_view to_string(ContrastFamily f) noexcept {
  switch (f) {
    case ContrastFamily::ksample: return "ksample";
    case ContrastFamily::tukey: return "tukey";
    case ContrastFamily::dunnett: return "dunnett";
  }
  return "?";
}

ContrastFamily parse_contrast_family(std::string_view text) {
  if (text == "ksample") return ContrastFamily::ksample;
  if (text == "tukey") return ContrastFamily::tukey;
  if (text == "dunnett") return ContrastFamily::dunnett;
  throw InputError(fmt::format("unknown contrast family '{}' (expected ksample, tukey or dunnett)", text));
}

ContrastMatrix make_contrasts(ContrastFamily family, Eigen::Index k) {
  switch (family) {
    case ContrastFamily::ksample: return ksample_contrasts(k);
    case ContrastFamily::tukey: return tukey_contrasts(k);
    case ContrastFamily::dunnett: return dunnett_contrasts(k);
  }
  throw InputError("unknown contrast family");
}

namespace {

void validate_settings(const SimulationSettings& s) {
  if (s.replicates < 1) throw InputError("replicates must be at least 1");
  if (!(s.alpha >= 0.0 && s.alpha < 1.0)) throw InputError(fmt::format("alpha {} outside [0, 1)", s.alpha));
  if (s.variants.empty()) throw InputError("no MCV variant selected");
  if (s.quantities.empty()) throw InputError("no target (c/b) selected");
  if (s.tests.empty()) throw InputError("no tests selected");
  for (auto t : s.tests) {
    if ((t == TestKind::wald_permutation || t == TestKind::wald_bootstrap || t == TestKind::mct_bootstrap) &&
        s.resamples < 1)
      throw InputError("resampling tests need resamples >= 1");
    if (t == TestKind::mct_asymptotic && s.mc_draws < 10000)
      throw InputError("mct-asym needs mc_draws >= 10000");
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  validate_settings(settings);
  if (n.size() < 2) throw InputError(fmt::format("need k >= 2 groups, got {}", n.size()));
  for (auto ni : n)
    if (ni < 2) throw InputError(fmt::format("group size {} < 2", ni));
  if (d < 1) throw InputError("dimension d must be at least 1");
  if (targets.size() != n.size())
    throw InputError(fmt::format("{} MCV targets given for k = {} groups", targets.size(), n.size()));
  for (double t : targets)
    if (!(t > 0)) throw InputError(fmt::format("MCV target {} must be positive", t));
  if (!(rho >= 0.0 && rho < 1.0)) throw InputError(fmt::format("rho {} outside [0, 1)", rho));
  if (mu.size() != d) throw InputError(fmt::format("mean vector has length {}, expected d = {}", mu.size(), d));
}

void MimicConfig::validate() const {
  validate_settings(settings);
  if (groups.size() < 2) throw InputError(fmt::format("need k >= 2 groups, got {}", groups.size()));
  const auto d = groups.front().mu.size();
  for (const auto& g : groups) {
    if (g.n < 2) throw InputError(fmt::format("group size {} < 2", g.n));
    if (g.mu.size() != d || g.sigma.rows() != d || g.sigma.cols() != d)
      throw InputError("group models must share one dimension");
  }
}

const ScenarioRow& ScenarioResult::row(Variant v, Quantity q, TestKind t) const {
  for (const auto& r : rows)
    if (r.variant == v && r.quantity == q && r.test == t) return r;
  throw InputError(fmt::format("scenario '{}' has no row for {} {}", name,
                               to_string(Target{q, v}), to_string(t)));
}

Matrix compound_symmetric(Eigen::Index d, double rho) {
  if (d < 1) throw InputError("compound_symmetric: d must be at least 1");
  const double lower = d > 1 ? -1.0 / static_cast<double>(d - 1) : -1.0;
  if (!(rho > lower && rho < 1.0))
    throw InputError(fmt::format("compound_symmetric: rho {} outside ({:.4g}, 1)", rho, lower));
  return (1.0 - rho) * Matrix::Identity(d, d) + Matrix::Constant(d, d, rho);
}

Matrix scale_to_target(Variant variant, const Vector& mu, const Matrix& sigma, double target) {
  if (!(target > 0)) throw InputError(fmt::format("MCV target {} must be positive", target));
  const double current = mcv(variant, mu, sigma);
  const double ratio = target / current;
  return (ratio * ratio) * sigma;
}

Matrix innovations(Distribution dist, Eigen::Index n, Eigen::Index d, RngStream& rng) {
  Matrix z(n, d);
  switch (dist) {
    case Distribution::normal: {
      std::normal_distribution<double> draw;
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index l = 0; l < d; ++l) z(j, l) = draw(rng);
      break;
    }
    case Distribution::student5: {
      std::student_t_distribution<double> draw(5.0);
      const double scale = 1.0 / std::sqrt(5.0 / 3.0);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index l = 0; l < d; ++l) z(j, l) = scale * draw(rng);
      break;
    }
    case Distribution::chisq10: {
      std::chi_squared_distribution<double> draw(10.0);
      const double scale = 1.0 / std::sqrt(20.0);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index l = 0; l < d; ++l) z(j, l) = scale * (draw(rng) - 10.0);
      break;
    }
  }
  return z;
}

Sample generate_sample(Distribution dist, const Vector& mu, const Matrix& sigma, Eigen::Index n,
                       RngStream& rng) {
  if (sigma.rows() != mu.size() || sigma.cols() != mu.size())
    throw InputError("generate_sample: covariance does not match the mean");
  const Matrix root = sym_sqrt(sigma);
  Sample x = innovations(dist, n, mu.size(), rng) * root;
  x.rowwise() += mu.transpose();
  return x;
}

Interval binomial_band(double alpha, std::size_t m, double level) {
  if (m == 0) return {0.0, 1.0};
  const double z = normal_quantile(0.5 + level / 2.0);
  const double half = z * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(m));
  // Rounded outward to 0.1 percentage points; the small offset absorbs
  // representation error in alpha -+ half.
  const double lo = std::floor((alpha - half) * 1000.0 + 1e-9) / 1000.0;
  const double hi = std::ceil((alpha + half) * 1000.0 - 1e-9) / 1000.0;
  return {std::max(0.0, lo), std::min(1.0, hi)};
}

Vector grid_mean(Eigen::Index d, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::normal_distribution<double> draw;
  Vector mu(d);
  for (Eigen::Index l = 0; l < d; ++l) mu(l) = draw(rng);
  return mu;
}

namespace {

struct Slot {
  std::size_t variant_index;
  Quantity quantity;
  TestKind test;
};

struct SlotOutcome {
  bool valid = false;
  bool rejected = false;
  std::size_t degenerate_resamples = 0;
};

// models[v][i]: group i's moments under variant index v.
ScenarioResult run_models(const SimulationSettings& s,
                          const std::vector<std::vector<GroupModel>>& models,
                          ScenarioResult meta) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t k = models.front().size();
  const Eigen::Index d = models.front().front().mu.size();

  std::vector<std::vector<Matrix>> roots(models.size());
  for (std::size_t v = 0; v < models.size(); ++v)
    for (const auto& g : models[v]) roots[v].push_back(sym_sqrt(g.sigma));

  std::vector<Slot> slots;
  for (std::size_t v = 0; v < s.variants.size(); ++v)
    for (auto q : s.quantities)
      for (auto t : s.tests) slots.push_back({v, q, t});

  const auto kk = static_cast<Eigen::Index>(k);
  const ContrastMatrix wald_h = make_contrasts(s.wald_contrasts, kk);
  const ContrastMatrix mct_h = make_contrasts(s.mct_contrasts, kk);

  std::vector<SlotOutcome> outcomes(s.replicates * slots.size());
  parallel_for(s.replicates, s.threads, [&](std::size_t r) {
    RngStream rng(s.seed, r);
    std::vector<Matrix> z;
    for (const auto& g : models.front()) z.push_back(innovations(s.distribution, g.n, d, rng));
    const std::uint64_t replicate_seed = derive_seed(s.seed, r);

    for (std::size_t v = 0; v < s.variants.size(); ++v) {
      std::vector<Sample> samples;
      for (std::size_t i = 0; i < k; ++i) {
        Sample x = z[i] * roots[v][i];
        x.rowwise() += models[v][i].mu.transpose();
        samples.push_back(std::move(x));
      }
      const GroupedData data(samples);

      for (std::size_t si = 0; si < slots.size(); ++si) {
        const Slot& slot = slots[si];
        if (slot.variant_index != v) continue;
        const Target target{slot.quantity, s.variants[v]};
        const ResampleOptions opts{s.resamples, derive_seed(replicate_seed, si), 1};
        SlotOutcome& out = outcomes[r * slots.size() + si];
        try {
          switch (slot.test) {
            case TestKind::wald_asymptotic: {
              out.rejected = asymptotic_test(target, data, wald_h, s.alpha).reject;
              break;
            }
            case TestKind::wald_permutation: {
              const auto res = permutation_test(target, data, wald_h, s.alpha, opts);
              out.rejected = res.reject;
              out.degenerate_resamples = res.resamples_degenerate;
              break;
            }
            case TestKind::wald_bootstrap: {
              const auto res = bootstrap_test(target, data, wald_h, s.alpha, opts);
              out.rejected = res.reject;
              out.degenerate_resamples = res.resamples_degenerate;
              break;
            }
            case TestKind::mct_asymptotic: {
              RngStream mc(opts.seed, 0);
              const auto res = asymptotic_mct(target, data, mct_h, s.alpha, s.mc_draws, mc);
              out.rejected = std::find(res.decisions.begin(), res.decisions.end(), true) != res.decisions.end();
              break;
            }
            case TestKind::mct_bootstrap: {
              const auto res = bootstrap_mct(target, data, mct_h, s.alpha, opts);
              out.rejected = std::find(res.decisions.begin(), res.decisions.end(), true) != res.decisions.end();
              out.degenerate_resamples = res.resamples_degenerate;
              break;
            }
          }
          out.valid = true;
        } catch (const DegenerateError&) {
          out.valid = false;
        }
      }
    }
  });

  meta.alpha = s.alpha;
  for (std::size_t si = 0; si < slots.size(); ++si) {
    ScenarioRow row;
    row.variant = s.variants[slots[si].variant_index];
    row.quantity = slots[si].quantity;
    row.test = slots[si].test;
    row.replicates = s.replicates;
    for (std::size_t r = 0; r < s.replicates; ++r) {
      const SlotOutcome& o = outcomes[r * slots.size() + si];
      if (o.valid) {
        ++row.valid;
        if (o.rejected) ++row.rejections;
      } else {
        ++row.degenerate_observed;
      }
      row.degenerate_resamples += o.degenerate_resamples;
    }
    row.proportion = row.valid ? static_cast<double>(row.rejections) / static_cast<double>(row.valid) : 0.0;
    row.band95 = binomial_band(s.alpha, row.valid, 0.95);
    row.band99 = binomial_band(s.alpha, row.valid, 0.99);
    row.in_band95 = row.band95.contains(row.proportion);
    row.in_band99 = row.band99.contains(row.proportion);
    meta.rows.push_back(row);
  }
  meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return meta;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const Matrix base = compound_symmetric(cfg.d, cfg.rho);
  std::vector<std::vector<GroupModel>> models;
  for (auto v : cfg.settings.variants) {
    std::vector<GroupModel> groups;
    for (std::size_t i = 0; i < cfg.n.size(); ++i)
      groups.push_back({cfg.mu, scale_to_target(v, cfg.mu, base, cfg.targets[i]), cfg.n[i]});
    models.push_back(std::move(groups));
  }

  ScenarioResult meta;
  meta.name = cfg.settings.name;
  meta.k = cfg.groups();
  meta.d = cfg.d;
  meta.n = cfg.n;
  meta.distribution = std::string(to_string(cfg.settings.distribution));
  meta.rho = fmt::format("{:g}", cfg.rho);
  std::vector<std::string> t;
  for (double x : cfg.targets) t.push_back(fmt::format("{:g}", x));
  meta.targets = fmt::format("{}", fmt::join(t, ";"));
  return run_models(cfg.settings, models, std::move(meta));
}

ScenarioResult run_moment_mimic(const MimicConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<GroupModel>> models(cfg.settings.variants.size(), cfg.groups);
  ScenarioResult meta;
  meta.name = cfg.settings.name;
  meta.k = static_cast<Eigen::Index>(cfg.groups.size());
  meta.d = cfg.groups.front().mu.size();
  for (const auto& g : cfg.groups) meta.n.push_back(g.n);
  meta.distribution = std::string(to_string(cfg.settings.distribution));
  meta.rho = "-";
  meta.targets = "-";
  return run_models(cfg.settings, models, std::move(meta));
}

namespace {

ScenarioConfig grid_cell(std::string name, Eigen::Index n, double rho, Distribution dist,
                          std::vector<double> targets) {
  ScenarioConfig cfg;
  cfg.settings.name = std::move(name);
  cfg.settings.distribution = dist;
  cfg.settings.variants = {Variant::vv};
  cfg.settings.quantities = {Quantity::c, Quantity::b};
  cfg.settings.tests = {TestKind::wald_permutation, TestKind::wald_bootstrap, TestKind::mct_bootstrap};
  cfg.settings.replicates = 1000;
  cfg.settings.resamples = 500;
  cfg.settings.seed = 20230607;
  cfg.d = 5;
  cfg.n.assign(4, n);
  cfg.rho = rho;
  cfg.mu = grid_mean(cfg.d);
  cfg.targets = std::move(targets);
  return cfg;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"smoke", "paper-size-small", "paper-power-small", "paper-size-nightly",
          "paper-power-nightly", "paper-full"};
}

std::vector<ScenarioConfig> preset(std::string_view name) {
  const std::vector<Variant> all(kAllVariants.begin(), kAllVariants.end());
  if (name == "smoke") {
    ScenarioConfig cfg = grid_cell("smoke", 20, 0.1, Distribution::normal, {0.5, 0.5, 0.5});
    cfg.d = 2;
    cfg.n.assign(3, 20);
    cfg.mu = grid_mean(cfg.d);
    cfg.settings.replicates = 20;
    cfg.settings.resamples = 49;
    return {cfg};
  }
  if (name == "paper-size-small")
    return {grid_cell("paper-size-small", 30, 0.1, Distribution::normal, {0.5, 0.5, 0.5, 0.5})};
  if (name == "paper-power-small")
    return {grid_cell("paper-power-small", 50, 0.1, Distribution::normal, {0.5, 0.5, 0.5, 0.7})};
  if (name == "paper-size-nightly" || name == "paper-power-nightly") {
    const bool size = name == "paper-size-nightly";
    auto cfg = grid_cell(std::string(name), size ? 30 : 50, 0.1, Distribution::normal,
                          size ? std::vector<double>{0.5, 0.5, 0.5, 0.5}
                               : std::vector<double>{0.5, 0.5, 0.5, 0.7});
    cfg.settings.variants = all;
    return {cfg};
  }
  if (name == "paper-full") {
    std::vector<ScenarioConfig> out;
    const std::vector<TestKind> tests{TestKind::wald_asymptotic, TestKind::wald_permutation,
                                      TestKind::wald_bootstrap, TestKind::mct_asymptotic,
                                      TestKind::mct_bootstrap};
    auto finish = [&](ScenarioConfig cfg) {
      cfg.settings.variants = all;
      cfg.settings.tests = tests;
      cfg.settings.resamples = 1000;
      out.push_back(std::move(cfg));
    };
    for (auto dist : {Distribution::normal, Distribution::student5, Distribution::chisq10})
      for (double rho : {0.1, 0.4, 0.7}) {
        for (Eigen::Index n : {30, 50, 70, 100, 150, 200})
          for (double c : {0.1, 0.5, 1.0, 1.5})
            finish(grid_cell(fmt::format("size-{}-rho{:g}-n{}-C{:g}", to_string(dist), rho, n, c), n, rho,
                              dist, {c, c, c, c}));
        for (Eigen::Index n : {30, 50})
          for (auto [c0, c1] : {std::pair{0.1, 0.15}, std::pair{0.5, 0.7}, std::pair{1.0, 1.5}})
            finish(grid_cell(fmt::format("power-{}-rho{:g}-n{}-C{:g}vs{:g}", to_string(dist), rho, n, c0, c1),
                              n, rho, dist, {c0, c0, c0, c1}));
      }
    return out;
  }
  throw InputError(fmt::format("unknown preset '{}'", name));
}

void write_tidy_csv(std::ostream& out, const std::vector<ScenarioResult>& results) {
  out << "scenario,k,d,n,distribution,rho,targets,variant,target,test,alpha,replicates,valid,"
         "rejections,proportion,band95_lower,band95_upper,band99_lower,band99_upper,in_band95,"
         "in_band99,degenerate_observed,degenerate_resamples\n";
  for (const auto& res : results) {
    const std::string n = fmt::format("{}", fmt::join(res.n, ";"));
    for (const auto& row : res.rows) {
      out << fmt::format("{},{},{},{},{},{},{},{},{},{},{:g},{},{},{},{:.4f},{:.3f},{:.3f},{:.3f},{:.3f},{},{},{},{}\n",
                         res.name, res.k, res.d, n, res.distribution, res.rho, res.targets,
                         to_string(row.variant), to_string(row.quantity), to_string(row.test), res.alpha,
                         row.replicates, row.valid, row.rejections, row.proportion, row.band95.lower,
                         row.band95.upper, row.band99.lower, row.band99.upper, row.in_band95 ? 1 : 0,
                         row.in_band99 ? 1 : 0, row.degenerate_observed, row.degenerate_resamples);
    }
  }
}

}  // namespace mcv
