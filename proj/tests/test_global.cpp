#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mcv/global_tests.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace mcv;
using doctest::Approx;

namespace {

GroupedData normal_groups(const std::vector<Eigen::Index>& sizes, Eigen::Index d, RngStream& rng,
                          const std::vector<double>& shifts = {}) {
  const Vector mu = Vector::Constant(d, 2.0);
  const Matrix cov = compound_symmetric(d, 0.3);
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double scale = shifts.empty() ? 1.0 : shifts[i];
    samples.push_back(testing::normal_sample(mu, scale * scale * cov, sizes[i], rng));
  }
  return GroupedData(samples);
}

GroupedData identical_groups(Eigen::Index k, Eigen::Index n, Eigen::Index d, RngStream& rng) {
  const Sample x = testing::normal_sample(Vector::Constant(d, 2.0), Matrix::Identity(d, d), n, rng);
  return GroupedData(std::vector<Sample>(static_cast<std::size_t>(k), x));
}

const Target kVvC{Quantity::c, Variant::vv};

}  // namespace

TEST_CASE("GroupedData") {
  RngStream rng(31, 0);
  const GroupedData g = normal_groups({3, 5, 4}, 2, rng);
  CHECK(g.groups() == 3);
  CHECK(g.total() == 12);
  CHECK(g.offset(2) == 8);
  CHECK(g.labels() == std::vector<std::string>{"1", "2", "3"});
  CHECK_THROWS_AS(GroupedData({Sample::Ones(3, 2)}), InputError);
  CHECK_THROWS_AS(GroupedData({Sample::Ones(3, 2), Sample::Ones(1, 2)}), InputError);
  CHECK_THROWS_AS(GroupedData({Sample::Ones(3, 2), Sample::Ones(3, 1)}), InputError);
  CHECK(to_string(Target{Quantity::b, Variant::rr}) == "B^RR");
  CHECK(parse_quantity("B") == Quantity::b);
  CHECK(parse_method("perm") == Method::permutation);
  CHECK_THROWS_AS(parse_method("jackknife"), InputError);
}

TEST_CASE("group_estimates") {
  RngStream rng(32, 0);
  SUBCASE("identical groups") {
    const GroupEstimates e = group_estimates(kVvC, identical_groups(2, 15, 3, rng));
    CHECK(e.theta(0) == Approx(e.theta(1)).epsilon(1e-13));
    CHECK(e.sigma(0) == Approx(e.sigma(1)).epsilon(1e-13));
  }
  SUBCASE("n / n_i weights") {
    const GroupedData g = normal_groups({10, 30}, 2, rng);
    const GroupEstimates e = group_estimates(kVvC, g);
    CHECK(e.sigma(0) == Approx(4.0 * estimate(Variant::vv, g.sample(0)).var_c).epsilon(1e-10));
    CHECK(e.sigma(1) == Approx(4.0 / 3.0 * estimate(Variant::vv, g.sample(1)).var_c).epsilon(1e-10));
    const GroupEstimates b = group_estimates({Quantity::b, Variant::vv}, g);
    CHECK(b.theta(0) == Approx(1.0 / e.theta(0)));
  }
  SUBCASE("univariate oracle") {
    const GroupedData g = normal_groups({12, 20}, 1, rng);
    const GroupEstimates e = group_estimates({Quantity::c, Variant::az}, g);
    for (Eigen::Index i = 0; i < 2; ++i) {
      const Sample s = g.sample(i);
      const auto ref = oracle::univariate_cv(std::vector<double>(s.data(), s.data() + s.rows()));
      CHECK(e.theta(i) == Approx(ref.c).epsilon(1e-12));
      CHECK(e.sigma(i) == Approx(32.0 / static_cast<double>(s.rows()) * ref.var_c).epsilon(1e-9));
    }
  }
  SUBCASE("degenerate group is named") {
    Sample zero(4, 1);
    zero << 1, -1, 2, -2;
    Sample ok(4, 1);
    ok << 1.0, 1.1, 0.9, 1.05;
    const GroupedData g({ok, zero}, {"ok", "bad"});
    CHECK_THROWS_WITH_AS(group_estimates(kVvC, g), doctest::Contains("group 'bad'"), DegenerateError);
  }
}

TEST_CASE("wald_statistic") {
  RngStream rng(33, 0);
  const GroupedData g = normal_groups({12, 18, 15, 20}, 3, rng, {1.0, 1.3, 0.8, 1.1});
  const ContrastMatrix p = ksample_contrasts(4);

  CHECK(wald_statistic(kVvC, identical_groups(3, 20, 2, rng), ksample_contrasts(3)).statistic ==
        Approx(0.0).epsilon(1e-20));

  SUBCASE("two-sample scalar reduction") {
    const GroupedData two = normal_groups({10, 25}, 2, rng, {1.0, 1.4});
    for (auto v : kAllVariants)
      for (auto q : {Quantity::c, Quantity::b}) {
        const Target t{q, v};
        const GroupEstimates e = group_estimates(t, two);
        const double diff = e.theta(1) - e.theta(0);
        const double expected = 35.0 * diff * diff / (e.sigma(0) + e.sigma(1));
        const WaldStatistic w = wald_statistic(t, two, tukey_contrasts(2));
        CHECK(w.statistic == Approx(expected).epsilon(1e-10));
        CHECK(w.rank == 1);
        // matrix route through pinv
        const Matrix h = tukey_contrasts(2).h();
        const Vector hd = h * e.theta;
        const double via_pinv = 35.0 * (hd.transpose() * pinv(h * e.covariance() * h.transpose()) * hd)(0, 0);
        CHECK(w.statistic == Approx(via_pinv).epsilon(1e-10));
      }
  }
  SUBCASE("scale invariance in H") {
    const double s = wald_statistic(kVvC, g, p).statistic;
    CHECK(wald_statistic(group_estimates(kVvC, g), 5.0 * p.h(), g.total()).statistic == Approx(s).epsilon(1e-10));
    CHECK(wald_statistic(kVvC, g, tukey_contrasts(4)).statistic == Approx(s).epsilon(1e-9));
    CHECK(wald_statistic(kVvC, g, p).rank == 3);
  }
  SUBCASE("permuting rows within a group leaves S unchanged") {
    std::vector<Sample> samples;
    for (Eigen::Index i = 0; i < g.groups(); ++i) samples.push_back(g.sample(i));
    const double s = wald_statistic(kVvC, g, p).statistic;
    Sample& first = samples[0];
    first.row(0).swap(first.row(5));
    first.row(2).swap(first.row(11));
    const double swapped = wald_statistic(kVvC, GroupedData(samples), p).statistic;
    CHECK(std::abs(swapped - s) <= 1e-12 * s);
  }
  SUBCASE("relabeling groups together with the columns of H") {
    const std::vector<std::size_t> order{2, 0, 3, 1};
    std::vector<Sample> samples;
    for (auto i : order) samples.push_back(g.sample(static_cast<Eigen::Index>(i)));
    const ContrastMatrix h = dunnett_contrasts(4);
    const double s = wald_statistic(kVvC, g, h).statistic;
    const double relabeled = wald_statistic(kVvC, GroupedData(samples), h.permuted_columns(order)).statistic;
    CHECK(std::abs(relabeled - s) <= 1e-10 * std::max(1.0, s));
  }
  SUBCASE("nonnegative on random data") {
    RngStream r(34, 0);
    for (int t = 0; t < 30; ++t) {
      const GroupedData data = normal_groups({6, 7, 8}, 2, r, {1.0, 0.5 + r.uniform(), 1.0});
      for (auto v : kAllVariants) CHECK(wald_statistic({Quantity::b, v}, data, ksample_contrasts(3)).statistic >= 0.0);
    }
  }
}

TEST_CASE("asymptotic_test") {
  RngStream rng(35, 0);
  const TestResult zero = asymptotic_test(kVvC, identical_groups(3, 20, 2, rng), ksample_contrasts(3), 0.05);
  CHECK(zero.p_value == 1.0);
  CHECK_FALSE(zero.reject);
  CHECK(zero.rank == 2);
  CHECK(chisq_sf(7.8147, 3) == Approx(0.05).epsilon(1e-4));

  const GroupedData g = normal_groups({20, 20, 20}, 2, rng);
  const TestResult r = asymptotic_test(kVvC, g, ksample_contrasts(3), 0.05);
  CHECK(r.p_value == Approx(chisq_sf(r.statistic, 2)));
  CHECK(r.reject == (r.statistic > chisq_quantile(0.95, 2)));
  CHECK_FALSE(asymptotic_test(kVvC, g, ksample_contrasts(3), 0.0).reject);
  CHECK_THROWS_AS(asymptotic_test(kVvC, g, ksample_contrasts(3), 1.5), InputError);
  CHECK_THROWS_AS(asymptotic_test(kVvC, g, ksample_contrasts(4), 0.05), InputError);
}

TEST_CASE("permutation_test") {
  RngStream rng(36, 0);
  SUBCASE("identical groups give p = 1") {
    const TestResult r =
        permutation_test(kVvC, identical_groups(3, 15, 2, rng), ksample_contrasts(3), 0.05, {199, 5, 0});
    CHECK(r.statistic == Approx(0.0).epsilon(1e-20));
    CHECK(r.p_value == 1.0);
    CHECK(r.resamples_used == 199);
  }
  SUBCASE("clear separation gives the minimum p-value") {
    const GroupedData g = normal_groups({30, 30}, 2, rng, {1.0, 8.0});
    const TestResult r = permutation_test(kVvC, g, ksample_contrasts(2), 0.05, {99, 5, 0});
    CHECK(r.p_value == Approx(1.0 / 100.0));
    CHECK(r.reject);
  }
  SUBCASE("size over exchangeable replicates") {
    int rejections = 0;
    const int reps = 1000;
    for (int rep = 0; rep < reps; ++rep) {
      RngStream data_rng(37, static_cast<std::uint64_t>(rep));
      const GroupedData g = normal_groups({15, 15, 15}, 2, data_rng);
      // B = 999 makes the exact level 49/1000, close to the nominal 5%
      rejections += permutation_test(kVvC, g, ksample_contrasts(3), 0.05, {999, derive_seed(37, rep), 1}).reject;
    }
    const double size = rejections / double(reps);
    CHECK(size >= 0.036);
    CHECK(size <= 0.064);
  }
  SUBCASE("resampling distribution under H1 stays near chi-square") {
    const GroupedData g = normal_groups({200, 200, 200}, 2, rng, {1.0, 1.0, 1.4});
    const ContrastMatrix h = ksample_contrasts(3);
    const auto stats = resampled_wald_statistics(kVvC, g, h, Method::permutation, {2000, 8, 0});
    const double ks = testing::ks_distance(stats, [](double x) { return chisq_cdf(x, 2); });
    CHECK(ks < 0.08);
    CHECK(wald_statistic(kVvC, g, h).statistic > chisq_quantile(0.999, 2));
  }
}

TEST_CASE("bootstrap_test") {
  RngStream rng(38, 0);
  const GroupedData g = normal_groups({20, 25, 15}, 2, rng);
  const ContrastMatrix h = ksample_contrasts(3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double p = bootstrap_test(kVvC, g, h, 0.05, {1, seed, 0}).p_value;
    CHECK((p == 0.5 || p == 1.0));
  }
  const TestResult a = bootstrap_test(kVvC, g, h, 0.05, {300, 77, 1});
  const TestResult b = bootstrap_test(kVvC, g, h, 0.05, {300, 77, 4});
  CHECK(a.p_value == b.p_value);
  CHECK(a.method == Method::bootstrap);
  CHECK(a.seed == 77);
  CHECK(resampled_wald_statistics(kVvC, g, h, Method::bootstrap, {200, 3, 1}) ==
        resampled_wald_statistics(kVvC, g, h, Method::bootstrap, {200, 3, 3}));
  CHECK_THROWS_AS(bootstrap_test(kVvC, g, h, 0.05, {0, 1, 0}), InputError);
}

TEST_CASE("degenerate resamples count as +inf") {
  // Two-point groups: a bootstrap group that draws one row twice has zero variance.
  Sample a(2, 1), b(2, 1);
  a << 1.0, 2.0;
  b << 1.5, 3.0;
  const GroupedData g({a, b});
  const ContrastMatrix h = ksample_contrasts(2);
  const auto stats = resampled_wald_statistics(kVvC, g, h, Method::bootstrap, {400, 9, 0});
  const auto infinite = std::count_if(stats.begin(), stats.end(), [](double s) { return std::isinf(s); });
  CHECK(infinite > 0);
  const TestResult r = bootstrap_test(kVvC, g, h, 0.05, {400, 9, 0});
  CHECK(r.resamples_degenerate == static_cast<std::size_t>(infinite));
  CHECK(r.p_value * 401.0 >= 1.0 + static_cast<double>(infinite) - 1e-9);
}
