#include <doctest.h>

#include <cmath>

#include "mcv/multiple_tests.hpp"
#include "support.hpp"

using namespace mcv;
using doctest::Approx;

namespace {

GroupedData groups_with_targets(const std::vector<double>& targets, Eigen::Index n, Eigen::Index d,
                                RngStream& rng, Variant v = Variant::vv) {
  const Vector mu = Vector::Constant(d, 1.0);
  const Matrix base = compound_symmetric(d, 0.2);
  std::vector<Sample> samples;
  for (double t : targets) samples.push_back(testing::normal_sample(mu, scale_to_target(v, mu, base, t), n, rng));
  return GroupedData(samples);
}

GroupedData identical_groups(Eigen::Index k, Eigen::Index n, RngStream& rng) {
  const Sample x = testing::normal_sample(Vector::Constant(2, 2.0), Matrix::Identity(2, 2), n, rng);
  return GroupedData(std::vector<Sample>(static_cast<std::size_t>(k), x));
}

void check_duality(const MctResult& r) {
  for (std::size_t l = 0; l < r.decisions.size(); ++l) {
    CHECK(r.decisions[l] == !r.sci[l].contains(0.0));
    CHECK(r.decisions[l] == (std::abs(r.t(static_cast<Eigen::Index>(l))) > r.critical_value));
  }
}

const Target kVvC{Quantity::c, Variant::vv};
const Target kVvB{Quantity::b, Variant::vv};

}  // namespace

TEST_CASE("t_statistics") {
  RngStream rng(41, 0);
  CHECK(t_statistics(kVvC, identical_groups(3, 20, rng), tukey_contrasts(3)).norm() == Approx(0.0));

  const GroupedData two = groups_with_targets({0.5, 0.6}, 25, 2, rng);
  const double t = t_statistics(kVvB, two, tukey_contrasts(2))(0);
  CHECK(t * t == Approx(wald_statistic(kVvB, two, tukey_contrasts(2)).statistic).epsilon(1e-10));

  const GroupedData g = groups_with_targets({0.5, 0.6, 0.4}, 25, 2, rng);
  const GroupEstimates e = group_estimates(kVvC, g);
  const Matrix h = dunnett_contrasts(3).h();
  CHECK((t_statistics(e, 3.5 * h, g.total()) - t_statistics(e, h, g.total())).norm() < 1e-12);
}

TEST_CASE("correlation_matrix") {
  Matrix orth(2, 4);
  orth << 1, -1, 0, 0, 0, 0, 1, -1;
  CHECK((correlation_matrix(Matrix::Identity(4, 4), orth) - Matrix::Identity(2, 2)).norm() < 1e-15);

  const Matrix r = correlation_matrix(Matrix::Identity(3, 3), tukey_contrasts(3).h());
  CHECK(r.diagonal() == Vector::Ones(3));
  CHECK(std::abs(r(0, 1)) == Approx(0.5));
  CHECK(std::abs(r(0, 2)) == Approx(0.5));
  CHECK(std::abs(r(1, 2)) == Approx(0.5));

  RngStream rng(42, 0);
  for (int t = 0; t < 20; ++t) {
    Vector sigma(5);
    for (Eigen::Index i = 0; i < 5; ++i) sigma(i) = 0.1 + rng.uniform();
    const Matrix rr = correlation_matrix(sigma.asDiagonal(), tukey_contrasts(5).h());
    CHECK((rr - rr.transpose()).norm() < 1e-14);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(rr).eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("asymptotic_mct") {
  RngStream rng(43, 0);
  const GroupedData two = groups_with_targets({0.5, 0.55}, 40, 2, rng);
  RngStream mc(43, 1);
  const MctResult one = asymptotic_mct(kVvC, two, tukey_contrasts(2), 0.05, 100000, mc);
  CHECK(one.critical_value == Approx(1.96).epsilon(0.01));
  // r = 1: global p matches the two-sided normal p-value
  CHECK(mct_global_p(one) == Approx(2 * (1 - normal_cdf(std::abs(one.t(0))))).epsilon(0.02));

  const GroupedData g = groups_with_targets({0.5, 0.5, 0.8, 0.5}, 40, 3, rng);
  const MctResult r = asymptotic_mct(kVvC, g, tukey_contrasts(4), 0.05, 20000, mc);
  check_duality(r);
  for (Eigen::Index l = 0; l < r.t.size(); ++l) {
    const auto li = static_cast<std::size_t>(l);
    CHECK(r.sci[li].lower == Approx(r.estimate(l) - r.std_error(l) * r.critical_value));
    CHECK(r.sci[li].upper == Approx(r.estimate(l) + r.std_error(l) * r.critical_value));
    CHECK(r.t(l) == Approx(r.estimate(l) / r.std_error(l)));
  }
  CHECK(r.labels.size() == 6);
  CHECK(r.critical_value > 1.96);
  CHECK(r.critical_value < normal_quantile(1 - 0.05 / 12));

  RngStream mc0(1, 0);
  const MctResult null = asymptotic_mct(kVvC, identical_groups(3, 20, rng), tukey_contrasts(3), 0.05, 10000, mc0);
  CHECK(mct_global_p(null) == 1.0);
  CHECK_THROWS_AS(asymptotic_mct(kVvC, g, tukey_contrasts(4), 0.05, 100, mc), InputError);
}

TEST_CASE("bootstrap_mct") {
  RngStream rng(44, 0);
  const GroupedData g = groups_with_targets({0.5, 0.5, 0.8}, 40, 2, rng);
  const ContrastMatrix h = tukey_contrasts(3);

  SUBCASE("studentization factor") {
    const Vector s = (Vector(3) << 0.5, 1.2, 2.0).finished();
    CHECK((studentization_factor(s, s) - Vector::Ones(3)).norm() == 0.0);
    const Vector sb = (Vector(3) << 0.7, 0.9, 3.1).finished();
    const Matrix via_matrix = sym_sqrt(s.asDiagonal().toDenseMatrix()) *
                              sym_sqrt(sb.asDiagonal().toDenseMatrix()).inverse();
    CHECK((via_matrix.diagonal() - studentization_factor(s, sb)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("decisions, intervals and determinism") {
    const MctResult a = bootstrap_mct(kVvB, g, h, 0.05, {499, 3, 1});
    const MctResult b = bootstrap_mct(kVvB, g, h, 0.05, {499, 3, 4});
    check_duality(a);
    CHECK(a.critical_value == b.critical_value);
    CHECK(a.reference_max == b.reference_max);
    CHECK(a.resamples_used == 499);
    CHECK(std::is_sorted(a.reference_max.begin(), a.reference_max.end()));
    CHECK(mct_global_p(a) >= 1.0 / 500.0);
  }
  SUBCASE("critical value nonincreasing in alpha") {
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha : {0.01, 0.05, 0.1, 0.2, 0.5}) {
      const double q = bootstrap_mct(kVvC, g, h, alpha, {499, 5, 0}).critical_value;
      CHECK(q <= prev);
      prev = q;
    }
    RngStream m1(9, 0);
    double prev_asym = std::numeric_limits<double>::infinity();
    const MctResult base = asymptotic_mct(kVvC, g, h, 0.01, 20000, m1);
    const MaxAbsNormalSample shared(base.correlation, 20000, m1);
    for (double alpha : {0.01, 0.05, 0.1, 0.2}) {
      CHECK(shared.quantile(alpha) <= prev_asym);
      prev_asym = shared.quantile(alpha);
    }
  }
  SUBCASE("bootstrap estimates centre on the pooled estimate") {
    RngStream big_rng(45, 0);
    const GroupedData big = groups_with_targets({0.5, 0.5, 0.8}, 400, 2, big_rng);
    const BootstrapReplicates rep = bootstrap_replicates(kVvC, big, {2000, 6, 0});
    for (Eigen::Index i = 0; i < big.groups(); ++i) {
      const Vector col = rep.theta.col(i);
      const double mean = col.mean();
      const double se = std::sqrt((col.array() - mean).square().sum() / (col.size() - 1.0) / col.size());
      // plug-in estimates carry an O(1/n) bias, so allow it on top of 3 standard errors
      CHECK(std::abs(mean - rep.pooled_theta) <= 3 * se + 0.01 * rep.pooled_theta);
    }
  }
  SUBCASE("too few resamples give an infinite critical value") {
    const MctResult r = bootstrap_mct(kVvC, g, h, 0.05, {10, 1, 0});
    CHECK(std::isinf(r.critical_value));
    for (bool d : r.decisions) CHECK_FALSE(d);
  }
}

TEST_CASE("familywise error of the bootstrap MCT for B") {
  int any = 0;
  const int reps = 1000;
  for (int rep = 0; rep < reps; ++rep) {
    RngStream rng(45, static_cast<std::uint64_t>(rep));
    const GroupedData g = groups_with_targets({0.5, 0.5, 0.5}, 50, 2, rng);
    const MctResult r = bootstrap_mct(kVvB, g, tukey_contrasts(3), 0.05, {199, derive_seed(45, rep), 1});
    any += std::find(r.decisions.begin(), r.decisions.end(), true) != r.decisions.end();
  }
  const double fwer = any / double(reps);
  CHECK(fwer >= 0.032);
  CHECK(fwer <= 0.068);
}

TEST_CASE("local decisions with true and false nulls") {
  // Dunnett against group 1: contrast 2-1 is a true null, 3-1 is false.
  int false_rejections = 0, all_detected = 0;
  const int reps = 500;
  for (int rep = 0; rep < reps; ++rep) {
    RngStream rng(46, static_cast<std::uint64_t>(rep));
    const GroupedData g = groups_with_targets({0.5, 0.5, 0.7}, 300, 2, rng);
    RngStream mc(46, 100000 + static_cast<std::uint64_t>(rep));
    const MctResult r = asymptotic_mct(kVvC, g, dunnett_contrasts(3), 0.05, 10000, mc);
    false_rejections += r.decisions[0];
    all_detected += r.decisions[1];
  }
  CHECK(false_rejections / double(reps) <= 0.07);
  CHECK(all_detected / double(reps) >= 0.95);
}

TEST_CASE("bootstrap intervals versus asymptotic intervals") {
  int wider = 0;
  const int runs = 100;
  for (int run = 0; run < runs; ++run) {
    RngStream rng(47, static_cast<std::uint64_t>(run));
    const GroupedData g = groups_with_targets({0.5, 0.5, 0.5, 0.5}, 50, 3, rng);
    RngStream mc(47, 1000 + static_cast<std::uint64_t>(run));
    const double asym = asymptotic_mct(kVvC, g, tukey_contrasts(4), 0.05, 10000, mc).critical_value;
    const double boot = bootstrap_mct(kVvC, g, tukey_contrasts(4), 0.05, {499, derive_seed(47, run), 1}).critical_value;
    wider += boot >= asym;
  }
  CHECK(wider >= 90);
}
