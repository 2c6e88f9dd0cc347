#include "catch_amalgamated.hpp"

#include "lancorr/errors.hpp"
#include "lancorr/mc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace lancorr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ExperimentConfig small_ar1() {
  ExperimentConfig cfg;
  cfg.model.theta = {0.6};
  cfg.sample_sizes = {30, 49};
  cfg.replicates = 60;
  cfg.master_seed = 99;
  cfg.threads = 1;
  return cfg;
}

// Alternating Kolmogorov series, summed directly.
double kolmogorov_oracle(double lambda) {
  double s = 0.0;
  for (int k = 1; k <= 200; ++k) s += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return s;
}

}  // namespace

TEST_CASE("seed derivation", "[mc]") {
  CHECK(derive_seed(1, 0, "a") == derive_seed(1, 0, "a"));
  CHECK(derive_seed(1, 0, "a") != derive_seed(1, 0, "b"));
  CHECK(derive_seed(1, 0, "a") != derive_seed(2, 0, "a"));
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 20000; ++r) seen.insert(derive_seed(7, r, "path/n=30"));
  CHECK(seen.size() == 20000);
}

TEST_CASE("experiment grid and determinism", "[mc]") {
  auto cfg = small_ar1();
  const auto a = run_experiment(cfg);
  REQUIRE(a.entries.size() == 6);
  CHECK(a.entries[0].n == 30);
  CHECK(a.entries[0].flavor == Flavor::Oracle);
  CHECK(a.entries[5].n == 49);
  CHECK(a.entries[5].flavor == Flavor::SEstimator);
  cfg.threads = 3;
  const auto b = run_experiment(cfg);
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].rejections == b.entries[i].rejections);
    CHECK(a.entries[i].tau2_mean == b.entries[i].tau2_mean);
  }
  for (const auto& e : a.entries) {
    CHECK(e.replicates + e.failures == 60);
    CHECK(e.power == static_cast<double>(e.rejections) / static_cast<double>(e.replicates));
    CHECK_THAT(e.mc_se, WithinAbs(std::sqrt(e.power * (1 - e.power) / 60.0), 1e-15));
    CHECK(e.theory_tau == theoretical_power(e.tau2_mean, 0.05, PowerConvention::LeCamTau));
  }
  CHECK(&a.at(49, Flavor::LSE) == &a.entries[4]);
  CHECK_THROWS_AS(a.at(50, Flavor::LSE), DomainError);
}

TEST_CASE("oracle flavors share the sample across flavors", "[mc]") {
  auto cfg = small_ar1();
  cfg.keep_traces = true;
  cfg.flavors = {Flavor::Oracle, Flavor::LSE};
  const auto with_two = run_experiment(cfg);
  cfg.flavors = {Flavor::Oracle};
  const auto alone = run_experiment(cfg);
  // Oracle values do not depend on which other flavors run or the path length.
  CHECK(with_two.at(30, Flavor::Oracle).v_trace == alone.at(30, Flavor::Oracle).v_trace);
}

TEST_CASE("drift-free alternative has level alpha", "[mc]") {
  ExperimentConfig cfg;
  cfg.model.theta = {0.6};
  cfg.sample_sizes = {400};
  cfg.replicates = 4000;
  cfg.flavors = {Flavor::Oracle};
  cfg.dgp_drift = Perturbation::zero();
  cfg.master_seed = 3;
  const auto curve = run_experiment(cfg);
  const auto& e = curve.entries.front();
  CHECK(std::abs(e.power - 0.05) < 4.0 * std::sqrt(0.05 * 0.95 / 4000.0));
}

TEST_CASE("degenerate variance fails the experiment", "[mc]") {
  auto cfg = small_ar1();
  cfg.model.G = Perturbation::zero();
  try {
    run_experiment(cfg);
    FAIL("expected ExperimentError");
  } catch (const ExperimentError& e) {
    CHECK(std::string(e.what()).find("tau^2") != std::string::npos);
  }
}

TEST_CASE("config validation", "[mc]") {
  auto cfg = small_ar1();
  cfg.sample_sizes = {};
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = small_ar1();
  cfg.replicates = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = small_ar1();
  cfg.sample_sizes = {2};
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  CHECK(parse_hypothesis("h0") == Hypothesis::H0);
  CHECK(to_string(Hypothesis::H1n) == "h1");
}

TEST_CASE("coverage study", "[mc]") {
  ExperimentConfig cfg;
  cfg.model.kind = ModelKind::ARm;
  cfg.model.theta = {0.5, 0.3};
  cfg.sample_sizes = {300};
  cfg.replicates = 800;
  const auto res = run_coverage(cfg, 300);
  REQUIRE(res.coverage.size() == 2);
  for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(res.coverage[j] - 0.95) < 0.035);
  CHECK(res.replicates == 800);
}

TEST_CASE("equivalence study rows", "[mc]") {
  ExperimentConfig cfg;
  cfg.model.theta = {0.6};
  cfg.sample_sizes = {50, 200};
  cfg.replicates = 100;
  const auto rows = run_equivalence(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].N == 2501);
  CHECK(rows[1].median_extended_gap < rows[0].median_extended_gap);
  CHECK(rows[1].median_extended_gap < rows[1].median_fit_gap);
}

TEST_CASE("Kolmogorov survival function", "[mc][ks]") {
  for (double l : {0.6, 0.9, 1.0, 1.17, 1.19, 1.36, 1.63, 2.0}) {
    CHECK_THAT(kolmogorov_survival(l), WithinAbs(kolmogorov_oracle(l), 1e-12));
  }
  CHECK_THAT(kolmogorov_survival(1.3581), WithinAbs(0.05, 2e-4));
  CHECK_THAT(kolmogorov_survival(1.6276), WithinAbs(0.01, 1e-4));
  CHECK(kolmogorov_survival(0.0) == 1.0);
}

TEST_CASE("KS normality test", "[mc][ks]") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::vector<double> z(3000);
  for (auto& v : z) v = normal(rng);
  const auto ok = ks_normality(z);
  CHECK(ok.pass);
  CHECK(ok.statistic < ok.critical_value);
  CHECK_THAT(ok.critical_value * (std::sqrt(3000.0) + 0.12 + 0.11 / std::sqrt(3000.0)), WithinAbs(1.6276, 1e-3));

  for (auto& v : z) v = 1.3 * v + 0.1;
  CHECK_FALSE(ks_normality(z).pass);

  // Hand-computed statistic for a tiny sorted sample would need n >= 100.
  CHECK_THROWS_AS(ks_normality(std::vector<double>(10, 0.0)), DomainError);
}

TEST_CASE("KS statistic matches a direct computation", "[mc][ks]") {
  std::vector<double> x;
  for (int i = 0; i < 200; ++i) x.push_back(-2.0 + 4.0 * i / 199.0);
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double c = normal_cdf(x[i]);
    d = std::max({d, (i + 1) / 200.0 - c, c - i / 200.0});
  }
  CHECK_THAT(ks_normality(x).statistic, WithinAbs(d, 1e-15));
}

TEST_CASE("gradient study", "[mc]") {
  for (auto s : {Setting::AR1, Setting::ARCH, Setting::General}) {
    const auto res = grad_check_study(s, ScoreFamily::student_t(7.0), 10, 5);
    CHECK(res.instances == 10);
    CHECK(res.max_rel_error < 1e-6);
  }
  const std::vector<double> y{0.1, 0.5, -0.2, 0.3};
  const std::vector<double> th{0.1, 0.2};
  CHECK_THROWS_AS(grad_fd_check(Setting::AR1, y, th, Perturbation::inv_quad(), Perturbation::zero(),
                                ScoreFamily::gaussian(), 1e-3),
                  DomainError);
}

TEST_CASE("a million derived seeds are distinct", "[mc]") {
  std::vector<std::uint64_t> seeds(1000000);
  for (std::uint64_t r = 0; r < seeds.size(); ++r) seeds[r] = derive_seed(20261016, r, "path/n=1000");
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
  CHECK(derive_seed(5, 0, "path") != derive_seed(5, 0, "extended"));
}

TEST_CASE("single replicate has a degenerate standard error", "[mc]") {
  auto cfg = small_ar1();
  cfg.sample_sizes = {30};
  cfg.replicates = 1;
  for (const auto& e : run_experiment(cfg).entries) CHECK(e.se_degenerate);
}

TEST_CASE("KS on exact quantiles and constant data", "[mc][ks]") {
  const std::size_t n = 1000;
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = -normal_upper_quantile((i + 0.5) / n);
  const auto exact = ks_normality(q);
  CHECK_THAT(exact.statistic, WithinAbs(0.5 / n, 1e-9));
  CHECK(exact.pass);
  CHECK_FALSE(ks_normality(std::vector<double>(n, 0.0)).pass);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  std::vector<double> z(10000);
  for (auto& v : z) v = normal(rng);
  CHECK(ks_normality(z).pass);
}

TEST_CASE("gradient check with vanishing directions", "[mc]") {
  ModelConfig c;
  c.theta = {0.5, 0.2, 0.1};
  c.kind = ModelKind::ARm;
  const auto y = simulate(c, 300, 4).y;
  const auto z = Perturbation::zero();
  const std::vector<double> one{0.5};
  CHECK(grad_fd_check(Setting::AR1, y, one, z, z, ScoreFamily::gaussian()) == 0.0);
  CHECK(grad_fd_check(Setting::General, y, c.theta, Perturbation::inv_quad(), Perturbation::gauss(0.5),
                      ScoreFamily::student_t(5.0)) < 1e-6);
}
