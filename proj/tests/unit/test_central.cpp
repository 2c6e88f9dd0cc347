#include "catch_amalgamated.hpp"

#include "lancorr/central.hpp"
#include "lancorr/errors.hpp"

#include <cmath>

using namespace lancorr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> ar1_path(double theta, std::size_t n, std::uint64_t seed,
                             ScoreFamily family = ScoreFamily::gaussian()) {
  ModelConfig c;
  c.theta = {theta};
  c.family = family;
  return simulate(c, n, seed).y;
}

double inv_quad(double x) { return 1.0 / (1.0 + x * x); }

}  // namespace

TEST_CASE("gaussian AR(1) central sequence", "[central]") {
  const auto y = ar1_path(0.6, 500, 1);
  const double theta = 0.55;
  double sum = 0.0, g2 = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double eps = y[i] - theta * y[i - 1];
    sum += eps * inv_quad(y[i - 1]);
    g2 += inv_quad(y[i - 1]) * inv_quad(y[i - 1]);
  }
  const auto ev = central_ar1(y, theta, Perturbation::inv_quad(), ScoreFamily::gaussian());
  CHECK(ev.n == 499);
  CHECK_THAT(ev.v, WithinRel(sum / std::sqrt(499.0), 1e-12));
  CHECK_THAT(ev.tau2, WithinRel(g2 / 499.0, 1e-9));
  CHECK(ev.eval_parameter == std::vector<double>{theta});
  CHECK_FALSE(ev.tau2_clipped);
}

TEST_CASE("gaussian ARCH central sequence and variance", "[central]") {
  const auto y = ar1_path(0.4, 800, 2);
  const double theta = 0.4;
  const auto G = Perturbation::inv_quad();
  const auto L = Perturbation::gauss(0.5);
  double sum = 0.0, g2 = 0.0, l2 = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double eps = y[i] - theta * y[i - 1];
    sum += eps * G(y[i - 1]) + (eps * eps - 1.0) * L(y[i - 1]);
    g2 += G(y[i - 1]) * G(y[i - 1]);
    l2 += L(y[i - 1]) * L(y[i - 1]);
  }
  const double n = 799.0;
  const auto ev = central_arch(y, theta, G, L, ScoreFamily::gaussian());
  CHECK_THAT(ev.v, WithinRel(sum / std::sqrt(n), 1e-12));
  // I0 = 1, I1 = 0, I2 = 3 with B = 2L: E G^2 + 2 E L^2.
  CHECK_THAT(ev.tau2, WithinRel((g2 + 2.0 * l2) / n, 1e-9));

  const double th[1] = {theta};
  const auto gen = central_arm(y, th, G, L, ScoreFamily::gaussian());
  CHECK_THAT(gen.v, WithinRel(ev.v, 1e-14));
  CHECK_THAT(gen.tau2, WithinRel(ev.tau2, 1e-12));
}

TEST_CASE("vanishing L reduces ARCH and AR(m) to AR(1) bit for bit", "[central]") {
  const auto y = ar1_path(0.6, 300, 3);
  const auto G = Perturbation::inv_quad();
  const auto fam = ScoreFamily::student_t(7.0);
  const auto a = central_ar1(y, 0.6, G, fam);
  const auto b = central_arch(y, 0.6, G, Perturbation::zero(), fam);
  const double th[1] = {0.6};
  const auto c = central_arm(y, th, G, Perturbation::zero(), fam);
  CHECK(a.v == b.v);
  CHECK(a.v == c.v);
  CHECK(a.grad == b.grad);
  CHECK(a.tau2 == b.tau2);
  CHECK(a.tau2 == c.tau2);
}

TEST_CASE("student-t AR(1) variance uses the location information", "[central]") {
  const double nu = 5.0;
  const auto fam = ScoreFamily::student_t(nu);
  const auto y = ar1_path(0.6, 400, 4, fam);
  double g2 = 0.0;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) g2 += inv_quad(y[i]) * inv_quad(y[i]);
  const double i0 = (nu + 1.0) * nu / ((nu + 3.0) * (nu - 2.0));
  const auto ev = central_ar1(y, 0.6, Perturbation::inv_quad(), fam);
  CHECK_THAT(ev.tau2, WithinRel(i0 * g2 / 399.0, 1e-8));
}

TEST_CASE("V is linear in the perturbation", "[central]") {
  const auto y = ar1_path(0.6, 300, 5);
  const auto fam = ScoreFamily::student_t(5.0);
  const auto one = central_ar1(y, 0.5, Perturbation::inv_quad(), fam);
  const auto neg = central_ar1(y, 0.5, Perturbation::inv_quad(-2.0), fam);
  CHECK_THAT(neg.v, WithinRel(-2.0 * one.v, 1e-12));
  CHECK_THAT(neg.tau2, WithinRel(4.0 * one.tau2, 1e-12));
}

TEST_CASE("analytic gradient matches finite differences", "[central]") {
  const auto y = ar1_path(0.3, 600, 6, ScoreFamily::student_t(5.0));
  const std::vector<double> theta{0.25, 0.1, -0.05};
  const auto G = Perturbation::inv_quad();
  const auto L = Perturbation::gauss(0.7);
  const auto fam = ScoreFamily::student_t(5.0);
  const auto ev = central_arm(y, theta, G, L, fam);
  const double h = 1e-5;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    auto up = theta, down = theta;
    up[k] += h;
    down[k] -= h;
    const double fd = (central_value(Setting::General, y, up, G, L, fam) -
                       central_value(Setting::General, y, down, G, L, fam)) /
                      (2.0 * h);
    CHECK_THAT(ev.grad[k], WithinRel(fd, 1e-6));
  }
  CHECK_THAT(central_value(Setting::General, y, theta, G, L, fam), WithinRel(ev.v, 1e-14));
}

TEST_CASE("residual moments approach population moments", "[central]") {
  const auto fam = ScoreFamily::student_t(7.0);
  const auto y = ar1_path(0.6, 100000, 7, fam);
  const auto pop = central_ar1(y, 0.6, Perturbation::inv_quad(), fam, MomentSource::Population);
  const auto res = central_ar1(y, 0.6, Perturbation::inv_quad(), fam, MomentSource::Residual);
  CHECK_THAT(res.tau2, WithinRel(pop.tau2, 0.03));
}

TEST_CASE("tau2 plug-in formulas and clipping", "[central]") {
  const std::vector<double> eps{0.1, -0.3, 1.2, 0.4};
  const std::vector<double> lag{0.0, 1.0, -1.0, 2.0};
  const auto G = Perturbation::constant(1.0);
  const auto S = Perturbation::constant(2.0);
  const auto gauss = ScoreFamily::gaussian();
  CHECK_THAT(tau2_plugin(eps, lag, G, S, gauss, Setting::AR1).value, WithinAbs(1.0, 1e-10));
  // 1 + (3-1)/4 * 4 + 0
  CHECK_THAT(tau2_plugin(eps, lag, G, S, gauss, Setting::ARCH).value, WithinAbs(3.0, 1e-10));
  // 1 + (3-1) * 4 + 0
  CHECK_THAT(tau2_plugin(eps, lag, G, S, gauss, Setting::General).value, WithinAbs(9.0, 1e-10));

  // Residuals all equal to 2: I0 = 4, I1 = 8, I2 = 16.
  const std::vector<double> twos{2.0, 2.0, 2.0, 2.0};
  const auto r1 = tau2_plugin(twos, lag, Perturbation::constant(1.0), Perturbation::constant(-1.0),
                              gauss, Setting::General, MomentSource::Residual);
  CHECK_THAT(r1.value, WithinAbs(4.0 + 15.0 - 16.0, 1e-12));
  const auto r2 = tau2_plugin(twos, lag, Perturbation::constant(-3.0), Perturbation::constant(-1.0),
                              gauss, Setting::General, MomentSource::Residual);
  CHECK_THAT(r2.value, WithinAbs(36.0 + 15.0 + 48.0, 1e-12));

  CHECK_THROWS_AS(tau2_plugin({}, {}, G, S, gauss, Setting::AR1), DomainError);
}

TEST_CASE("negative plug-in values are clipped", "[central]") {
  // Residuals +/-0.5: I0 = 0.25, I1 = 0, I2 = 0.0625, so (I2 - 1) E L^2 < 0.
  const std::vector<double> half{0.5, -0.5};
  const std::vector<double> lag{0.0, 0.0};
  const auto r = tau2_plugin(half, lag, Perturbation::zero(), Perturbation::constant(1.0),
                             ScoreFamily::gaussian(), Setting::General, MomentSource::Residual);
  CHECK(r.clipped);
  CHECK(r.value == 0.0);
}

TEST_CASE("W^S correction and tangent estimators", "[central]") {
  CentralEval ev;
  ev.v = 0.5;
  ev.grad = {2.0, -1.0};
  const std::vector<double> tn{0.4, 0.2}, tN{0.5, 0.1};
  CHECK_THAT(ws_correct(ev, tn, tN), WithinAbs(0.5 + 2.0 * 0.1 + (-1.0) * (-0.1), 1e-15));
  const auto m0 = modify_estimator_multi(tn, tN, ev, 0);
  CHECK_THAT(m0[0], WithinAbs(0.4 + 0.3 / 2.0, 1e-15));
  CHECK(m0[1] == 0.2);
  const auto m1 = modify_estimator_multi(tn, tN, ev, 1);
  CHECK_THAT(m1[1], WithinAbs(0.2 + 0.3 / -1.0, 1e-15));
  // The corrected coordinate reproduces the full linear shift.
  CHECK_THAT(ev.grad[0] * (m0[0] - tn[0]), WithinAbs(ws_correct(ev, tn, tN) - ev.v, 1e-15));

  CHECK(modify_estimator_univ(0.3, SEstimatorConfig{}, 0.55) == 0.55);

  CentralEval flat;
  flat.grad = {0.0, 0.0};
  CHECK_THROWS_AS(ws_correct(flat, tn, tN), ConditionViolation);
  ev.grad = {0.0, 1.0};
  CHECK_THROWS_AS(modify_estimator_multi(tn, tN, ev, 0), ConditionViolation);
  CHECK_THROWS_AS(modify_estimator_multi(tn, tN, ev, 2), DomainError);
}

TEST_CASE("equivalence diagnostic", "[central]") {
  CentralEval truth, ext, fit;
  truth.v = 1.0;
  ext.v = 0.75;
  fit.v = 0.5;
  fit.grad = {2.0};
  const std::vector<double> tn{0.4}, tN{0.45};
  const auto d = equivalence_diagnostic(truth, ext, fit, tn, tN, 1.0);
  CHECK(d.delta == 0.25);
  CHECK_THAT(d.correction, WithinAbs(0.1, 1e-15));
  CHECK(d.rate_exponent == 0.25);
}

TEST_CASE("input checks", "[central]") {
  const std::vector<double> y{1.0};
  CHECK_THROWS_AS(central_ar1(y, 0.5, Perturbation::inv_quad(), ScoreFamily::gaussian()), DomainError);
  ModelConfig cfg;
  const std::vector<double> path{0.1, 0.2, 0.3, 0.4};
  const std::vector<double> two{0.1, 0.2};
  CHECK_THROWS_AS(central_for(cfg, path, two), DomainError);
  CHECK(setting_for(ModelKind::ArchPerturbed) == Setting::ARCH);
  CHECK(setting_for(ModelKind::ARm) == Setting::General);
}

TEST_CASE("hand-computed central sequences", "[central]") {
  const auto G = Perturbation::inv_quad();
  const auto gauss = ScoreFamily::gaussian();
  const std::vector<double> two{1.0, 0.5};
  CHECK(central_ar1(two, 0.5, G, gauss).v == 0.0);
  const std::vector<double> three{1.0, 0.5, 1.0};
  // eps = (0, 0.75), G(0.5) = 0.8
  CHECK_THAT(central_ar1(three, 0.5, G, gauss).v, WithinRel(0.6 / std::sqrt(2.0), 1e-14));
  // eps = 0, N(0) = 1, L(1) = 0.5
  CHECK_THAT(central_arch(two, 0.5, G, G, gauss).v, WithinAbs(-0.5, 1e-15));
  const std::vector<double> zeros(5, 0.0);
  CHECK(central_ar1(zeros, 0.3, G, gauss).v == 0.0);
  CHECK(central_arch(zeros, 0.3, G, Perturbation::zero(), gauss).v == 0.0);
}

TEST_CASE("plug-in variance with L passed directly", "[central]") {
  const auto y = ar1_path(0.6, 300, 8);
  const auto G = Perturbation::inv_quad();
  std::vector<double> eps, lag;
  double g2 = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    eps.push_back(y[i] - 0.6 * y[i - 1]);
    lag.push_back(y[i - 1]);
    g2 += G(y[i - 1]) * G(y[i - 1]);
  }
  const double n = static_cast<double>(lag.size());
  const auto est = tau2_plugin(eps, lag, G, G, ScoreFamily::gaussian(), Setting::ARCH);
  CHECK_THAT(est.value, WithinRel(g2 / n + 0.5 * g2 / n, 1e-12));
}

TEST_CASE("central sequence is centered under the null", "[central]") {
  const std::size_t reps = 2000;
  double sum = 0.0, sum2 = 0.0;
  for (std::uint64_t r = 0; r < reps; ++r) {
    const double v = central_ar1(ar1_path(0.6, 400, 500 + r), 0.6, Perturbation::inv_quad(), ScoreFamily::gaussian()).v;
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum2 / reps - mean * mean) / reps);
  CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("worked correction examples", "[central]") {
  CentralEval at_fit;
  at_fit.v = 0.3;
  at_fit.grad = {2.0};
  const std::vector<double> tn{0.5}, tN{0.55};
  CHECK_THAT(ws_correct(at_fit, tn, tN), WithinAbs(0.4, 1e-15));

  CentralEval multi;
  multi.grad = {2.0, 4.0};
  const std::vector<double> mn{0.5, 0.3}, mN{0.6, 0.35};
  const auto moved = modify_estimator_multi(mn, mN, multi, 0);
  CHECK_THAT(moved[0] - 0.5, WithinAbs(0.2, 1e-12));
  CHECK(moved[1] == 0.3);
}
