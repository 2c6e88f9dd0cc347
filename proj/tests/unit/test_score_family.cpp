#include "catch_amalgamated.hpp"

#include "lancorr/errors.hpp"
#include "lancorr/dgp.hpp"
#include "lancorr/score_family.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <functional>

using namespace lancorr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Closed forms for the unit-variance t: location information of t_nu is
// (nu+1)/(nu+3), rescaled by nu/(nu-2); the scale information 2 nu/(nu+3) is
// scale invariant and gives E[(x M)^2] = 2 nu/(nu+3) + 1.
double t_i0(double nu) { return (nu + 1.0) * nu / ((nu + 3.0) * (nu - 2.0)); }
double t_i2(double nu) { return 2.0 * nu / (nu + 3.0) + 1.0; }

double central_diff(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("gaussian moments", "[score]") {
  const auto g = ScoreFamily::gaussian();
  CHECK_THAT(g.fisher_moment(0), WithinAbs(1.0, 1e-10));
  CHECK_THAT(g.fisher_moment(1), WithinAbs(0.0, 1e-10));
  CHECK_THAT(g.fisher_moment(2), WithinAbs(3.0, 1e-10));
  CHECK(g.score(1.5) == -1.5);
  CHECK(g.nf(2.0) == 1.0 - 4.0);
  CHECK_THROWS_AS(g.fisher_moment(3), DomainError);
  CHECK_THROWS_AS(g.fisher_moment(-1), DomainError);
}

TEST_CASE("student-t moments match closed forms", "[score]") {
  for (double nu : {3.5, 5.0, 7.0, 12.0, 30.0}) {
    INFO("nu = " << nu);
    const auto t = ScoreFamily::student_t(nu);
    CHECK_THAT(t.fisher_moment(0), WithinRel(t_i0(nu), 1e-9));
    CHECK_THAT(t.fisher_moment(1), WithinAbs(0.0, 1e-10));
    CHECK_THAT(t.fisher_moment(2), WithinRel(t_i2(nu), 1e-9));
  }
}

TEST_CASE("student-t density is the rescaled t density", "[score]") {
  const double nu = 5.0;
  const double s = std::sqrt((nu - 2.0) / nu);
  const boost::math::students_t_distribution<double> ref(nu);
  const auto t = ScoreFamily::student_t(nu);
  for (double x : {-4.0, -1.0, 0.0, 0.3, 2.5, 10.0}) {
    CHECK_THAT(t.density(x), WithinRel(boost::math::pdf(ref, x / s) / s, 1e-12));
    CHECK_THAT(t.log_density(x), WithinRel(std::log(t.density(x)), 1e-12));
  }
}

TEST_CASE("score is the log-density derivative", "[score]") {
  for (const auto& fam : {ScoreFamily::gaussian(), ScoreFamily::student_t(5.0), ScoreFamily::student_t(7.0)}) {
    INFO(fam.name());
    for (double x : {-3.0, -0.7, 0.0, 0.4, 1.9, 6.0}) {
      const double fd = central_diff([&](double u) { return fam.log_density(u); }, x);
      CHECK_THAT(fam.score(x), WithinAbs(fd, 1e-8));
      const auto d = fam.score_derivs(x);
      CHECK_THAT(d.first, WithinAbs(central_diff([&](double u) { return fam.score(u); }, x), 1e-7));
      CHECK_THAT(d.second,
                 WithinAbs(central_diff([&](double u) { return fam.score_derivs(u).first; }, x), 1e-6));
      CHECK_THAT(fam.nf_deriv(x), WithinAbs(central_diff([&](double u) { return fam.nf(u); }, x), 1e-7));
      CHECK(fam.score_unchecked(x) == fam.score(x));
    }
  }
}

TEST_CASE("student-t rejects nu below 3", "[score]") {
  CHECK_THROWS_AS(ScoreFamily::student_t(2.5), DomainError);
  CHECK_THROWS_AS(ScoreFamily::student_t(std::nan("")), DomainError);
  CHECK_NOTHROW(ScoreFamily::student_t(3.0));
}

TEST_CASE("non-finite arguments are rejected by the checked score", "[score]") {
  const auto g = ScoreFamily::gaussian();
  CHECK_THROWS_AS(g.score(INFINITY), DomainError);
  CHECK_THROWS_AS(g.score_derivs(std::nan("")), DomainError);
}

TEST_CASE("regularity identities hold", "[score][regularity]") {
  for (const auto& fam : {ScoreFamily::gaussian(), ScoreFamily::student_t(5.0), ScoreFamily::student_t(7.0)}) {
    INFO(fam.name());
    const auto rep = check_regularity(fam);
    CHECK(rep.passes());
    CHECK(rep.max_abs_residual() < 1e-6);
    CHECK_THAT(rep.normalization, WithinAbs(1.0, 1e-9));
    CHECK_THAT(rep.mean, WithinAbs(0.0, 1e-9));
    CHECK_THAT(rep.variance, WithinAbs(1.0, 1e-8));
    for (std::size_t i = 0; i < 5; ++i) CHECK(rep.residuals[i] == rep.values[i] - rep.targets[i]);
    CHECK_FALSE(rep.tail_flag);
  }
}

TEST_CASE("heavy tails raise the tail flag", "[score][regularity]") {
  const auto rep = check_regularity(ScoreFamily::student_t(3.0));
  CHECK(rep.tail_flag);
}

TEST_CASE("family equality and names", "[score]") {
  CHECK(ScoreFamily::student_t(5.0) == ScoreFamily::student_t(5.0));
  CHECK_FALSE(ScoreFamily::student_t(5.0) == ScoreFamily::student_t(7.0));
  CHECK_FALSE(ScoreFamily::gaussian() == ScoreFamily::student_t(7.0));
  CHECK(ScoreFamily::gaussian().name() == "gaussian");
  CHECK(ScoreFamily::student_t(5.0).name() == "student-t(5)");
}

TEST_CASE("free-function spellings agree", "[score]") {
  const auto t = ScoreFamily::student_t(7.0);
  CHECK(eval_score(t, 0.8) == t.score(0.8));
  CHECK(eval_nf(t, 0.8) == t.nf(0.8));
  CHECK(eval_score_derivs(t, 0.8).first == t.score_derivs(0.8).first);
  CHECK(fisher_moment(t, 2) == t.fisher_moment(2));
}

TEST_CASE("worked score values", "[score]") {
  const auto g = ScoreFamily::gaussian();
  CHECK(g.score(0.0) == 0.0);
  CHECK(g.score_derivs(2.3).first == -1.0);
  CHECK(g.score_derivs(2.3).second == 0.0);
  CHECK(g.score_derivs(0.0).first == -1.0);
  CHECK(g.nf(0.0) == 1.0);
  CHECK(g.nf(1.0) == 0.0);

  const auto t5 = ScoreFamily::student_t(5.0);
  const double fd = central_diff([&](double u) { return t5.log_density(u); }, 1.0, 1e-6);
  CHECK_THAT(t5.score(1.0), WithinAbs(fd, 1e-8));
  CHECK(t5.score_derivs(0.0).second == 0.0);
  CHECK_THAT(t5.score_derivs(0.0).first,
             WithinAbs(central_diff([&](double u) { return t5.score(u); }, 0.0, 1e-6), 1e-8));

  const auto t7 = ScoreFamily::student_t(7.0);
  CHECK(t7.nf(2.0) == 1.0 + 2.0 * t7.score(2.0));
}

TEST_CASE("score is odd and its derivative matches differences on a grid", "[score]") {
  for (const auto& fam : {ScoreFamily::gaussian(), ScoreFamily::student_t(3.0), ScoreFamily::student_t(5.0)}) {
    for (double x = -10.0; x <= 10.0; x += 0.05) {
      CHECK(fam.score(-x) == -fam.score(x));
      const double fd = central_diff([&](double u) { return fam.score(u); }, x, 1e-5);
      const double d = fam.score_derivs(x).first;
      CHECK(std::abs(d - fd) <= 1e-6 * std::max(1.0, std::abs(d)));
      CHECK(fam.nf(x) == 1.0 + x * fam.score(x));
    }
  }
}

TEST_CASE("moments agree with Monte Carlo averages", "[score]") {
  for (const auto& fam : {ScoreFamily::gaussian(), ScoreFamily::student_t(7.0)}) {
    INFO(fam.name());
    ModelConfig white;
    white.theta = {0.0};
    white.family = fam;
    white.burn_in = 0;
    const auto eps = simulate(white, 1000000, 77).eps;
    for (int j = 0; j < 3; ++j) {
      double sum = 0.0, sum2 = 0.0;
      for (double e : eps) {
        const double v = std::pow(e, j) * fam.score(e) * fam.score(e);
        sum += v;
        sum2 += v * v;
      }
      const double n = static_cast<double>(eps.size());
      const double mean = sum / n;
      const double se = std::sqrt((sum2 / n - mean * mean) / n);
      CHECK(std::abs(mean - fam.fisher_moment(j)) < 4.0 * se);
    }
  }
}
