#include "lancorr/testbench.hpp"

#include "lancorr/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>

namespace lancorr {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("test level alpha must lie in (0, 1)");
}

const boost::math::normal_distribution<double> kStdNormal{0.0, 1.0};

}  // namespace

std::string to_string(Flavor flavor) {
  switch (flavor) {
    case Flavor::Oracle:
      return "oracle";
    case Flavor::LSE:
      return "lse";
    case Flavor::SEstimator:
      return "s_estimator";
  }
  return "unknown";
}

Flavor parse_flavor(std::string_view text) {
  if (text == "oracle") return Flavor::Oracle;
  if (text == "lse") return Flavor::LSE;
  if (text == "s" || text == "s_estimator") return Flavor::SEstimator;
  throw DomainError("unknown estimator flavor '" + std::string(text) +
                    "' (expected oracle, lse or s_estimator)");
}

double normal_cdf(double x) { return boost::math::cdf(kStdNormal, x); }

double normal_upper_quantile(double alpha) {
  check_alpha(alpha);
  return boost::math::quantile(boost::math::complement(kStdNormal, alpha));
}

TestOutcome np_decide(const CentralEval& eval, double alpha, Flavor flavor) {
  check_alpha(alpha);
  if (!(eval.tau2 > 0.0)) {
    throw DegenerateVarianceError("tau^2 estimate is zero; the test statistic is undefined");
  }
  TestOutcome out;
  out.statistic = eval.v / std::sqrt(eval.tau2);
  out.threshold = normal_upper_quantile(alpha);
  out.reject = out.statistic >= out.threshold;
  out.alpha = alpha;
  out.flavor = flavor;
  return out;
}

double theoretical_power(double tau2, double alpha, PowerConvention convention) {
  check_alpha(alpha);
  if (!(tau2 >= 0.0) || !std::isfinite(tau2)) throw DomainError("tau^2 must be non-negative");
  if (tau2 == 0.0) return alpha;
  const double shift = convention == PowerConvention::LeCamTau ? std::sqrt(tau2) : tau2;
  return boost::math::cdf(boost::math::complement(kStdNormal, normal_upper_quantile(alpha) - shift));
}

LimitLaw lecam_prediction(double tau2) {
  if (!(tau2 >= 0.0)) throw DomainError("tau^2 must be non-negative");
  return {tau2, tau2};
}

}  // namespace lancorr
