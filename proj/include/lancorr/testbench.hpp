#pragma once

#include "lancorr/central.hpp"

#include <string>
#include <string_view>

namespace lancorr {

/// Which parameter the central sequence is evaluated at.
enum class Flavor { Oracle, LSE, SEstimator };

std::string to_string(Flavor flavor);
/// Accepts "oracle", "lse", "s" / "s_estimator".
Flavor parse_flavor(std::string_view text);

struct TestOutcome {
  double statistic = 0.0;  // V_n / tau_hat
  double threshold = 0.0;  // Z(alpha)
  bool reject = false;     // statistic >= threshold
  double alpha = 0.0;
  Flavor flavor = Flavor::Oracle;
};

/// One-sided Neyman-Pearson test I{V_n / tau >= Z(alpha)}.
/// Throws DegenerateVarianceError when tau^2 = 0.
TestOutcome np_decide(const CentralEval& eval, double alpha, Flavor flavor);

/// Gaussian power shift convention.
///  TauSquared: 1 - Phi(Z(alpha) - tau^2)
///  LeCamTau:        1 - Phi(Z(alpha) - tau), from standardizing N(tau^2, tau^2)
enum class PowerConvention { TauSquared, LeCamTau };

double theoretical_power(double tau2, double alpha, PowerConvention convention);

struct LimitLaw {
  double mean = 0.0;
  double variance = 0.0;
};

/// Limit law of V_n under the contiguous alternative: N(tau^2, tau^2).
LimitLaw lecam_prediction(double tau2);

double normal_cdf(double x);
double normal_upper_quantile(double alpha);  // Z(alpha): P(Z > Z(alpha)) = alpha

}  // namespace lancorr
