#include "lancorr/central.hpp"

#include "lancorr/errors.hpp"

#include <cmath>
#include <string>

namespace lancorr {

namespace {

void check_dimensions(std::span<const double> y, std::span<const double> theta) {
  if (theta.empty()) throw DomainError("central sequence needs at least one coefficient");
  if (y.size() < theta.size() + 1) {
    throw DomainError("path too short for a central sequence of order " +
                      std::to_string(theta.size()));
  }
  for (double t : theta) {
    if (!std::isfinite(t)) throw DomainError("evaluation parameter must be finite");
  }
}

struct Accumulated {
  double v = 0.0;
  std::vector<double> grad;
  std::vector<double> residuals;
  std::vector<double> lagged;
};

// Sums over i = m..n-1 of  M_f(eps_i) G(Y_{i-1}) [+ N_f(eps_i) L(Y_{i-1})]
// and of their theta-derivatives. d eps_i / d theta_k = -Y_{i-k}, so the
// derivative of the summand with respect to theta_k is
// -(M_f'(eps) G + N_f'(eps) L) Y_{i-k}.
Accumulated accumulate(Setting setting, std::span<const double> y, std::span<const double> theta,
                       const Perturbation& G, const Perturbation& L, const ScoreFamily& family,
                       bool with_grad, bool keep_residuals) {
  check_dimensions(y, theta);
  const std::size_t m = theta.size();
  const bool use_l = setting != Setting::AR1 && !L.is_zero();

  Accumulated acc;
  acc.grad.assign(with_grad ? m : 0, 0.0);
  if (keep_residuals) {
    acc.residuals.reserve(y.size() - m);
    acc.lagged.reserve(y.size() - m);
  }

  for (std::size_t i = m; i < y.size(); ++i) {
    double pred = 0.0;
    for (std::size_t j = 0; j < m; ++j) pred += theta[j] * y[i - j - 1];
    const double eps = y[i] - pred;
    if (!std::isfinite(eps)) throw DomainError("non-finite residual in central sequence");
    const double prev = y[i - 1];
    const double g = G(prev);
    const double score = family.score_unchecked(eps);

    double term = score * g;
    double dterm = 0.0;
    ScoreDerivs d{};
    if (with_grad) {
      d = family.score_derivs_unchecked(eps);
      dterm = d.first * g;
    }
    if (use_l) {
      const double l = L(prev);
      term += (1.0 + eps * score) * l;
      if (with_grad) dterm += (score + eps * d.first) * l;
    }
    acc.v += term;
    if (with_grad) {
      for (std::size_t k = 0; k < m; ++k) acc.grad[k] += dterm * y[i - k - 1];
    }
    if (keep_residuals) {
      acc.residuals.push_back(eps);
      acc.lagged.push_back(prev);
    }
  }
  return acc;
}

CentralEval evaluate(Setting setting, std::span<const double> y, std::span<const double> theta,
                     const Perturbation& G, const Perturbation& L, const ScoreFamily& family,
                     MomentSource moments) {
  auto acc = accumulate(setting, y, theta, G, L, family, true, true);
  CentralEval out;
  out.n = y.size() - theta.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(out.n));
  out.v = -acc.v * scale;
  out.grad = std::move(acc.grad);
  for (auto& g : out.grad) g *= scale;
  out.eval_parameter.assign(theta.begin(), theta.end());

  const Perturbation second = setting == Setting::ARCH ? L.scaled(2.0) : L;
  const auto tau2 = tau2_plugin(acc.residuals, acc.lagged, G, second, family, setting, moments);
  out.tau2 = tau2.value;
  out.tau2_clipped = tau2.clipped;
  return out;
}

}  // namespace

Setting setting_for(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::AR1Perturbed:
      return Setting::AR1;
    case ModelKind::ArchPerturbed:
      return Setting::ARCH;
    case ModelKind::ARm:
      return Setting::General;
  }
  return Setting::General;
}

CentralEval central_ar1(std::span<const double> y, double theta, const Perturbation& G,
                        const ScoreFamily& family, MomentSource moments) {
  const double th[1] = {theta};
  return evaluate(Setting::AR1, y, th, G, Perturbation::zero(), family, moments);
}

CentralEval central_arch(std::span<const double> y, double theta, const Perturbation& G,
                         const Perturbation& L, const ScoreFamily& family, MomentSource moments) {
  const double th[1] = {theta};
  return evaluate(Setting::ARCH, y, th, G, L, family, moments);
}

CentralEval central_arm(std::span<const double> y, std::span<const double> theta,
                        const Perturbation& G, const Perturbation& L, const ScoreFamily& family,
                        MomentSource moments) {
  return evaluate(Setting::General, y, theta, G, L, family, moments);
}

CentralEval central_for(const ModelConfig& config, std::span<const double> y,
                        std::span<const double> theta, MomentSource moments) {
  const Setting setting = setting_for(config.kind);
  if (setting != Setting::General && theta.size() != 1) {
    throw DomainError("AR(1)/ARCH central sequence takes one coefficient");
  }
  return evaluate(setting, y, theta, config.G,
                  setting == Setting::AR1 ? Perturbation::zero() : config.L, config.family,
                  moments);
}

double central_value(Setting setting, std::span<const double> y, std::span<const double> theta,
                     const Perturbation& G, const Perturbation& L, const ScoreFamily& family) {
  const auto acc = accumulate(setting, y, theta, G, L, family, false, false);
  return -acc.v / std::sqrt(static_cast<double>(y.size() - theta.size()));
}

Tau2Estimate tau2_plugin(std::span<const double> residuals, std::span<const double> lagged,
                         const Perturbation& G, const Perturbation& second,
                         const ScoreFamily& family, Setting setting, MomentSource moments) {
  if (residuals.empty() || residuals.size() != lagged.size()) {
    throw DomainError("tau^2 plug-in needs matching, non-empty residual and lag samples");
  }
  const double count = static_cast<double>(residuals.size());

  double i0 = 0.0, i1 = 0.0, i2 = 0.0;
  if (moments == MomentSource::Population) {
    i0 = family.fisher_moment(0);
    i1 = family.fisher_moment(1);
    i2 = family.fisher_moment(2);
  } else {
    for (double e : residuals) {
      const double m2 = family.score(e) * family.score(e);
      i0 += m2;
      i1 += e * m2;
      i2 += e * e * m2;
    }
    i0 /= count;
    i1 /= count;
    i2 /= count;
  }

  double g2 = 0.0, s2 = 0.0, gs = 0.0;
  for (double x : lagged) {
    const double g = G(x);
    const double s = second(x);
    g2 += g * g;
    s2 += s * s;
    gs += g * s;
  }
  g2 /= count;
  s2 /= count;
  gs /= count;

  double value = 0.0;
  switch (setting) {
    case Setting::AR1:
      value = i0 * g2;
      break;
    case Setting::ARCH:
      value = i0 * g2 + 0.25 * (i2 - 1.0) * s2 + i1 * gs;
      break;
    case Setting::General:
      value = i0 * g2 + (i2 - 1.0) * s2 + 2.0 * i1 * gs;
      break;
  }
  if (value < 0.0) return {0.0, true};
  return {value, false};
}

double ws_correct(const CentralEval& at_fit, std::span<const double> theta_n,
                  std::span<const double> theta_N) {
  const std::size_t m = at_fit.grad.size();
  if (theta_n.size() != m || theta_N.size() != m) {
    throw DomainError("W^S correction: parameter and gradient dimensions differ");
  }
  bool all_zero = true;
  for (double g : at_fit.grad) all_zero = all_zero && g == 0.0;
  if (m == 0 || all_zero) {
    throw ConditionViolation("W^S correction needs a non-vanishing gradient of V_n at theta_n");
  }
  double shift = 0.0;
  for (std::size_t k = 0; k < m; ++k) shift += at_fit.grad[k] * (theta_N[k] - theta_n[k]);
  return at_fit.v + shift;
}

double modify_estimator_univ(double theta_n, const SEstimatorConfig&, double theta_N) {
  if (!std::isfinite(theta_n) || !std::isfinite(theta_N)) {
    throw DomainError("estimators must be finite");
  }
  // p = theta_N - theta_n; theta_bar = theta_n + p.
  return theta_N;
}

std::vector<double> modify_estimator_multi(std::span<const double> theta_n,
                                           std::span<const double> theta_N,
                                           const CentralEval& at_fit, std::size_t j) {
  const std::size_t m = at_fit.grad.size();
  if (theta_n.size() != m || theta_N.size() != m) {
    throw DomainError("modified estimator: parameter and gradient dimensions differ");
  }
  if (j >= m) throw DomainError("coordinate index out of range");
  if (at_fit.grad[j] == 0.0) {
    throw ConditionViolation("partial derivative of V_n with respect to coordinate " +
                             std::to_string(j) + " vanishes");
  }
  double target = 0.0;
  for (std::size_t k = 0; k < m; ++k) target += at_fit.grad[k] * (theta_N[k] - theta_n[k]);
  std::vector<double> out(theta_n.begin(), theta_n.end());
  out[j] += target / at_fit.grad[j];
  return out;
}

EquivalenceDiagnostic equivalence_diagnostic(const CentralEval& at_truth,
                                             const CentralEval& at_extended,
                                             const CentralEval& at_fit,
                                             std::span<const double> theta_n,
                                             std::span<const double> theta_N, double S) {
  EquivalenceDiagnostic d;
  d.delta = std::abs(at_truth.v - at_extended.v);
  d.correction = ws_correct(at_fit, theta_n, theta_N) - at_fit.v;
  d.rate_exponent = S / 4.0;
  return d;
}

}  // namespace lancorr
