#pragma once

#include "lancorr/estimate.hpp"
#include "lancorr/perturbation.hpp"
#include "lancorr/score_family.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace lancorr {

/// Which central sequence / LAN variance formula applies.
///  AR1:     V = -n^{-1/2} sum M_f(eps_i) G,          tau^2 = I0 E[G^2]
///  ARCH:    V adds sum N_f(eps_i) L,                 tau^2 = I0 E[G^2] + (I2-1)/4 E[B^2] + I1 E[G B]
///  General: same V as ARCH, unit conditional scale,  tau^2 = I0 E[G^2] + (I2-1) E[L^2] + 2 I1 E[G L]
/// In the ARCH formula B is the variance perturbation; V uses L = B/2.
enum class Setting { AR1, ARCH, General };

/// Where the Fisher-type moments I_j in tau^2 come from.
///  Population: the family's quadrature values.
///  Residual:   sample means of eps^j M_f(eps)^2 over the residuals at the
///              evaluation parameter.
enum class MomentSource { Population, Residual };

struct CentralEval {
  double v = 0.0;
  std::vector<double> grad;
  double tau2 = 0.0;
  bool tau2_clipped = false;
  std::vector<double> eval_parameter;
  /// Number of summands (path length minus order).
  std::size_t n = 0;
};

CentralEval central_ar1(std::span<const double> y, double theta, const Perturbation& G,
                        const ScoreFamily& family,
                        MomentSource moments = MomentSource::Population);

/// tau^2 uses the ARCH formula with B = 2 L.
CentralEval central_arch(std::span<const double> y, double theta, const Perturbation& G,
                         const Perturbation& L, const ScoreFamily& family,
                         MomentSource moments = MomentSource::Population);

CentralEval central_arm(std::span<const double> y, std::span<const double> theta,
                        const Perturbation& G, const Perturbation& L, const ScoreFamily& family,
                        MomentSource moments = MomentSource::Population);

/// Central sequence for the model kind in `config` (AR1 / ARCH / General).
CentralEval central_for(const ModelConfig& config, std::span<const double> y,
                        std::span<const double> theta,
                        MomentSource moments = MomentSource::Population);

/// Only V_n, no gradient or tau^2. Used by finite-difference checks.
double central_value(Setting setting, std::span<const double> y, std::span<const double> theta,
                     const Perturbation& G, const Perturbation& L, const ScoreFamily& family);

struct Tau2Estimate {
  double value = 0.0;
  bool clipped = false;  // raw estimate was negative and has been set to 0
};

/**
 * Plug-in LAN variance. `residuals[i]` pairs with `lagged[i]` (= Y_{i-1}).
 * `second` is B for Setting::ARCH and L otherwise; it is ignored for AR1.
 */
Tau2Estimate tau2_plugin(std::span<const double> residuals, std::span<const double> lagged,
                         const Perturbation& G, const Perturbation& second,
                         const ScoreFamily& family, Setting setting,
                         MomentSource moments = MomentSource::Population);

/// W^S = V_n(theta_n) + grad V_n(theta_n) . (theta_N - theta_n).
/// Throws ConditionViolation if the gradient vanishes.
double ws_correct(const CentralEval& at_fit, std::span<const double> theta_n,
                  std::span<const double> theta_N);

/// The univariate tangent-space estimator coincides with the S-estimator.
double modify_estimator_univ(double theta_n, const SEstimatorConfig& cfg, double theta_N);

/**
 * Tangent-space estimator moving only coordinate j (0-based):
 *   rho_j = grad . (theta_N - theta_n) / grad_j,   result = theta_n + rho_j e_j.
 * Throws ConditionViolation when grad_j = 0.
 */
std::vector<double> modify_estimator_multi(std::span<const double> theta_n,
                                           std::span<const double> theta_N,
                                           const CentralEval& at_fit, std::size_t j);

struct EquivalenceDiagnostic {
  double delta = 0.0;          // |V_n(theta) - V_n(theta_N)|
  double correction = 0.0;     // W^S - V_n(theta_n)
  double rate_exponent = 0.0;  // S / 4
};

EquivalenceDiagnostic equivalence_diagnostic(const CentralEval& at_truth,
                                             const CentralEval& at_extended,
                                             const CentralEval& at_fit,
                                             std::span<const double> theta_n,
                                             std::span<const double> theta_N, double S);

Setting setting_for(ModelKind kind) noexcept;

}  // namespace lancorr
