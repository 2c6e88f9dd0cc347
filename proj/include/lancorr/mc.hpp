#pragma once

#include "lancorr/central.hpp"
#include "lancorr/dgp.hpp"
#include "lancorr/estimate.hpp"
#include "lancorr/testbench.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lancorr {

/**
 * Seed for one (replicate, stream) pair. SplitMix64 finalizers are applied to
 * the master seed, the FNV-1a hash of the stream label and the replicate id;
 * for a fixed master and stream the map replicate_id -> seed is a bijection,
 * so distinct replicates never collide.
 */
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate_id,
                          std::string_view stream);

enum class Hypothesis { H0, H1n };

std::string to_string(Hypothesis h);
Hypothesis parse_hypothesis(std::string_view text);

struct ExperimentConfig {
  /// DGP and test directions. alpha / beta are set per sample size from the hypothesis.
  ModelConfig model;
  std::vector<std::size_t> sample_sizes;
  std::size_t replicates = 1000;
  double alpha = 0.05;  // test level
  SEstimatorConfig s_config;
  std::vector<Flavor> flavors{Flavor::Oracle, Flavor::LSE, Flavor::SEstimator};
  std::uint64_t master_seed = 1;
  Hypothesis hypothesis = Hypothesis::H1n;
  MomentSource moments = MomentSource::Population;
  /// Drift simulated under H1n when it differs from the test direction G.
  std::optional<Perturbation> dgp_drift;
  /// Confidence level for coverage runs.
  double level = 0.95;
  /// Worker threads; 0 = hardware concurrency. Never changes results.
  unsigned threads = 0;
  /// Keep per-replicate V_n and tau^2 values in the curve.
  bool keep_traces = false;

  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

struct PowerEntry {
  std::size_t n = 0;
  Flavor flavor = Flavor::Oracle;
  std::size_t rejections = 0;
  std::size_t replicates = 0;  // successful replicates
  std::size_t failures = 0;
  double power = 0.0;
  double mc_se = 0.0;
  bool se_degenerate = false;  // fewer than 2 replicates or p in {0, 1}
  double tau2_mean = 0.0;
  double theory_tau = 0.0;   // 1 - Phi(Z(alpha) - sqrt(tau2_mean))
  double theory_tau2 = 0.0;  // 1 - Phi(Z(alpha) - tau2_mean)
  /// Distinct failure reasons, at most a handful.
  std::vector<std::string> failure_reasons;
  /// Replicate-indexed traces (NaN where a replicate failed); filled when keep_traces.
  std::vector<double> v_trace;
  std::vector<double> tau2_trace;
};

struct PowerCurve {
  ModelKind model = ModelKind::AR1Perturbed;
  Hypothesis hypothesis = Hypothesis::H1n;
  double alpha = 0.05;
  std::vector<PowerEntry> entries;  // ordered by (grid position, flavor position)

  const PowerEntry& at(std::size_t n, Flavor flavor) const;
};

/**
 * For each sample size and replicate: simulate one path (length max(n, N)
 * when the S-estimator flavor is requested), take its first n values as the
 * test sample and evaluate every flavor on that same sample:
 *   Oracle      the true theta,
 *   LSE         least squares on the n test observations,
 *   SEstimator  least squares on all N = floor(1 + n^(S+1)) observations.
 * Failed replicates are counted per entry; more than 1% failures throws ExperimentError.
 */
PowerCurve run_experiment(const ExperimentConfig& cfg);

struct CoverageResult {
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::size_t failures = 0;
  double level = 0.0;
  std::vector<double> coverage;  // per coordinate
  std::vector<double> mc_se;
};

/// Empirical per-coordinate coverage of the simultaneous intervals under H0.
CoverageResult run_coverage(const ExperimentConfig& cfg, std::size_t n);

struct EquivalenceRow {
  std::size_t n = 0;
  std::size_t N = 0;
  std::size_t replicates = 0;
  double median_extended_gap = 0.0;  // |V_n(theta) - V_n(theta_N)|
  double median_fit_gap = 0.0;       // |V_n(theta) - V_n(theta_n)|
  double median_ws_gap = 0.0;        // |V_n(theta) - W^S_n(theta_n)|
  double median_slope = 0.0;         // |grad V_n(theta_n)| / sqrt(n), first coordinate
  double median_scaled_error = 0.0;  // n^(S/4 + 1/2) |theta_N - theta|, first coordinate
};

/// Equivalence of the true and estimated central sequences under H0.
std::vector<EquivalenceRow> run_equivalence(const ExperimentConfig& cfg);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
  double critical_value = 0.0;
  double level = 0.0;
  bool pass = false;
  std::size_t n = 0;
};

/// One-sample Kolmogorov-Smirnov test of already-standardized samples against N(0, 1).
KsResult ks_normality(std::span<const double> samples, double level = 0.01);

/// Asymptotic Kolmogorov survival function P(sqrt(n) D > lambda).
double kolmogorov_survival(double lambda);

/// Largest relative discrepancy between the analytic gradient of V_n and
/// Richardson-extrapolated central differences (steps h and h/2).
double grad_fd_check(Setting setting, std::span<const double> y, std::span<const double> theta,
                     const Perturbation& G, const Perturbation& L, const ScoreFamily& family,
                     double step = 1e-3);

struct GradCheckSummary {
  std::size_t instances = 0;
  double max_rel_error = 0.0;
  std::size_t worst_instance = 0;
};

/// Random (path, theta) instances: null paths of length 200..1000, theta drawn
/// inside the stationary region and the evaluation point jittered by up to 0.1.
/// General draws orders 1..3.
GradCheckSummary grad_check_study(Setting setting, const ScoreFamily& family, std::size_t instances,
                                  std::uint64_t master_seed, double step = 1e-3);

}  // namespace lancorr
