#pragma once

#include "lancorr/perturbation.hpp"
#include "lancorr/score_family.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lancorr {

enum class ModelKind { AR1Perturbed, ArchPerturbed, ARm };

std::string to_string(ModelKind kind);
/// Accepts "ar1", "arch", "arm".
ModelKind parse_model_kind(std::string_view text);

/**
 * Data-generating process configuration.
 *
 *   AR1Perturbed:  Y_i = theta Y_{i-1} + alpha G(Y_{i-1}) + eps_i
 *   ArchPerturbed: Y_i = theta Y_{i-1} + alpha G(Y_{i-1}) + sqrt(1 + beta B(Y_{i-1})) eps_i
 *   ARm:           Y_i = sum_j theta_j Y_{i-j} + alpha G(Y_{i-1}) + (1 + beta L(Y_{i-1})) eps_i
 *
 * alpha = beta = 0 is the null hypothesis; the contiguous alternative uses
 * n^{-1/2} for both. Only a lag window of 1 is supported.
 */
struct ModelConfig {
  ModelKind kind = ModelKind::AR1Perturbed;
  std::vector<double> theta{0.6};
  double alpha = 0.0;
  double beta = 0.0;
  Perturbation G = Perturbation::inv_quad();
  Perturbation L = Perturbation::inv_quad();
  Perturbation B = Perturbation::inv_quad(2.0);
  std::size_t lag_window = 1;
  ScoreFamily family = ScoreFamily::gaussian();
  std::size_t burn_in = 500;

  std::size_t order() const noexcept { return theta.size(); }

  /// Throws StationarityError / DomainError when the configuration is unusable.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

/// Observations Y_1..Y_n together with the innovations that produced them.
struct SeriesPath {
  std::vector<double> y;
  std::vector<double> eps;
  ModelConfig config;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return y.size(); }
  std::span<const double> values() const noexcept { return y; }
};

struct StationarityReport {
  bool stationary = false;
  /// Moduli of the roots of 1 - theta_1 z - ... - theta_m z^m (infinite for a
  /// vanishing leading coefficient), sorted ascending.
  std::vector<double> root_moduli;
};

StationarityReport check_stationarity(std::span<const double> theta);

SeriesPath simulate_ar1(const ModelConfig& config, std::size_t n, std::uint64_t seed);
SeriesPath simulate_arch(const ModelConfig& config, std::size_t n, std::uint64_t seed);
SeriesPath simulate_arm(const ModelConfig& config, std::size_t n, std::uint64_t seed);
/// Dispatches on config.kind.
SeriesPath simulate(const ModelConfig& config, std::size_t n, std::uint64_t seed);

/// CSV with header `index,y` and 17 significant digits per value.
void write_path_csv(std::ostream& out, std::span<const double> y);
std::vector<double> read_path_csv(std::istream& in);

}  // namespace lancorr
