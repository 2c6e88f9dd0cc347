#pragma once

#include "lancorr/dgp.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace lancorr {

/// Least-squares fit of an AR(m) regression Y_i = sum_j theta_j Y_{i-j} + eps_i.
struct FitResult {
  std::vector<double> theta;
  /// Innovation standard deviation: sqrt(sum eps_hat^2 / (n - m)).
  double sigma = 0.0;
  /// Estimated covariance of sqrt(n) (theta_hat - theta):
  /// sigma^2 * n * (X'X)^{-1}.
  Eigen::MatrixXd sigma_tilde;
  /// eps_hat_i = Y_i - theta_hat . (Y_{i-1}, ..., Y_{i-m}), i = m+1..n.
  std::vector<double> residuals;
  /// Number of observations the fit used.
  std::size_t n = 0;

  std::size_t order() const noexcept { return theta.size(); }
  /// sqrt(Sigma_tilde_jj): the standard deviation of sqrt(n)(theta_hat_j - theta_j).
  double asymptotic_sd(std::size_t j) const;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;  // 1 - alpha
  double center = 0.0;
  double half_width = 0.0;

  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

/**
 * Extended sample size for the S-estimator: N = floor(1 + n^(S + offset)).
 * offset = 1 is the default; offset = 0 gives the floor(1 + n^S) variant.
 */
struct SEstimatorConfig {
  double S = 1.0;
  int exponent_offset = 1;

  std::size_t extended_size(std::size_t n) const;
  bool operator==(const SEstimatorConfig&) const = default;
};

FitResult fit_ar1_lse(std::span<const double> y);
FitResult fit_ar1_lse(const SeriesPath& path);
FitResult fit_arm_lse(std::span<const double> y, std::size_t m);
FitResult fit_arm_lse(const SeriesPath& path, std::size_t m);

/// theta_hat +/- sqrt(Sigma_tilde) t_{alpha/2}(n-1) / sqrt(n). Requires a 1-coefficient fit.
Interval ci_univariate(const FitResult& fit, double level);
/// Per coordinate: theta_hat_j +/- sqrt(Sigma_tilde_jj) t_{alpha/2}(n-m) / sqrt(n).
std::vector<Interval> ci_simultaneous(const FitResult& fit, double level);

/// Upper alpha/2 quantile of Student's t with `df` degrees of freedom.
double student_t_upper(double alpha, double df);

/// Supplier of observations from one process.
class DataSource {
 public:
  virtual ~DataSource() = default;
  /// Largest number of observations the source can supply.
  virtual std::size_t capacity() const = 0;
  /// First `count` observations; throws InsufficientDataError beyond capacity().
  virtual std::vector<double> observations(std::size_t count, std::uint64_t seed) const = 0;
};

/// Simulates the configured model; the seed selects the realization.
class SimulatedSource final : public DataSource {
 public:
  explicit SimulatedSource(ModelConfig config);
  std::size_t capacity() const override;
  std::vector<double> observations(std::size_t count, std::uint64_t seed) const override;
  const ModelConfig& config() const noexcept { return config_; }

 private:
  ModelConfig config_;
};

/// A fixed recorded series; the seed is ignored.
class RecordedSource final : public DataSource {
 public:
  explicit RecordedSource(std::vector<double> y) : y_(std::move(y)) {}
  std::size_t capacity() const override { return y_.size(); }
  std::vector<double> observations(std::size_t count, std::uint64_t seed) const override;

 private:
  std::vector<double> y_;
};

struct SEstimate {
  FitResult fit;  // LSE on the first N observations
  std::size_t n = 0;
  double S = 0.0;
  std::size_t N = 0;
};

SEstimate s_estimate(const DataSource& source, std::size_t n, const SEstimatorConfig& cfg,
                     std::uint64_t seed, std::size_t order = 1);

/// One row `n,m,theta_hat_1..m,sigma_hat,sigma_tilde_1..m` (no header).
void write_fit_csv_row(std::ostream& out, const FitResult& fit);
void write_fit_csv_header(std::ostream& out, std::size_t m);

}  // namespace lancorr
