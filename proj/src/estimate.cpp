#include "lancorr/estimate.hpp"

#include "lancorr/detail/format.hpp"
#include "lancorr/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>
#include <ostream>

namespace lancorr {

namespace {

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError("confidence level must lie in (0, 1) (got " + detail::shortest(level) + ")");
  }
}

Interval make_interval(double center, double half_width, double level) {
  return {center - half_width, center + half_width, level, center, half_width};
}

}  // namespace

double FitResult::asymptotic_sd(std::size_t j) const {
  const auto k = static_cast<Eigen::Index>(j);
  return std::sqrt(std::max(0.0, sigma_tilde(k, k)));
}

std::size_t SEstimatorConfig::extended_size(std::size_t n) const {
  if (!(S > 0.0) || !std::isfinite(S)) {
    throw DomainError("S-estimator speed exponent must be positive (got " + detail::shortest(S) + ")");
  }
  if (n == 0) throw DomainError("sample size must be positive");
  const long double raw =
      1.0L + std::pow(static_cast<long double>(n), static_cast<long double>(S) + exponent_offset);
  if (!(raw < 9.0e15L)) throw DomainError("extended sample size overflows");
  return static_cast<std::size_t>(std::floor(raw));
}

FitResult fit_ar1_lse(std::span<const double> y) {
  if (y.size() < 3) throw DomainError("AR(1) least squares needs at least 3 observations");
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    sxy += y[i] * y[i - 1];
    sxx += y[i - 1] * y[i - 1];
  }
  if (!(sxx > 0.0)) throw DegenerateDesignError("lagged regressor has zero energy");

  FitResult fit;
  fit.n = y.size();
  const double theta = sxy / sxx;
  fit.theta = {theta};
  fit.residuals.resize(y.size() - 1);
  double ss = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double e = y[i] - theta * y[i - 1];
    fit.residuals[i - 1] = e;
    ss += e * e;
  }
  const double n = static_cast<double>(fit.n);
  const double sigma2 = ss / (n - 1.0);
  fit.sigma = std::sqrt(sigma2);
  fit.sigma_tilde = Eigen::MatrixXd::Constant(1, 1, sigma2 * n / sxx);
  return fit;
}

FitResult fit_ar1_lse(const SeriesPath& path) { return fit_ar1_lse(path.values()); }

FitResult fit_arm_lse(std::span<const double> y, std::size_t m) {
  if (m == 0) throw DomainError("AR order must be at least 1");
  if (y.size() <= 2 * m) {
    throw DomainError("AR(" + std::to_string(m) + ") least squares needs n > 2m (got n = " +
                      std::to_string(y.size()) + ")");
  }
  const auto mm = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(mm, mm);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(mm);
  Eigen::VectorXd row(mm);
  for (std::size_t i = m; i < y.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) row[static_cast<Eigen::Index>(j)] = y[i - j - 1];
    xtx.selfadjointView<Eigen::Lower>().rankUpdate(row);
    xty += y[i] * row;
  }
  xtx.triangularView<Eigen::StrictlyUpper>() = xtx.transpose();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xtx);
  qr.setThreshold(1e-12);
  if (qr.rank() < mm || !(xtx.diagonal().minCoeff() > 0.0)) {
    throw DegenerateDesignError("lag design matrix is rank deficient");
  }
  const Eigen::VectorXd theta = qr.solve(xty);

  FitResult fit;
  fit.n = y.size();
  fit.theta.assign(theta.data(), theta.data() + mm);
  fit.residuals.resize(y.size() - m);
  double ss = 0.0;
  for (std::size_t i = m; i < y.size(); ++i) {
    double pred = 0.0;
    for (std::size_t j = 0; j < m; ++j) pred += fit.theta[j] * y[i - j - 1];
    const double e = y[i] - pred;
    fit.residuals[i - m] = e;
    ss += e * e;
  }
  const double n = static_cast<double>(fit.n);
  const double sigma2 = ss / (n - static_cast<double>(m));
  fit.sigma = std::sqrt(sigma2);
  Eigen::MatrixXd inv = qr.inverse();
  fit.sigma_tilde = sigma2 * n * 0.5 * (inv + inv.transpose());
  return fit;
}

FitResult fit_arm_lse(const SeriesPath& path, std::size_t m) { return fit_arm_lse(path.values(), m); }

double student_t_upper(double alpha, double df) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(df > 0.0)) throw DomainError("Student-t degrees of freedom must be positive");
  boost::math::students_t_distribution<double> dist(df);
  return boost::math::quantile(boost::math::complement(dist, alpha / 2.0));
}

Interval ci_univariate(const FitResult& fit, double level) {
  check_level(level);
  if (fit.order() != 1) throw DomainError("univariate interval needs a one-coefficient fit");
  if (fit.n < 2) throw DomainError("univariate interval needs n >= 2");
  const double n = static_cast<double>(fit.n);
  const double t = student_t_upper(1.0 - level, n - 1.0);
  return make_interval(fit.theta[0], fit.asymptotic_sd(0) * t / std::sqrt(n), level);
}

std::vector<Interval> ci_simultaneous(const FitResult& fit, double level) {
  check_level(level);
  const std::size_t m = fit.order();
  if (m == 0 || fit.n <= m) throw DomainError("simultaneous intervals need n > m");
  if (fit.sigma_tilde.rows() != static_cast<Eigen::Index>(m) ||
      fit.sigma_tilde.cols() != static_cast<Eigen::Index>(m)) {
    throw DomainError("covariance matrix dimension does not match the fit order");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.sigma_tilde, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, fit.sigma_tilde.cwiseAbs().maxCoeff());
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < -1e-12 * scale ||
      !fit.sigma_tilde.allFinite()) {
    throw NumericError("observed covariance matrix is not positive semi-definite");
  }
  const double n = static_cast<double>(fit.n);
  const double t = student_t_upper(1.0 - level, n - static_cast<double>(m));
  std::vector<Interval> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    out.push_back(make_interval(fit.theta[j], fit.asymptotic_sd(j) * t / std::sqrt(n), level));
  }
  return out;
}

SimulatedSource::SimulatedSource(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::size_t SimulatedSource::capacity() const { return std::numeric_limits<std::size_t>::max(); }

std::vector<double> SimulatedSource::observations(std::size_t count, std::uint64_t seed) const {
  return simulate(config_, count, seed).y;
}

std::vector<double> RecordedSource::observations(std::size_t count, std::uint64_t) const {
  if (count > y_.size()) throw InsufficientDataError(count, y_.size());
  return {y_.begin(), y_.begin() + static_cast<std::ptrdiff_t>(count)};
}

SEstimate s_estimate(const DataSource& source, std::size_t n, const SEstimatorConfig& cfg,
                     std::uint64_t seed, std::size_t order) {
  const std::size_t big_n = cfg.extended_size(n);
  if (source.capacity() < big_n) throw InsufficientDataError(big_n, source.capacity());
  const auto y = source.observations(big_n, seed);
  SEstimate out;
  out.fit = order == 1 ? fit_ar1_lse(y) : fit_arm_lse(y, order);
  out.n = n;
  out.S = cfg.S;
  out.N = big_n;
  return out;
}

void write_fit_csv_header(std::ostream& out, std::size_t m) {
  out << "n,m";
  for (std::size_t j = 1; j <= m; ++j) out << ",theta_hat_" << j;
  out << ",sigma_hat";
  for (std::size_t j = 1; j <= m; ++j) out << ",sigma_tilde_" << j;
  out << '\n';
}

void write_fit_csv_row(std::ostream& out, const FitResult& fit) {
  out << fit.n << ',' << fit.order();
  for (double t : fit.theta) out << ',' << detail::sig17(t);
  out << ',' << detail::sig17(fit.sigma);
  for (Eigen::Index j = 0; j < fit.sigma_tilde.rows(); ++j) {
    out << ',' << detail::sig17(fit.sigma_tilde(j, j));
  }
  out << '\n';
  if (!out) throw IoError("failed to write fit CSV");
}

}  // namespace lancorr
