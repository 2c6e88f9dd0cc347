#include "lancorr/dgp.hpp"

#include "lancorr/detail/format.hpp"
#include "lancorr/errors.hpp"

#include <Eigen/Eigenvalues>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace lancorr {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::AR1Perturbed:
      return "ar1";
    case ModelKind::ArchPerturbed:
      return "arch";
    case ModelKind::ARm:
      return "arm";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "ar1") return ModelKind::AR1Perturbed;
  if (text == "arch") return ModelKind::ArchPerturbed;
  if (text == "arm") return ModelKind::ARm;
  throw DomainError("unknown model '" + std::string(text) + "' (expected ar1, arch or arm)");
}

StationarityReport check_stationarity(std::span<const double> theta) {
  if (theta.empty()) throw DomainError("stationarity check needs at least one coefficient");
  const auto m = static_cast<Eigen::Index>(theta.size());
  // Roots of 1 - sum theta_j z^j are the reciprocals of the companion eigenvalues.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) companion(0, j) = theta[static_cast<std::size_t>(j)];
  for (Eigen::Index j = 1; j < m; ++j) companion(j, j - 1) = 1.0;

  Eigen::VectorXcd eig;
  if (m == 1) {
    eig = Eigen::VectorXcd::Constant(1, theta[0]);
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    eig = solver.eigenvalues();
  }

  StationarityReport report;
  report.stationary = true;
  for (Eigen::Index k = 0; k < eig.size(); ++k) {
    const double lambda = std::abs(eig[k]);
    const double modulus =
        lambda == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / lambda;
    report.root_moduli.push_back(modulus);
    if (!(lambda < 1.0)) report.stationary = false;
  }
  std::sort(report.root_moduli.begin(), report.root_moduli.end());
  return report;
}

void ModelConfig::validate() const {
  if (theta.empty()) throw DomainError("model needs at least one autoregressive coefficient");
  for (double t : theta) {
    if (!std::isfinite(t)) throw DomainError("autoregressive coefficients must be finite");
  }
  if (kind != ModelKind::ARm && theta.size() != 1) {
    throw DomainError(to_string(kind) + " model takes exactly one coefficient");
  }
  if (lag_window != 1) {
    throw DomainError("only lag window s = 1 is supported (got " + std::to_string(lag_window) + ")");
  }
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw DomainError("perturbation amplitudes must be finite");
  }
  if (kind != ModelKind::ARm && !(std::abs(theta[0]) < 1.0)) {
    throw StationarityError("|theta| must be < 1 (got " + detail::shortest(theta[0]) + ")");
  }
  if (kind == ModelKind::ARm && !check_stationarity(theta).stationary) {
    throw StationarityError("AR characteristic polynomial has a root in the closed unit disc");
  }
}

namespace {

enum class ScaleMode { Unit, ArchSqrt, Linear };

class InnovationSampler {
 public:
  InnovationSampler(const ScoreFamily& family, std::uint64_t seed)
      : engine_(seed), gaussian_(family.kind() == FamilyKind::Gaussian) {
    if (!gaussian_) {
      student_ = boost::random::student_t_distribution<double>(family.dof());
      scale_ = std::sqrt((family.dof() - 2.0) / family.dof());
    }
  }

  double operator()() {
    if (gaussian_) return normal_(engine_);
    return scale_ * student_(engine_);
  }

 private:
  std::mt19937_64 engine_;
  bool gaussian_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
  boost::random::student_t_distribution<double> student_{3.0};
  double scale_ = 1.0;
};

SeriesPath run_recursion(const ModelConfig& config, std::size_t n, std::uint64_t seed,
                         ScaleMode mode) {
  config.validate();
  const std::size_t m = config.order();
  if (n < m + 1) {
    throw DomainError("path length " + std::to_string(n) + " is below order + 1 = " +
                      std::to_string(m + 1));
  }

  InnovationSampler draw(config.family, seed);
  // lags[0] = Y_{i-1}, lags[1] = Y_{i-2}, ...
  std::vector<double> lags(m);
  for (auto& v : lags) v = draw();

  SeriesPath path;
  path.config = config;
  path.seed = seed;
  path.y.reserve(n);
  path.eps.reserve(n);

  const double alpha = config.alpha;
  const double beta = config.beta;
  const std::size_t total = config.burn_in + n;
  for (std::size_t step = 0; step < total; ++step) {
    const double prev = lags[0];
    double mean = 0.0;
    for (std::size_t j = 0; j < m; ++j) mean += config.theta[j] * lags[j];
    mean += alpha * config.G(prev);

    double scale = 1.0;
    if (mode == ScaleMode::ArchSqrt) {
      const double s2 = 1.0 + beta * config.B(prev);
      if (!(s2 > 0.0) || !std::isfinite(s2)) {
        throw NumericError("ARCH conditional variance 1 + beta B(y) is not positive");
      }
      scale = std::sqrt(s2);
    } else if (mode == ScaleMode::Linear) {
      scale = 1.0 + beta * config.L(prev);
      if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw NumericError("conditional scale 1 + beta L(y) is not positive");
      }
    }

    const double eps = draw();
    const double y = mean + scale * eps;
    if (!std::isfinite(y)) throw NumericError("simulated path diverged");

    for (std::size_t j = m - 1; j > 0; --j) lags[j] = lags[j - 1];
    lags[0] = y;
    if (step >= config.burn_in) {
      path.y.push_back(y);
      path.eps.push_back(eps);
    }
  }
  return path;
}

}  // namespace

SeriesPath simulate_ar1(const ModelConfig& config, std::size_t n, std::uint64_t seed) {
  if (config.order() != 1) throw DomainError("AR(1) simulation needs one coefficient");
  return run_recursion(config, n, seed, ScaleMode::Unit);
}

SeriesPath simulate_arch(const ModelConfig& config, std::size_t n, std::uint64_t seed) {
  if (config.order() != 1) throw DomainError("ARCH simulation needs one coefficient");
  return run_recursion(config, n, seed, ScaleMode::ArchSqrt);
}

SeriesPath simulate_arm(const ModelConfig& config, std::size_t n, std::uint64_t seed) {
  return run_recursion(config, n, seed, ScaleMode::Linear);
}

SeriesPath simulate(const ModelConfig& config, std::size_t n, std::uint64_t seed) {
  switch (config.kind) {
    case ModelKind::AR1Perturbed:
      return simulate_ar1(config, n, seed);
    case ModelKind::ArchPerturbed:
      return simulate_arch(config, n, seed);
    case ModelKind::ARm:
      return simulate_arm(config, n, seed);
  }
  throw DomainError("unknown model kind");
}

void write_path_csv(std::ostream& out, std::span<const double> y) {
  out << "index,y\n";
  for (std::size_t i = 0; i < y.size(); ++i) {
    out << (i + 1) << ',' << detail::sig17(y[i]) << '\n';
  }
  if (!out) throw IoError("failed to write path CSV");
}

std::vector<double> read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "index,y") {
    throw ParseError(1, "path CSV must start with the header 'index,y'");
  }
  std::vector<double> y;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = detail::trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    double value = 0.0;
    if (comma == std::string_view::npos ||
        !detail::parse_double(detail::trim(row.substr(comma + 1)), value) ||
        !std::isfinite(value)) {
      throw ParseError(lineno, "malformed path row '" + std::string(row) + "'");
    }
    y.push_back(value);
  }
  return y;
}

}  // namespace lancorr
