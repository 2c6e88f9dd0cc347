#include "lancorr/mc.hpp"

#include "lancorr/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

namespace lancorr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxReasons = 5;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

unsigned worker_count(unsigned requested, std::size_t tasks) {
  unsigned hw = requested != 0 ? requested : std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(tasks, 1)));
}

// Runs body(i) for i in [0, count). Each index writes only its own slot, so
// results do not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  const unsigned workers = worker_count(threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  if (v.empty()) return kNaN;
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

std::string path_stream(std::size_t n) { return "path/n=" + std::to_string(n); }

FitResult fit_order(std::span<const double> y, std::size_t m) {
  return m == 1 ? fit_ar1_lse(y) : fit_arm_lse(y, m);
}

/// Model used to simulate sample size n under the configured hypothesis.
ModelConfig simulation_model(const ExperimentConfig& cfg, std::size_t n) {
  ModelConfig model = cfg.model;
  if (cfg.hypothesis == Hypothesis::H0) {
    model.alpha = 0.0;
    model.beta = 0.0;
  } else {
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    model.alpha = amp;
    model.beta = model.kind == ModelKind::AR1Perturbed ? 0.0 : amp;
    if (cfg.dgp_drift) model.G = *cfg.dgp_drift;
  }
  return model;
}

ModelConfig null_model(const ExperimentConfig& cfg) {
  ModelConfig model = cfg.model;
  model.alpha = 0.0;
  model.beta = 0.0;
  return model;
}

bool wants(const ExperimentConfig& cfg, Flavor f) {
  return std::find(cfg.flavors.begin(), cfg.flavors.end(), f) != cfg.flavors.end();
}

struct FlavorOutcome {
  bool ok = false;
  bool reject = false;
  double v = kNaN;
  double tau2 = kNaN;
  std::string reason;
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate_id,
                          std::string_view stream) {
  const std::uint64_t key = splitmix64(splitmix64(master) ^ fnv1a(stream));
  return splitmix64(key ^ replicate_id);
}

std::string to_string(Hypothesis h) { return h == Hypothesis::H0 ? "h0" : "h1"; }

Hypothesis parse_hypothesis(std::string_view text) {
  if (text == "h0" || text == "H0") return Hypothesis::H0;
  if (text == "h1" || text == "H1" || text == "h1n") return Hypothesis::H1n;
  throw DomainError("unknown hypothesis '" + std::string(text) + "' (expected h0 or h1)");
}

void ExperimentConfig::validate() const {
  model.validate();
  if (sample_sizes.empty()) throw DomainError("sample-size grid is empty");
  if (replicates < 1) throw DomainError("replicate count must be at least 1");
  if (flavors.empty()) throw DomainError("no estimator flavors requested");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("test level alpha must lie in (0, 1)");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("coverage level must lie in (0, 1)");
  for (std::size_t n : sample_sizes) {
    if (n <= 2 * model.order()) {
      throw DomainError("sample size " + std::to_string(n) + " too small for order " +
                        std::to_string(model.order()));
    }
    (void)s_config.extended_size(n);
  }
}

const PowerEntry& PowerCurve::at(std::size_t n, Flavor flavor) const {
  for (const auto& e : entries) {
    if (e.n == n && e.flavor == flavor) return e;
  }
  throw DomainError("no power entry for n = " + std::to_string(n) + ", flavor " + to_string(flavor));
}

PowerCurve run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  PowerCurve curve;
  curve.model = cfg.model.kind;
  curve.hypothesis = cfg.hypothesis;
  curve.alpha = cfg.alpha;

  const bool need_extended = wants(cfg, Flavor::SEstimator);
  const std::size_t m = cfg.model.order();
  const std::size_t nf = cfg.flavors.size();

  for (std::size_t n : cfg.sample_sizes) {
    const ModelConfig sim_model = simulation_model(cfg, n);
    const std::size_t big_n = need_extended ? cfg.s_config.extended_size(n) : n;
    const std::size_t path_len = std::max(n, big_n);
    const std::string stream = path_stream(n);

    std::vector<FlavorOutcome> slots(cfg.replicates * nf);
    parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
      FlavorOutcome* out = &slots[r * nf];
      SeriesPath path;
      try {
        path = simulate(sim_model, path_len, derive_seed(cfg.master_seed, r, stream));
      } catch (const Error& e) {
        for (std::size_t k = 0; k < nf; ++k) out[k].reason = std::string("simulation: ") + e.what();
        return;
      }
      const std::span<const double> sample(path.y.data(), n);
      for (std::size_t k = 0; k < nf; ++k) {
        try {
          std::vector<double> theta;
          switch (cfg.flavors[k]) {
            case Flavor::Oracle:
              theta = cfg.model.theta;
              break;
            case Flavor::LSE:
              theta = fit_order(sample, m).theta;
              break;
            case Flavor::SEstimator:
              theta = fit_order(std::span<const double>(path.y.data(), big_n), m).theta;
              break;
          }
          const auto eval = central_for(cfg.model, sample, theta, cfg.moments);
          const auto outcome = np_decide(eval, cfg.alpha, cfg.flavors[k]);
          out[k].ok = true;
          out[k].reject = outcome.reject;
          out[k].v = eval.v;
          out[k].tau2 = eval.tau2;
        } catch (const Error& e) {
          out[k].reason = e.what();
        }
      }
    });

    for (std::size_t k = 0; k < nf; ++k) {
      PowerEntry entry;
      entry.n = n;
      entry.flavor = cfg.flavors[k];
      double tau2_sum = 0.0;
      if (cfg.keep_traces) {
        entry.v_trace.resize(cfg.replicates, kNaN);
        entry.tau2_trace.resize(cfg.replicates, kNaN);
      }
      for (std::size_t r = 0; r < cfg.replicates; ++r) {
        const auto& o = slots[r * nf + k];
        if (!o.ok) {
          ++entry.failures;
          if (entry.failure_reasons.size() < kMaxReasons &&
              std::find(entry.failure_reasons.begin(), entry.failure_reasons.end(), o.reason) ==
                  entry.failure_reasons.end()) {
            entry.failure_reasons.push_back(o.reason);
          }
          continue;
        }
        ++entry.replicates;
        if (o.reject) ++entry.rejections;
        tau2_sum += o.tau2;
        if (cfg.keep_traces) {
          entry.v_trace[r] = o.v;
          entry.tau2_trace[r] = o.tau2;
        }
      }
      if (entry.failures * 100 > cfg.replicates) {
        std::string msg = "n = " + std::to_string(n) + ", flavor " + to_string(entry.flavor) +
                          ": " + std::to_string(entry.failures) + " of " +
                          std::to_string(cfg.replicates) + " replicates failed";
        if (!entry.failure_reasons.empty()) msg += " (first: " + entry.failure_reasons.front() + ")";
        throw ExperimentError(msg);
      }
      const double reps = static_cast<double>(entry.replicates);
      entry.power = static_cast<double>(entry.rejections) / reps;
      entry.mc_se = std::sqrt(entry.power * (1.0 - entry.power) / reps);
      entry.se_degenerate = entry.replicates < 2 || entry.mc_se == 0.0;
      entry.tau2_mean = tau2_sum / reps;
      entry.theory_tau = theoretical_power(entry.tau2_mean, cfg.alpha, PowerConvention::LeCamTau);
      entry.theory_tau2 =
          theoretical_power(entry.tau2_mean, cfg.alpha, PowerConvention::TauSquared);
      curve.entries.push_back(std::move(entry));
    }
  }
  return curve;
}

CoverageResult run_coverage(const ExperimentConfig& cfg, std::size_t n) {
  cfg.validate();
  const ModelConfig model = null_model(cfg);
  const std::size_t m = model.order();
  const std::string stream = "coverage/n=" + std::to_string(n);

  // 0 = miss, 1 = hit, 2 = failed replicate
  std::vector<unsigned char> hits(cfg.replicates * m, 2);
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
    try {
      const auto path = simulate(model, n, derive_seed(cfg.master_seed, r, stream));
      const auto intervals = ci_simultaneous(fit_order(path.y, m), cfg.level);
      for (std::size_t j = 0; j < m; ++j) {
        hits[r * m + j] = intervals[j].contains(model.theta[j]) ? 1 : 0;
      }
    } catch (const Error&) {
    }
  });

  CoverageResult res;
  res.n = n;
  res.level = cfg.level;
  res.coverage.assign(m, 0.0);
  std::size_t ok = 0;
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    if (hits[r * m] == 2) {
      ++res.failures;
      continue;
    }
    ++ok;
    for (std::size_t j = 0; j < m; ++j) res.coverage[j] += hits[r * m + j];
  }
  if (res.failures * 100 > cfg.replicates) {
    throw ExperimentError("coverage run: " + std::to_string(res.failures) + " of " +
                          std::to_string(cfg.replicates) + " replicates failed");
  }
  res.replicates = ok;
  for (auto& c : res.coverage) {
    c /= static_cast<double>(ok);
    res.mc_se.push_back(std::sqrt(c * (1.0 - c) / static_cast<double>(ok)));
  }
  return res;
}

std::vector<EquivalenceRow> run_equivalence(const ExperimentConfig& cfg) {
  cfg.validate();
  const ModelConfig model = null_model(cfg);
  const std::size_t m = model.order();
  std::vector<EquivalenceRow> rows;

  for (std::size_t n : cfg.sample_sizes) {
    const std::size_t big_n = cfg.s_config.extended_size(n);
    const std::string stream = path_stream(n);
    std::vector<double> ext(cfg.replicates, kNaN), fit(cfg.replicates, kNaN),
        ws(cfg.replicates, kNaN), slope(cfg.replicates, kNaN), scaled(cfg.replicates, kNaN);
    const double rate = std::pow(static_cast<double>(n), cfg.s_config.S / 4.0 + 0.5);

    parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
      try {
        const auto path =
            simulate(model, std::max(n, big_n), derive_seed(cfg.master_seed, r, stream));
        const std::span<const double> sample(path.y.data(), n);
        const auto theta_n = fit_order(sample, m).theta;
        const auto theta_N = fit_order(path.y, m).theta;
        const auto at_truth = central_for(model, sample, model.theta, cfg.moments);
        const auto at_fit = central_for(model, sample, theta_n, cfg.moments);
        const auto at_ext = central_for(model, sample, theta_N, cfg.moments);
        ext[r] = std::abs(at_truth.v - at_ext.v);
        fit[r] = std::abs(at_truth.v - at_fit.v);
        ws[r] = std::abs(at_truth.v - ws_correct(at_fit, theta_n, theta_N));
        slope[r] = std::abs(at_fit.grad[0]) / std::sqrt(static_cast<double>(n));
        scaled[r] = rate * std::abs(theta_N[0] - model.theta[0]);
      } catch (const Error&) {
      }
    });

    EquivalenceRow row;
    row.n = n;
    row.N = big_n;
    row.replicates = static_cast<std::size_t>(
        std::count_if(ext.begin(), ext.end(), [](double x) { return !std::isnan(x); }));
    if ((cfg.replicates - row.replicates) * 100 > cfg.replicates) {
      throw ExperimentError("equivalence run: too many failed replicates at n = " +
                            std::to_string(n));
    }
    row.median_extended_gap = median(ext);
    row.median_fit_gap = median(fit);
    row.median_ws_gap = median(ws);
    row.median_slope = median(slope);
    row.median_scaled_error = median(scaled);
    rows.push_back(row);
  }
  return rows;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Q = 1 - sqrt(2 pi)/lambda * sum exp(-(2k-1)^2 pi^2 / (8 lambda^2))
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      sum += std::exp(-odd * odd * c);
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_normality(std::span<const double> samples, double level) {
  if (samples.size() < 100) {
    throw DomainError("KS normality test needs at least 100 samples (got " +
                      std::to_string(samples.size()) + ")");
  }
  if (!(level > 0.0 && level < 1.0)) throw DomainError("KS level must lie in (0, 1)");
  std::vector<double> x(samples.begin(), samples.end());
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("KS samples must be finite");
  }
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cdf = normal_cdf(x[i]);
    const double above = static_cast<double>(i + 1) / n - cdf;
    const double below = cdf - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }

  // Stephens' small-sample adjustment of the asymptotic distribution.
  const double sn = std::sqrt(n);
  const double eff = sn + 0.12 + 0.11 / sn;

  double lo = 0.0, hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_survival(mid) > level ? lo : hi) = mid;
  }

  KsResult res;
  res.n = x.size();
  res.level = level;
  res.statistic = d;
  res.p_value = kolmogorov_survival(eff * d);
  res.critical_value = hi / eff;
  res.pass = res.p_value >= level;
  return res;
}

double grad_fd_check(Setting setting, std::span<const double> y, std::span<const double> theta,
                     const Perturbation& G, const Perturbation& L, const ScoreFamily& family,
                     double step) {
  if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
  if (setting != Setting::General && theta.size() != 1) {
    throw DomainError("AR(1)/ARCH gradient check takes one coefficient");
  }
  const Perturbation l = setting == Setting::AR1 ? Perturbation::zero() : L;
  CentralEval analytic;
  switch (setting) {
    case Setting::AR1:
      analytic = central_ar1(y, theta[0], G, family);
      break;
    case Setting::ARCH:
      analytic = central_arch(y, theta[0], G, l, family);
      break;
    case Setting::General:
      analytic = central_arm(y, theta, G, l, family);
      break;
  }
  std::vector<double> probe(theta.begin(), theta.end());
  double worst = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    auto central_diff = [&](double h) {
      probe[k] = theta[k] + h;
      const double up = central_value(setting, y, probe, G, l, family);
      probe[k] = theta[k] - h;
      const double down = central_value(setting, y, probe, G, l, family);
      probe[k] = theta[k];
      return (up - down) / (2.0 * h);
    };
    // Richardson extrapolation removes the O(h^2) term.
    const double fd = (4.0 * central_diff(0.5 * step) - central_diff(step)) / 3.0;
    const double a = analytic.grad[k];
    const double denom = std::max(std::abs(a), std::abs(fd));
    if (denom == 0.0) continue;
    worst = std::max(worst, std::abs(a - fd) / denom);
  }
  return worst;
}

GradCheckSummary grad_check_study(Setting setting, const ScoreFamily& family, std::size_t instances,
                                  std::uint64_t master_seed, double step) {
  if (instances == 0) throw DomainError("gradient study needs at least one instance");
  GradCheckSummary out;
  out.instances = instances;
  const std::string stream = "grad-check/" + std::to_string(static_cast<int>(setting));
  for (std::size_t i = 0; i < instances; ++i) {
    std::mt19937_64 rng(derive_seed(master_seed, i, stream));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ModelConfig model;
    model.family = family;
    model.burn_in = 200;
    const std::size_t n = 200 + static_cast<std::size_t>(unit(rng) * 800.0);
    if (setting == Setting::General) {
      const std::size_t m = 1 + static_cast<std::size_t>(unit(rng) * 3.0);
      model.kind = ModelKind::ARm;
      model.theta.assign(m, 0.0);
      // sum |theta_j| < 1 keeps every draw stationary
      for (auto& t : model.theta) t = (2.0 * unit(rng) - 1.0) * 0.9 / static_cast<double>(m);
    } else {
      model.kind = setting == Setting::AR1 ? ModelKind::AR1Perturbed : ModelKind::ArchPerturbed;
      model.theta = {1.6 * unit(rng) - 0.8};
    }
    const auto path = simulate(model, n, rng());
    std::vector<double> theta = model.theta;
    for (auto& t : theta) t += 0.2 * unit(rng) - 0.1;
    const double err = grad_fd_check(setting, path.y, theta, model.G, model.L, family, step);
    if (err > out.max_rel_error) {
      out.max_rel_error = err;
      out.worst_instance = i;
    }
  }
  return out;
}

}  // namespace lancorr
