// lancorr: command-line front end for simulation, estimation, testing and
// Monte Carlo power studies of perturbed autoregressions.

#include "lancorr/central.hpp"
#include "lancorr/config.hpp"
#include "lancorr/detail/format.hpp"
#include "lancorr/errors.hpp"
#include "lancorr/mc.hpp"
#include "lancorr/output.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace lancorr;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string input;
  std::size_t instances = 100;
  double step = 1e-3;
};

// Usage and configuration problems that are not ParseErrors.
struct UsageError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig load_config(const Options& opt, bool require_model) {
  std::vector<Override> overrides;
  for (const auto& s : opt.overrides) overrides.push_back(parse_override(s));
  if (opt.seed) overrides.emplace_back("seed", std::to_string(*opt.seed));
  std::string text;
  if (!opt.config_path.empty()) {
    text = read_file(opt.config_path);
  } else if (require_model) {
    throw UsageError("--config is required for this subcommand");
  }
  try {
    return parse_config(text, overrides, ParseOptions{require_model});
  } catch (const ParseError& e) {
    if (opt.config_path.empty()) throw;
    throw ParseError(0, opt.config_path + ": " + e.what());
  }
}

// Writes to <out>/<name> when --out was given, stdout otherwise.
class Sink {
 public:
  Sink(const std::string& out_dir, const std::string& name) {
    if (out_dir.empty()) return;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    path_ = fs::path(out_dir) / name;
    file_ = std::make_unique<std::ofstream>(path_, std::ios::binary);
    if (!*file_) throw IoError("cannot open " + path_.string() + " for writing");
  }
  ~Sink() {
    if (file_) std::cerr << "wrote " << path_.string() << '\n';
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  fs::path path_;
  std::unique_ptr<std::ofstream> file_;
};

ModelConfig hypothesis_model(const ExperimentConfig& cfg, std::size_t n) {
  ModelConfig model = cfg.model;
  if (cfg.hypothesis == Hypothesis::H0) {
    model.alpha = model.beta = 0.0;
  } else {
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    model.alpha = amp;
    model.beta = model.kind == ModelKind::AR1Perturbed ? 0.0 : amp;
    if (cfg.dgp_drift) model.G = *cfg.dgp_drift;
  }
  return model;
}

// Observations for estimate/test: the --input series, or a simulated path of
// max(n, N) values for the first sample size in the grid.
std::vector<double> load_series(const Options& opt, const ExperimentConfig& cfg, std::size_t want) {
  if (!opt.input.empty()) {
    std::ifstream in(opt.input, std::ios::binary);
    if (!in) throw UsageError("cannot read input series '" + opt.input + "'");
    return read_path_csv(in);
  }
  const std::size_t n = cfg.sample_sizes.front();
  return simulate(hypothesis_model(cfg, n), want, derive_seed(cfg.master_seed, 0, "cli/series")).y;
}

FitResult fit_order(std::span<const double> y, std::size_t m) {
  return m == 1 ? fit_ar1_lse(y) : fit_arm_lse(y, m);
}

int cmd_simulate(const Options& opt) {
  const auto cfg = load_config(opt, true);
  for (std::size_t n : cfg.sample_sizes) {
    const auto path = simulate(hypothesis_model(cfg, n), n,
                               derive_seed(cfg.master_seed, 0, "cli/simulate/n=" + std::to_string(n)));
    Sink sink(opt.out_dir, "path_" + to_string(cfg.model.kind) + "_n" + std::to_string(n) + ".csv");
    write_path_csv(sink.stream(), path.y);
    if (opt.out_dir.empty()) break;
  }
  return 0;
}

int cmd_estimate(const Options& opt) {
  const auto cfg = load_config(opt, true);
  const std::size_t m = cfg.model.order();
  const std::size_t n = cfg.sample_sizes.front();
  const std::size_t big_n = cfg.s_config.extended_size(n);
  const auto y = load_series(opt, cfg, std::max(n, big_n));
  if (y.size() < n) throw InsufficientDataError(n, y.size());

  Sink sink(opt.out_dir, "estimate_" + to_string(cfg.model.kind) + ".csv");
  auto& os = sink.stream();
  const auto lse = fit_order(std::span<const double>(y.data(), n), m);
  os << "# lse\n";
  write_fit_csv_header(os, m);
  write_fit_csv_row(os, lse);
  if (y.size() >= big_n) {
    const auto s = s_estimate(RecordedSource(y), n, cfg.s_config, 0, m);
    os << "# s_estimator N=" << s.N << '\n';
    write_fit_csv_header(os, m);
    write_fit_csv_row(os, s.fit);
  } else {
    os << "# s_estimator skipped: needs " << big_n << " observations, have " << y.size() << '\n';
  }
  const auto intervals = m == 1 ? std::vector<Interval>{ci_univariate(lse, cfg.level)}
                                : ci_simultaneous(lse, cfg.level);
  os << "# intervals\ncoordinate,lower,upper,level\n";
  for (std::size_t j = 0; j < intervals.size(); ++j) {
    os << j + 1 << ',' << detail::sig17(intervals[j].lower) << ',' << detail::sig17(intervals[j].upper)
       << ',' << detail::sig17(intervals[j].level) << '\n';
  }
  return 0;
}

int cmd_test(const Options& opt) {
  const auto cfg = load_config(opt, true);
  const std::size_t m = cfg.model.order();
  const std::size_t n = cfg.sample_sizes.front();
  const std::size_t big_n = cfg.s_config.extended_size(n);
  const auto y = load_series(opt, cfg, std::max(n, big_n));
  if (y.size() < n) throw InsufficientDataError(n, y.size());
  const std::span<const double> sample(y.data(), n);

  Sink sink(opt.out_dir, "test_" + to_string(cfg.model.kind) + ".csv");
  auto& os = sink.stream();
  os << "flavor,n";
  for (std::size_t j = 1; j <= m; ++j) os << ",theta_" << j;
  os << ",v,tau2,statistic,threshold,reject\n";
  for (Flavor f : cfg.flavors) {
    std::vector<double> theta;
    switch (f) {
      case Flavor::Oracle:
        theta = cfg.model.theta;
        break;
      case Flavor::LSE:
        theta = fit_order(sample, m).theta;
        break;
      case Flavor::SEstimator:
        if (y.size() < big_n) throw InsufficientDataError(big_n, y.size());
        theta = fit_order(std::span<const double>(y.data(), big_n), m).theta;
        break;
    }
    const auto eval = central_for(cfg.model, sample, theta, cfg.moments);
    if (eval.tau2_clipped) std::cerr << "warning: negative tau^2 estimate clipped to 0\n";
    const auto out = np_decide(eval, cfg.alpha, f);
    os << to_string(f) << ',' << n;
    for (double t : theta) os << ',' << detail::sig17(t);
    os << ',' << detail::sig17(eval.v) << ',' << detail::sig17(eval.tau2) << ','
       << detail::sig17(out.statistic) << ',' << detail::sig17(out.threshold) << ','
       << (out.reject ? 1 : 0) << '\n';
  }
  return 0;
}

void print_curve(const PowerCurve& curve) {
  std::printf("%8s  %-12s %8s %8s %9s %9s %10s %10s\n", "n", "flavor", "reject", "power", "mc_se",
              "tau2", "th(tau)", "th(tau^2)");
  for (const auto& e : curve.entries) {
    std::printf("%8zu  %-12s %8zu %8.4f %9.4f %9.4f %10.4f %10.4f\n", e.n, to_string(e.flavor).c_str(),
                e.rejections, e.power, e.mc_se, e.tau2_mean, e.theory_tau, e.theory_tau2);
    if (e.failures > 0) {
      std::printf("          %zu failed replicate(s), first reason: %s\n", e.failures,
                  e.failure_reasons.empty() ? "?" : e.failure_reasons.front().c_str());
    }
  }
}

int cmd_power(const Options& opt, std::optional<Hypothesis> forced) {
  auto cfg = load_config(opt, true);
  if (forced) cfg.hypothesis = *forced;
  const auto curve = run_experiment(cfg);
  print_curve(curve);
  const auto files = emit_outputs(curve, opt.out_dir.empty() ? fs::path(".") : fs::path(opt.out_dir),
                                  utc_timestamp());
  std::cerr << "wrote " << files.csv.string() << "\nwrote " << files.svg.string() << '\n';
  return 0;
}

int cmd_coverage(const Options& opt) {
  const auto cfg = load_config(opt, true);
  Sink sink(opt.out_dir, "coverage_" + to_string(cfg.model.kind) + ".csv");
  auto& os = sink.stream();
  os << "n,coordinate,level,coverage,mc_se,replicates,failures\n";
  for (std::size_t n : cfg.sample_sizes) {
    const auto res = run_coverage(cfg, n);
    for (std::size_t j = 0; j < res.coverage.size(); ++j) {
      os << n << ',' << j + 1 << ',' << detail::sig17(res.level) << ',' << detail::sig17(res.coverage[j])
         << ',' << detail::sig17(res.mc_se[j]) << ',' << res.replicates << ',' << res.failures << '\n';
    }
  }
  return 0;
}

int cmd_regularity(const Options& opt) {
  const auto cfg = load_config(opt, false);
  const auto rep = check_regularity(cfg.model.family);
  static const char* names[] = {"E[M]", "E[eps M]", "E[M' + M^2]", "E[eps (M' + M^2)]",
                                "E[eps^2 (M' + M^2)]"};
  std::printf("family %s\n", cfg.model.family.name().c_str());
  std::printf("%-22s %14s %8s %12s %12s\n", "identity", "value", "target", "residual", "tail");
  for (std::size_t i = 0; i < 5; ++i) {
    std::printf("%-22s %14.10f %8.1f %12.3e %12.3e\n", names[i], rep.values[i], rep.targets[i],
                rep.residuals[i], rep.tail[i]);
  }
  std::printf("I0 %.12g  I1 %.12g  I2 %.12g\n", rep.moments[0], rep.moments[1], rep.moments[2]);
  std::printf("normalization %.12g  mean %.3e  variance %.12g\n", rep.normalization, rep.mean,
              rep.variance);
  if (rep.tail_flag) std::printf("warning: tail mass beyond |x| > %g exceeds tolerance\n", rep.kTailRadius);
  const bool ok = rep.passes();
  std::printf("%s (max |residual| %.3e)\n", ok ? "PASS" : "FAIL", rep.max_abs_residual());
  return ok ? 0 : kExitNumeric;
}

int cmd_grad_check(const Options& opt) {
  const auto cfg = load_config(opt, false);
  bool ok = true;
  const std::pair<Setting, const char*> settings[] = {
      {Setting::AR1, "ar1"}, {Setting::ARCH, "arch"}, {Setting::General, "general"}};
  for (const auto& [setting, name] : settings) {
    const auto res = grad_check_study(setting, cfg.model.family, opt.instances, cfg.master_seed, opt.step);
    const bool pass = res.max_rel_error < 1e-6;
    ok = ok && pass;
    std::printf("%-8s %s  instances %zu  max rel error %.3e (instance %zu)  %s\n", name,
                cfg.model.family.name().c_str(), res.instances, res.max_rel_error, res.worst_instance,
                pass ? "PASS" : "FAIL");
  }
  return ok ? 0 : kExitNumeric;
}

std::string key_help() {
  std::string out = "Config keys (key=value, '#' comments, comma-separated lists):\n";
  for (const auto& k : config_keys()) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-16s %s\n", k.name, k.help);
    out += line;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally asymptotically normal tests for perturbed autoregressions"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opt.config_path, "Experiment config file")->check(CLI::ExistingFile);
    if (config_required) c->required();
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option("--set", opt.overrides, "Override a config key (key=value); repeatable");
    sub->add_option("--seed", opt.seed, "Master seed (overrides the config)");
    sub->footer(key_help());
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate one path per sample size and write it as CSV");
  add_common(simulate_cmd, true);
  auto* estimate_cmd = app.add_subcommand("estimate", "LSE and S-estimator fits with confidence intervals");
  add_common(estimate_cmd, true);
  estimate_cmd->add_option("--input", opt.input, "Series CSV (index,y) instead of a simulated path");
  auto* test_cmd = app.add_subcommand("test", "Evaluate the central sequence and the one-sided test");
  add_common(test_cmd, true);
  test_cmd->add_option("--input", opt.input, "Series CSV (index,y) instead of a simulated path");
  auto* power_cmd = app.add_subcommand("power", "Monte Carlo power curve under the configured hypothesis");
  add_common(power_cmd, true);
  auto* size_cmd = app.add_subcommand("size", "Monte Carlo rejection rate under the null");
  add_common(size_cmd, true);
  auto* coverage_cmd = app.add_subcommand("coverage", "Coverage of the simultaneous confidence intervals");
  add_common(coverage_cmd, true);
  auto* reg_cmd = app.add_subcommand("check-regularity", "Quadrature check of the score-family identities");
  add_common(reg_cmd, false);
  auto* grad_cmd = app.add_subcommand("grad-check", "Finite-difference check of the central-sequence gradient");
  add_common(grad_cmd, false);
  grad_cmd->add_option("--instances", opt.instances, "Random instances per setting")->check(CLI::PositiveNumber);
  grad_cmd->add_option("--step", opt.step, "Finite-difference step")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (simulate_cmd->parsed()) return cmd_simulate(opt);
    if (estimate_cmd->parsed()) return cmd_estimate(opt);
    if (test_cmd->parsed()) return cmd_test(opt);
    if (power_cmd->parsed()) return cmd_power(opt, std::nullopt);
    if (size_cmd->parsed()) return cmd_power(opt, Hypothesis::H0);
    if (coverage_cmd->parsed()) return cmd_coverage(opt);
    if (reg_cmd->parsed()) return cmd_regularity(opt);
    if (grad_cmd->parsed()) return cmd_grad_check(opt);
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
