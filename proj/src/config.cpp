#include "lancorr/config.hpp"

#include "lancorr/detail/format.hpp"
#include "lancorr/errors.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

namespace lancorr {

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

using EntryMap = std::map<std::string, Entry>;

const std::vector<ConfigKey> kKeys = {
    {"model", "ar1 | arch | arm"},
    {"theta", "autoregressive coefficients, comma-separated"},
    {"n", "sample-size grid, comma-separated"},
    {"replicates", "Monte Carlo replicates per sample size"},
    {"alpha", "test level"},
    {"level", "confidence level for coverage runs"},
    {"S", "S-estimator exponent"},
    {"exponent_offset", "N = floor(1 + n^(S + offset)); 1 or 0"},
    {"flavors", "oracle, lse, s_estimator"},
    {"seed", "master seed (unsigned 64-bit)"},
    {"hypothesis", "h0 | h1"},
    {"family", "gaussian | student-t"},
    {"nu", "degrees of freedom for student-t (>= 3)"},
    {"G", "drift direction, [scale*]zero|const|inv_quad|gauss"},
    {"L", "scale direction"},
    {"B", "ARCH variance direction"},
    {"drift", "drift simulated under h1 when it differs from G"},
    {"burn_in", "discarded warm-up steps"},
    {"lag_window", "lag window s (only 1 is supported)"},
    {"moments", "population | residual"},
    {"threads", "worker threads, 0 = all cores"},
};

bool known_key(const std::string& key) {
  for (const auto& k : kKeys) {
    if (key == k.name) return true;
  }
  return false;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    const auto item = detail::trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& key, std::string_view text) {
  double v = 0.0;
  if (!detail::parse_double(text, v)) {
    throw DomainError(key + ": expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t to_unsigned(const std::string& key, std::string_view text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (text.empty() || res.ec != std::errc() || res.ptr != end) {
    throw DomainError(key + ": expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return v;
}

void add_entry(EntryMap& entries, std::string_view key, std::string_view value, std::size_t line) {
  const std::string k(detail::trim(key));
  if (k.empty()) throw ParseError(line, "missing key before '='");
  if (!known_key(k)) throw ParseError(line, "unknown key '" + k + "'");
  if (entries.count(k) != 0) {
    throw ParseError(line, "duplicate key '" + k + "' (first set on line " +
                               std::to_string(entries[k].line) + ")");
  }
  const auto v = detail::trim(value);
  if (v.empty()) throw ParseError(line, "key '" + k + "' has an empty value");
  entries[k] = Entry{std::string(v), line};
}

void scan_line(EntryMap& entries, std::string_view raw, std::size_t line) {
  auto text = raw;
  if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
  text = detail::trim(text);
  if (text.empty()) return;
  if (text.front() == '[') {
    if (text.back() != ']') throw ParseError(line, "unterminated section header");
    return;
  }
  const auto first_eq = text.find('=');
  if (first_eq == std::string_view::npos) {
    throw ParseError(line, "expected key=value, got '" + std::string(text) + "'");
  }
  if (text.find('=', first_eq + 1) == std::string_view::npos) {
    add_entry(entries, text.substr(0, first_eq), text.substr(first_eq + 1), line);
    return;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    if (pos >= text.size()) break;
    auto end = text.find_first_of(" \t", pos);
    if (end == std::string_view::npos) end = text.size();
    const auto token = text.substr(pos, end - pos);
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line, "expected key=value, got '" + std::string(token) + "'");
    }
    add_entry(entries, token.substr(0, eq), token.substr(eq + 1), line);
    pos = end;
  }
}

template <typename Fn>
void with_line(const EntryMap& entries, const char* key, Fn&& fn) {
  const auto it = entries.find(key);
  if (it == entries.end()) return;
  try {
    fn(it->second.value);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(it->second.line, e.what());
  }
}

std::size_t line_of(const EntryMap& entries, const char* key) {
  const auto it = entries.find(key);
  return it == entries.end() ? 0 : it->second.line;
}

ExperimentConfig build(const EntryMap& entries, const ParseOptions& options) {
  if (options.require_model) {
    std::string missing;
    for (const char* key : {"model", "theta", "n"}) {
      if (entries.count(key) == 0) missing += missing.empty() ? key : std::string(", ") + key;
    }
    if (!missing.empty()) throw ParseError(0, "missing required key(s): " + missing);
  }

  ExperimentConfig cfg;
  with_line(entries, "model", [&](const std::string& v) { cfg.model.kind = parse_model_kind(v); });
  with_line(entries, "theta", [&](const std::string& v) {
    cfg.model.theta.clear();
    for (auto item : split_list(v)) cfg.model.theta.push_back(to_double("theta", item));
  });
  with_line(entries, "n", [&](const std::string& v) {
    for (auto item : split_list(v)) cfg.sample_sizes.push_back(to_unsigned("n", item));
  });
  with_line(entries, "replicates",
            [&](const std::string& v) { cfg.replicates = to_unsigned("replicates", v); });
  with_line(entries, "alpha", [&](const std::string& v) { cfg.alpha = to_double("alpha", v); });
  with_line(entries, "level", [&](const std::string& v) { cfg.level = to_double("level", v); });
  with_line(entries, "S", [&](const std::string& v) {
    cfg.s_config.S = to_double("S", v);
    if (!(cfg.s_config.S > 0.0)) throw DomainError("S must be positive");
  });
  with_line(entries, "exponent_offset", [&](const std::string& v) {
    const auto off = to_unsigned("exponent_offset", v);
    if (off > 1) throw DomainError("exponent_offset must be 0 or 1");
    cfg.s_config.exponent_offset = static_cast<int>(off);
  });
  with_line(entries, "flavors", [&](const std::string& v) {
    cfg.flavors.clear();
    for (auto item : split_list(v)) {
      const auto f = parse_flavor(item);
      for (auto seen : cfg.flavors) {
        if (seen == f) throw DomainError("flavor '" + std::string(item) + "' listed twice");
      }
      cfg.flavors.push_back(f);
    }
  });
  with_line(entries, "seed", [&](const std::string& v) { cfg.master_seed = to_unsigned("seed", v); });
  with_line(entries, "hypothesis",
            [&](const std::string& v) { cfg.hypothesis = parse_hypothesis(v); });

  std::string family = "gaussian";
  with_line(entries, "family", [&](const std::string& v) {
    if (v != "gaussian" && v != "student-t" && v != "t") {
      throw DomainError("unknown family '" + v + "' (expected gaussian or student-t)");
    }
    family = v == "gaussian" ? "gaussian" : "student-t";
  });
  if (family == "gaussian") {
    if (entries.count("nu") != 0) {
      throw ParseError(line_of(entries, "nu"), "nu only applies to family=student-t");
    }
  } else {
    if (entries.count("nu") == 0) {
      throw ParseError(line_of(entries, "family"), "family=student-t needs nu");
    }
    with_line(entries, "nu",
              [&](const std::string& v) { cfg.model.family = ScoreFamily::student_t(to_double("nu", v)); });
  }

  with_line(entries, "G", [&](const std::string& v) { cfg.model.G = Perturbation::parse(v); });
  with_line(entries, "L", [&](const std::string& v) { cfg.model.L = Perturbation::parse(v); });
  with_line(entries, "B", [&](const std::string& v) { cfg.model.B = Perturbation::parse(v); });
  with_line(entries, "drift", [&](const std::string& v) { cfg.dgp_drift = Perturbation::parse(v); });
  with_line(entries, "burn_in",
            [&](const std::string& v) { cfg.model.burn_in = to_unsigned("burn_in", v); });
  with_line(entries, "lag_window",
            [&](const std::string& v) { cfg.model.lag_window = to_unsigned("lag_window", v); });
  with_line(entries, "moments", [&](const std::string& v) {
    if (v == "population") {
      cfg.moments = MomentSource::Population;
    } else if (v == "residual") {
      cfg.moments = MomentSource::Residual;
    } else {
      throw DomainError("unknown moment source '" + v + "' (expected population or residual)");
    }
  });
  with_line(entries, "threads", [&](const std::string& v) {
    const auto t = to_unsigned("threads", v);
    if (t > 1024) throw DomainError("threads must be at most 1024");
    cfg.threads = static_cast<unsigned>(t);
  });

  if (!options.require_model) {
    if (cfg.sample_sizes.empty()) cfg.sample_sizes.push_back(1000);
  }

  try {
    cfg.model.validate();
  } catch (const StationarityError& e) {
    throw ParseError(line_of(entries, "theta"), e.what());
  } catch (const Error& e) {
    const std::size_t line = line_of(entries, "lag_window") != 0 && cfg.model.lag_window != 1
                                 ? line_of(entries, "lag_window")
                                 : line_of(entries, "theta");
    throw ParseError(line, e.what());
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ParseError(0, e.what());
  }
  return cfg;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += detail::shortest(v[i]);
  }
  return out;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() { return kKeys; }

ExperimentConfig parse_config(std::string_view text, const std::vector<Override>& overrides,
                              const ParseOptions& options) {
  EntryMap entries;
  std::size_t line = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    ++line;
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto raw = text.substr(start, end - start);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    scan_line(entries, raw, line);
    start = end + 1;
  }
  for (const auto& [key, value] : overrides) {
    const std::string k(detail::trim(key));
    if (!known_key(k)) throw ParseError(0, "override: unknown key '" + k + "'");
    const auto v = detail::trim(value);
    if (v.empty()) throw ParseError(0, "override: key '" + k + "' has an empty value");
    entries[k] = Entry{std::string(v), 0};
  }
  return build(entries, options);
}

Override parse_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw ParseError(0, "override must look like key=value, got '" + std::string(text) + "'");
  }
  return {std::string(detail::trim(text.substr(0, eq))), std::string(detail::trim(text.substr(eq + 1)))};
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "model=" << to_string(cfg.model.kind) << '\n';
  os << "theta=" << join_doubles(cfg.model.theta) << '\n';
  os << "n=";
  for (std::size_t i = 0; i < cfg.sample_sizes.size(); ++i) {
    os << (i ? "," : "") << cfg.sample_sizes[i];
  }
  os << '\n';
  os << "replicates=" << cfg.replicates << '\n';
  os << "alpha=" << detail::shortest(cfg.alpha) << '\n';
  os << "level=" << detail::shortest(cfg.level) << '\n';
  os << "S=" << detail::shortest(cfg.s_config.S) << '\n';
  os << "exponent_offset=" << cfg.s_config.exponent_offset << '\n';
  os << "flavors=";
  for (std::size_t i = 0; i < cfg.flavors.size(); ++i) os << (i ? "," : "") << to_string(cfg.flavors[i]);
  os << '\n';
  os << "seed=" << cfg.master_seed << '\n';
  os << "hypothesis=" << to_string(cfg.hypothesis) << '\n';
  if (cfg.model.family.kind() == FamilyKind::Gaussian) {
    os << "family=gaussian\n";
  } else {
    os << "family=student-t\nnu=" << detail::shortest(cfg.model.family.dof()) << '\n';
  }
  os << "G=" << cfg.model.G.to_string() << '\n';
  os << "L=" << cfg.model.L.to_string() << '\n';
  os << "B=" << cfg.model.B.to_string() << '\n';
  if (cfg.dgp_drift) os << "drift=" << cfg.dgp_drift->to_string() << '\n';
  os << "burn_in=" << cfg.model.burn_in << '\n';
  os << "lag_window=" << cfg.model.lag_window << '\n';
  os << "moments=" << (cfg.moments == MomentSource::Population ? "population" : "residual") << '\n';
  os << "threads=" << cfg.threads << '\n';
  return os.str();
}

}  // namespace lancorr
