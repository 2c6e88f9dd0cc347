#pragma once

#include "lancorr/mc.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lancorr {

/**
 * Experiment configuration text.
 *
 * Grammar: one or more `key=value` assignments per line, separated by
 * whitespace; `#` starts a comment; `[section]` lines are accepted as
 * visual grouping and otherwise ignored; list values are comma-separated.
 * A line holding a single `=` may use spaces around it (`n = 30, 49`).
 *
 * Required keys: model, theta, n. Everything else has a default:
 *
 *   replicates=1000  alpha=0.05  level=0.95  S=1  exponent_offset=1
 *   flavors=oracle,lse,s_estimator  hypothesis=h1  seed=1
 *   family=gaussian  (nu=<dof> for family=student-t)
 *   G=inv_quad  L=inv_quad  B=2*inv_quad  burn_in=500  lag_window=1
 *   moments=population  threads=0  drift=<unset>
 */
struct ConfigKey {
  const char* name;
  const char* help;
};

/// Every recognized key with a one-line description.
const std::vector<ConfigKey>& config_keys();

struct ParseOptions {
  /// When false, model/theta/n may be omitted (regularity checks only need a family).
  bool require_model = true;
};

using Override = std::pair<std::string, std::string>;

/// Throws ParseError carrying the offending line (0 for overrides and global checks).
ExperimentConfig parse_config(std::string_view text, const std::vector<Override>& overrides = {},
                              const ParseOptions& options = {});

/// Canonical text form; parse_config(render_config(c)) == c.
std::string render_config(const ExperimentConfig& cfg);

/// Splits `key=value`; throws ParseError when there is no '='.
Override parse_override(std::string_view text);

}  // namespace lancorr
