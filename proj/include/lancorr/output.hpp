#pragma once

#include "lancorr/mc.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace lancorr {

/// Header `n,flavor,rejections,replicates,power,mc_se,tau2_mean,theory_tau,theory_tau2`.
void write_power_csv(std::ostream& out, const PowerCurve& curve);

/// Power against sample size: one marker series per flavor with +/-1.96 SE bars,
/// plus the two theoretical curves computed from the oracle tau^2 (or the first
/// flavor when the oracle was not run).
void write_power_svg(std::ostream& out, const PowerCurve& curve);

struct EmittedFiles {
  std::filesystem::path csv;
  std::filesystem::path svg;
};

/// Writes power_<model>_<timestamp>.csv and .svg into `dir` (created if missing).
/// Refuses curves with an entry that has no successful replicates.
EmittedFiles emit_outputs(const PowerCurve& curve, const std::filesystem::path& dir,
                          std::string_view timestamp);

/// Current UTC time as YYYYMMDDTHHMMSSZ.
std::string utc_timestamp();

}  // namespace lancorr
