#include "lancorr/output.hpp"

#include "lancorr/detail/format.hpp"
#include "lancorr/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <vector>

namespace lancorr {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

std::string fixed(double x, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

const char* flavor_color(Flavor f) {
  switch (f) {
    case Flavor::Oracle:
      return "#1b6ca8";
    case Flavor::LSE:
      return "#c0392b";
    case Flavor::SEstimator:
      return "#2e8b57";
  }
  return "#000000";
}

std::vector<std::size_t> grid_of(const PowerCurve& curve) {
  std::vector<std::size_t> grid;
  for (const auto& e : curve.entries) {
    if (std::find(grid.begin(), grid.end(), e.n) == grid.end()) grid.push_back(e.n);
  }
  return grid;
}

std::vector<Flavor> flavors_of(const PowerCurve& curve) {
  std::vector<Flavor> out;
  for (const auto& e : curve.entries) {
    if (std::find(out.begin(), out.end(), e.flavor) == out.end()) out.push_back(e.flavor);
  }
  return out;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

void write_power_csv(std::ostream& out, const PowerCurve& curve) {
  out << "n,flavor,rejections,replicates,power,mc_se,tau2_mean,theory_tau,theory_tau2\n";
  for (const auto& e : curve.entries) {
    out << e.n << ',' << to_string(e.flavor) << ',' << e.rejections << ',' << e.replicates << ','
        << detail::sig17(e.power) << ',' << detail::sig17(e.mc_se) << ',' << detail::sig17(e.tau2_mean)
        << ',' << detail::sig17(e.theory_tau) << ',' << detail::sig17(e.theory_tau2) << '\n';
  }
}

void write_power_svg(std::ostream& out, const PowerCurve& curve) {
  const auto grid = grid_of(curve);
  const auto flavors = flavors_of(curve);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double slot = grid.empty() ? plot_w : plot_w / static_cast<double>(grid.size());

  auto x_center = [&](std::size_t k) { return kLeft + slot * (static_cast<double>(k) + 0.5); };
  auto y_of = [&](double p) { return kTop + plot_h * (1.0 - std::clamp(p, 0.0, 1.0)); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(kWidth, 0) << "\" height=\""
      << fixed(kHeight, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fixed(kLeft) << "\" y=\"24\" font-size=\"14\">"
      << escape(to_string(curve.model)) << " power, " << to_string(curve.hypothesis)
      << ", alpha = " << escape(detail::shortest(curve.alpha)) << "</text>\n";

  // Axes and horizontal grid.
  for (int t = 0; t <= 10; t += 2) {
    const double p = t / 10.0;
    const double y = y_of(p);
    out << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(kLeft + plot_w)
        << "\" y2=\"" << fixed(y) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(y + 4)
        << "\" text-anchor=\"end\">" << fixed(p, 1) << "</text>\n";
  }
  out << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop) << "\" x2=\"" << fixed(kLeft)
      << "\" y2=\"" << fixed(kTop + plot_h) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop + plot_h) << "\" x2=\""
      << fixed(kLeft + plot_w) << "\" y2=\"" << fixed(kTop + plot_h) << "\" stroke=\"black\"/>\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out << "<text x=\"" << fixed(x_center(k)) << "\" y=\"" << fixed(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\">" << grid[k] << "</text>\n";
  }
  out << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << fixed(kHeight - 12)
      << "\" text-anchor=\"middle\">n</text>\n";
  out << "<text x=\"16\" y=\"" << fixed(kTop + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fixed(kTop + plot_h / 2) << ")\">rejection rate</text>\n";

  // Theory curves from the reference flavor.
  if (!flavors.empty()) {
    const Flavor ref = std::find(flavors.begin(), flavors.end(), Flavor::Oracle) != flavors.end()
                           ? Flavor::Oracle
                           : flavors.front();
    const struct {
      const char* dash;
      double PowerEntry::*field;
    } theory[] = {{"6,3", &PowerEntry::theory_tau}, {"2,3", &PowerEntry::theory_tau2}};
    for (const auto& t : theory) {
      out << "<polyline fill=\"none\" stroke=\"#555555\" stroke-dasharray=\"" << t.dash << "\" points=\"";
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& e = curve.at(grid[k], ref);
        out << (k ? " " : "") << fixed(x_center(k)) << ',' << fixed(y_of(e.*t.field));
      }
      out << "\"/>\n";
    }
  }

  // Empirical markers with +/-1.96 SE bars.
  const double spread = std::min(slot * 0.5, 60.0);
  for (std::size_t f = 0; f < flavors.size(); ++f) {
    const double offset = flavors.size() == 1
                              ? 0.0
                              : spread * (static_cast<double>(f) / static_cast<double>(flavors.size() - 1) - 0.5);
    const char* color = flavor_color(flavors[f]);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto& e = curve.at(grid[k], flavors[f]);
      const double x = x_center(k) + offset;
      const double lo = y_of(e.power - 1.96 * e.mc_se);
      const double hi = y_of(e.power + 1.96 * e.mc_se);
      out << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(lo) << "\" x2=\"" << fixed(x) << "\" y2=\""
          << fixed(hi) << "\" stroke=\"" << color << "\"/>\n";
      out << "<circle cx=\"" << fixed(x) << "\" cy=\"" << fixed(y_of(e.power)) << "\" r=\"4\" fill=\""
          << color << "\"/>\n";
    }
  }

  // Legend.
  double ly = kTop + 10;
  const double lx = kLeft + plot_w + 16;
  for (Flavor f : flavors) {
    out << "<circle cx=\"" << fixed(lx + 6) << "\" cy=\"" << fixed(ly - 4) << "\" r=\"4\" fill=\""
        << flavor_color(f) << "\"/>\n";
    out << "<text x=\"" << fixed(lx + 18) << "\" y=\"" << fixed(ly) << "\">" << to_string(f) << "</text>\n";
    ly += 20;
  }
  const char* labels[] = {"theory, shift tau", "theory, shift tau^2"};
  const char* dashes[] = {"6,3", "2,3"};
  for (int i = 0; i < 2; ++i) {
    out << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\"" << fixed(lx + 14)
        << "\" y2=\"" << fixed(ly - 4) << "\" stroke=\"#555555\" stroke-dasharray=\"" << dashes[i] << "\"/>\n";
    out << "<text x=\"" << fixed(lx + 18) << "\" y=\"" << fixed(ly) << "\">" << escape(labels[i]) << "</text>\n";
    ly += 20;
  }
  out << "</svg>\n";
}

EmittedFiles emit_outputs(const PowerCurve& curve, const std::filesystem::path& dir,
                          std::string_view timestamp) {
  if (curve.entries.empty()) throw ExperimentError("power curve has no entries");
  for (const auto& e : curve.entries) {
    if (e.replicates == 0) {
      throw ExperimentError("no successful replicates for n = " + std::to_string(e.n) + ", flavor " +
                            to_string(e.flavor));
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  const std::string stem = "power_" + to_string(curve.model) + "_" + std::string(timestamp);
  EmittedFiles files{dir / (stem + ".csv"), dir / (stem + ".svg")};

  auto write = [](const std::filesystem::path& path, auto&& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    body(out);
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
  };
  write(files.csv, [&](std::ostream& os) { write_power_csv(os, curve); });
  write(files.svg, [&](std::ostream& os) { write_power_svg(os, curve); });
  return files;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

}  // namespace lancorr
