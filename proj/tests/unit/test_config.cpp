#include "catch_amalgamated.hpp"

#include "lancorr/config.hpp"
#include "lancorr/errors.hpp"

#include <string>

using namespace lancorr;

namespace {

std::string error_of(const std::string& text, const std::vector<Override>& ov = {}) {
  try {
    parse_config(text, ov);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal AR(1) config", "[config]") {
  const auto cfg = parse_config("model=ar1 theta=0.6 n=30,49,52 replicates=50");
  CHECK(cfg.model.kind == ModelKind::AR1Perturbed);
  CHECK(cfg.model.theta == std::vector<double>{0.6});
  CHECK(cfg.sample_sizes == std::vector<std::size_t>{30, 49, 52});
  CHECK(cfg.replicates == 50);
  CHECK(cfg.alpha == 0.05);
  CHECK(cfg.s_config.S == 1.0);
  CHECK(cfg.model.burn_in == 500);
  CHECK(cfg.model.G == Perturbation::inv_quad());
  CHECK(cfg.model.L == Perturbation::inv_quad());
  CHECK(cfg.model.B == Perturbation::inv_quad(2.0));
  CHECK(cfg.model.family == ScoreFamily::gaussian());
  CHECK(cfg.flavors.size() == 3);
}

TEST_CASE("grammar", "[config]") {
  const auto cfg = parse_config(
      "# ARCH experiment\n"
      "[model]\n"
      "model = arch\n"
      "theta=0.6   # coefficient\n"
      "n = 30, 68, 100\r\n"
      "\n"
      "[run]\n"
      "replicates=10 seed=42 flavors=oracle,s\n"
      "family=student-t nu=7\n");
  CHECK(cfg.model.kind == ModelKind::ArchPerturbed);
  CHECK(cfg.sample_sizes == std::vector<std::size_t>{30, 68, 100});
  CHECK(cfg.master_seed == 42);
  CHECK(cfg.flavors == std::vector<Flavor>{Flavor::Oracle, Flavor::SEstimator});
  CHECK(cfg.model.family == ScoreFamily::student_t(7.0));
}

TEST_CASE("errors carry line numbers", "[config]") {
  CHECK(error_of("model=ar1\ntheta=1.2\nn=30\n").find("line 2") != std::string::npos);
  CHECK(error_of("model=ar1\ntheta=0.6\nn=30\nbogus=1\n") == "line 4: unknown key 'bogus'");
  CHECK(error_of("model=ar1 theta=0.6 n=30 alpha=x").find("line 1") != std::string::npos);
  CHECK(error_of("model=ar1\nmodel=arch\ntheta=0.6\nn=30").find("duplicate") != std::string::npos);
  CHECK(error_of("model=ar1\ntheta 0.6\n").find("line 2") != std::string::npos);
  CHECK(error_of("model=ar1 theta=0.6 n=30 family=student-t").find("nu") != std::string::npos);
  CHECK(error_of("model=ar1 theta=0.6 n=30 nu=5").find("nu") != std::string::npos);
  CHECK(error_of("model=ar1 theta=0.6 n=30 lag_window=2").find("line 1") != std::string::npos);
}

TEST_CASE("empty file names the required keys", "[config]") {
  const auto msg = error_of("");
  CHECK(msg.find("model") != std::string::npos);
  CHECK(msg.find("theta") != std::string::npos);
  CHECK(msg.find("n") != std::string::npos);
  CHECK(error_of("model=ar1").find("theta, n") != std::string::npos);
}

TEST_CASE("optional model for family-only runs", "[config]") {
  const auto cfg = parse_config("family=student-t nu=5", {}, ParseOptions{false});
  CHECK(cfg.model.family == ScoreFamily::student_t(5.0));
}

TEST_CASE("overrides replace file values", "[config]") {
  const auto cfg = parse_config("model=ar1 theta=0.6 n=30", {{"n", "100,200"}, {"seed", "5"}});
  CHECK(cfg.sample_sizes == std::vector<std::size_t>{100, 200});
  CHECK(cfg.master_seed == 5);
  CHECK(error_of("model=ar1 theta=0.6 n=30", {{"what", "1"}}).find("unknown key") != std::string::npos);
  CHECK(parse_override("a = b") == Override{"a", "b"});
  CHECK_THROWS_AS(parse_override("novalue"), ParseError);
}

TEST_CASE("render round trip", "[config]") {
  const std::string texts[] = {
      "model=ar1 theta=0.6 n=30,49,52 replicates=50",
      "model=arch theta=-0.3 n=30,68,100 family=student-t nu=5 G=gauss L=0.5*inv_quad B=inv_quad "
      "hypothesis=h0 moments=residual drift=zero S=0.5 exponent_offset=0 alpha=0.1 level=0.9 threads=2",
      "model=arm theta=0.5,0.3 n=1000 flavors=lse burn_in=100 seed=18446744073709551615",
  };
  for (const auto& t : texts) {
    const auto cfg = parse_config(t);
    const auto rendered = render_config(cfg);
    INFO(rendered);
    CHECK(parse_config(rendered) == cfg);
    CHECK(render_config(parse_config(rendered)) == rendered);
  }
}

TEST_CASE("key list is complete", "[config]") {
  const auto rendered = render_config(parse_config("model=ar1 theta=0.6 n=30 drift=gauss family=student-t nu=5"));
  for (const auto& k : config_keys()) {
    INFO(k.name);
    CHECK(rendered.find(std::string(k.name) + "=") != std::string::npos);
  }
}
