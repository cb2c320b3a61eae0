#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cqed/config.hpp"
#include "cqed/report.hpp"
#include "test_helpers.hpp"

using namespace cqed;
using testutil::pi;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& text) {
    path = fs::temp_directory_path() /
           ("cqed_cfg_" + std::to_string(reinterpret_cast<uintptr_t>(this)) + ".cfg");
    std::ofstream(path) << text;
  }
  ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("cqed_out_" + tag);
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("fig3 preset carries the bundled parameter set verbatim") {
  TempFile f("[run]\nexperiment = rabi-spectrum\npreset = fig3\n");
  const auto spec = parse_config(f.path.string());
  CHECK(spec.params.omega_c == 2 * pi * 2.69e9);
  CHECK(spec.params.kappa_c == 2 * pi * 0.8e6);
  CHECK(spec.params.kappa_1 == 0.5 * spec.params.kappa_c);
  CHECK(spec.params.omega_s == spec.params.omega_c);
  CHECK(spec.params.gamma_s == 2 * pi * 0.157);
  CHECK(spec.params.chi_s == 2 * pi * 2.6e6);
  CHECK(spec.params.g_s == 2 * pi * 12.0);
  CHECK(spec.params.n_spins == 2.5e12);
  CHECK(spec.params.temperature == 293.0);
}

TEST_CASE("fig4 preset likewise") {
  TempFile f("[run]\nexperiment = superradiance\n");
  const auto spec = parse_config(f.path.string());
  CHECK(spec.params.omega_c == 2 * pi * 3.18e9);
  CHECK(spec.params.kappa_c == 2 * pi * 13.8e6);
  CHECK(spec.params.g_s == 2 * pi * 83.1e-3);
  CHECK(spec.params.chi_s == 2 * pi * 4.7e6);
  CHECK(spec.params.n_spins == 1.5e16);
  CHECK(spec.pulse_duration == 28e-9);
}

TEST_CASE("empty config reports the required keys") {
  TempFile f("");
  try {
    parse_config(f.path.string());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("run.experiment") != std::string::npos);
    CHECK(msg.find("run.preset") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected with their line number") {
  TempFile f("[run]\nexperiment = rabi-spectrum\n[params]\nomega_q = 1 angular=true\n");
  try {
    parse_config(f.path.string());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("omega_q") != std::string::npos);
    CHECK(e.line() == 4);
  }
}

TEST_CASE("ambiguous keys demand the angular flag") {
  TempFile f("[run]\nexperiment = rabi-spectrum\n[params]\neta_s = 1e4\n");
  CHECK_THROWS_AS(parse_config(f.path.string()), ConfigError);
}

TEST_CASE("unit resolution follows the documented convention") {
  TempFile f(
      "[run]\nexperiment = rabi-spectrum\npreset = fig3\n"
      "[params]\n"
      "eta_s = 1e4 angular=false\n"        // jump rate in events/s: as-is
      "chi_s = 2.6e6 angular=false\n"      // frequency in Hz: * 2*pi
      "omega_c = 16901768000 angular=true\n"  // already rad/s
      "omega_s = 16901768000 angular=true\n"
      "omega_d = 16901768000 angular=true\n");
  const auto spec = parse_config(f.path.string());
  CHECK(spec.params.eta_s == 1e4);
  CHECK(spec.params.chi_s == 2 * pi * 2.6e6);
  CHECK(spec.params.omega_c == 16901768000.0);
}

TEST_CASE("subcommand kind must match a config experiment key") {
  TempFile f("[run]\nexperiment = superradiance\n");
  CHECK_NOTHROW(parse_config(f.path.string(), ExperimentKind::superradiance));
  CHECK_THROWS_AS(parse_config(f.path.string(), ExperimentKind::rabi_spectrum),
                  ConfigError);
}

TEST_CASE("config validation catches physical nonsense") {
  TempFile f(
      "[run]\nexperiment = rabi-spectrum\npreset = fig3\n"
      "[params]\nkappa_1 = 10e6 angular=false\n");  // exceeds kappa_c
  CHECK_THROWS_AS(parse_config(f.path.string()), ConfigError);
}

TEST_CASE("manifest round-trips losslessly") {
  auto spec = default_spec(ExperimentKind::sense);
  spec.params.eta_s = 12345.678901234567;
  spec.steady.rel_tol = 3.333333333333333e-7;
  RunDiagnostics diag;
  diag.wall_time_s = 1.25;
  diag.total_points = 7;
  const auto m = make_manifest(spec, diag);
  const std::string a = manifest_to_json(m);
  const auto back = manifest_from_json(a);
  const std::string b = manifest_to_json(back);
  CHECK(a == b);
  CHECK(back.spec.params.eta_s == spec.params.eta_s);
  CHECK(back.spec.steady.rel_tol == spec.steady.rel_tol);
  CHECK(back.spec.kind == spec.kind);
}

TEST_CASE("filename slugs") {
  CHECK(rate_slug(0) == "0");
  CHECK(rate_slug(100) == "1e2");
  CHECK(rate_slug(1e3) == "1e3");
  CHECK(rate_slug(1e4) == "1e4");
  CHECK(rate_slug(2.5e4) == "2.5e4");
  CHECK(rate_slug(1e6) == "1e6");
  CHECK(rate_slug(12) == "12");
  CHECK(signed_slug(-2e6) == "m2e6");
  CHECK(signed_slug(1.59e6) == "p1.59e6");
  CHECK(signed_slug(0) == "0");
}

TEST_CASE("a manifest re-executes to matching outputs") {
  auto spec = default_spec(ExperimentKind::dicke_map);
  spec.map_temperatures = {0.5, 50.0};
  spec.map_etas = {1e3, 1e5};
  const auto rep = run_dicke_map(spec);
  const auto manifest = make_manifest(spec, rep.diag);

  TempDir dir("reexec");
  WriteOptions wo{dir.path.string(), true, false};
  write_report(rep, manifest, wo);
  const std::string first = slurp(dir.path / "dicke_map_eta.csv");

  // fresh process simulation: parse the manifest back and rerun
  const auto parsed = manifest_from_json(slurp(dir.path / "manifest.json"));
  const auto rep2 = run_dicke_map(parsed.spec);
  write_report(rep2, make_manifest(parsed.spec, rep2.diag), wo);
  CHECK(slurp(dir.path / "dicke_map_eta.csv") == first);
}

TEST_CASE("reports refuse to overwrite a run unless forced, and are byte-stable") {
  auto spec = default_spec(ExperimentKind::dicke_map);
  spec.map_temperatures = {0.01, 1.0, 293.0};
  spec.map_etas = {0.0, 1e4};
  const auto rep = run_dicke_map(spec);
  const auto manifest = make_manifest(spec, rep.diag);

  TempDir dir("report");
  WriteOptions wo{dir.path.string(), false, false};
  write_report(rep, manifest, wo);
  const std::string first = slurp(dir.path / "dicke_map_eta.csv");
  CHECK(!first.empty());

  CHECK_THROWS_AS(write_report(rep, manifest, wo), IoError);

  wo.force = true;
  write_report(rep, manifest, wo);
  CHECK(slurp(dir.path / "dicke_map_eta.csv") == first);

  // an independent recomputation produces bit-identical bytes
  const auto rep2 = run_dicke_map(spec);
  write_report(rep2, make_manifest(spec, rep2.diag), wo);
  CHECK(slurp(dir.path / "dicke_map_eta.csv") == first);
}
