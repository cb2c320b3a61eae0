// Command-line front end: one subcommand per bundled experiment.
// Exit codes: 0 success, 2 config error, 3 convergence failure, 4 I/O error.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "cqed/config.hpp"
#include "cqed/report.hpp"
#include "cqed/version.hpp"

namespace {

struct CliOptions {
  std::string config;
  std::string out;
  int workers = 0;
  bool force = false;
};

void add_common(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config, "configuration file (key = value sections)");
  cmd->add_option("--out", opt.out, "output directory (overrides the config)");
  cmd->add_option("--workers", opt.workers, "parallel workers for sweeps and curves");
  cmd->add_flag("--force", opt.force, "overwrite an existing run in the output dir");
}

cqed::ExperimentSpec resolve_spec(cqed::ExperimentKind kind, const CliOptions& opt) {
  cqed::ExperimentSpec spec = opt.config.empty()
                                  ? cqed::default_spec(kind)
                                  : cqed::parse_config(opt.config, kind);
  if (!opt.out.empty()) spec.out_dir = opt.out;
  if (opt.workers > 0) spec.workers = opt.workers;
  if (opt.force) spec.force = true;
  return spec;
}

template <class Report>
int finish(const Report& rep, const cqed::ExperimentSpec& spec) {
  const auto manifest = cqed::make_manifest(spec, rep.diag);
  cqed::WriteOptions wo{spec.out_dir, spec.force, spec.emit_plot_script};
  const auto files = cqed::write_report(rep, manifest, wo);
  std::printf("%s: %d points, %d not converged, %.1f s\n",
              cqed::to_string(spec.kind), rep.diag.total_points,
              rep.diag.nonconverged_points, rep.diag.wall_time_s);
  for (const auto& f : files) std::printf("  wrote %s\n", f.c_str());
  for (const auto& e : rep.diag.errors) std::fprintf(stderr, "warning: %s\n", e.c_str());
  return rep.diag.clean() ? 0 : 3;
}

int run(cqed::ExperimentKind kind, const CliOptions& opt) {
  using cqed::ExperimentKind;
  const auto spec = resolve_spec(kind, opt);
  switch (kind) {
    case ExperimentKind::dicke_map: return finish(cqed::run_dicke_map(spec), spec);
    case ExperimentKind::rabi_transient:
      return finish(cqed::run_rabi_transient(spec), spec);
    case ExperimentKind::rabi_spectrum:
      return finish(cqed::run_rabi_spectrum(spec), spec);
    case ExperimentKind::superradiance:
      return finish(cqed::run_superradiance(spec), spec);
    case ExperimentKind::sense: return finish(cqed::run_sensing(spec), spec);
    case ExperimentKind::oracle_check:
      return finish(cqed::run_oracle_comparison(spec), spec);
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulator for a driven microwave resonator coupled to an optically "
      "cooled spin ensemble"};
  app.set_version_flag("--version", cqed::kVersion);
  app.require_subcommand(1);

  struct Sub {
    cqed::ExperimentKind kind;
    const char* help;
  };
  const Sub subs[] = {
      {cqed::ExperimentKind::dicke_map,
       "steady-state Dicke coordinates over temperature and cooling grids"},
      {cqed::ExperimentKind::rabi_transient,
       "photon-number transient under a resonant square pulse"},
      {cqed::ExperimentKind::rabi_spectrum,
       "steady-state photon number versus drive detuning"},
      {cqed::ExperimentKind::superradiance,
       "pump pulse, stimulated emission burst and spin re-cooling"},
      {cqed::ExperimentKind::sense,
       "spin-frequency sensing from the Rabi-splitting signal"},
      {cqed::ExperimentKind::oracle_check,
       "few-spin cumulant equations against the exact density-matrix solver"},
  };

  CliOptions opts[6];
  int selected = -1;
  for (int i = 0; i < 6; ++i) {
    auto* cmd = app.add_subcommand(cqed::to_string(subs[i].kind), subs[i].help);
    add_common(cmd, opts[i]);
    cmd->callback([&selected, i] { selected = i; });
  }

  CLI11_PARSE(app, argc, argv);
  if (selected < 0) return 2;

  try {
    return run(subs[selected].kind, opts[selected]);
  } catch (const cqed::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const cqed::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
