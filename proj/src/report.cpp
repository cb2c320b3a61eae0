#include "cqed/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace cqed {

namespace {

namespace fs = std::filesystem;
using std::numbers::pi;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double hz(double angular) { return angular / (2.0 * pi); }

class ReportWriter {
 public:
  ReportWriter(const RunManifest& manifest, const WriteOptions& opt) : opt_(opt) {
    fs::create_directories(opt_.out_dir);
    const fs::path marker = fs::path(opt_.out_dir) / "manifest.json";
    if (fs::exists(marker) && !opt_.force)
      throw IoError("output directory already holds a run (" + marker.string() +
                    "); pass --force to overwrite");
    write_text("manifest.json", manifest_to_json(manifest));
  }

  void write_text(const std::string& name, const std::string& text) {
    const fs::path p = fs::path(opt_.out_dir) / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + p.string());
    out << text;
    if (!out) throw IoError("short write to " + p.string());
    files_.push_back(p.string());
  }

  void write_csv(const std::string& name, const std::string& header,
                 const std::vector<std::vector<double>>& rows) {
    std::string text = header + "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) text += ',';
        text += fmt(row[i]);
      }
      text += '\n';
    }
    write_text(name, text);
  }

  std::vector<std::string> files() const { return files_; }

 private:
  WriteOptions opt_;
  std::vector<std::string> files_;
};

void write_trajectory_csv(ReportWriter& w, const std::string& name,
                          const Trajectory& traj) {
  std::vector<std::vector<double>> rows;
  rows.reserve(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    rows.push_back({traj.times[i], traj.states[i].v[slot::n].real(),
                    traj.states[i].v[slot::pe].real(), traj.dicke[i].j,
                    traj.dicke[i].m});
  w.write_csv(name, "time_s,photon_number,upper_population,dicke_j,dicke_m", rows);
}

std::string plot_header() {
  return "#!/usr/bin/env python3\n"
         "# Generated alongside the CSV files; reads them by relative path.\n"
         "import csv, os\n"
         "import matplotlib\n"
         "matplotlib.use('Agg')\n"
         "import matplotlib.pyplot as plt\n"
         "here = os.path.dirname(os.path.abspath(__file__))\n"
         "def load(name):\n"
         "    with open(os.path.join(here, name)) as f:\n"
         "        rows = list(csv.reader(f))\n"
         "    cols = list(zip(*[[float(x) for x in r] for r in rows[1:]]))\n"
         "    return rows[0], cols\n\n";
}

}  // namespace

std::string rate_slug(double value) {
  if (value == 0) return "0";
  const double a = std::abs(value);
  int e = static_cast<int>(std::floor(std::log10(a)));
  double m = a / std::pow(10.0, e);
  // normalize 9.999.. -> 10 edge cases
  if (m >= 9.999999) {
    m /= 10;
    ++e;
  }
  char buf[40];
  if (e >= 2 || e <= -2) {
    if (std::abs(m - std::round(m)) < 1e-9)
      std::snprintf(buf, sizeof buf, "%de%d", static_cast<int>(std::round(m)), e);
    else
      std::snprintf(buf, sizeof buf, "%ge%d", m, e);
  } else {
    std::snprintf(buf, sizeof buf, "%g", a);
  }
  return buf;
}

std::string signed_slug(double value) {
  if (value == 0) return "0";
  return (value < 0 ? "m" : "p") + rate_slug(std::abs(value));
}

std::vector<std::string> write_report(const DickeMapReport& rep, const RunManifest& m,
                                      const WriteOptions& opt) {
  ReportWriter w(m, opt);
  const char* header =
      "temperature_k,eta_s_hz,population,dicke_j,dicke_m,j_over_j0";
  auto rows_of = [](const std::vector<DickeMapPoint>& pts) {
    std::vector<std::vector<double>> rows;
    for (const auto& p : pts)
      rows.push_back({p.temperature, p.eta_s, p.population, p.j, p.m, p.j_over_j0});
    return rows;
  };
  w.write_csv("dicke_map_temperature.csv", header, rows_of(rep.temperature_scan));
  w.write_csv("dicke_map_eta.csv", header, rows_of(rep.eta_scan));
  if (opt.emit_plot_script) {
    w.write_text("plot.py", plot_header() +
        "for name, label in [('dicke_map_temperature.csv', 'T scan, eta=0'),\n"
        "                    ('dicke_map_eta.csv', 'eta scan')]:\n"
        "    _, c = load(name)\n"
        "    plt.plot(c[3], c[4], 'o-', label=label)\n"
        "plt.xlabel('J'); plt.ylabel('M'); plt.legend()\n"
        "plt.savefig(os.path.join(here, 'dicke_map.png'), dpi=150)\n");
  }
  return w.files();
}

std::vector<std::string> write_report(const RabiTransientReport& rep,
                                      const RunManifest& m, const WriteOptions& opt) {
  ReportWriter w(m, opt);
  std::vector<std::vector<double>> metrics;
  for (const auto& c : rep.curves) {
    write_trajectory_csv(w, "trajectory_eta_" + rate_slug(c.eta_s) + ".csv", c.traj);
    metrics.push_back({c.eta_s, hz(c.oscillation_freq), hz(c.predicted_freq),
                       c.envelope_modulation, c.oscillating ? 1.0 : 0.0});
  }
  w.write_csv("metrics.csv",
              "eta_s_hz,oscillation_freq_hz,predicted_freq_hz,envelope_modulation,"
              "oscillating",
              metrics);
  if (opt.emit_plot_script) {
    std::string script = plot_header();
    for (const auto& c : rep.curves)
      script += "h, cols = load('trajectory_eta_" + rate_slug(c.eta_s) +
                ".csv')\nplt.plot([t*1e6 for t in cols[0]], cols[1], label='eta=" +
                rate_slug(c.eta_s) + "')\n";
    script +=
        "plt.xlabel('time (us)'); plt.ylabel('photon number'); plt.yscale('log')\n"
        "plt.legend(); plt.savefig(os.path.join(here, 'rabi_transient.png'), dpi=150)\n";
    w.write_text("plot.py", script);
  }
  return w.files();
}

namespace {

void write_spectrum_curves(ReportWriter& w, const std::vector<SpectrumCurve>& curves,
                           double omega_ref, const std::string& stem,
                           const std::string& label_key) {
  std::vector<std::vector<double>> peaks, hybrid;
  for (const auto& c : curves) {
    std::vector<std::vector<double>> rows;
    for (const auto& p : c.points)
      rows.push_back({hz(p.omega - omega_ref), p.photon_number});
    w.write_csv(stem + rate_slug(c.eta_s) + ".csv",
                "drive_detuning_hz,photon_number", rows);
    for (const auto& p : c.peaks.peaks)
      peaks.push_back({c.eta_s, hz(p.omega - omega_ref), p.height});
    hybrid.push_back({c.eta_s, c.j_center,
                      hz(c.prediction.omega_plus - c.prediction.omega_minus),
                      hz(c.measured_splitting)});
  }
  w.write_csv("peaks.csv", label_key + ",peak_detuning_hz,height_photons", peaks);
  w.write_csv("hybrid_modes.csv",
              label_key + ",j_steady,predicted_splitting_hz,measured_splitting_hz",
              hybrid);
}

}  // namespace

std::vector<std::string> write_report(const RabiSpectrumReport& rep,
                                      const RunManifest& m, const WriteOptions& opt) {
  ReportWriter w(m, opt);
  write_spectrum_curves(w, rep.curves, m.spec.params.omega_c, "spectrum_eta_",
                        "eta_s_hz");
  if (opt.emit_plot_script) {
    std::string script = plot_header();
    for (const auto& c : rep.curves)
      script += "h, cols = load('spectrum_eta_" + rate_slug(c.eta_s) +
                ".csv')\nplt.plot([f/1e6 for f in cols[0]], cols[1], label='eta=" +
                rate_slug(c.eta_s) + "')\n";
    script +=
        "plt.xlabel('drive detuning (MHz)'); plt.ylabel('steady photon number')\n"
        "plt.yscale('log'); plt.legend()\n"
        "plt.savefig(os.path.join(here, 'rabi_spectrum.png'), dpi=150)\n";
    w.write_text("plot.py", script);
  }
  return w.files();
}

std::vector<std::string> write_report(const SuperradianceReport& rep,
                                      const RunManifest& m, const WriteOptions& opt) {
  ReportWriter w(m, opt);
  std::vector<std::vector<double>> metrics;
  for (const auto& c : rep.curves) {
    write_trajectory_csv(w, "trajectory_eta_" + rate_slug(c.eta_s) + ".csv", c.traj);
    metrics.push_back({c.eta_s, c.peak_photon_number, c.pulse_end_time,
                       c.phase_end_time, c.plateau_population, c.recool_time,
                       c.j_equilibrium});
  }
  w.write_csv("metrics.csv",
              "eta_s_hz,peak_photon_number,pulse_end_time_s,phase_end_time_s,"
              "plateau_population,recool_time_s,j_equilibrium",
              metrics);
  if (opt.emit_plot_script) {
    std::string script = plot_header();
    script += "fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True)\n";
    for (const auto& c : rep.curves) {
      const std::string slug = rate_slug(c.eta_s);
      script += "h, cols = load('trajectory_eta_" + slug + ".csv')\n";
      script += "ax1.plot([t*1e6 for t in cols[0]], cols[1], label='eta=" + slug +
                "')\nax2.plot([t*1e6 for t in cols[0]], cols[2])\n";
    }
    script +=
        "ax1.set_yscale('log'); ax1.set_ylabel('photon number'); ax1.legend()\n"
        "ax2.set_ylabel('upper population'); ax2.set_xlabel('time (us)')\n"
        "ax2.set_xscale('log')\n"
        "plt.savefig(os.path.join(here, 'superradiance.png'), dpi=150)\n";
    w.write_text("plot.py", script);
  }
  return w.files();
}

std::vector<std::string> write_report(const SensingReport& rep, const RunManifest& m,
                                      const WriteOptions& opt) {
  ReportWriter w(m, opt);
  const double wc = m.spec.params.omega_c;

  std::vector<std::vector<double>> inferred;
  for (const auto& e : rep.mode_a) {
    std::vector<std::vector<double>> rows;
    for (const auto& p : e.curve.points)
      rows.push_back({hz(p.omega - wc), p.photon_number});
    w.write_csv("spectrum_delta_" + signed_slug(hz(e.spin_detuning)) + ".csv",
                "drive_detuning_hz,photon_number", rows);
    inferred.push_back({hz(e.spin_detuning), hz(e.omega_s_true),
                        hz(e.omega_s_inferred),
                        hz(e.omega_s_inferred - e.omega_s_true),
                        hz(rep.grid_step_a), e.inferred_ok ? 1.0 : 0.0});
  }
  w.write_csv("inferred.csv",
              "spin_detuning_hz,omega_s_true_hz,omega_s_inferred_hz,error_hz,"
              "grid_step_hz,two_peaks_found",
              inferred);

  std::vector<std::vector<double>> minima;
  for (const auto& c : rep.mode_b) {
    std::vector<std::vector<double>> rows;
    for (const auto& p : c.points)
      rows.push_back({hz(p.omega - wc), p.photon_number});
    w.write_csv("response_offset_" + signed_slug(hz(c.drive_offset)) + ".csv",
                "spin_detuning_hz,photon_number", rows);
    minima.push_back({hz(c.drive_offset), hz(c.min_detuning)});
  }
  w.write_csv("minima.csv", "drive_offset_hz,min_detuning_hz", minima);

  if (opt.emit_plot_script) {
    std::string script = plot_header();
    script += "fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))\n";
    for (const auto& e : rep.mode_a)
      script += "h, cols = load('spectrum_delta_" + signed_slug(hz(e.spin_detuning)) +
                ".csv')\nax1.plot([f/1e6 for f in cols[0]], cols[1], label='delta=" +
                signed_slug(hz(e.spin_detuning)) + "')\n";
    for (const auto& c : rep.mode_b)
      script += "h, cols = load('response_offset_" + signed_slug(hz(c.drive_offset)) +
                ".csv')\nax2.plot([f/1e6 for f in cols[0]], cols[1], label='offset=" +
                signed_slug(hz(c.drive_offset)) + "')\n";
    script +=
        "ax1.set_xlabel('drive detuning (MHz)'); ax1.set_ylabel('photon number')\n"
        "ax1.set_yscale('log'); ax1.legend()\n"
        "ax2.set_xlabel('spin detuning (MHz)'); ax2.set_yscale('log'); ax2.legend()\n"
        "plt.tight_layout(); plt.savefig(os.path.join(here, 'sensing.png'), dpi=150)\n";
    w.write_text("plot.py", script);
  }
  return w.files();
}

std::vector<std::string> write_report(const OracleComparisonReport& rep,
                                      const RunManifest& m, const WriteOptions& opt) {
  ReportWriter w(m, opt);
  std::vector<std::vector<double>> devs;
  for (const auto& e : rep.entries) {
    std::string header = "time_s";
    for (const char* n : slot_names()) {
      const std::string s = n;
      header += ",cum_" + s + "_re,cum_" + s + "_im,exact_" + s + "_re,exact_" + s +
                "_im";
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < e.times.size(); ++i) {
      std::vector<double> row{e.times[i]};
      for (int k = 0; k < slot::count; ++k) {
        row.push_back(e.cumulant[i].v[k].real());
        row.push_back(e.cumulant[i].v[k].imag());
        row.push_back(e.exact[i].v[k].real());
        row.push_back(e.exact[i].v[k].imag());
      }
      rows.push_back(std::move(row));
    }
    const std::string name = "oracle_n" + std::to_string(e.n_spins) +
                             (e.strong_drive ? "_strong" : "") + ".csv";
    w.write_csv(name, header, rows);
    for (int k = 0; k < slot::count; ++k)
      devs.push_back({double(e.n_spins), e.strong_drive ? 1.0 : 0.0, double(k),
                      e.max_rel_deviation[k]});
  }
  w.write_csv("deviations.csv", "n_spins,strong_drive,slot_index,max_rel_deviation",
              devs);
  if (opt.emit_plot_script) {
    std::string script = plot_header();
    for (const auto& e : rep.entries) {
      const std::string name = "oracle_n" + std::to_string(e.n_spins) +
                               (e.strong_drive ? "_strong" : "");
      script += "h, cols = load('" + name +
                ".csv')\nplt.plot([t*1e6 for t in cols[0]], cols[13], label='cumulant "
                + name + "')\nplt.plot([t*1e6 for t in cols[0]], cols[15], '--', "
                "label='exact " + name + "')\n";
    }
    script +=
        "plt.xlabel('time (us)'); plt.ylabel('photon number'); plt.legend()\n"
        "plt.savefig(os.path.join(here, 'oracle_check.png'), dpi=150)\n";
    w.write_text("plot.py", script);
  }
  return w.files();
}

}  // namespace cqed
