#pragma once

#include <string>
#include <vector>

#include "cqed/config.hpp"
#include "cqed/experiments.hpp"

// Result serialization: one CSV per curve (headers name the columns and
// units), a JSON manifest, and an optional matplotlib script that reads the
// CSVs by relative path. Output is byte-stable for identical inputs.

namespace cqed {

struct WriteOptions {
  std::string out_dir;
  bool force = false;
  bool emit_plot_script = true;
};

/// Returns the paths written. Refuses to overwrite an existing run
/// (manifest.json present) unless force is set; throws IoError.
std::vector<std::string> write_report(const DickeMapReport&, const RunManifest&,
                                      const WriteOptions&);
std::vector<std::string> write_report(const RabiTransientReport&, const RunManifest&,
                                      const WriteOptions&);
std::vector<std::string> write_report(const RabiSpectrumReport&, const RunManifest&,
                                      const WriteOptions&);
std::vector<std::string> write_report(const SuperradianceReport&, const RunManifest&,
                                      const WriteOptions&);
std::vector<std::string> write_report(const SensingReport&, const RunManifest&,
                                      const WriteOptions&);
std::vector<std::string> write_report(const OracleComparisonReport&, const RunManifest&,
                                      const WriteOptions&);

/// Compact value slug for filenames: 0 -> "0", 100 -> "1e2", 25000 -> "2.5e4".
std::string rate_slug(double value);
/// Signed variant for detunings: -2e6 -> "m2e6", +1.59e6 -> "p1.59e6".
std::string signed_slug(double value);

}  // namespace cqed
