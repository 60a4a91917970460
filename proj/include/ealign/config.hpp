#pragma once

// Run configuration shared by every CLI subcommand. The on-disk format is a
// JSON object with the blocks "kernel", "data", "solver", "bound" and
// "output"; docs/config-schema.md lists every key. Unknown keys are errors.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ealign/errors.hpp"
#include "ealign/initial_data.hpp"
#include "ealign/kernels.hpp"

namespace ealign {

/// Serializable description of a kernel; build() turns it into a Kernel.
struct KernelDescription {
  std::string kind = "power_law";  // power_law | constant | zero | tabulated
  double alpha = 0.5;
  double supNorm = 1.0;            // value of the constant kernel
  std::vector<double> radii;
  std::vector<double> values;

  [[nodiscard]] Kernel build() const;
  /// "alpha=0.5", "constant=1", "tabulated" ... used in CSV rows.
  [[nodiscard]] std::string label() const;
  bool operator==(const KernelDescription&) const = default;
};

struct SolverBlock {
  std::string scheme = "eulerian";  // eulerian | lagrangian
  std::size_t N = 512;
  std::optional<std::size_t> n;     // particle count, defaults to N
  double cfl = 0.4;
  double dt = 1e-3;                 // Lagrangian nominal step
  double dtMax = 1e-2;              // Eulerian step ceiling
  double tEnd = 10.0;
  int order = 1;
  double rhoCap = 1e6;
  double gFloor = -1e6;
};

struct BoundBlock {
  std::optional<double> mass;
  std::optional<double> c0;
  std::optional<double> rho0Sup;
  std::optional<double> g0Sup;
};

struct OutputBlock {
  std::string diagnosticsCsv;
  std::string snapshotCsv;
  std::string trajectoryCsv;
  std::string report;
  std::vector<double> snapshotTimes;
  int stride = 1;
};

struct RunConfig {
  KernelDescription kernel;
  PresetSpec data;
  SolverBlock solver;
  BoundBlock bound;
  OutputBlock output;
};

/// Every validation problem found in a config, not just the first.
class ConfigErrorList : public ConfigError {
 public:
  explicit ConfigErrorList(std::vector<std::string> errors);
  [[nodiscard]] const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config_json(const nlohmann::json& doc);

nlohmann::json to_json(const KernelDescription& k);
KernelDescription kernel_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PresetSpec& p);
PresetSpec preset_from_json(const nlohmann::json& j);

}  // namespace ealign
