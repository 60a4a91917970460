#pragma once

// Header-first CSV tables. Numbers are written with 17 significant digits so
// a read back reproduces every double bit for bit.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ealign/eulerian.hpp"
#include "ealign/lagrangian.hpp"

namespace ealign {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws InputError when absent.
  [[nodiscard]] std::size_t column(std::string_view name) const;
  [[nodiscard]] double number(std::size_t row, std::string_view name) const;
  void add_row(std::vector<std::string> row);
};

std::string format_double(double v);

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// t, rho_inf, G_inf, G_min, ratio_min, mass_drift, momentum_drift
CsvTable diagnostics_table(const eulerian::RunDiagnostics& run);
/// t, x, rho, G, u in long format, one row per cell and snapshot
CsvTable snapshot_table(const std::vector<eulerian::Snapshot>& snapshots);
/// t, rho_max, G_inf, G_min, ratio_drift, momentum_drift, u_max, u_min
CsvTable diagnostics_table(const lagrangian::Trajectory& run);
/// t, i, x, u, rho, G in long format, one row per particle and frame
CsvTable trajectory_table(const lagrangian::Trajectory& run);

}  // namespace ealign
