#include "ealign/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "ealign/errors.hpp"

namespace ealign {
namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw InputError("csv: unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw InputError("csv: no column named '" + std::string(name) + "'");
}

double CsvTable::number(std::size_t row, std::string_view name) const {
  const std::string& s = rows.at(row).at(column(name));
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw InputError("csv: '" + s + "' is not a number");
  }
  return v;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw InputError("csv: row width does not match header");
  rows.push_back(std::move(row));
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << quote(fields[i]);
    out << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw InputError("csv: cannot write '" + path.string() + "'");
  write_csv(out, table);
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw InputError("csv: missing header row");
  t.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.add_row(split_line(line));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("csv: cannot open '" + path.string() + "'");
  return read_csv(in);
}

CsvTable diagnostics_table(const eulerian::RunDiagnostics& run) {
  CsvTable t{{"t", "rho_inf", "G_inf", "G_min", "ratio_min", "mass_drift", "momentum_drift"}, {}};
  for (const auto& s : run.samples)
    t.add_row({format_double(s.t), format_double(s.rhoInf), format_double(s.gInf), format_double(s.gMin),
               format_double(s.ratioMin), format_double(s.massDrift), format_double(s.momentumDrift)});
  return t;
}

CsvTable snapshot_table(const std::vector<eulerian::Snapshot>& snapshots) {
  CsvTable t{{"t", "x", "rho", "G", "u"}, {}};
  for (const auto& s : snapshots)
    for (std::size_t i = 0; i < s.x.size(); ++i)
      t.add_row({format_double(s.t), format_double(s.x[i]), format_double(s.rho[i]), format_double(s.G[i]),
                 format_double(s.u[i])});
  return t;
}

CsvTable diagnostics_table(const lagrangian::Trajectory& run) {
  CsvTable t{{"t", "rho_max", "G_inf", "G_min", "ratio_drift", "momentum_drift", "u_max", "u_min"}, {}};
  for (const auto& s : run.samples)
    t.add_row({format_double(s.t), format_double(s.rhoMax), format_double(s.gInf), format_double(s.gMin),
               format_double(s.ratioDrift), format_double(s.momentumDrift), format_double(s.uMax),
               format_double(s.uMin)});
  return t;
}

CsvTable trajectory_table(const lagrangian::Trajectory& run) {
  CsvTable t{{"t", "i", "x", "u", "rho", "G"}, {}};
  for (const auto& f : run.frames)
    for (std::size_t i = 0; i < f.x.size(); ++i)
      t.add_row({format_double(f.t), std::to_string(i), format_double(f.x[i]), format_double(f.u[i]),
                 format_double(f.rho[i]), format_double(f.G[i])});
  return t;
}

}  // namespace ealign
