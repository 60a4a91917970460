#include "ealign/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ealign {
namespace {

using nlohmann::json;

std::string join(const std::vector<std::string>& lines) {
  std::string out = "invalid configuration:";
  for (const auto& l : lines) out += "\n  - " + l;
  return out;
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Reads one block, recording every problem instead of stopping at the first.
class BlockReader {
 public:
  BlockReader(const json& doc, std::string name, std::set<std::string> allowed, std::vector<std::string>& errors)
      : name_(std::move(name)), errors_(errors) {
    if (!doc.contains(name_)) return;
    const json& b = doc.at(name_);
    if (!b.is_object()) {
      fail("", "must be an object");
      return;
    }
    block_ = &b;
    for (const auto& [key, _] : b.items())
      if (!allowed.contains(key)) fail(key, "unknown key");
  }

  [[nodiscard]] bool has(const std::string& key) const { return block_ && block_->contains(key); }

  void fail(const std::string& key, const std::string& msg) {
    errors_.push_back(name_ + (key.empty() ? "" : "." + key) + ": " + msg);
  }

  template <typename Pred>
  void number(const std::string& key, double& out, Pred ok, const std::string& constraint) {
    if (!has(key)) return;
    const json& v = block_->at(key);
    if (!v.is_number()) {
      fail(key, "must be a number");
      return;
    }
    const double x = v.get<double>();
    if (!ok(x)) {
      fail(key, constraint + ", got " + fmt_num(x));
      return;
    }
    out = x;
  }

  void number(const std::string& key, double& out) {
    number(key, out, [](double) { return true; }, "");
  }

  void optional_number(const std::string& key, std::optional<double>& out) {
    double v = 0.0;
    if (!has(key)) return;
    const std::size_t before = errors_.size();
    number(key, v);
    if (errors_.size() == before) out = v;
  }

  template <typename Pred>
  void integer(const std::string& key, long long& out, Pred ok, const std::string& constraint) {
    if (!has(key)) return;
    const json& v = block_->at(key);
    if (!v.is_number_integer()) {
      fail(key, "must be an integer");
      return;
    }
    const long long x = v.get<long long>();
    if (!ok(x)) {
      fail(key, constraint + ", got " + std::to_string(x));
      return;
    }
    out = x;
  }

  void string(const std::string& key, std::string& out, const std::set<std::string>& choices = {}) {
    if (!has(key)) return;
    const json& v = block_->at(key);
    if (!v.is_string()) {
      fail(key, "must be a string");
      return;
    }
    const auto s = v.get<std::string>();
    if (!choices.empty() && !choices.contains(s)) {
      std::string list;
      for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
      fail(key, "must be one of {" + list + "}, got '" + s + "'");
      return;
    }
    out = s;
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = block_->at(key);
    if (!v.is_array()) {
      fail(key, "must be an array of numbers");
      return;
    }
    std::vector<double> tmp;
    for (const auto& e : v) {
      if (!e.is_number()) {
        fail(key, "must be an array of numbers");
        return;
      }
      tmp.push_back(e.get<double>());
    }
    out = std::move(tmp);
  }

 private:
  std::string name_;
  std::vector<std::string>& errors_;
  const json* block_ = nullptr;
};

}  // namespace

ConfigErrorList::ConfigErrorList(std::vector<std::string> errors)
    : ConfigError(join(errors)), errors_(std::move(errors)) {}

Kernel KernelDescription::build() const {
  if (kind == "power_law") return Kernel::power_law(alpha);
  if (kind == "constant") return Kernel::constant(supNorm);
  if (kind == "zero") return Kernel::constant(0.0);
  if (kind == "tabulated") return Kernel::tabulated(radii, values);
  throw ConfigError("unknown kernel kind '" + kind + "'");
}

std::string KernelDescription::label() const {
  if (kind == "power_law") return "alpha=" + fmt_num(alpha);
  if (kind == "constant") return "constant=" + fmt_num(supNorm);
  return kind;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigErrorList({"cannot open config file '" + path.string() + "'"});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

RunConfig parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigErrorList({std::string("config is not valid JSON: ") + e.what()});
  }
  return parse_config_json(doc);
}

RunConfig parse_config_json(const json& doc) {
  std::vector<std::string> errors;
  if (!doc.is_object()) throw ConfigErrorList({"config root must be a JSON object"});
  static const std::set<std::string> blocks{"kernel", "data", "solver", "bound", "output"};
  for (const auto& [key, _] : doc.items())
    if (!blocks.contains(key)) errors.push_back(key + ": unknown block");

  RunConfig cfg;
  auto positive = [](double v) { return v > 0.0; };

  {
    BlockReader r(doc, "kernel", {"kind", "alpha", "sup_norm", "table_radii", "table_values"}, errors);
    auto& k = cfg.kernel;
    r.string("kind", k.kind, {"power_law", "constant", "zero", "tabulated"});
    r.number("alpha", k.alpha, [](double a) { return a > 0.0 && a < 1.0; }, "must lie in (0,1)");
    r.number("sup_norm", k.supNorm, [](double v) { return v >= 0.0; }, "must be >= 0");
    r.numbers("table_radii", k.radii);
    r.numbers("table_values", k.values);
    if (k.kind == "tabulated") {
      try {
        (void)Kernel::tabulated(k.radii, k.values);
      } catch (const ConfigError& e) {
        r.fail("table_radii", e.what());
      }
    }
  }
  {
    BlockReader r(doc, "data", {"preset", "mass", "rho_amp", "u_amp", "u_shift"}, errors);
    auto& d = cfg.data;
    std::string preset = to_string(d.kind);
    r.string("preset", preset, {"trig", "aligned"});
    d.kind = preset_kind_from_string(preset);
    r.number("mass", d.mass, positive, "must be > 0");
    r.number("rho_amp", d.rhoAmp, [](double b) { return b > -1.0 && b < 1.0; }, "must lie in (-1,1)");
    r.number("u_amp", d.uAmp);
    r.number("u_shift", d.uShift);
  }
  {
    BlockReader r(doc, "solver",
                  {"scheme", "N", "n", "cfl", "dt", "dt_max", "t_end", "order", "rho_cap", "g_floor"}, errors);
    auto& s = cfg.solver;
    r.string("scheme", s.scheme, {"eulerian", "lagrangian"});
    long long N = static_cast<long long>(s.N);
    r.integer("N", N, [](long long v) { return v >= 32 && v % 2 == 0; }, "must be even and >= 32");
    s.N = static_cast<std::size_t>(N);
    if (r.has("n")) {
      long long n = 0;
      const std::size_t before = errors.size();
      r.integer("n", n, [](long long v) { return v >= 2; }, "must be >= 2");
      if (errors.size() == before) s.n = static_cast<std::size_t>(n);
    }
    r.number("cfl", s.cfl, [](double c) { return c > 0.0 && c <= 0.5; }, "must lie in (0, 0.5]");
    r.number("dt", s.dt, positive, "must be > 0");
    r.number("dt_max", s.dtMax, positive, "must be > 0");
    r.number("t_end", s.tEnd, positive, "must be > 0");
    long long order = s.order;
    r.integer("order", order, [](long long v) { return v == 1 || v == 2; }, "must be 1 or 2");
    s.order = static_cast<int>(order);
    r.number("rho_cap", s.rhoCap, positive, "must be > 0");
    r.number("g_floor", s.gFloor);
  }
  {
    BlockReader r(doc, "bound", {"mass", "c0", "rho0_sup", "g0_sup"}, errors);
    auto& b = cfg.bound;
    auto check = [&](const char* key, std::optional<double>& out, bool strict) {
      r.optional_number(key, out);
      if (out && (strict ? !(*out > 0.0) : !(*out >= 0.0))) {
        r.fail(key, strict ? "must be > 0, got " + fmt_num(*out) : "must be >= 0, got " + fmt_num(*out));
        out.reset();
      }
    };
    check("mass", b.mass, true);
    check("c0", b.c0, true);
    check("rho0_sup", b.rho0Sup, false);
    check("g0_sup", b.g0Sup, false);
  }
  {
    BlockReader r(doc, "output",
                  {"diagnostics_csv", "snapshot_csv", "trajectory_csv", "report", "snapshot_times", "stride"}, errors);
    auto& o = cfg.output;
    r.string("diagnostics_csv", o.diagnosticsCsv);
    r.string("snapshot_csv", o.snapshotCsv);
    r.string("trajectory_csv", o.trajectoryCsv);
    r.string("report", o.report);
    r.numbers("snapshot_times", o.snapshotTimes);
    long long stride = o.stride;
    r.integer("stride", stride, [](long long v) { return v >= 1; }, "must be >= 1");
    o.stride = static_cast<int>(stride);
  }

  if (!errors.empty()) throw ConfigErrorList(std::move(errors));
  return cfg;
}

nlohmann::json to_json(const KernelDescription& k) {
  json j{{"kind", k.kind}};
  if (k.kind == "power_law") j["alpha"] = k.alpha;
  if (k.kind == "constant") j["sup_norm"] = k.supNorm;
  if (k.kind == "tabulated") {
    j["table_radii"] = k.radii;
    j["table_values"] = k.values;
  }
  return j;
}

KernelDescription kernel_from_json(const nlohmann::json& j) {
  return parse_config_json(json{{"kernel", j}}).kernel;
}

nlohmann::json to_json(const PresetSpec& p) {
  return json{{"preset", to_string(p.kind)},
              {"mass", p.mass},
              {"rho_amp", p.rhoAmp},
              {"u_amp", p.uAmp},
              {"u_shift", p.uShift}};
}

PresetSpec preset_from_json(const nlohmann::json& j) { return parse_config_json(json{{"data", j}}).data; }

}  // namespace ealign
