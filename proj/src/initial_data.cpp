#include "ealign/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ealign/errors.hpp"

namespace ealign {

std::string to_string(PresetKind kind) {
  return kind == PresetKind::Aligned ? "aligned" : "trig";
}

PresetKind preset_kind_from_string(const std::string& name) {
  if (name == "trig") return PresetKind::Trig;
  if (name == "aligned") return PresetKind::Aligned;
  throw ConfigError("unknown initial-data preset '" + name + "' (expected trig or aligned)");
}

InitialData make_initial_data(const PresetSpec& spec, const Kernel& kernel) {
  if (!(spec.mass > 0.0)) throw ConfigError("initial data: mass must be > 0");
  if (!(std::fabs(spec.rhoAmp) < 1.0)) throw ConfigError("initial data: |rho_amp| must be < 1");

  constexpr double twoPi = 2.0 * std::numbers::pi;
  const double m = spec.mass, b = spec.rhoAmp, v = spec.uShift;
  const double l1 = l1_norm(kernel);
  const double c1 = b != 0.0 ? cosine_moment(kernel, 1) : 0.0;
  const double a = spec.kind == PresetKind::Aligned ? m * b * (l1 - c1) / twoPi : spec.uAmp;
  // G0 = base + amp cos(2 pi x)
  const double base = m * l1;
  const double amp = twoPi * a + m * b * c1;

  InitialData d;
  d.rho0 = [m, b](double x) { return m * (1.0 + b * std::cos(twoPi * x)); };
  d.u0 = [v, a](double x) { return v + a * std::sin(twoPi * x); };
  d.G0 = [base, amp](double x) { return base + amp * std::cos(twoPi * x); };
  d.mass = m;
  d.momentum = m * v;
  d.velocityAmp = a;
  d.infG0 = base - std::fabs(amp);
  d.rho0Sup = m * (1.0 + std::fabs(b));
  d.g0Sup = std::max(std::fabs(base + amp), std::fabs(base - amp));
  // G0/rho0 is monotone in s = cos(2 pi x), so its extremes sit at s = +-1.
  const double ratioPlus = (base + amp) / (m * (1.0 + b));
  const double ratioMinus = (base - amp) / (m * (1.0 - b));
  d.c0 = std::min(ratioPlus, ratioMinus);
  return d;
}

double cell_center(std::size_t i, std::size_t N) {
  return -0.5 + (static_cast<double>(i) + 1.0) / static_cast<double>(N);
}

std::vector<double> sample_cells(const std::function<double(double)>& f, std::size_t N) {
  std::vector<double> out(N);
  for (std::size_t i = 0; i < N; ++i) out[i] = f(cell_center(i, N));
  return out;
}

}  // namespace ealign
