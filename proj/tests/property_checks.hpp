#pragma once

// Property checks shared by the unit tests and the acceptance binary. Each
// returns a verdict plus the worst value it saw.

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ealign/bounds.hpp"
#include "ealign/errors.hpp"
#include "ealign/kernels.hpp"
#include "oracles.hpp"

namespace props {

struct Check {
  bool ok = true;
  double worst = 0.0;
  std::string detail;
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Kernels with a closed-form radial integral, used wherever an oracle is needed.
struct OracleKernel {
  std::string name;
  ealign::Kernel kernel;
  oracle::Radial radial;
};

inline std::vector<OracleKernel> oracle_kernels() {
  std::vector<OracleKernel> out;
  for (double a : {0.1, 0.25, 0.5, 0.75, 0.9})
    out.push_back({"power_law " + fmt(a), ealign::Kernel::power_law(a),
                   [a](double lo, double hi) { return oracle::powerlaw_radial(a, lo, hi); }});
  out.push_back({"constant 1.5", ealign::Kernel::constant(1.5), [](double lo, double hi) { return 1.5 * (hi - lo); }});
  // psi(r) = 1/(1 + (r/s)^2), antiderivative s atan(r/s)
  const double s = 0.1;
  out.push_back({"lorentzian",
                 ealign::Kernel::bounded([s](double r) { return 1.0 / (1.0 + (r / s) * (r / s)); }, 1.0, "lorentzian"),
                 [s](double lo, double hi) { return s * (std::atan(hi / s) - std::atan(lo / s)); }});
  return out;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return k;
}

/// I(k) nonincreasing on a 64-point log grid over [1e-3, 1e6].
inline Check level_set_monotone(const ealign::Kernel& kernel) {
  Check c;
  double prev = ealign::level_set_integral(kernel, 0.0);
  for (double k : log_grid(1e-3, 1e6, 64)) {
    const double cur = ealign::level_set_integral(kernel, k);
    const double rise = cur - prev;
    c.worst = std::max(c.worst, rise);
    if (rise > 1e-12 * std::max(1.0, prev)) {
      c.ok = false;
      c.detail = "I rises at k=" + fmt(k);
    }
    prev = cur;
  }
  return c;
}

/// |I(0) - ||psi||_1| relative, with ||psi||_1 from the oracle.
inline Check level_set_at_zero(const OracleKernel& k) {
  const double l1 = 2.0 * k.radial(0.0, 0.5);
  const double i0 = ealign::level_set_integral(k.kernel, 0.0);
  const double l1lib = ealign::l1_norm(k.kernel);
  Check c;
  c.worst = std::max(std::fabs(i0 - l1), std::fabs(l1lib - l1)) / l1;
  c.ok = c.worst <= 1e-12;
  return c;
}

/// Library convolution against the hand-folded double sum, N = 32, seeded random fields.
inline Check convolution_oracle(const OracleKernel& k, std::size_t N = 32) {
  Check c;
  const auto w = ealign::cell_weights(k.kernel, N);
  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> dist(0.0, 2.0);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<double> f(N);
    for (auto& v : f) v = dist(gen);
    const auto lib = ealign::convolve(w, f);
    const auto ref = oracle::double_sum_convolution(k.radial, f);
    for (std::size_t i = 0; i < N; ++i) c.worst = std::max(c.worst, std::fabs(lib[i] - ref[i]));
  }
  c.ok = c.worst <= 1e-10;
  return c;
}

/// g(k) grows without bound as k decreases to k0 and is inadmissible just below it.
inline Check g_endpoint_blowup(const ealign::BoundInputs& in) {
  Check c;
  const auto k0 = ealign::compute_k0(in);
  if (!k0 || *k0 <= 0.0) {
    c.ok = false;
    c.detail = "no positive k0";
    return c;
  }
  double prev = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const double g = ealign::g_of_k(in, *k0 * (1.0 + eps));
    if (!(g > prev)) c.ok = false;
    prev = g;
  }
  c.worst = prev;
  const double beta = ealign::minimize_g(in).beta;
  if (!(prev > 1e3 * beta)) c.ok = false;
  try {
    (void)ealign::g_of_k(in, *k0 * (1.0 - 1e-6));
    c.ok = false;
    c.detail = "g defined below k0";
  } catch (const ealign::InadmissibleError&) {
  }
  return c;
}

/// beta <= g(k) at every scanned k, for both the numeric and the reported beta.
inline Check beta_below_scan(const ealign::BoundInputs& in) {
  Check c;
  const auto m = ealign::minimize_g(in);
  const double reported = ealign::compute_beta(in).beta;
  for (double g : m.scanG) {
    c.worst = std::max({c.worst, (m.beta - g) / m.beta, (reported - g) / reported});
  }
  c.ok = c.worst <= 1e-12;
  return c;
}

/// beta(M) / M constant over several masses, analytic and numeric paths.
inline Check beta_linear_in_mass(const ealign::Kernel& kernel, double c0) {
  Check c;
  const double ref = ealign::compute_beta({1.0, c0, kernel, 0.0, 0.0}).beta;
  const double refNum = ealign::minimize_g({1.0, c0, kernel, 0.0, 0.0}).beta;
  for (double M : {0.25, 0.5, 2.0, 3.0, 7.0}) {
    const double b = ealign::compute_beta({M, c0, kernel, 0.0, 0.0}).beta;
    const double bn = ealign::minimize_g({M, c0, kernel, 0.0, 0.0}).beta;
    c.worst = std::max({c.worst, std::fabs(b / M - ref) / ref, std::fabs(bn / M - refNum) / refNum});
  }
  c.ok = c.worst <= 1e-12;
  return c;
}

/// beta C0^{1/(1-alpha)} constant in C0 for the power law; the numeric
/// optimizer follows the same curve within 1e-6.
inline Check beta_c0_scaling(double alpha) {
  Check c;
  const auto kernel = ealign::Kernel::power_law(alpha);
  const double e = 1.0 / (1.0 - alpha);
  const double ref = ealign::beta_analytic_powerlaw(alpha, 1.0, 1.0)->beta;
  for (double c0 : {0.05, 0.1, 0.2, 0.5, 0.8}) {
    if (c0 > oracle::powerlaw_l1(alpha)) continue;
    const double b = ealign::beta_analytic_powerlaw(alpha, 1.0, c0)->beta;
    c.worst = std::max(c.worst, std::fabs(b * std::pow(c0, e) - ref) / ref);
    const double num = ealign::minimize_g({1.0, c0, kernel, 0.0, 0.0}).beta;
    if (std::fabs(num - b) / b > 1e-6) {
      c.ok = false;
      c.detail = "numeric off the scaling curve at C0=" + fmt(c0);
    }
  }
  if (c.worst > 1e-12) c.ok = false;
  return c;
}

}  // namespace props
