#include "ealign/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ealign/errors.hpp"

namespace ealign {
namespace {

constexpr double kBisectionRelTol = 1e-10;
constexpr double kGoldenRelTol = 1e-8;
constexpr int kScanPoints = 512;
constexpr double kScanLowerOffset = 1e-6;
constexpr double kScanDecades = 1e6;
constexpr double kAnalyticAgreement = 1e-6;

// Largest k with I(k) >= level, approached from the side where I(k) < level.
double level_threshold(const Kernel& kernel, double level) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; level_set_integral(kernel, hi) >= level; ++i) {
    if (i > 2000) throw NumericalAbort("level_threshold: I(k) never drops below the requested level");
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 400 && hi - lo > kBisectionRelTol * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (level_set_integral(kernel, mid) >= level)
      lo = mid;
    else
      hi = mid;
  }
  return lo == 0.0 && hi < std::numeric_limits<double>::min() ? 0.0 : hi;
}

double g_or_inf(const BoundInputs& in, double k) {
  const double denom = in.c0 - level_set_integral(in.kernel, k);
  return denom > 0.0 ? in.mass * k / denom : std::numeric_limits<double>::infinity();
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::MaxPrinciple: return "MaxPrinciple";
    case Regime::BoundedKernel: return "BoundedKernel";
    case Regime::OptimizedNumeric: return "OptimizedNumeric";
    case Regime::OptimizedAnalytic: return "OptimizedAnalytic";
  }
  return "?";
}

void validate(const BoundInputs& inputs) {
  if (!(inputs.mass > 0.0) || !std::isfinite(inputs.mass))
    throw ConfigError("bound inputs: total mass M must be > 0");
  if (!(inputs.c0 > 0.0) || !std::isfinite(inputs.c0))
    throw ConfigError("bound inputs: C0 = inf G0/rho0 must be > 0");
  if (!(inputs.rho0SupNorm >= 0.0) || !(inputs.g0SupNorm >= 0.0))
    throw ConfigError("bound inputs: sup norms must be >= 0");
}

std::optional<double> compute_k0(const BoundInputs& inputs) {
  validate(inputs);
  if (inputs.c0 > l1_norm(inputs.kernel)) return std::nullopt;
  return level_threshold(inputs.kernel, inputs.c0);
}

double g_of_k(const BoundInputs& inputs, double k) {
  validate(inputs);
  if (!(k >= 0.0)) throw DomainError("g_of_k needs k >= 0");
  const double level = level_set_integral(inputs.kernel, k);
  if (level >= inputs.c0)
    throw InadmissibleError("k is inadmissible: level-set integral " + std::to_string(level) +
                            " >= C0 " + std::to_string(inputs.c0));
  return inputs.mass * k / (inputs.c0 - level);
}

NumericMinimum minimize_g(const BoundInputs& inputs) {
  validate(inputs);
  const auto k0 = compute_k0(inputs);
  if (!k0) throw DomainError("minimize_g: C0 > ||psi||_1, the infimum is attained at k = 0");

  NumericMinimum out;
  out.k0 = *k0;
  const double scale = *k0 > 0.0 ? *k0 : l1_norm(inputs.kernel);
  const double kLo = *k0 > 0.0 ? *k0 * (1.0 + kScanLowerOffset) : scale * kScanLowerOffset;
  const double kHi = scale * kScanDecades;
  const double logLo = std::log(kLo), logHi = std::log(kHi);

  out.scanK.resize(kScanPoints);
  out.scanG.resize(kScanPoints);
  std::size_t best = 0;
  for (int i = 0; i < kScanPoints; ++i) {
    const double k = i == kScanPoints - 1 ? kHi : std::exp(logLo + (logHi - logLo) * i / (kScanPoints - 1));
    out.scanK[i] = k;
    out.scanG[i] = g_or_inf(inputs, k);
    if (out.scanG[i] < out.scanG[best]) best = static_cast<std::size_t>(i);
  }

  // Golden-section search inside the bracket around the best scan point.
  double a = out.scanK[best == 0 ? 0 : best - 1];
  double c = out.scanK[std::min<std::size_t>(best + 1, kScanPoints - 1)];
  const double invPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = c - invPhi * (c - a), x2 = a + invPhi * (c - a);
  double f1 = g_or_inf(inputs, x1), f2 = g_or_inf(inputs, x2);
  while (c - a > kGoldenRelTol * 0.5 * (a + c)) {
    if (f1 <= f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - invPhi * (c - a);
      f1 = g_or_inf(inputs, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invPhi * (c - a);
      f2 = g_or_inf(inputs, x2);
    }
  }
  const double kRefined = 0.5 * (a + c);
  const double gRefined = g_or_inf(inputs, kRefined);
  if (gRefined <= out.scanG[best]) {
    out.beta = gRefined;
    out.kStar = kRefined;
  } else {
    out.beta = out.scanG[best];
    out.kStar = out.scanK[best];
  }
  return out;
}

std::optional<AnalyticPowerLaw> beta_analytic_powerlaw(double alpha, double mass, double c0,
                                                       std::string* why) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (!(mass > 0.0) || !(c0 > 0.0)) throw ConfigError("M and C0 must be > 0");
  auto fallback = [why](std::string reason) -> std::optional<AnalyticPowerLaw> {
    if (why) *why = std::move(reason);
    return std::nullopt;
  };

  const double l1 = std::pow(2.0, alpha) / (1.0 - alpha);
  if (c0 > l1) return fallback("C0 > ||psi||_1: max-principle case, no interior minimizer");

  const double p = alpha / (1.0 - alpha);
  AnalyticPowerLaw r;
  r.k0 = std::pow(2.0 / (c0 * (1.0 - alpha)), p);
  r.kStar = std::pow(2.0 / (c0 * alpha * (1.0 - alpha)), p);
  if (std::pow(r.kStar, -1.0 / alpha) > kHalfLength)
    return fallback("level set at k* extends past the torus half-length");
  if (!(r.kStar > r.k0)) throw NumericalAbort("analytic power-law minimizer k* not above k0");
  r.beta = std::pow(2.0 / alpha, p) * mass / std::pow(c0 * (1.0 - alpha), 1.0 / (1.0 - alpha));
  return r;
}

BetaResult compute_beta(const BoundInputs& inputs) {
  validate(inputs);
  BetaResult out;
  const double l1 = l1_norm(inputs.kernel);
  if (inputs.c0 > l1) {
    out.regime = Regime::MaxPrinciple;
    return out;
  }
  out.k0 = compute_k0(inputs);
  if (auto sup = inputs.kernel.sup_norm()) {
    out.regime = Regime::BoundedKernel;
    out.beta = inputs.mass * *sup / inputs.c0;
    out.kStar = *sup;
    return out;
  }

  const NumericMinimum numeric = minimize_g(inputs);
  out.regime = Regime::OptimizedNumeric;
  out.beta = numeric.beta;
  out.kStar = numeric.kStar;

  if (const auto* pl = std::get_if<PowerLaw>(&inputs.kernel.variant())) {
    if (auto analytic = beta_analytic_powerlaw(pl->alpha, inputs.mass, inputs.c0)) {
      const double gap = std::fabs(numeric.beta - analytic->beta) / analytic->beta;
      if (gap > kAnalyticAgreement)
        throw NumericalAbort("numeric and analytic beta disagree: relative gap " + std::to_string(gap));
      out.regime = Regime::OptimizedAnalytic;
      out.beta = analytic->beta;
      out.kStar = analytic->kStar;
      out.k0 = analytic->k0;
      out.betaNumeric = numeric.beta;
    }
  }
  return out;
}

double compute_gamma(const BoundInputs& inputs, double beta) {
  validate(inputs);
  if (auto sup = inputs.kernel.sup_norm()) return inputs.mass * *sup;
  return l1_norm(inputs.kernel) * std::max(inputs.rho0SupNorm, beta);
}

double rough_bound_step1(const BoundInputs& inputs) {
  validate(inputs);
  if (4.0 * l1_norm(inputs.kernel) < inputs.c0) return inputs.rho0SupNorm;
  const double k = level_threshold(inputs.kernel, inputs.c0 / 4.0);
  return std::max(inputs.rho0SupNorm, 2.0 * inputs.mass * k / inputs.c0);
}

double refined_bound_step2(const BoundInputs& inputs, double k) {
  return std::max(inputs.rho0SupNorm, g_of_k(inputs, k));
}

BoundReport bound_report(const BoundInputs& inputs) {
  const BetaResult b = compute_beta(inputs);
  BoundReport r;
  r.beta = b.beta;
  r.gamma = compute_gamma(inputs, b.beta);
  r.k0 = b.k0;
  r.kStar = b.kStar;
  r.regime = b.regime;
  r.betaNumeric = b.betaNumeric;
  r.rhoBound = std::max(inputs.rho0SupNorm, r.beta);
  r.gBound = std::max(inputs.g0SupNorm, r.gamma);
  return r;
}

}  // namespace ealign
