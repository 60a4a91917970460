#pragma once

// Uniform-in-time bounds on density and G for the 1D Euler-alignment system
// with an integrable kernel. The density bound beta is the infimum of
//
//     g(k) = M k / (C0 - I(k)),   I(k) = int_{psi >= k} psi,
//
// over admissible k (I(k) < C0), with the closed cases C0 > ||psi||_1
// (beta = 0) and bounded psi (beta = M ||psi||_inf / C0).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ealign/kernels.hpp"

namespace ealign {

struct BoundInputs {
  double mass = 1.0;          // M = int rho0
  double c0 = 1.0;            // C0 = inf G0/rho0 over {rho0 > 0}
  Kernel kernel = Kernel::power_law(0.5);
  double rho0SupNorm = 0.0;
  double g0SupNorm = 0.0;
};

enum class Regime { MaxPrinciple, BoundedKernel, OptimizedNumeric, OptimizedAnalytic };

std::string_view to_string(Regime regime);

struct BetaResult {
  double beta = 0.0;
  std::optional<double> kStar;
  std::optional<double> k0;
  Regime regime = Regime::MaxPrinciple;
  /// Numeric optimizer value when the analytic power-law path was also run.
  std::optional<double> betaNumeric;
};

struct BoundReport {
  double beta = 0.0;
  double gamma = 0.0;
  std::optional<double> k0;
  std::optional<double> kStar;
  Regime regime = Regime::MaxPrinciple;
  double rhoBound = 0.0;  // max(||rho0||_inf, beta)
  double gBound = 0.0;    // max(||G0||_inf, gamma)
  std::optional<double> betaNumeric;
};

/// Throws ConfigError unless M > 0 and C0 > 0.
void validate(const BoundInputs& inputs);

/// Largest k with I(k) >= C0, or nullopt when C0 > ||psi||_1. Bisection to
/// 1e-10 relative; the returned value is on the admissible side (I < C0).
std::optional<double> compute_k0(const BoundInputs& inputs);

/// g(k) = M k / (C0 - I(k)). Throws InadmissibleError when I(k) >= C0.
double g_of_k(const BoundInputs& inputs, double k);

/// Dense log scan of g over (k0, 1e6 k0] plus golden-section refinement.
struct NumericMinimum {
  double beta = 0.0;
  double kStar = 0.0;
  double k0 = 0.0;
  std::vector<double> scanK;
  std::vector<double> scanG;
};

/// Numeric infimum of g for any kernel. Requires C0 <= ||psi||_1.
NumericMinimum minimize_g(const BoundInputs& inputs);

struct AnalyticPowerLaw {
  double beta = 0.0;
  double kStar = 0.0;
  double k0 = 0.0;
};

/// Closed-form optimum for psi = |x|^-alpha on the torus. Returns nullopt
/// (with `why` filled in when given) if C0 > ||psi||_1 or the level set at
/// k* would extend past the torus; callers then use the numeric path.
std::optional<AnalyticPowerLaw> beta_analytic_powerlaw(double alpha, double mass, double c0,
                                                       std::string* why = nullptr);

/// Case split: C0 > ||psi||_1, bounded kernel, optimized (analytic for power laws).
BetaResult compute_beta(const BoundInputs& inputs);

/// M ||psi||_inf for bounded psi, ||psi||_1 max(||rho0||_inf, beta) otherwise.
double compute_gamma(const BoundInputs& inputs, double beta);

/// Coarse density bound from level sets with 4 I(k) < C0:
/// max(||rho0||_inf, 2 M k / C0) at the smallest such k.
double rough_bound_step1(const BoundInputs& inputs);

/// max(||rho0||_inf, g(k)) for a single admissible k.
double refined_bound_step2(const BoundInputs& inputs, double k);

BoundReport bound_report(const BoundInputs& inputs);

}  // namespace ealign
