#pragma once

// Particle oracle for the Euler-alignment system. Each particle follows a
// characteristic dx/dt = u and carries its own density and G as ODE states:
//
//     du_i/dt   = sum_{j != i} m_j psi(d_ij) (u_j - u_i)
//     drho_i/dt = -rho_i (G_i - conv_i)
//     dG_i/dt   = -G_i (G_i - conv_i)
//
// conv_i is the particle quadrature of psi*rho with an exact cell-averaged
// self term, so G_i/rho_i is invariant along each path.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "ealign/diagnostics.hpp"
#include "ealign/kernels.hpp"

namespace ealign::lagrangian {

struct ParticleSystem {
  std::vector<double> x, u, rho, G, m;
  [[nodiscard]] std::size_t size() const { return x.size(); }
  [[nodiscard]] double total_mass() const;
  [[nodiscard]] double momentum() const;
};

/// Equispaced markers x_i = -1/2 + (i+1)/n with m_i = rho0(x_i)/n.
/// Throws ConfigError for n < 2 and DegenerateStateError when every mass is zero.
ParticleSystem seed_particles(const std::function<double(double)>& rho0,
                              const std::function<double(double)>& u0,
                              const std::function<double(double)>& G0, std::size_t n);

/// n * int_{|y| < 1/(2n)} psi, the cell-averaged kernel value of a particle's own cell.
double self_weight(const Kernel& kernel, std::size_t n);

/// Pairs closer than this are evaluated at this distance and counted.
inline constexpr double kDistanceFloor = 1e-10;

struct Derivatives {
  std::vector<double> dx, du, drho, dG, conv;
  std::size_t degeneracies = 0;
};

Derivatives rhs(const ParticleSystem& sys, const Kernel& kernel);
Derivatives rhs(const ParticleSystem& sys, const Kernel& kernel, double selfWeight);

struct IntegrateOptions {
  double dt = 1e-3;
  double tEnd = 1.0;
  double rhoCap = 1e6;
  double dtMin = 1e-9;
  int recordStride = 1;      // record every k-th nominal step
  int trajectoryStride = 0;  // 0 disables per-particle frames
  /// A sub-step h is rejected while |drho_i h| > fraction * rho_i for some i.
  double maxDensityFraction = 1.0;
};

struct Sample {
  double t;
  double rhoMax;
  double gInf;
  double gMin;
  double ratioDrift;     // max_i |G_i/rho_i - G_i(0)/rho_i(0)|
  double momentumDrift;  // |sum m u - P0|
  double uMax;
  double uMin;
};

struct Frame {
  double t;
  std::vector<double> x, u, rho, G;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<Frame> frames;
  Outcome outcome = Outcome::CompletedGlobal;
  std::optional<double> tHit;
  double runningRhoMax = 0.0;
  double runningGInf = 0.0;
  double runningGMin = 0.0;
  double maxRatioDrift = 0.0;
  double maxMomentumDrift = 0.0;
  double maxUIncrease = 0.0;  // largest rise of max_i u_i between sub-steps
  double maxUDecrease = 0.0;  // largest drop of min_i u_i between sub-steps
  std::size_t degeneracyEvents = 0;
  std::optional<double> firstDegeneracyTime;
  std::size_t substeps = 0;
  std::size_t rejections = 0;
  ParticleSystem final;
};

/// Classical RK4 with step halving. Throws NumericalAbort once the step
/// would drop below dtMin.
Trajectory integrate(const ParticleSystem& sys, const Kernel& kernel, const IntegrateOptions& options);

}  // namespace ealign::lagrangian
