#pragma once

// Finite-volume solver for the conservative (rho, G) formulation on the
// periodic grid:
//
//     rho_t + (rho u)_x = 0,   G_t + (G u)_x = 0,   u_x = G - psi*rho,
//
// with u pinned by conservation of momentum int rho u = P0. Both transported
// fields share one Rusanov flux so G/rho is advected consistently.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ealign/diagnostics.hpp"
#include "ealign/kernels.hpp"

namespace ealign::eulerian {

struct EulerianState {
  std::size_t N = 0;
  double dx = 0.0;
  double t = 0.0;
  std::vector<double> rho;  // cell averages
  std::vector<double> G;
  std::vector<double> u;
  double mass = 0.0;      // M recorded at initialization
  double momentum = 0.0;  // P0 recorded at initialization
};

struct Initialized {
  EulerianState state;
  double c0 = 0.0;    // min over {rho0 > 1e-12} of G0/rho0
  double infG0 = 0.0;
};

/// G0 = D4 u0 + psi*rho0 with D4 the fourth-order periodic central
/// difference; u is then re-derived from G0 through recover_velocity so the
/// state is self-consistent. Throws InputError on negative density.
Initialized init_from_primitive(std::span<const double> rho0, std::span<const double> u0,
                                const ConvolutionWeights& weights);

/// Mean of G - psi*rho times dx; zero for compatible states.
double compatibility_residual(std::span<const double> G, std::span<const double> rho,
                              const ConvolutionWeights& weights);

/// Integrates u_x = G - psi*rho (mean projected out) with the cumulative
/// trapezoid rule, then adds the constant that makes sum rho u dx = P0.
/// Throws DegenerateStateError for zero mass.
std::vector<double> recover_velocity(std::span<const double> G, std::span<const double> rho,
                                     const ConvolutionWeights& weights, double momentum);

struct StepOptions {
  int order = 1;  // 1: first-order Rusanov, 2: minmod reconstruction + Heun
  double cfl = 0.4;
};

/// Largest dt allowed by the CFL restriction for the current velocity.
double max_stable_dt(const EulerianState& state, double cfl);

/// One conservative step. Throws StepSizeError when dt exceeds max_stable_dt.
EulerianState step(const EulerianState& state, const ConvolutionWeights& weights, double dt,
                   const StepOptions& options);

struct SimConfig {
  std::size_t N = 512;
  double cflNumber = 0.4;
  double tEnd = 10.0;
  int order = 1;
  double rhoCap = 1e6;
  double gFloor = -1e6;
  int outputStride = 1;
  double dtMax = 1e-2;
  std::vector<double> snapshotTimes;
};

/// Throws ConfigError unless N even >= 32, 0 < cfl <= 0.5, tEnd > 0, order in {1, 2}.
void validate(const SimConfig& config);

struct Sample {
  double t;
  double rhoInf;
  double gInf;
  double gMin;
  double ratioMin;  // min over {rho > 1e-8} of G/rho
  double massDrift;      // |M(t) - M0| / M0
  double momentumDrift;  // |P(t) - P0|
};

struct Snapshot {
  double t;
  std::vector<double> x, rho, G, u;
};

struct RunDiagnostics {
  std::vector<Sample> samples;
  Outcome outcome = Outcome::CompletedGlobal;
  std::optional<double> tHit;
  double runningRhoInf = 0.0;
  double runningGInf = 0.0;
  double runningRatioMin = 0.0;
  double maxCompatibility = 0.0;
  double minRho = 0.0;
  double c0 = 0.0;
  double infG0 = 0.0;
  std::size_t steps = 0;
  std::vector<Snapshot> snapshots;
  EulerianState final;
};

RunDiagnostics run(const SimConfig& config, std::span<const double> rho0, std::span<const double> u0,
                   const Kernel& kernel);

}  // namespace ealign::eulerian
