#include "ealign/eulerian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ealign/errors.hpp"
#include "ealign/initial_data.hpp"

namespace ealign {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::CompletedGlobal: return "CompletedGlobal";
    case Outcome::BlowupDetected: return "BlowupDetected";
    case Outcome::CapExceeded: return "CapExceeded";
  }
  return "?";
}

namespace eulerian {
namespace {

constexpr double kSpeedEps = 1e-14;
constexpr double kRatioThreshold = 1e-8;
constexpr double kInitRatioThreshold = 1e-12;

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::fabs(a) < std::fabs(b) ? a : b;
}

double sum_dx(std::span<const double> f, double dx) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * dx;
}

double weighted_sum_dx(std::span<const double> f, std::span<const double> g, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * dx;
}

// Face values (left face, right face) of cell i for the chosen order.
void reconstruct(std::span<const double> q, int order, std::vector<double>& left,
                 std::vector<double>& right) {
  const std::size_t N = q.size();
  left.assign(q.begin(), q.end());
  right.assign(q.begin(), q.end());
  if (order < 2) return;
  for (std::size_t i = 0; i < N; ++i) {
    const double qm = q[(i + N - 1) % N], qp = q[(i + 1) % N];
    const double half = 0.5 * minmod(q[i] - qm, qp - q[i]);
    left[i] = q[i] - half;
    right[i] = q[i] + half;
  }
}

// Forward-Euler conservative update of both transported fields.
void transport(std::span<const double> rho, std::span<const double> G, std::span<const double> u,
               double lambda, int order, std::vector<double>& rhoOut, std::vector<double>& GOut) {
  const std::size_t N = rho.size();
  std::vector<double> rl, rr, gl, gr;
  reconstruct(rho, order, rl, rr);
  reconstruct(G, order, gl, gr);

  // flux[i] lives on the face between cell i and cell i+1
  std::vector<double> fr(N), fg(N);
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t ip = (i + 1) % N;
    const double uL = u[i], uR = u[ip];
    const double a = std::max(std::fabs(uL), std::fabs(uR));
    fr[i] = 0.5 * (rr[i] * uL + rl[ip] * uR) - 0.5 * a * (rl[ip] - rr[i]);
    fg[i] = 0.5 * (gr[i] * uL + gl[ip] * uR) - 0.5 * a * (gl[ip] - gr[i]);
  }
  rhoOut.resize(N);
  GOut.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t im = (i + N - 1) % N;
    rhoOut[i] = rho[i] - lambda * (fr[i] - fr[im]);
    GOut[i] = G[i] - lambda * (fg[i] - fg[im]);
  }
}

void clip_rounding(std::vector<double>& rho) {
  for (double& r : rho)
    if (r < 0.0) r = 0.0;
}

Sample measure(const EulerianState& s, double M0, double P0) {
  Sample out{};
  out.t = s.t;
  out.gMin = std::numeric_limits<double>::infinity();
  out.ratioMin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.N; ++i) {
    out.rhoInf = std::max(out.rhoInf, std::fabs(s.rho[i]));
    out.gInf = std::max(out.gInf, std::fabs(s.G[i]));
    out.gMin = std::min(out.gMin, s.G[i]);
    if (s.rho[i] > kRatioThreshold) out.ratioMin = std::min(out.ratioMin, s.G[i] / s.rho[i]);
  }
  out.massDrift = std::fabs(sum_dx(s.rho, s.dx) - M0) / M0;
  out.momentumDrift = std::fabs(weighted_sum_dx(s.rho, s.u, s.dx) - P0);
  return out;
}

}  // namespace

double compatibility_residual(std::span<const double> G, std::span<const double> rho,
                              const ConvolutionWeights& weights) {
  const auto conv = convolve(weights, rho);
  const double dx = 1.0 / static_cast<double>(weights.N);
  double s = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i) s += G[i] - conv[i];
  return s * dx;
}

std::vector<double> recover_velocity(std::span<const double> G, std::span<const double> rho,
                                     const ConvolutionWeights& weights, double momentum) {
  const std::size_t N = weights.N;
  if (G.size() != N || rho.size() != N) throw ConfigError("recover_velocity: field length mismatch");
  const double dx = 1.0 / static_cast<double>(N);
  const double M = sum_dx(rho, dx);
  if (!(M > 0.0)) throw DegenerateStateError("recover_velocity: total mass is zero");

  const auto conv = convolve(weights, rho);
  std::vector<double> w(N);
  double mean = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    w[i] = G[i] - conv[i];
    mean += w[i];
  }
  mean /= static_cast<double>(N);
  for (double& v : w) v -= mean;

  std::vector<double> u(N, 0.0);
  for (std::size_t i = 1; i < N; ++i) u[i] = u[i - 1] + 0.5 * dx * (w[i - 1] + w[i]);
  const double c = (momentum - weighted_sum_dx(rho, u, dx)) / M;
  for (double& v : u) v += c;
  return u;
}

Initialized init_from_primitive(std::span<const double> rho0, std::span<const double> u0,
                                const ConvolutionWeights& weights) {
  const std::size_t N = weights.N;
  if (rho0.size() != N || u0.size() != N) throw ConfigError("init_from_primitive: field length mismatch");
  for (double r : rho0)
    if (!(r >= 0.0)) throw InputError("init_from_primitive: initial density must be nonnegative");

  Initialized out;
  EulerianState& s = out.state;
  s.N = N;
  s.dx = 1.0 / static_cast<double>(N);
  s.rho.assign(rho0.begin(), rho0.end());
  s.mass = sum_dx(s.rho, s.dx);
  if (!(s.mass > 0.0)) throw DegenerateStateError("init_from_primitive: total mass is zero");
  s.momentum = weighted_sum_dx(rho0, u0, s.dx);

  const auto conv = convolve(weights, rho0);
  s.G.resize(N);
  const double inv12dx = 1.0 / (12.0 * s.dx);
  for (std::size_t i = 0; i < N; ++i) {
    const double up1 = u0[(i + 1) % N], up2 = u0[(i + 2) % N];
    const double um1 = u0[(i + N - 1) % N], um2 = u0[(i + N - 2) % N];
    s.G[i] = (-up2 + 8.0 * up1 - 8.0 * um1 + um2) * inv12dx + conv[i];
  }
  s.u = recover_velocity(s.G, s.rho, weights, s.momentum);

  out.c0 = std::numeric_limits<double>::infinity();
  out.infG0 = *std::min_element(s.G.begin(), s.G.end());
  for (std::size_t i = 0; i < N; ++i)
    if (s.rho[i] > kInitRatioThreshold) out.c0 = std::min(out.c0, s.G[i] / s.rho[i]);
  return out;
}

double max_stable_dt(const EulerianState& state, double cfl) {
  double umax = 0.0;
  for (double v : state.u) umax = std::max(umax, std::fabs(v));
  return cfl * state.dx / (umax + kSpeedEps);
}

EulerianState step(const EulerianState& state, const ConvolutionWeights& weights, double dt,
                   const StepOptions& options) {
  if (!(dt > 0.0)) throw StepSizeError("step: dt must be > 0");
  if (dt > max_stable_dt(state, options.cfl) * (1.0 + 1e-12))
    throw StepSizeError("step: dt violates the CFL restriction");
  const double lambda = dt / state.dx;

  EulerianState next = state;
  std::vector<double> rho1, G1;
  transport(state.rho, state.G, state.u, lambda, options.order, rho1, G1);
  clip_rounding(rho1);
  if (options.order >= 2) {
    const auto u1 = recover_velocity(G1, rho1, weights, state.momentum);
    std::vector<double> rho2, G2;
    transport(rho1, G1, u1, lambda, options.order, rho2, G2);
    for (std::size_t i = 0; i < state.N; ++i) {
      rho1[i] = 0.5 * (state.rho[i] + rho2[i]);
      G1[i] = 0.5 * (state.G[i] + G2[i]);
    }
    clip_rounding(rho1);
  }
  next.rho = std::move(rho1);
  next.G = std::move(G1);
  next.u = recover_velocity(next.G, next.rho, weights, state.momentum);
  next.t = state.t + dt;
  return next;
}

void validate(const SimConfig& c) {
  if (c.N < 32 || c.N % 2 != 0) throw ConfigError("simulation grid N must be even and >= 32");
  if (!(c.cflNumber > 0.0 && c.cflNumber <= 0.5)) throw ConfigError("CFL number must lie in (0, 0.5]");
  if (!(c.tEnd > 0.0)) throw ConfigError("tEnd must be > 0");
  if (c.order != 1 && c.order != 2) throw ConfigError("order must be 1 or 2");
  if (c.outputStride < 1) throw ConfigError("output stride must be >= 1");
  if (!(c.dtMax > 0.0)) throw ConfigError("dtMax must be > 0");
}

RunDiagnostics run(const SimConfig& config, std::span<const double> rho0, std::span<const double> u0,
                   const Kernel& kernel) {
  validate(config);
  const auto weights = cell_weights(kernel, config.N);
  auto init = init_from_primitive(rho0, u0, weights);

  RunDiagnostics d;
  d.c0 = init.c0;
  d.infG0 = init.infG0;
  EulerianState s = std::move(init.state);
  const double M0 = s.mass, P0 = s.momentum;
  const StepOptions opts{config.order, config.cflNumber};

  std::vector<double> pending = config.snapshotTimes;
  std::sort(pending.begin(), pending.end());
  std::size_t nextSnap = 0;
  auto take_snapshots = [&] {
    while (nextSnap < pending.size() && pending[nextSnap] <= s.t + 1e-12) {
      Snapshot snap{s.t, {}, s.rho, s.G, s.u};
      snap.x.resize(s.N);
      for (std::size_t i = 0; i < s.N; ++i) snap.x[i] = cell_center(i, s.N);
      d.snapshots.push_back(std::move(snap));
      ++nextSnap;
    }
  };

  auto absorb = [&](const Sample& smp) {
    d.runningRhoInf = std::max(d.runningRhoInf, smp.rhoInf);
    d.runningGInf = std::max(d.runningGInf, smp.gInf);
    d.runningRatioMin = std::min(d.runningRatioMin, smp.ratioMin);
    d.maxCompatibility = std::max(d.maxCompatibility, std::fabs(compatibility_residual(s.G, s.rho, weights)));
    d.minRho = std::min(d.minRho, *std::min_element(s.rho.begin(), s.rho.end()));
  };

  Sample first = measure(s, M0, P0);
  d.runningRatioMin = first.ratioMin;
  d.minRho = *std::min_element(s.rho.begin(), s.rho.end());
  absorb(first);
  d.samples.push_back(first);
  take_snapshots();

  double prevT = s.t, prevRho = first.rhoInf;
  while (s.t < config.tEnd) {
    double dt = max_stable_dt(s, config.cflNumber);
    double gradMax = 0.0;
    for (std::size_t i = 0; i < s.N; ++i)
      gradMax = std::max(gradMax, std::fabs(s.u[(i + 1) % s.N] - s.u[i]) / s.dx);
    if (gradMax > 0.0) dt = std::min(dt, config.cflNumber / gradMax);
    dt = std::min({dt, config.dtMax, config.tEnd - s.t});
    if (nextSnap < pending.size() && pending[nextSnap] > s.t) dt = std::min(dt, pending[nextSnap] - s.t);

    s = step(s, weights, dt, opts);
    if (config.tEnd - s.t < 1e-12 * config.tEnd) s.t = config.tEnd;
    ++d.steps;

    const Sample smp = measure(s, M0, P0);
    absorb(smp);
    const bool capped = smp.rhoInf > config.rhoCap || smp.gMin < config.gFloor || !std::isfinite(smp.rhoInf);
    if (capped) {
      d.outcome = Outcome::CapExceeded;
      d.tHit = smp.rhoInf > config.rhoCap ? crossing_time(prevT, prevRho, s.t, smp.rhoInf, config.rhoCap) : s.t;
      d.samples.push_back(smp);
      break;
    }
    if (d.steps % static_cast<std::size_t>(config.outputStride) == 0 || s.t >= config.tEnd)
      d.samples.push_back(smp);
    take_snapshots();
    prevT = s.t;
    prevRho = smp.rhoInf;
  }
  d.final = std::move(s);
  return d;
}

}  // namespace eulerian
}  // namespace ealign
