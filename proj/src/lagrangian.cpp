#include "ealign/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ealign/errors.hpp"
#include "ealign/initial_data.hpp"

namespace ealign::lagrangian {
namespace {

constexpr double kRatioSupport = 1e-12;

template <typename Psi>
void accumulate_pairs(const ParticleSystem& s, Psi&& psi, Derivatives& d) {
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = s.x[i], ui = s.u[i], mi = s.m[i];
    double convI = 0.0, duI = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double dist = periodic_distance(xi, s.x[j]);
      if (dist < kDistanceFloor) {
        dist = kDistanceFloor;
        ++d.degeneracies;
      }
      const double w = psi(dist);
      const double du = s.u[j] - ui;
      convI += s.m[j] * w;
      duI += s.m[j] * w * du;
      d.conv[j] += mi * w;
      d.du[j] -= mi * w * du;
    }
    d.conv[i] += convI;
    d.du[i] += duI;
  }
}

struct Extremes {
  double rhoMax = 0.0, gInf = 0.0, gMin = 0.0, uMax = 0.0, uMin = 0.0;
};

Extremes extremes(const ParticleSystem& s) {
  Extremes e;
  e.gMin = std::numeric_limits<double>::infinity();
  e.uMax = -std::numeric_limits<double>::infinity();
  e.uMin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    e.rhoMax = std::max(e.rhoMax, s.rho[i]);
    e.gInf = std::max(e.gInf, std::fabs(s.G[i]));
    e.gMin = std::min(e.gMin, s.G[i]);
    e.uMax = std::max(e.uMax, s.u[i]);
    e.uMin = std::min(e.uMin, s.u[i]);
  }
  return e;
}

// y + h * k, component-wise over all four carried fields.
ParticleSystem advance(const ParticleSystem& y, const Derivatives& k, double h) {
  ParticleSystem out = y;
  for (std::size_t i = 0; i < y.size(); ++i) {
    out.x[i] += h * k.dx[i];
    out.u[i] += h * k.du[i];
    out.rho[i] += h * k.drho[i];
    out.G[i] += h * k.dG[i];
  }
  return out;
}

}  // namespace

double ParticleSystem::total_mass() const {
  double s = 0.0;
  for (double v : m) s += v;
  return s;
}

double ParticleSystem::momentum() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += m[i] * u[i];
  return s;
}

ParticleSystem seed_particles(const std::function<double(double)>& rho0,
                              const std::function<double(double)>& u0,
                              const std::function<double(double)>& G0, std::size_t n) {
  if (n < 2) throw ConfigError("seed_particles needs n >= 2");
  ParticleSystem s;
  s.x.resize(n);
  s.u.resize(n);
  s.rho.resize(n);
  s.G.resize(n);
  s.m.resize(n);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = cell_center(i, n);
    s.x[i] = x;
    s.rho[i] = rho0(x);
    if (s.rho[i] < 0.0) throw InputError("seed_particles: initial density must be nonnegative");
    s.u[i] = u0(x);
    s.G[i] = G0(x);
    s.m[i] = s.rho[i] * inv;
  }
  if (!(s.total_mass() > 0.0)) throw DegenerateStateError("seed_particles: all particle masses are zero");
  return s;
}

double self_weight(const Kernel& kernel, std::size_t n) {
  const double half = std::min(0.5 / static_cast<double>(n), kHalfLength);
  return static_cast<double>(n) * 2.0 * radial_integral(kernel, 0.0, half);
}

Derivatives rhs(const ParticleSystem& sys, const Kernel& kernel) {
  return rhs(sys, kernel, self_weight(kernel, sys.size()));
}

Derivatives rhs(const ParticleSystem& sys, const Kernel& kernel, double selfWeight) {
  const std::size_t n = sys.size();
  Derivatives d;
  d.dx = sys.u;
  d.du.assign(n, 0.0);
  d.conv.assign(n, 0.0);

  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          const double a = k.alpha;
          if (a == 0.5)
            accumulate_pairs(sys, [](double r) { return 1.0 / std::sqrt(r); }, d);
          else
            accumulate_pairs(sys, [a](double r) { return std::exp(-a * std::log(r)); }, d);
        } else if (auto c = kernel.constant_value()) {
          const double v = *c;
          accumulate_pairs(sys, [v](double) { return v; }, d);
        } else {
          accumulate_pairs(sys, [&kernel](double r) { return eval(kernel, r); }, d);
        }
      },
      kernel.variant());

  d.drho.resize(n);
  d.dG.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.conv[i] += sys.m[i] * selfWeight;
    const double strain = sys.G[i] - d.conv[i];
    d.drho[i] = -sys.rho[i] * strain;
    d.dG[i] = -sys.G[i] * strain;
  }
  return d;
}

Trajectory integrate(const ParticleSystem& sys, const Kernel& kernel, const IntegrateOptions& opt) {
  if (!(opt.dt > 0.0)) throw ConfigError("integrate: dt must be > 0");
  if (!(opt.tEnd > 0.0)) throw ConfigError("integrate: tEnd must be > 0");
  if (opt.recordStride < 1) throw ConfigError("integrate: record stride must be >= 1");

  const std::size_t n = sys.size();
  const double w = self_weight(kernel, n);
  const double P0 = sys.momentum();

  std::vector<double> ratio0(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i)
    if (sys.rho[i] > kRatioSupport) ratio0[i] = sys.G[i] / sys.rho[i];

  Trajectory tr;
  ParticleSystem y = sys;
  double t = 0.0;

  auto sample = [&](const ParticleSystem& s, double time) {
    const Extremes e = extremes(s);
    double drift = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isnan(ratio0[i])) drift = std::max(drift, std::fabs(s.G[i] / s.rho[i] - ratio0[i]));
    return Sample{time, e.rhoMax, e.gInf, e.gMin, drift, std::fabs(s.momentum() - P0), e.uMax, e.uMin};
  };
  auto frame = [&](double time) { tr.frames.push_back(Frame{time, y.x, y.u, y.rho, y.G}); };

  Sample first = sample(y, t);
  tr.samples.push_back(first);
  tr.runningRhoMax = first.rhoMax;
  tr.runningGInf = first.gInf;
  tr.runningGMin = first.gMin;
  if (opt.trajectoryStride > 0) frame(t);
  double prevUMax = first.uMax, prevUMin = first.uMin;

  std::size_t macro = 0;
  while (t < opt.tEnd * (1.0 - 1e-14)) {
    const double target = std::min(t + opt.dt, opt.tEnd);
    while (t < target) {
      double h = target - t;
      const Derivatives k1 = rhs(y, kernel, w);
      auto too_fast = [&](double step) {
        for (std::size_t i = 0; i < n; ++i)
          if (std::fabs(k1.drho[i] * step) > opt.maxDensityFraction * y.rho[i]) return true;
        return false;
      };
      ParticleSystem next;
      std::size_t degeneracies = k1.degeneracies;
      for (;;) {
        while (too_fast(h)) {
          h *= 0.5;
          ++tr.rejections;
          if (h < opt.dtMin) throw NumericalAbort("integrate: step size fell below dt_min");
        }
        const Derivatives k2 = rhs(advance(y, k1, 0.5 * h), kernel, w);
        const Derivatives k3 = rhs(advance(y, k2, 0.5 * h), kernel, w);
        const Derivatives k4 = rhs(advance(y, k3, h), kernel, w);
        degeneracies += k2.degeneracies + k3.degeneracies + k4.degeneracies;
        next = y;
        bool ok = true;
        for (std::size_t i = 0; i < n; ++i) {
          next.x[i] = wrap_torus(y.x[i] + h / 6.0 * (k1.dx[i] + 2 * k2.dx[i] + 2 * k3.dx[i] + k4.dx[i]));
          next.u[i] += h / 6.0 * (k1.du[i] + 2 * k2.du[i] + 2 * k3.du[i] + k4.du[i]);
          next.rho[i] += h / 6.0 * (k1.drho[i] + 2 * k2.drho[i] + 2 * k3.drho[i] + k4.drho[i]);
          next.G[i] += h / 6.0 * (k1.dG[i] + 2 * k2.dG[i] + 2 * k3.dG[i] + k4.dG[i]);
          if (!(next.rho[i] >= 0.0) || !std::isfinite(next.G[i])) ok = false;
        }
        if (ok) break;
        h *= 0.5;
        ++tr.rejections;
        if (h < opt.dtMin) throw NumericalAbort("integrate: step size fell below dt_min");
      }
      const double tPrev = t, rhoPrev = extremes(y).rhoMax;
      y = std::move(next);
      t = (target - (t + h) < 1e-15 * std::max(1.0, target)) ? target : t + h;
      ++tr.substeps;
      if (degeneracies > 0) {
        if (!tr.firstDegeneracyTime) tr.firstDegeneracyTime = t;
        tr.degeneracyEvents += degeneracies;
      }

      const Sample smp = sample(y, t);
      tr.runningRhoMax = std::max(tr.runningRhoMax, smp.rhoMax);
      tr.runningGInf = std::max(tr.runningGInf, smp.gInf);
      tr.runningGMin = std::min(tr.runningGMin, smp.gMin);
      tr.maxRatioDrift = std::max(tr.maxRatioDrift, smp.ratioDrift);
      tr.maxMomentumDrift = std::max(tr.maxMomentumDrift, smp.momentumDrift);
      tr.maxUIncrease = std::max(tr.maxUIncrease, smp.uMax - prevUMax);
      tr.maxUDecrease = std::max(tr.maxUDecrease, prevUMin - smp.uMin);
      prevUMax = smp.uMax;
      prevUMin = smp.uMin;
      if (smp.rhoMax > opt.rhoCap) {
        tr.outcome = Outcome::BlowupDetected;
        tr.tHit = crossing_time(tPrev, rhoPrev, t, smp.rhoMax, opt.rhoCap);
        tr.samples.push_back(smp);
        if (opt.trajectoryStride > 0) frame(t);
        tr.final = std::move(y);
        return tr;
      }
    }
    ++macro;
    const bool last = t >= opt.tEnd * (1.0 - 1e-14);
    if (macro % static_cast<std::size_t>(opt.recordStride) == 0 || last) tr.samples.push_back(sample(y, t));
    if (opt.trajectoryStride > 0 && (macro % static_cast<std::size_t>(opt.trajectoryStride) == 0 || last))
      frame(t);
  }
  tr.final = std::move(y);
  return tr;
}

}  // namespace ealign::lagrangian
