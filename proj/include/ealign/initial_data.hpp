#pragma once

// Closed-form initial data on the torus. Every preset is a low-mode
// trigonometric profile
//
//     rho0(x) = m (1 + b cos 2 pi x),   u0(x) = v + a sin 2 pi x,
//
// for which G0 = u0' + psi*rho0 = m ||psi||_1 + (2 pi a + m b c1) cos 2 pi x,
// c1 the first cosine moment of psi. C0, inf G0 and the sup norms follow in
// closed form because G0/rho0 is a Moebius function of cos 2 pi x.

#include <functional>
#include <string>
#include <vector>

#include "ealign/kernels.hpp"

namespace ealign {

enum class PresetKind {
  Trig,     // free amplitudes (m, b, a, v)
  Aligned,  // a chosen so that G0 = ||psi||_1 rho0, the largest C0 periodic data admit
};

struct PresetSpec {
  PresetKind kind = PresetKind::Trig;
  double mass = 1.0;    // m
  double rhoAmp = 0.0;  // b, |b| < 1
  double uAmp = 0.0;    // a (ignored for Aligned)
  double uShift = 0.0;  // v
  bool operator==(const PresetSpec&) const = default;
};

std::string to_string(PresetKind kind);
PresetKind preset_kind_from_string(const std::string& name);

struct InitialData {
  std::function<double(double)> rho0;
  std::function<double(double)> u0;
  std::function<double(double)> G0;
  double mass = 0.0;
  double momentum = 0.0;
  double c0 = 0.0;         // inf G0/rho0
  double infG0 = 0.0;
  double rho0Sup = 0.0;
  double g0Sup = 0.0;
  double velocityAmp = 0.0;  // a actually used
};

/// Throws ConfigError for m <= 0 or |b| >= 1.
InitialData make_initial_data(const PresetSpec& spec, const Kernel& kernel);

/// Cell-center samples x_i = -1/2 + (i + 1)/N; x = 0 and x = 1/2 are both centers.
std::vector<double> sample_cells(const std::function<double(double)>& f, std::size_t N);

double cell_center(std::size_t i, std::size_t N);

}  // namespace ealign
