#pragma once

// Influence functions on the torus (-1/2, 1/2] and the integral quantities
// derived from them. Every kernel is radial: it is evaluated at the periodic
// distance r in (0, 1/2].

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ealign {

inline constexpr double kHalfLength = 0.5;

/// psi(r) = r^-alpha, alpha in (0, 1). Integrable singularity at the origin.
struct PowerLaw {
  double alpha;
};

/// Closed-form bounded profile. `supNorm` must dominate the profile on (0, 1/2].
struct BoundedAnalytic {
  std::function<double(double)> profile;
  double supNorm;
};

/// Piecewise-linear radial profile through (radii[i], values[i]).
/// Constant values[0] on (0, radii[0]]; zero beyond radii.back().
struct Tabulated {
  std::vector<double> radii;
  std::vector<double> values;
};

class Kernel {
 public:
  using Variant = std::variant<PowerLaw, BoundedAnalytic, Tabulated>;

  static Kernel power_law(double alpha);
  /// psi == value everywhere; value == 0 gives the alignment-free system.
  static Kernel constant(double value);
  static Kernel bounded(std::function<double(double)> profile, double supNorm,
                        std::string label);
  static Kernel tabulated(std::vector<double> radii, std::vector<double> values);

  [[nodiscard]] const Variant& variant() const { return variant_; }
  [[nodiscard]] bool is_bounded() const;
  /// ||psi||_inf, absent for the power law.
  [[nodiscard]] std::optional<double> sup_norm() const;
  /// Short family name: "power_law", "constant", "tabulated" or the label of
  /// a bounded analytic kernel.
  [[nodiscard]] const std::string& kind() const { return kind_; }
  /// Human-readable parameterization, e.g. "power_law(alpha=0.5)".
  [[nodiscard]] std::string describe() const;
  /// Present only for kernels built with constant().
  [[nodiscard]] std::optional<double> constant_value() const { return constant_; }

 private:
  Kernel(Variant v, std::string kind, std::optional<double> constant = std::nullopt)
      : variant_(std::move(v)), kind_(std::move(kind)), constant_(constant) {}

  Variant variant_;
  std::string kind_;
  std::optional<double> constant_;
};

/// psi(r) for 0 < r <= 1/2. Throws DomainError outside that range.
double eval(const Kernel& kernel, double r);

/// int_a^b psi(r) dr for 0 <= a <= b <= 1/2 (radial, one-sided).
double radial_integral(const Kernel& kernel, double a, double b);

/// int_X psi over the whole torus.
double l1_norm(const Kernel& kernel);

/// I(k) = int_{psi >= k} psi over the torus. Nonincreasing in k, I(0) = ||psi||_1.
double level_set_integral(const Kernel& kernel, double k);

/// int_X psi(|y|) cos(2 pi mode y) dy. Used for closed-form initial data.
double cosine_moment(const Kernel& kernel, int mode);

/// Cell-averaged kernel mass for a uniform periodic grid of N cells:
/// weights[j] = int over the cell centered at offset j*dx of psi(|y|).
struct ConvolutionWeights {
  std::size_t N = 0;
  std::vector<double> weights;
};

ConvolutionWeights cell_weights(const Kernel& kernel, std::size_t N);

/// Circular convolution (psi * f)_i = sum_j weights[j] f[(i - j) mod N],
/// computed by the direct O(N^2) double sum.
std::vector<double> convolve(const ConvolutionWeights& weights, std::span<const double> field);

/// Periodic distance between two torus points, in [0, 1/2].
double periodic_distance(double x, double y);

/// Wraps x into (-1/2, 1/2].
double wrap_torus(double x);

}  // namespace ealign
