#include "ealign/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ealign/errors.hpp"

namespace ealign {
namespace {

constexpr double kQuadTol = 1e-12;
constexpr unsigned kQuadDepth = 15;

template <typename F>
double integrate(F&& f, double a, double b) {
  if (b <= a) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(f, a, b, kQuadDepth, kQuadTol);
}

// Linear pieces of a tabulated profile covering [0, 1/2].
struct Segment {
  double a, b, va, vb;
  [[nodiscard]] double at(double r) const {
    if (b == a) return va;
    return va + (vb - va) * (r - a) / (b - a);
  }
  [[nodiscard]] double integral(double lo, double hi) const {
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    if (hi <= lo) return 0.0;
    return 0.5 * (at(lo) + at(hi)) * (hi - lo);
  }
};

std::vector<Segment> segments(const Tabulated& t) {
  std::vector<Segment> out;
  out.push_back({0.0, t.radii.front(), t.values.front(), t.values.front()});
  for (std::size_t i = 0; i + 1 < t.radii.size(); ++i)
    out.push_back({t.radii[i], t.radii[i + 1], t.values[i], t.values[i + 1]});
  if (t.radii.back() < kHalfLength) out.push_back({t.radii.back(), kHalfLength, 0.0, 0.0});
  return out;
}

double tabulated_value(const Tabulated& t, double r) {
  if (r <= t.radii.front()) return t.values.front();
  if (r > t.radii.back()) return 0.0;
  auto it = std::lower_bound(t.radii.begin(), t.radii.end(), r);
  const auto i = static_cast<std::size_t>(it - t.radii.begin());
  if (t.radii[i] == r) return t.values[i];
  const double a = t.radii[i - 1], b = t.radii[i];
  return t.values[i - 1] + (t.values[i] - t.values[i - 1]) * (r - a) / (b - a);
}

double powerlaw_antiderivative(double alpha, double r) {
  return std::pow(r, 1.0 - alpha) / (1.0 - alpha);
}

// {r in (0, 1/2] : profile(r) >= k}, located by sampling plus bisection on
// each sign change of profile - k.
std::vector<std::pair<double, double>> superlevel_intervals(const std::function<double(double)>& f,
                                                            double k) {
  constexpr int kSamples = 4096;
  const double h = kHalfLength / kSamples;
  auto radius = [&](int j) { return j == 0 ? h * 1e-9 : h * j; };
  auto above = [&](double r) { return f(r) >= k; };

  std::vector<std::pair<double, double>> out;
  bool inside = above(radius(0));
  double start = 0.0;
  for (int j = 0; j < kSamples; ++j) {
    const double r1 = radius(j + 1);
    const bool next = above(r1);
    if (next == inside) continue;
    double lo = radius(j), hi = r1;
    for (int it = 0; it < 80 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (above(mid) == inside)
        lo = mid;
      else
        hi = mid;
    }
    const double crossing = 0.5 * (lo + hi);
    if (inside) out.emplace_back(start, crossing);
    start = crossing;
    inside = next;
  }
  if (inside) out.emplace_back(start, kHalfLength);
  return out;
}

}  // namespace

Kernel Kernel::power_law(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("power-law exponent alpha must lie in (0,1), got " + std::to_string(alpha));
  return Kernel(PowerLaw{alpha}, "power_law");
}

Kernel Kernel::constant(double value) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw ConfigError("constant kernel value must be finite and >= 0");
  return Kernel(BoundedAnalytic{[value](double) { return value; }, value}, "constant", value);
}

Kernel Kernel::bounded(std::function<double(double)> profile, double supNorm, std::string label) {
  if (!profile) throw ConfigError("bounded kernel needs a profile");
  if (!(supNorm >= 0.0) || !std::isfinite(supNorm))
    throw ConfigError("bounded kernel sup norm must be finite and >= 0");
  return Kernel(BoundedAnalytic{std::move(profile), supNorm}, std::move(label));
}

Kernel Kernel::tabulated(std::vector<double> radii, std::vector<double> values) {
  if (radii.empty() || radii.size() != values.size())
    throw ConfigError("tabulated kernel needs equally many (>= 1) radii and values");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || radii[i] > kHalfLength)
      throw ConfigError("tabulated kernel radii must lie in (0, 1/2]");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw ConfigError("tabulated kernel radii must be strictly increasing");
    if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
      throw ConfigError("tabulated kernel values must be finite and >= 0");
  }
  return Kernel(Tabulated{std::move(radii), std::move(values)}, "tabulated");
}

bool Kernel::is_bounded() const { return !std::holds_alternative<PowerLaw>(variant_); }

std::optional<double> Kernel::sup_norm() const {
  if (const auto* b = std::get_if<BoundedAnalytic>(&variant_)) return b->supNorm;
  if (const auto* t = std::get_if<Tabulated>(&variant_))
    return *std::max_element(t->values.begin(), t->values.end());
  return std::nullopt;
}

std::string Kernel::describe() const {
  std::ostringstream os;
  os.precision(6);
  if (const auto* p = std::get_if<PowerLaw>(&variant_)) {
    os << "power_law(alpha=" << p->alpha << ")";
  } else if (constant_) {
    os << "constant(" << *constant_ << ")";
  } else if (const auto* t = std::get_if<Tabulated>(&variant_)) {
    os << "tabulated(" << t->radii.size() << " knots, sup=" << *sup_norm() << ")";
  } else {
    os << kind_ << "(sup=" << *sup_norm() << ")";
  }
  return os.str();
}

double eval(const Kernel& kernel, double r) {
  if (!(r > 0.0)) throw DomainError("kernel evaluated at r <= 0; the origin is never sampled pointwise");
  if (r > kHalfLength) throw DomainError("kernel radius exceeds the torus half-length 1/2");
  return std::visit(
      [r](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PowerLaw>)
          return std::pow(r, -k.alpha);
        else if constexpr (std::is_same_v<T, BoundedAnalytic>)
          return k.profile(r);
        else
          return tabulated_value(k, r);
      },
      kernel.variant());
}

double radial_integral(const Kernel& kernel, double a, double b) {
  if (!(a >= 0.0) || !(b <= kHalfLength) || b < a)
    throw DomainError("radial_integral needs 0 <= a <= b <= 1/2");
  return std::visit(
      [a, b](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return powerlaw_antiderivative(k.alpha, b) - powerlaw_antiderivative(k.alpha, a);
        } else if constexpr (std::is_same_v<T, BoundedAnalytic>) {
          return integrate(k.profile, a, b);
        } else {
          double sum = 0.0;
          for (const auto& s : segments(k)) sum += s.integral(a, b);
          return sum;
        }
      },
      kernel.variant());
}

double l1_norm(const Kernel& kernel) {
  if (const auto* p = std::get_if<PowerLaw>(&kernel.variant()))
    return std::pow(2.0, p->alpha) / (1.0 - p->alpha);
  if (auto c = kernel.constant_value()) return *c;
  return 2.0 * radial_integral(kernel, 0.0, kHalfLength);
}

double level_set_integral(const Kernel& kernel, double k) {
  if (!(k >= 0.0)) throw DomainError("level_set_integral needs k >= 0");
  if (k == 0.0) return l1_norm(kernel);
  return std::visit(
      [k, &kernel](const auto& ker) -> double {
        using T = std::decay_t<decltype(ker)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          const double rk = std::min(std::pow(k, -1.0 / ker.alpha), kHalfLength);
          return 2.0 * powerlaw_antiderivative(ker.alpha, rk);
        } else if constexpr (std::is_same_v<T, BoundedAnalytic>) {
          if (auto c = kernel.constant_value()) return *c >= k ? *c : 0.0;
          if (k > ker.supNorm) return 0.0;
          double sum = 0.0;
          for (auto [lo, hi] : superlevel_intervals(ker.profile, k))
            sum += integrate(ker.profile, lo, hi);
          return 2.0 * sum;
        } else {
          double sum = 0.0;
          for (const auto& s : segments(ker)) {
            const double lo_v = std::min(s.va, s.vb), hi_v = std::max(s.va, s.vb);
            if (hi_v < k) continue;
            if (lo_v >= k) {
              sum += s.integral(s.a, s.b);
              continue;
            }
            // Exactly one crossing inside the segment.
            const double c = s.a + (k - s.va) * (s.b - s.a) / (s.vb - s.va);
            sum += s.va > s.vb ? s.integral(s.a, c) : s.integral(c, s.b);
          }
          return 2.0 * sum;
        }
      },
      kernel.variant());
}

double cosine_moment(const Kernel& kernel, int mode) {
  if (mode == 0) return l1_norm(kernel);
  const double w = 2.0 * std::numbers::pi * mode;
  return std::visit(
      [w, &kernel](const auto& ker) -> double {
        using T = std::decay_t<decltype(ker)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          // Subtract the singular part so the integrand is regular at 0.
          const double a = ker.alpha;
          auto f = [a, w](double r) {
            if (r <= 0) return 0.0;
            const double h = std::sin(0.5 * w * r);
            return -2.0 * h * h * std::pow(r, -a);  // cos(wr) - 1 without cancellation
          };
          double sum = 0.0;
          for (int j = 0; j < 8; ++j) sum += integrate(f, kHalfLength * j / 8, kHalfLength * (j + 1) / 8);
          return 2.0 * sum + l1_norm(kernel);
        } else if constexpr (std::is_same_v<T, BoundedAnalytic>) {
          if (kernel.constant_value()) return 0.0;
          auto f = [&ker, w](double r) { return ker.profile(r) * std::cos(w * r); };
          return 2.0 * integrate(f, 0.0, kHalfLength);
        } else {
          double sum = 0.0;
          for (const auto& s : segments(ker)) {
            auto f = [&s, w](double r) { return s.at(r) * std::cos(w * r); };
            sum += integrate(f, s.a, s.b);
          }
          return 2.0 * sum;
        }
      },
      kernel.variant());
}

ConvolutionWeights cell_weights(const Kernel& kernel, std::size_t N) {
  if (N < 4 || N % 2 != 0) throw ConfigError("cell_weights needs an even grid size N >= 4");
  const double dx = 1.0 / static_cast<double>(N);
  const std::size_t half = N / 2;
  ConvolutionWeights out{N, std::vector<double>(N, 0.0)};
  out.weights[0] = 2.0 * radial_integral(kernel, 0.0, 0.5 * dx);
  for (std::size_t j = 1; j < half; ++j) {
    const double jd = static_cast<double>(j);
    const double w = radial_integral(kernel, (jd - 0.5) * dx, std::min((jd + 0.5) * dx, kHalfLength));
    out.weights[j] = w;
    out.weights[N - j] = w;
  }
  out.weights[half] = 2.0 * radial_integral(kernel, kHalfLength - 0.5 * dx, kHalfLength);
  return out;
}

std::vector<double> convolve(const ConvolutionWeights& weights, std::span<const double> field) {
  const std::size_t N = weights.N;
  if (field.size() != N)
    throw ConfigError("convolve: field length " + std::to_string(field.size()) +
                      " does not match weights size " + std::to_string(N));
  std::vector<double> out(N, 0.0);
  const double* w = weights.weights.data();
  for (std::size_t i = 0; i < N; ++i) {
    double acc = 0.0;
    // i - j mod N split into two contiguous runs.
    for (std::size_t j = 0; j <= i; ++j) acc += w[j] * field[i - j];
    for (std::size_t j = i + 1; j < N; ++j) acc += w[j] * field[i + N - j];
    out[i] = acc;
  }
  return out;
}

double periodic_distance(double x, double y) {
  double d = std::fabs(x - y);
  d -= std::floor(d);
  return d > kHalfLength ? 1.0 - d : d;
}

double wrap_torus(double x) { return x - std::ceil(x - kHalfLength); }

}  // namespace ealign
