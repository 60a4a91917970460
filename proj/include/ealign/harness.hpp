#pragma once

// Verification campaigns that tie the bounds to both solvers. A campaign is
// fully described by its JSON form, so every report can be regenerated from
// the inputs it records.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ealign/config.hpp"
#include "ealign/csv.hpp"
#include "ealign/diagnostics.hpp"
#include "ealign/initial_data.hpp"

namespace ealign::harness {

enum class Scenario { Subcritical, Supercritical, MaxPrinciple, BoundedKernel, CrossValidate, BlowupRefinement };

std::string_view to_string(Scenario s);
/// Accepts the lower-case names used on the command line ("subcritical", "max_principle", ...).
Scenario scenario_from_string(std::string_view name);

struct Rung {
  std::size_t resolution = 256;  // N for the Eulerian grid, n for particles
  double dt = 1e-2;              // Lagrangian step, Eulerian step ceiling
  bool operator==(const Rung&) const = default;
};

struct Tolerances {
  double rho = 0.05;
  double G = 0.05;
  double maxPrinciple = 0.02;
  double crossValidate = 0.03;
  double blowupSpread = 0.10;
  double cauchyShrink = 1.5;
  bool operator==(const Tolerances&) const = default;
};

struct Campaign {
  std::string name;
  Scenario scenario = Scenario::Subcritical;
  KernelDescription kernel;
  PresetSpec data;
  std::vector<Rung> ladder;
  Tolerances tol;
  double tEnd = 10.0;
  int order = 2;
  double cfl = 0.4;
  double rhoCap = 1e6;          // Lagrangian density cap
  double eulerianRhoCap = 10.0; // cell averages never exceed M N, so the grid needs a reachable cap
  double densityStepFraction = 1.0;
  bool runEulerian = true;
  bool runLagrangian = true;
  /// C0 handed to the bounds module instead of the one computed from the data.
  std::optional<double> boundC0;
  bool operator==(const Campaign&) const = default;
};

/// Throws ConfigError for an empty or non-increasing ladder and bad numbers.
void validate(const Campaign& c);

nlohmann::json to_json(const Campaign& c);
Campaign campaign_from_json(const nlohmann::json& j);

struct Assertion {
  std::string name;
  std::string invariant;
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct RungResult {
  std::string solver;  // "eulerian" | "lagrangian"
  Rung rung;
  Outcome outcome = Outcome::CompletedGlobal;
  std::optional<double> tHit;
  double rhoInf = 0.0;   // running sup norms over the run
  double gInf = 0.0;
  double gMin = 0.0;
  double massDrift = 0.0;
  double momentumDrift = 0.0;
  double ratioDrift = 0.0;
  std::vector<double> times;    // sup-norm time series
  std::vector<double> rhoSeries;
  std::vector<double> gSeries;
};

struct VerificationReport {
  std::string campaign;
  Scenario scenario = Scenario::Subcritical;
  nlohmann::json inputs;
  std::vector<Assertion> assertions;
  std::map<std::string, double> quantities;
  std::vector<RungResult> rungs;

  [[nodiscard]] bool passed() const;
  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] std::string to_text() const;
};

/// Subcritical: bound checks at the finest rung and no cap hits anywhere.
/// Supercritical: cap hits at every rung, Cauchy hit times on the grid ladder
/// and a bounded spread between the two finest rungs. Throws ConfigError when
/// the sign of inf G0 contradicts the scenario.
VerificationReport verify_threshold(const Campaign& c);

/// Requires the configured C0 to exceed ||psi||_1 (ConfigError otherwise).
VerificationReport verify_max_principle(const Campaign& c);

/// beta = M ||psi||_inf / C0 and gamma = M ||psi||_inf, compared bit for bit.
VerificationReport verify_bounded_kernel(const Campaign& c);

/// Eulerian against Lagrangian sup-norm series at matched resolution.
VerificationReport cross_validate(const Campaign& c);

/// Lagrangian refinement of a blow-up time with the Riccati reference time.
VerificationReport blowup_refinement(const Campaign& c);

VerificationReport run_campaign(const Campaign& c);

/// Runs campaigns concurrently; reports come back in input order.
std::vector<VerificationReport> run_campaigns(const std::vector<Campaign>& campaigns);

/// One row per (kernel, M, C0): l1, k0, k*, beta, gamma, regime and, for
/// power laws, the analytic values with the relative gap. gamma uses
/// ||rho0||_inf = M (flat data).
CsvTable sweep_beta_surface(const std::vector<KernelDescription>& family, const std::vector<double>& masses,
                            const std::vector<double>& c0s);

/// Built-in campaigns for each scenario.
std::vector<Campaign> preset_matrix(Scenario s);

}  // namespace ealign::harness
