#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ealign/errors.hpp"
#include "ealign/harness.hpp"

using namespace ealign;
using namespace ealign::harness;

namespace {

Campaign small(Scenario s, PresetSpec data, std::vector<Rung> ladder, double tEnd) {
  Campaign c;
  c.name = "unit";
  c.scenario = s;
  c.data = data;
  c.ladder = std::move(ladder);
  c.tEnd = tEnd;
  return c;
}

const Assertion* find(const VerificationReport& r, const std::string& prefix) {
  for (const auto& a : r.assertions)
    if (a.name.rfind(prefix, 0) == 0) return &a;
  return nullptr;
}

}  // namespace

TEST_CASE("scenario names") {
  for (auto s : {Scenario::Subcritical, Scenario::Supercritical, Scenario::MaxPrinciple, Scenario::BoundedKernel,
                 Scenario::CrossValidate, Scenario::BlowupRefinement})
    CHECK(scenario_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(scenario_from_string("hypercritical"), ConfigError);
}

TEST_CASE("campaign JSON round trip is exact") {
  Campaign c = small(Scenario::CrossValidate, {PresetKind::Trig, 1.0 / 3.0, 0.1, -0.7, 0.2},
                     {{64, 0.1 / 3.0}, {128, 1e-3}}, 2.0 / 3.0);
  c.kernel.kind = "tabulated";
  c.kernel.radii = {0.01, 0.03, 0.5};
  c.kernel.values = {10.0, 0.5, 0.5};
  c.tol.crossValidate = 0.0314159;
  c.boundC0 = 1.0 + 1e-15;
  c.densityStepFraction = 0.25;
  c.runEulerian = false;
  const Campaign back = campaign_from_json(nlohmann::json::parse(to_json(c).dump()));
  CHECK(back == c);

  for (const auto& p : preset_matrix(Scenario::Subcritical))
    CHECK(campaign_from_json(nlohmann::json::parse(to_json(p).dump())) == p);
}

TEST_CASE("campaign validation") {
  Campaign c = small(Scenario::Subcritical, {}, {{128, 0.01}, {64, 0.01}}, 1.0);
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.ladder = {};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.ladder = {{63, 0.01}};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.ladder = {{64, 0.0}};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.ladder = {{64, 0.01}};
  CHECK_NOTHROW(validate(c));
  CHECK_THROWS_AS(campaign_from_json(nlohmann::json{{"name", "x"}}), ConfigError);
}

TEST_CASE("scenario labels must match the sign of inf G0") {
  const auto down = small(Scenario::Subcritical, {PresetKind::Trig, 1.0, 0.0, -2.0, 0.0}, {{64, 1e-3}}, 1.0);
  CHECK_THROWS_AS(verify_threshold(down), ConfigError);
  auto up = small(Scenario::Supercritical, {PresetKind::Trig, 1.0, 0.0, 0.1, 0.0}, {{64, 1e-3}}, 1.0);
  CHECK_THROWS_AS(verify_threshold(up), ConfigError);
  // periodic data never have C0 > ||psi||_1 without an override
  up.scenario = Scenario::MaxPrinciple;
  CHECK_THROWS_AS(verify_max_principle(up), ConfigError);
}

TEST_CASE("small subcritical campaign") {
  const auto r = run_campaign(small(Scenario::Subcritical, {PresetKind::Trig, 1.0, 0.2, 0.1, 0.0}, {{64, 0.01}, {128, 0.01}}, 1.0));
  CHECK(r.passed());
  CHECK(r.rungs.size() == 4);
  CHECK(r.quantities.at("beta") > 0.0);
  REQUIRE(find(r, "rho_bound/eulerian@128"));
  REQUIRE(find(r, "G_bound/lagrangian@128"));
  CHECK(find(r, "no_cap/eulerian@64")->passed);
  for (const auto& a : r.assertions) CHECK_FALSE(a.invariant.empty());
  const auto j = r.to_json();
  CHECK(j.at("passed").get<bool>());
  CHECK(j.at("assertions").size() == r.assertions.size());
  CHECK(r.to_text().find("PASS") != std::string::npos);
}

TEST_CASE("small supercritical campaign") {
  Campaign c = small(Scenario::Supercritical, {PresetKind::Trig, 1.0, 0.0, -0.5, 0.0},
                     {{64, 1e-3}, {128, 1e-3}, {256, 1e-3}}, 2.0);
  c.kernel.kind = "zero";
  c.densityStepFraction = 0.25;
  const auto r = run_campaign(c);
  CHECK(r.passed());
  // Burgers: the Lagrangian hit time is (1 - 1/cap)/pi for every n
  for (const auto& rung : r.rungs)
    if (rung.solver == "lagrangian") CHECK(*rung.tHit == doctest::Approx((1.0 - 1e-6) / std::numbers::pi).epsilon(1e-4));
  CHECK(r.quantities.at("riccati_time") == doctest::Approx(1.0 / std::numbers::pi));
}

TEST_CASE("bounded-kernel formulas without simulation") {
  Campaign c = small(Scenario::BoundedKernel, {PresetKind::Trig, 2.0, 0.3, 0.05, 0.0}, {}, 1.0);
  c.kernel.kind = "constant";
  c.kernel.supNorm = 1.5;
  c.runEulerian = c.runLagrangian = false;
  const auto r = run_campaign(c);
  CHECK(r.passed());
  CHECK(r.quantities.at("beta") == 2.0 * 1.5 / r.quantities.at("C0"));
  CHECK(r.quantities.at("gamma") == 2.0 * 1.5);
}

TEST_CASE("max principle with a configured C0") {
  Campaign c = small(Scenario::MaxPrinciple, {PresetKind::Aligned, 1.0, 0.3, 0.0, 0.0}, {{64, 0.01}}, 1.0);
  c.kernel.alpha = 0.1;
  c.boundC0 = 2.0;
  const auto r = run_campaign(c);
  CHECK(r.passed());
  CHECK(r.quantities.at("beta") == 0.0);
  REQUIRE(find(r, "max_principle/"));
}

TEST_CASE("flat flock cross-validates exactly") {
  Campaign c = small(Scenario::CrossValidate, {PresetKind::Trig, 1.0, 0.0, 0.0, 0.0}, {{32, 0.01}, {64, 0.01}}, 0.5);
  c.kernel.kind = "constant";
  const auto r = run_campaign(c);
  CHECK(r.passed());
  CHECK(r.quantities.at("rho_gap@64") <= 1e-12);
}

TEST_CASE("beta sweep") {
  std::vector<KernelDescription> fam(2);
  fam[0].alpha = 0.5;
  fam[1].kind = "constant";
  fam[1].supNorm = 1.0;
  const auto t = sweep_beta_surface(fam, {1.0, 2.0}, {1.0, 4.0});
  REQUIRE(t.rows.size() == 8);
  CHECK(t.number(0, "beta") == 16.0);
  CHECK(t.number(0, "k_star") == 8.0);
  CHECK(t.number(2, "beta") == 32.0);  // M = 2
  CHECK(t.rows[1][t.column("regime")] == "MaxPrinciple");
  CHECK(t.number(1, "beta") == 0.0);
  CHECK(t.rows[4][t.column("regime")] == "BoundedKernel");
  CHECK(t.number(4, "beta") == 1.0);
}

TEST_CASE("preset matrix covers every scenario") {
  for (auto s : {Scenario::Subcritical, Scenario::Supercritical, Scenario::MaxPrinciple, Scenario::BoundedKernel,
                 Scenario::CrossValidate, Scenario::BlowupRefinement}) {
    const auto m = preset_matrix(s);
    CHECK_FALSE(m.empty());
    for (const auto& c : m) {
      CHECK(c.scenario == s);
      CHECK_NOTHROW(validate(c));
    }
  }
  for (const auto& c : preset_matrix(Scenario::Subcritical)) CHECK(c.ladder.back().resolution == 512);
  for (const auto& c : preset_matrix(Scenario::Supercritical)) {
    CHECK(c.ladder.size() == 3);
    CHECK(c.rhoCap == 1e6);
  }
}
