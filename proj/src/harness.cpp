#include "ealign/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "ealign/bounds.hpp"
#include "ealign/errors.hpp"
#include "ealign/eulerian.hpp"
#include "ealign/lagrangian.hpp"

namespace ealign::harness {
namespace {

using nlohmann::json;

constexpr double kConvergedSpread = 1e-9;

struct Prepared {
  Kernel kernel;
  InitialData data;
  double l1 = 0.0;
};

Prepared prepare(const Campaign& c) {
  validate(c);
  Kernel k = c.kernel.build();
  InitialData d = make_initial_data(c.data, k);
  const double l1 = l1_norm(k);
  return Prepared{std::move(k), std::move(d), l1};
}

VerificationReport start(const Campaign& c) {
  VerificationReport r;
  r.campaign = c.name;
  r.scenario = c.scenario;
  r.inputs = to_json(c);
  return r;
}

Assertion check_le(std::string name, std::string invariant, double measured, double bound,
                   std::string detail = {}) {
  return Assertion{std::move(name), std::move(invariant), measured <= bound, measured, bound, std::move(detail)};
}

Assertion check_eq(std::string name, std::string invariant, double measured, double expected) {
  return Assertion{std::move(name), std::move(invariant), measured == expected, measured, expected, "bit-exact"};
}

RungResult run_eulerian(const Campaign& c, const Rung& rung, const Prepared& p) {
  eulerian::SimConfig cfg;
  cfg.N = rung.resolution;
  cfg.cflNumber = c.cfl;
  cfg.tEnd = c.tEnd;
  cfg.order = c.order;
  cfg.rhoCap = c.eulerianRhoCap;
  cfg.dtMax = rung.dt;
  const auto run = eulerian::run(cfg, sample_cells(p.data.rho0, cfg.N), sample_cells(p.data.u0, cfg.N), p.kernel);

  RungResult r;
  r.solver = "eulerian";
  r.rung = rung;
  r.outcome = run.outcome;
  r.tHit = run.tHit;
  r.rhoInf = run.runningRhoInf;
  r.gInf = run.runningGInf;
  r.gMin = std::numeric_limits<double>::infinity();
  for (const auto& s : run.samples) {
    r.gMin = std::min(r.gMin, s.gMin);
    r.massDrift = std::max(r.massDrift, s.massDrift);
    r.momentumDrift = std::max(r.momentumDrift, s.momentumDrift);
    r.times.push_back(s.t);
    r.rhoSeries.push_back(s.rhoInf);
    r.gSeries.push_back(s.gInf);
  }
  return r;
}

RungResult run_lagrangian(const Campaign& c, const Rung& rung, const Prepared& p) {
  const auto sys = lagrangian::seed_particles(p.data.rho0, p.data.u0, p.data.G0, rung.resolution);
  lagrangian::IntegrateOptions opt;
  opt.dt = rung.dt;
  opt.tEnd = c.tEnd;
  opt.rhoCap = c.rhoCap;
  opt.maxDensityFraction = c.densityStepFraction;
  const auto tr = lagrangian::integrate(sys, p.kernel, opt);

  RungResult r;
  r.solver = "lagrangian";
  r.rung = rung;
  r.outcome = tr.outcome;
  r.tHit = tr.tHit;
  r.rhoInf = tr.runningRhoMax;
  r.gInf = tr.runningGInf;
  r.gMin = tr.runningGMin;
  r.momentumDrift = tr.maxMomentumDrift;
  r.ratioDrift = tr.maxRatioDrift;
  for (const auto& s : tr.samples) {
    r.times.push_back(s.t);
    r.rhoSeries.push_back(s.rhoMax);
    r.gSeries.push_back(s.gInf);
  }
  return r;
}

// Every requested (solver, rung) pair, run concurrently and collected in ladder order.
std::vector<RungResult> run_ladder(const Campaign& c, const Prepared& p, bool eul, bool lag) {
  std::vector<std::future<RungResult>> jobs;
  for (const auto& rung : c.ladder) {
    if (eul) jobs.push_back(std::async(std::launch::async, [&c, &p, rung] { return run_eulerian(c, rung, p); }));
    if (lag) jobs.push_back(std::async(std::launch::async, [&c, &p, rung] { return run_lagrangian(c, rung, p); }));
  }
  std::vector<RungResult> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

std::vector<const RungResult*> by_solver(const std::vector<RungResult>& rungs, std::string_view solver) {
  std::vector<const RungResult*> out;
  for (const auto& r : rungs)
    if (r.solver == solver) out.push_back(&r);
  return out;
}

std::string rung_tag(const RungResult& r) { return r.solver + "@" + std::to_string(r.rung.resolution); }

BoundInputs bound_inputs(const Campaign& c, const Prepared& p) {
  return BoundInputs{p.data.mass, c.boundC0.value_or(p.data.c0), p.kernel, p.data.rho0Sup, p.data.g0Sup};
}

void record_bounds(VerificationReport& rep, const Prepared& p, const BoundInputs& in, const BoundReport& b) {
  rep.quantities["l1_norm"] = p.l1;
  rep.quantities["C0"] = in.c0;
  rep.quantities["inf_G0"] = p.data.infG0;
  rep.quantities["rho0_sup"] = p.data.rho0Sup;
  rep.quantities["G0_sup"] = p.data.g0Sup;
  rep.quantities["beta"] = b.beta;
  rep.quantities["gamma"] = b.gamma;
  rep.quantities["rho_bound"] = b.rhoBound;
  rep.quantities["G_bound"] = b.gBound;
  if (b.k0) rep.quantities["k0"] = *b.k0;
  if (b.kStar) rep.quantities["k_star"] = *b.kStar;
}

// Running sup norms at the finest rung of each solver against the uniform bounds.
void assert_uniform_bounds(VerificationReport& rep, const Tolerances& tol, const BoundReport& b) {
  for (const char* solver : {"eulerian", "lagrangian"}) {
    const auto rs = by_solver(rep.rungs, solver);
    if (rs.empty()) continue;
    const RungResult& f = *rs.back();
    rep.assertions.push_back(check_le("rho_bound/" + rung_tag(f), "sup_t ||rho||_inf <= (1+tol) max(||rho0||_inf, beta)",
                                      f.rhoInf, (1.0 + tol.rho) * b.rhoBound));
    rep.assertions.push_back(check_le("G_bound/" + rung_tag(f), "sup_t ||G||_inf <= (1+tol) max(||G0||_inf, gamma)",
                                      f.gInf, (1.0 + tol.G) * b.gBound));
  }
}

void assert_no_cap(VerificationReport& rep) {
  for (const auto& r : rep.rungs)
    rep.assertions.push_back(Assertion{"no_cap/" + rung_tag(r), "subcritical data stay inside every cap",
                                       !hit_cap(r.outcome), r.rhoInf, 0.0, std::string(to_string(r.outcome))});
}

// Relative spread |t_n - t_{n-1}| / t_n between the two finest hit times.
std::optional<double> finest_spread(const std::vector<const RungResult*>& rs) {
  if (rs.size() < 2 || !rs.back()->tHit || !rs[rs.size() - 2]->tHit) return std::nullopt;
  const double a = *rs[rs.size() - 2]->tHit, b = *rs.back()->tHit;
  return std::fabs(b - a) / b;
}

// Smallest ratio d_k / d_{k+1} over successive hit-time differences; +inf when
// the sequence has already converged below kConvergedSpread.
std::optional<double> cauchy_shrink(const std::vector<const RungResult*>& rs) {
  if (rs.size() < 3) return std::nullopt;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 2 < rs.size(); ++k) {
    if (!rs[k]->tHit || !rs[k + 1]->tHit || !rs[k + 2]->tHit) return std::nullopt;
    const double d1 = std::fabs(*rs[k + 1]->tHit - *rs[k]->tHit);
    const double d2 = std::fabs(*rs[k + 2]->tHit - *rs[k + 1]->tHit);
    if (d2 <= kConvergedSpread * std::fabs(*rs[k + 2]->tHit)) continue;
    worst = std::min(worst, d1 / d2);
  }
  return worst;
}

double interpolate(const std::vector<double>& ts, const std::vector<double>& vs, double t) {
  if (t <= ts.front()) return vs.front();
  if (t >= ts.back()) return vs.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - ts.begin());
  const double w = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
  return (1.0 - w) * vs[j - 1] + w * vs[j];
}

// max_t |a(t) - b(t)| / |a(t)| with a interpolated at the sample times of b.
double series_gap(const std::vector<double>& ta, const std::vector<double>& a, const std::vector<double>& tb,
                  const std::vector<double>& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < tb.size(); ++i) {
    const double ref = interpolate(ta, a, tb[i]);
    const double scale = std::max(std::fabs(ref), std::numeric_limits<double>::min());
    gap = std::max(gap, std::fabs(ref - b[i]) / scale);
  }
  return gap;
}

json rung_json(const RungResult& r) {
  json j{{"solver", r.solver},
         {"resolution", r.rung.resolution},
         {"dt", r.rung.dt},
         {"outcome", std::string(to_string(r.outcome))},
         {"rho_inf", r.rhoInf},
         {"G_inf", r.gInf},
         {"G_min", r.gMin},
         {"mass_drift", r.massDrift},
         {"momentum_drift", r.momentumDrift},
         {"ratio_drift", r.ratioDrift}};
  j["t_hit"] = r.tHit ? json(*r.tHit) : json(nullptr);
  return j;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::Subcritical: return "subcritical";
    case Scenario::Supercritical: return "supercritical";
    case Scenario::MaxPrinciple: return "max_principle";
    case Scenario::BoundedKernel: return "bounded_kernel";
    case Scenario::CrossValidate: return "cross_validate";
    case Scenario::BlowupRefinement: return "blowup_refinement";
  }
  return "?";
}

Scenario scenario_from_string(std::string_view name) {
  for (Scenario s : {Scenario::Subcritical, Scenario::Supercritical, Scenario::MaxPrinciple, Scenario::BoundedKernel,
                     Scenario::CrossValidate, Scenario::BlowupRefinement})
    if (to_string(s) == name) return s;
  throw ConfigError("unknown scenario '" + std::string(name) +
                    "' (expected subcritical, supercritical, max_principle, bounded_kernel, cross_validate or "
                    "blowup_refinement)");
}

void validate(const Campaign& c) {
  const bool simulates = c.runEulerian || c.runLagrangian;
  if (simulates && c.ladder.empty()) throw ConfigError("campaign '" + c.name + "': ladder is empty");
  for (std::size_t i = 0; i < c.ladder.size(); ++i) {
    if (c.ladder[i].resolution < 32 || c.ladder[i].resolution % 2 != 0)
      throw ConfigError("campaign '" + c.name + "': rung resolutions must be even and >= 32");
    if (!(c.ladder[i].dt > 0.0)) throw ConfigError("campaign '" + c.name + "': rung dt must be > 0");
    if (i > 0 && c.ladder[i].resolution <= c.ladder[i - 1].resolution)
      throw ConfigError("campaign '" + c.name + "': ladder must be strictly increasing");
  }
  if (!(c.tEnd > 0.0)) throw ConfigError("campaign '" + c.name + "': tEnd must be > 0");
  if (c.order != 1 && c.order != 2) throw ConfigError("campaign '" + c.name + "': order must be 1 or 2");
  if (!(c.rhoCap > 0.0) || !(c.eulerianRhoCap > 0.0)) throw ConfigError("campaign '" + c.name + "': caps must be > 0");
  if (!(c.densityStepFraction > 0.0)) throw ConfigError("campaign '" + c.name + "': step fraction must be > 0");
}

json to_json(const Campaign& c) {
  json ladder = json::array();
  for (const auto& r : c.ladder) ladder.push_back({{"resolution", r.resolution}, {"dt", r.dt}});
  json j{{"name", c.name},
         {"scenario", std::string(to_string(c.scenario))},
         {"kernel", to_json(c.kernel)},
         {"data", to_json(c.data)},
         {"ladder", ladder},
         {"tolerances",
          {{"rho", c.tol.rho},
           {"G", c.tol.G},
           {"max_principle", c.tol.maxPrinciple},
           {"cross_validate", c.tol.crossValidate},
           {"blowup_spread", c.tol.blowupSpread},
           {"cauchy_shrink", c.tol.cauchyShrink}}},
         {"t_end", c.tEnd},
         {"order", c.order},
         {"cfl", c.cfl},
         {"rho_cap", c.rhoCap},
         {"eulerian_rho_cap", c.eulerianRhoCap},
         {"density_step_fraction", c.densityStepFraction},
         {"run_eulerian", c.runEulerian},
         {"run_lagrangian", c.runLagrangian}};
  if (c.boundC0) j["bound_c0"] = *c.boundC0;
  return j;
}

Campaign campaign_from_json(const json& j) {
  try {
    Campaign c;
    c.name = j.at("name").get<std::string>();
    c.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    c.kernel = kernel_from_json(j.at("kernel"));
    c.data = preset_from_json(j.at("data"));
    for (const auto& r : j.at("ladder")) c.ladder.push_back(Rung{r.at("resolution").get<std::size_t>(), r.at("dt").get<double>()});
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      c.tol.rho = t.value("rho", c.tol.rho);
      c.tol.G = t.value("G", c.tol.G);
      c.tol.maxPrinciple = t.value("max_principle", c.tol.maxPrinciple);
      c.tol.crossValidate = t.value("cross_validate", c.tol.crossValidate);
      c.tol.blowupSpread = t.value("blowup_spread", c.tol.blowupSpread);
      c.tol.cauchyShrink = t.value("cauchy_shrink", c.tol.cauchyShrink);
    }
    c.tEnd = j.value("t_end", c.tEnd);
    c.order = j.value("order", c.order);
    c.cfl = j.value("cfl", c.cfl);
    c.rhoCap = j.value("rho_cap", c.rhoCap);
    c.eulerianRhoCap = j.value("eulerian_rho_cap", c.eulerianRhoCap);
    c.densityStepFraction = j.value("density_step_fraction", c.densityStepFraction);
    c.runEulerian = j.value("run_eulerian", c.runEulerian);
    c.runLagrangian = j.value("run_lagrangian", c.runLagrangian);
    if (j.contains("bound_c0")) c.boundC0 = j.at("bound_c0").get<double>();
    validate(c);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("campaign JSON: ") + e.what());
  }
}

bool VerificationReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

json VerificationReport::to_json() const {
  json as = json::array();
  for (const auto& a : assertions)
    as.push_back({{"name", a.name},
                  {"invariant", a.invariant},
                  {"passed", a.passed},
                  {"measured", a.measured},
                  {"bound", a.bound},
                  {"detail", a.detail}});
  json rs = json::array();
  for (const auto& r : rungs) rs.push_back(rung_json(r));
  return json{{"campaign", campaign},
              {"scenario", std::string(harness::to_string(scenario))},
              {"passed", passed()},
              {"inputs", inputs},
              {"assertions", as},
              {"quantities", quantities},
              {"rungs", rs}};
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  os << "campaign " << campaign << " [" << harness::to_string(scenario) << "]: " << (passed() ? "PASS" : "FAIL")
     << "\n";
  for (const auto& [k, v] : quantities) os << "  " << k << " = " << fmt(v) << "\n";
  for (const auto& r : rungs) {
    os << "  " << r.solver << " " << r.rung.resolution << " dt=" << fmt(r.rung.dt) << ": " << to_string(r.outcome);
    if (r.tHit) os << " at t=" << fmt(*r.tHit);
    os << ", rho_inf=" << fmt(r.rhoInf) << ", G_inf=" << fmt(r.gInf) << "\n";
  }
  for (const auto& a : assertions) {
    os << "  [" << (a.passed ? "pass" : "FAIL") << "] " << a.name << ": " << a.invariant << " (measured "
       << fmt(a.measured) << ", bound " << fmt(a.bound);
    if (!a.detail.empty()) os << ", " << a.detail;
    os << ")\n";
  }
  return os.str();
}

VerificationReport verify_threshold(const Campaign& c) {
  if (c.scenario != Scenario::Subcritical && c.scenario != Scenario::Supercritical)
    throw ConfigError("verify_threshold needs a subcritical or supercritical campaign");
  const Prepared p = prepare(c);
  VerificationReport rep = start(c);
  const bool sub = c.scenario == Scenario::Subcritical;
  if (sub && !(p.data.infG0 > 0.0))
    throw ConfigError("campaign '" + c.name + "' is labelled subcritical but inf G0 = " + fmt(p.data.infG0));
  if (!sub && !(p.data.infG0 < 0.0))
    throw ConfigError("campaign '" + c.name + "' is labelled supercritical but inf G0 = " + fmt(p.data.infG0));

  rep.rungs = run_ladder(c, p, c.runEulerian, c.runLagrangian);

  if (sub) {
    const BoundInputs in = bound_inputs(c, p);
    const BoundReport b = bound_report(in);
    record_bounds(rep, p, in, b);
    assert_uniform_bounds(rep, c.tol, b);
    assert_no_cap(rep);
    return rep;
  }

  rep.quantities["inf_G0"] = p.data.infG0;
  rep.quantities["C0"] = p.data.c0;
  rep.quantities["l1_norm"] = p.l1;
  // Along the characteristic through argmin G0, rho' >= |G0| rho^2 / rho0, so it blows up before 1/|inf G0|.
  rep.quantities["riccati_time"] = 1.0 / std::fabs(p.data.infG0);
  for (const auto& r : rep.rungs)
    rep.assertions.push_back(Assertion{"cap_hit/" + rung_tag(r), "inf G0 < 0 reaches the density cap in finite time",
                                       hit_cap(r.outcome), r.tHit.value_or(std::numeric_limits<double>::infinity()),
                                       c.tEnd, std::string(to_string(r.outcome))});
  for (const char* solver : {"eulerian", "lagrangian"}) {
    const auto rs = by_solver(rep.rungs, solver);
    if (rs.empty()) continue;
    if (auto spread = finest_spread(rs))
      rep.assertions.push_back(check_le(std::string("hit_spread/") + solver,
                                        "cap-hit times of the two finest rungs agree", *spread, c.tol.blowupSpread));
    if (auto shrink = cauchy_shrink(rs)) {
      rep.quantities[std::string(solver) + "_cauchy_shrink"] = *shrink;
      // The particle quadrature of a singular kernel converges like n^(alpha-1),
      // so only the grid ladder is held to the shrink factor.
      if (std::string_view(solver) == "eulerian")
        rep.assertions.push_back(Assertion{"cauchy/eulerian", "successive cap-hit time differences shrink",
                                           *shrink >= c.tol.cauchyShrink, *shrink, c.tol.cauchyShrink, ""});
    }
  }
  return rep;
}

VerificationReport verify_max_principle(const Campaign& c) {
  const Prepared p = prepare(c);
  const BoundInputs in = bound_inputs(c, p);
  if (!(in.c0 > p.l1))
    throw ConfigError("campaign '" + c.name + "': max principle needs C0 > ||psi||_1, got C0 = " + fmt(in.c0) +
                      " and ||psi||_1 = " + fmt(p.l1));
  VerificationReport rep = start(c);
  const BetaResult beta = compute_beta(in);
  rep.quantities["l1_norm"] = p.l1;
  rep.quantities["C0"] = in.c0;
  rep.quantities["data_C0"] = p.data.c0;
  rep.quantities["rho0_sup"] = p.data.rho0Sup;
  rep.quantities["beta"] = beta.beta;
  rep.assertions.push_back(check_eq("beta_zero", "C0 > ||psi||_1 gives beta = 0", beta.beta, 0.0));
  rep.assertions.push_back(Assertion{"regime", "C0 > ||psi||_1 selects the max-principle regime",
                                     beta.regime == Regime::MaxPrinciple, in.c0, p.l1,
                                     std::string(to_string(beta.regime))});

  if (!c.runEulerian && !c.runLagrangian) return rep;
  // int G0 = M ||psi||_1 on the torus, so periodic data never exceed the limit case C0 = ||psi||_1.
  rep.assertions.push_back(check_le("data_C0_limit", "periodic data satisfy C0 <= ||psi||_1", p.data.c0,
                                    p.l1 * (1.0 + 1e-12)));
  rep.rungs = run_ladder(c, p, c.runEulerian, c.runLagrangian);
  for (const char* solver : {"eulerian", "lagrangian"}) {
    const auto rs = by_solver(rep.rungs, solver);
    if (rs.empty()) continue;
    const RungResult& f = *rs.back();
    rep.assertions.push_back(check_le("max_principle/" + rung_tag(f), "sup_t ||rho||_inf <= (1+tol) ||rho0||_inf",
                                      f.rhoInf, (1.0 + c.tol.maxPrinciple) * p.data.rho0Sup));
  }
  return rep;
}

VerificationReport verify_bounded_kernel(const Campaign& c) {
  const Prepared p = prepare(c);
  const auto sup = p.kernel.sup_norm();
  if (!sup) throw ConfigError("campaign '" + c.name + "': bounded-kernel scenario needs a bounded kernel");
  const BoundInputs in = bound_inputs(c, p);
  if (in.c0 > p.l1) throw ConfigError("campaign '" + c.name + "': C0 > ||psi||_1 falls in the max-principle regime");
  VerificationReport rep = start(c);
  const BoundReport b = bound_report(in);
  record_bounds(rep, p, in, b);
  rep.quantities["psi_sup"] = *sup;
  rep.assertions.push_back(check_eq("beta_formula", "bounded psi gives beta = M ||psi||_inf / C0", b.beta,
                                    in.mass * *sup / in.c0));
  rep.assertions.push_back(check_eq("gamma_formula", "bounded psi gives gamma = M ||psi||_inf", b.gamma,
                                    in.mass * *sup));
  rep.assertions.push_back(Assertion{"regime", "bounded psi selects the bounded-kernel regime",
                                     b.regime == Regime::BoundedKernel, *sup, 0.0, std::string(to_string(b.regime))});
  if (!c.runEulerian && !c.runLagrangian) return rep;
  rep.rungs = run_ladder(c, p, c.runEulerian, c.runLagrangian);
  assert_uniform_bounds(rep, c.tol, b);
  assert_no_cap(rep);
  return rep;
}

VerificationReport cross_validate(const Campaign& c) {
  const Prepared p = prepare(c);
  if (!(p.data.infG0 > 0.0))
    throw ConfigError("campaign '" + c.name + "': cross validation needs subcritical data, inf G0 = " +
                      fmt(p.data.infG0));
  VerificationReport rep = start(c);
  const BoundInputs in = bound_inputs(c, p);
  const BoundReport b = bound_report(in);
  record_bounds(rep, p, in, b);
  rep.rungs = run_ladder(c, p, true, true);

  const auto eul = by_solver(rep.rungs, "eulerian");
  const auto lag = by_solver(rep.rungs, "lagrangian");
  std::vector<double> rhoGaps, gGaps;
  for (std::size_t i = 0; i < eul.size(); ++i) {
    rhoGaps.push_back(series_gap(eul[i]->times, eul[i]->rhoSeries, lag[i]->times, lag[i]->rhoSeries));
    gGaps.push_back(series_gap(eul[i]->times, eul[i]->gSeries, lag[i]->times, lag[i]->gSeries));
    const std::string tag = std::to_string(c.ladder[i].resolution);
    rep.quantities["rho_gap@" + tag] = rhoGaps.back();
    rep.quantities["G_gap@" + tag] = gGaps.back();
  }
  rep.assertions.push_back(check_le("rho_agreement", "Eulerian and Lagrangian ||rho||_inf series agree",
                                    rhoGaps.back(), c.tol.crossValidate));
  rep.assertions.push_back(check_le("G_agreement", "Eulerian and Lagrangian ||G||_inf series agree", gGaps.back(),
                                    c.tol.crossValidate));
  for (std::size_t i = 1; i < rhoGaps.size(); ++i) {
    const std::string tag = std::to_string(c.ladder[i].resolution);
    rep.assertions.push_back(check_le("rho_gap_shrinks@" + tag, "disagreement does not grow under refinement",
                                      rhoGaps[i], rhoGaps[i - 1] + 1e-12));
    rep.assertions.push_back(check_le("G_gap_shrinks@" + tag, "disagreement does not grow under refinement",
                                      gGaps[i], gGaps[i - 1] + 1e-12));
  }
  assert_uniform_bounds(rep, c.tol, b);
  return rep;
}

VerificationReport blowup_refinement(const Campaign& c) {
  const Prepared p = prepare(c);
  if (!(p.data.infG0 < 0.0))
    throw ConfigError("campaign '" + c.name + "': blow-up refinement needs inf G0 < 0, got " + fmt(p.data.infG0));
  VerificationReport rep = start(c);
  rep.quantities["inf_G0"] = p.data.infG0;
  rep.quantities["riccati_time"] = 1.0 / std::fabs(p.data.infG0);
  rep.rungs = run_ladder(c, p, false, true);
  for (const auto& r : rep.rungs) {
    rep.assertions.push_back(Assertion{"blowup/" + rung_tag(r), "inf G0 < 0 reaches the density cap in finite time",
                                       hit_cap(r.outcome), r.tHit.value_or(std::numeric_limits<double>::infinity()),
                                       c.tEnd, std::string(to_string(r.outcome))});
    if (r.tHit) rep.quantities["t_hit@" + std::to_string(r.rung.resolution)] = *r.tHit;
  }
  const auto rs = by_solver(rep.rungs, "lagrangian");
  if (auto spread = finest_spread(rs))
    rep.assertions.push_back(check_le("hit_spread", "cap-hit times of the two finest rungs agree", *spread,
                                      c.tol.blowupSpread));
  if (auto shrink = cauchy_shrink(rs)) rep.quantities["cauchy_shrink"] = *shrink;
  return rep;
}

VerificationReport run_campaign(const Campaign& c) {
  switch (c.scenario) {
    case Scenario::Subcritical:
    case Scenario::Supercritical: return verify_threshold(c);
    case Scenario::MaxPrinciple: return verify_max_principle(c);
    case Scenario::BoundedKernel: return verify_bounded_kernel(c);
    case Scenario::CrossValidate: return cross_validate(c);
    case Scenario::BlowupRefinement: return blowup_refinement(c);
  }
  throw ConfigError("unknown scenario");
}

std::vector<VerificationReport> run_campaigns(const std::vector<Campaign>& campaigns) {
  std::vector<std::future<VerificationReport>> jobs;
  for (const auto& c : campaigns) jobs.push_back(std::async(std::launch::async, [&c] { return run_campaign(c); }));
  std::vector<VerificationReport> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

CsvTable sweep_beta_surface(const std::vector<KernelDescription>& family, const std::vector<double>& masses,
                            const std::vector<double>& c0s) {
  if (family.empty() || masses.empty() || c0s.empty()) throw ConfigError("sweep: grids must be nonempty");
  CsvTable t{{"kernel", "M", "C0", "l1_norm", "k0", "k_star", "beta", "gamma", "regime", "beta_numeric",
              "beta_analytic", "k_star_analytic", "k0_analytic", "relative_gap", "analytic_status"},
             {}};
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };

  std::vector<std::future<std::vector<std::string>>> jobs;
  for (const auto& kd : family)
    for (double M : masses)
      for (double c0 : c0s)
        jobs.push_back(std::async(std::launch::async, [&kd, M, c0, &opt] {
          const Kernel k = kd.build();
          const BoundInputs in{M, c0, k, M, 0.0};
          const BoundReport b = bound_report(in);
          std::vector<std::string> row{kd.label(),         format_double(M), format_double(c0),
                                       format_double(l1_norm(k)), opt(b.k0), opt(b.kStar),
                                       format_double(b.beta), format_double(b.gamma),
                                       std::string(to_string(b.regime))};
          if (kd.kind != "power_law") {
            row.insert(row.end(), {"", "", "", "", "", "not a power law"});
            return row;
          }
          std::string why;
          const auto analytic = beta_analytic_powerlaw(kd.alpha, M, c0, &why);
          if (!analytic) {
            row.insert(row.end(), {opt(b.betaNumeric), "", "", "", "", why});
            return row;
          }
          const double numeric = b.betaNumeric.value_or(b.beta);
          row.insert(row.end(), {format_double(numeric), format_double(analytic->beta),
                                 format_double(analytic->kStar), format_double(analytic->k0),
                                 format_double(std::fabs(numeric - analytic->beta) / analytic->beta), "ok"});
          return row;
        }));
  for (auto& j : jobs) t.add_row(j.get());
  return t;
}

std::vector<Campaign> preset_matrix(Scenario s) {
  auto power = [](double a) {
    KernelDescription k;
    k.alpha = a;
    return k;
  };
  auto constant = [](double v) {
    KernelDescription k;
    k.kind = v == 0.0 ? "zero" : "constant";
    k.supNorm = v;
    return k;
  };
  auto spike = [] {
    KernelDescription k;
    k.kind = "tabulated";
    k.radii = {0.01, 0.03, 0.5};
    k.values = {10.0, 0.5, 0.5};
    return k;
  };
  auto trig = [](double b, double a) {
    PresetSpec p;
    p.rhoAmp = b;
    p.uAmp = a;
    return p;
  };
  auto aligned = [](double b) {
    PresetSpec p;
    p.kind = PresetKind::Aligned;
    p.rhoAmp = b;
    return p;
  };
  auto make = [s](std::string name, KernelDescription k, PresetSpec d, std::vector<Rung> ladder, double tEnd) {
    Campaign c;
    c.name = std::move(name);
    c.scenario = s;
    c.kernel = std::move(k);
    c.data = d;
    c.ladder = std::move(ladder);
    c.tEnd = tEnd;
    return c;
  };

  std::vector<Campaign> out;
  switch (s) {
    case Scenario::Subcritical: {
      const std::vector<std::pair<std::string, KernelDescription>> kernels{
          {"pl025", power(0.25)}, {"pl050", power(0.5)}, {"pl075", power(0.75)}, {"const1", constant(1.0)},
          {"spike", spike()}};
      const std::vector<std::pair<std::string, PresetSpec>> data{{"wave", trig(0.0, 0.1)},
                                                                 {"bump", trig(0.3, 0.05)}};
      for (const auto& [kn, k] : kernels)
        for (const auto& [dn, d] : data) {
          Campaign c = make(kn + "-" + dn, k, d, {{256, 1e-2}, {512, 1e-2}}, 10.0);
          // the spike's density bound sits above the default grid cap
          if (kn == "spike") c.eulerianRhoCap = 100.0;
          out.push_back(std::move(c));
        }
      break;
    }
    case Scenario::Supercritical: {
      const std::vector<Rung> ladder{{128, 1e-3}, {256, 1e-3}, {512, 1e-3}};
      out.push_back(make("pl050-compress", power(0.5), trig(0.0, -2.0), ladder, 2.0));
      out.push_back(make("zero-burgers", constant(0.0), trig(0.0, -0.5), ladder, 2.0));
      out.push_back(make("const1-compress", constant(1.0), trig(0.2, -0.5), ladder, 2.0));
      for (auto& c : out) c.densityStepFraction = 0.25;
      break;
    }
    case Scenario::MaxPrinciple: {
      const std::vector<Rung> ladder{{512, 1e-2}};
      Campaign small = make("const01-aligned", constant(0.1), aligned(0.3), ladder, 10.0);
      small.boundC0 = 1.0;
      out.push_back(small);
      const double l1 = l1_norm(power(0.1).build());
      Campaign twice = make("pl010-aligned", power(0.1), aligned(0.3), ladder, 10.0);
      twice.boundC0 = 2.0 * l1;
      out.push_back(twice);
      Campaign probe = make("pl010-boundary", power(0.1), aligned(0.3), {}, 10.0);
      probe.boundC0 = 1.0001 * l1;
      probe.runEulerian = probe.runLagrangian = false;
      out.push_back(probe);
      break;
    }
    case Scenario::BoundedKernel: {
      out.push_back(make("const1-wave", constant(1.0), trig(0.0, 0.1), {{512, 1e-2}}, 10.0));
      Campaign tab = make("spike-bump", spike(), trig(0.3, 0.05), {}, 10.0);
      tab.runEulerian = tab.runLagrangian = false;
      out.push_back(tab);
      break;
    }
    case Scenario::CrossValidate: {
      const std::vector<Rung> ladder{{128, 1e-2}, {256, 1e-2}, {512, 1e-2}};
      out.push_back(make("flat", constant(1.0), trig(0.0, 0.0), ladder, 5.0));
      out.push_back(make("pl050-wave", power(0.5), trig(0.0, 0.1), ladder, 5.0));
      out.push_back(make("const1-bump", constant(1.0), trig(0.3, 0.05), ladder, 5.0));
      break;
    }
    case Scenario::BlowupRefinement: {
      const std::vector<Rung> ladder{{128, 1e-3}, {256, 1e-3}, {512, 1e-3}};
      out.push_back(make("pl050-compress", power(0.5), trig(0.0, -2.0), ladder, 2.0));
      out.push_back(make("zero-burgers", constant(0.0), trig(0.0, -0.5), ladder, 2.0));
      for (auto& c : out) c.densityStepFraction = 0.25;
      break;
    }
  }
  return out;
}

}  // namespace ealign::harness
