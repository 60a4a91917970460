// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// all of them pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ealign/bounds.hpp"
#include "ealign/cli.hpp"
#include "ealign/eulerian.hpp"
#include "ealign/harness.hpp"
#include "ealign/initial_data.hpp"
#include "ealign/lagrangian.hpp"
#include "property_checks.hpp"

using namespace ealign;
using namespace ealign::harness;

namespace {

struct Verdict {
  bool ok = true;
  std::string summary;
  std::vector<std::string> notes;  // printed under the criterion line
};

using Clock = std::chrono::steady_clock;

std::string g(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

// Lists failed assertions of failed reports.
void collect_failures(const std::vector<VerificationReport>& reports, Verdict& v) {
  for (const auto& r : reports) {
    if (r.passed()) continue;
    v.ok = false;
    for (const auto& a : r.assertions)
      if (!a.passed)
        v.notes.push_back(r.campaign + " " + a.name + ": measured " + g(a.measured, 10) + ", bound " + g(a.bound, 10));
  }
}

Verdict headline() {
  Verdict v;
  const char* argv[] = {"ealign", "bound", "--alpha", "0.5", "--mass", "1", "--c0", "1", "--json"};
  std::ostringstream out, err;
  const int code = cli::dispatch(9, argv, out, err);
  if (code != 0) return {false, "bound exited with " + std::to_string(code), {err.str()}};
  const auto j = nlohmann::json::parse(out.str());
  const double beta = j.at("beta"), num = j.at("beta_numeric"), kStar = j.at("k_star"), k0 = j.at("k0");
  const double gap = std::fabs(num - beta) / beta;
  v.ok = beta == 16.0 && gap <= 1e-6 && kStar == 8.0 && k0 == 4.0 && j.at("regime") == "OptimizedAnalytic";
  v.summary = "beta " + g(beta, 17) + ", numeric gap " + g(gap, 3) + ", k* " + g(kStar, 17) + ", k0 " + g(k0, 17);
  return v;
}

Verdict analytic_numeric_grid() {
  Verdict v;
  double worst = 0.0;
  int checked = 0, flagged = 0;
  for (double alpha : {0.1, 0.25, 0.5, 0.75, 0.9})
    for (double c0 : {0.2, 0.5, 1.0})
      for (double M : {1.0, 3.0}) {
        std::string why;
        const auto a = beta_analytic_powerlaw(alpha, M, c0, &why);
        if (!a) {
          ++flagged;
          v.notes.push_back("flagged alpha=" + g(alpha) + " C0=" + g(c0) + " M=" + g(M) + ": " + why);
          continue;
        }
        const double num = minimize_g({M, c0, Kernel::power_law(alpha), 0.0, 0.0}).beta;
        worst = std::max(worst, std::fabs(num - a->beta) / a->beta);
        ++checked;
      }
  v.ok = worst <= 1e-6 && checked + flagged == 30;
  v.summary = std::to_string(checked) + " cells compared, " + std::to_string(flagged) + " flagged, worst gap " + g(worst, 3);
  return v;
}

Verdict case_table() {
  Verdict v;
  // (a) C0 > ||psi||_1
  const auto mp = run_campaigns(preset_matrix(Scenario::MaxPrinciple));
  collect_failures(mp, v);
  double worstRatio = 0.0;
  int simulated = 0;
  for (const auto& r : mp) {
    if (r.quantities.at("beta") != 0.0) v.ok = false;
    for (const auto& rung : r.rungs) {
      if (rung.rung.resolution != 512) continue;
      ++simulated;
      worstRatio = std::max(worstRatio, rung.rhoInf / r.quantities.at("rho0_sup"));
    }
  }
  if (simulated == 0 || worstRatio > 1.02) v.ok = false;

  // (b) bounded kernels, formulas compared bit for bit
  const auto bk = run_campaigns(preset_matrix(Scenario::BoundedKernel));
  collect_failures(bk, v);
  int exact = 0;
  for (double sup : {0.5, 1.0, 2.0, 10.0})
    for (double M : {1.0, 3.0})
      for (double c0 : {0.1, 0.3, 0.5}) {
        const auto k = Kernel::constant(sup);
        if (c0 > l1_norm(k)) continue;
        const auto r = bound_report({M, c0, k, M, 0.0});
        if (r.beta != M * sup / c0 || r.gamma != M * sup || r.regime != Regime::BoundedKernel) v.ok = false;
        ++exact;
      }
  v.summary = std::to_string(mp.size()) + " max-principle campaigns (sup rho/rho0 at 512: " + g(worstRatio, 8) +
              "), " + std::to_string(bk.size()) + " bounded-kernel campaigns, " + std::to_string(exact) +
              " bit-exact formula checks";
  return v;
}

Verdict subcritical(std::vector<VerificationReport>& reports) {
  Verdict v;
  const auto campaigns = preset_matrix(Scenario::Subcritical);
  for (const auto& c : campaigns)
    if (c.ladder.back().resolution != 512 || c.tEnd != 10.0 || c.tol.rho != 0.05 || c.tol.G != 0.05) v.ok = false;
  reports = run_campaigns(campaigns);
  collect_failures(reports, v);
  double rhoMargin = 0.0, gMargin = 0.0;
  for (const auto& r : reports)
    for (const auto& a : r.assertions) {
      if (a.name.rfind("rho_bound/", 0) == 0) rhoMargin = std::max(rhoMargin, a.measured / a.bound);
      if (a.name.rfind("G_bound/", 0) == 0) gMargin = std::max(gMargin, a.measured / a.bound);
    }
  v.summary = std::to_string(reports.size()) + " campaigns x 2 solvers at 512; worst rho/bound " + g(rhoMargin, 4) +
              ", worst G/bound " + g(gMargin, 4);
  return v;
}

Verdict supercritical(const std::vector<VerificationReport>& sub) {
  Verdict v;
  const auto campaigns = preset_matrix(Scenario::Supercritical);
  const auto reports = run_campaigns(campaigns);
  collect_failures(reports, v);
  double worstSpread = 0.0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (campaigns[i].rhoCap != 1e6) v.ok = false;
    for (const auto& rung : reports[i].rungs) {
      if (!rung.tHit) {
        v.ok = false;
        v.notes.push_back(reports[i].campaign + " " + rung.solver + "@" + std::to_string(rung.rung.resolution) +
                          " never reached the cap");
      }
    }
    for (const auto& a : reports[i].assertions)
      if (a.name.rfind("hit_spread/", 0) == 0) worstSpread = std::max(worstSpread, a.measured);
    std::string line = reports[i].campaign + ":";
    for (const auto& rung : reports[i].rungs)
      if (rung.tHit) line += " " + rung.solver.substr(0, 3) + "@" + std::to_string(rung.rung.resolution) + "=" + g(*rung.tHit, 7);
    v.notes.push_back(line);
  }
  int capped = 0;
  for (const auto& r : sub)
    for (const auto& rung : r.rungs)
      if (hit_cap(rung.outcome)) ++capped;
  if (capped > 0 || sub.empty()) v.ok = false;
  v.summary = std::to_string(reports.size()) + " supercritical campaigns hit the cap on every rung (particles at 1e6, "
              "grid at its reachable cap), worst finest-rung spread " + g(worstSpread, 3) + "; subcritical cap hits: " +
              std::to_string(capped);
  return v;
}

PresetSpec smooth_preset() { return {PresetKind::Trig, 1.0, 0.3, 0.1, 0.0}; }

Verdict ratio_invariant(double& momentumDrift) {
  const auto k = Kernel::power_law(0.5);
  const auto d = make_initial_data(smooth_preset(), k);
  lagrangian::IntegrateOptions opt;
  opt.dt = 1e-3;
  opt.tEnd = 5.0;
  const auto tr = lagrangian::integrate(lagrangian::seed_particles(d.rho0, d.u0, d.G0, 256), k, opt);
  momentumDrift = tr.maxMomentumDrift;
  Verdict v;
  v.ok = tr.outcome == Outcome::CompletedGlobal && tr.maxRatioDrift <= 1e-6;
  v.summary = "max_i |G/rho - G0/rho0| = " + g(tr.maxRatioDrift, 3) + " (n=256, dt=1e-3, tEnd=5)";
  return v;
}

Verdict conservation(double lagrangianMomentum, const std::vector<VerificationReport>& sub) {
  Verdict v;
  const auto k = Kernel::power_law(0.5);
  PresetSpec spec = smooth_preset();
  spec.uShift = 0.3;  // nonzero momentum
  const auto d = make_initial_data(spec, k);
  eulerian::SimConfig cfg;
  cfg.N = 512;
  cfg.order = 2;
  cfg.tEnd = 10.0;
  const auto run = eulerian::run(cfg, sample_cells(d.rho0, 512), sample_cells(d.u0, 512), k);
  double mass = 0.0, mom = 0.0;
  for (const auto& s : run.samples) {
    mass = std::max(mass, s.massDrift);
    mom = std::max(mom, s.momentumDrift);
  }
  // and every 512-cell run of the subcritical matrix
  double subMass = 0.0, subMom = 0.0, subLag = 0.0;
  for (const auto& r : sub)
    for (const auto& rung : r.rungs) {
      if (rung.solver == "eulerian" && rung.rung.resolution == 512) {
        subMass = std::max(subMass, rung.massDrift);
        subMom = std::max(subMom, rung.momentumDrift);
      }
      if (rung.solver == "lagrangian") subLag = std::max(subLag, rung.momentumDrift);
    }
  v.ok = run.outcome == Outcome::CompletedGlobal && mass <= 1e-12 && mom <= 1e-6 && subMass <= 1e-12 &&
         subMom <= 1e-6 && lagrangianMomentum <= 1e-10 && subLag <= 1e-10;
  v.summary = "eulerian N=512 mass " + g(std::max(mass, subMass), 3) + ", momentum " + g(std::max(mom, subMom), 3) +
              "; lagrangian momentum " + g(std::max(lagrangianMomentum, subLag), 3);
  return v;
}

Verdict property_suite() {
  Verdict v;
  int checks = 0;
  auto take = [&](const std::string& name, const props::Check& c) {
    ++checks;
    if (!c.ok) {
      v.ok = false;
      v.notes.push_back(name + " failed (" + c.detail + ", worst " + g(c.worst, 3) + ")");
    }
  };
  double convWorst = 0.0;
  for (const auto& k : props::oracle_kernels()) {
    take("level-set monotonicity " + k.name, props::level_set_monotone(k.kernel));
    take("I(0) = l1 " + k.name, props::level_set_at_zero(k));
    const auto c = props::convolution_oracle(k);
    convWorst = std::max(convWorst, c.worst);
    take("convolution oracle " + k.name, c);
  }
  for (double alpha : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    for (double c0 : {0.2, 0.5, 1.0}) {
      const BoundInputs in{1.0, c0, Kernel::power_law(alpha), 0.0, 0.0};
      take("g endpoint blow-up", props::g_endpoint_blowup(in));
      take("beta <= g on scan", props::beta_below_scan(in));
      take("beta linear in M", props::beta_linear_in_mass(in.kernel, c0));
    }
    take("C0 scaling", props::beta_c0_scaling(alpha));
  }
  v.summary = std::to_string(checks) + " property checks, convolution oracle gap " + g(convWorst, 3);
  return v;
}

struct Criterion {
  int id;
  std::string title;
  double limitSeconds;  // 0: no runtime limit
  std::function<Verdict()> body;
};

}  // namespace

int main() {
  std::vector<VerificationReport> subReports;
  double lagMomentum = 1e300;
  const std::vector<Criterion> criteria{
      {1, "headline closed-form bound", 1.0, headline},
      {2, "analytic and numeric beta agree", 10.0, analytic_numeric_grid},
      {3, "regime case table", 120.0, case_table},
      {4, "subcritical bounds on both solvers", 600.0, [&] { return subcritical(subReports); }},
      {5, "blow-up dichotomy", 600.0, [&] { return supercritical(subReports); }},
      {6, "ratio invariant along particle paths", 60.0, [&] { return ratio_invariant(lagMomentum); }},
      {7, "conservation", 0.0, [&] { return conservation(lagMomentum, subReports); }},
      {8, "property suite", 30.0, property_suite},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what(), {}};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (c.limitSeconds > 0.0 && secs > c.limitSeconds) {
      v.ok = false;
      v.notes.push_back("runtime " + g(secs, 3) + " s exceeds " + g(c.limitSeconds) + " s");
    }
    failed += v.ok ? 0 : 1;
    std::printf("criterion %d: %s  %s: %s [%.2f s]\n", c.id, v.ok ? "PASS" : "FAIL", c.title.c_str(),
                v.summary.c_str(), secs);
    for (const auto& n : v.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
