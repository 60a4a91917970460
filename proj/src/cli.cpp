#include "ealign/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ealign/bounds.hpp"
#include "ealign/config.hpp"
#include "ealign/csv.hpp"
#include "ealign/errors.hpp"
#include "ealign/eulerian.hpp"
#include "ealign/harness.hpp"
#include "ealign/initial_data.hpp"
#include "ealign/lagrangian.hpp"

namespace ealign::cli {
namespace {

using nlohmann::json;

struct BoundArgs {
  std::optional<double> alpha, constant, mass, c0, rho0Sup, g0Sup;
  std::string config, csv;
  bool json = false;
};

struct SimulateArgs {
  std::string config, scheme;
};

struct VerifyArgs {
  std::string scenario, config, campaign, report;
};

struct SweepArgs {
  std::vector<double> alphas{0.1, 0.25, 0.5, 0.75, 0.9};
  std::vector<double> constants;
  std::vector<double> masses{1.0, 3.0};
  std::vector<double> c0s{0.2, 0.5, 1.0};
  std::string csv;
};

struct CompareArgs {
  std::string config, report;
};

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigErrorList& e) {
    err << "config error:\n";
    for (const auto& m : e.errors()) err << "  - " << m << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalAbort& e) {
    err << "numerical abort: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : std::string("n/a"); }

int run_bound(const BoundArgs& a, std::ostream& out) {
  std::optional<RunConfig> cfg;
  if (!a.config.empty()) cfg = parse_config(a.config);

  std::optional<Kernel> kernel;
  std::string label;
  if (a.alpha) {
    kernel = Kernel::power_law(*a.alpha);
    label = "alpha=" + format_double(*a.alpha);
  } else if (a.constant) {
    kernel = Kernel::constant(*a.constant);
    label = "constant=" + format_double(*a.constant);
  } else if (cfg) {
    kernel = cfg->kernel.build();
    label = cfg->kernel.label();
  } else {
    throw ConfigError("bound needs --alpha, --constant or --config");
  }

  std::optional<InitialData> data;
  if (cfg) data = make_initial_data(cfg->data, *kernel);
  auto pick = [&](const std::optional<double>& flag, const std::optional<double>& block,
                  std::optional<double> derived) -> std::optional<double> {
    if (flag) return flag;
    if (block) return block;
    return derived;
  };
  BoundInputs in{1.0, 1.0, *kernel, 0.0, 0.0};
  in.mass = pick(a.mass, cfg ? cfg->bound.mass : std::nullopt, data ? std::optional(data->mass) : std::nullopt)
                .value_or(1.0);
  const auto c0 = pick(a.c0, cfg ? cfg->bound.c0 : std::nullopt, data ? std::optional(data->c0) : std::nullopt);
  if (!c0) throw ConfigError("bound needs --c0 (or a config with initial data)");
  in.c0 = *c0;
  in.rho0SupNorm = pick(a.rho0Sup, cfg ? cfg->bound.rho0Sup : std::nullopt,
                        data ? std::optional(data->rho0Sup) : std::nullopt)
                       .value_or(in.mass);
  in.g0SupNorm = pick(a.g0Sup, cfg ? cfg->bound.g0Sup : std::nullopt,
                      data ? std::optional(data->g0Sup) : std::nullopt)
                     .value_or(0.0);

  const BoundReport r = bound_report(in);
  const double l1 = l1_norm(*kernel);
  std::string analyticNote;
  if (const auto* pl = std::get_if<PowerLaw>(&kernel->variant()); pl && r.regime != Regime::MaxPrinciple) {
    std::string why;
    if (!beta_analytic_powerlaw(pl->alpha, in.mass, in.c0, &why)) analyticNote = why;
  }

  if (a.json) {
    json j{{"kernel", label},   {"M", in.mass},        {"C0", in.c0},         {"l1_norm", l1},
           {"beta", r.beta},    {"gamma", r.gamma},    {"rho_bound", r.rhoBound}, {"G_bound", r.gBound},
           {"regime", std::string(to_string(r.regime))}};
    j["k0"] = r.k0 ? json(*r.k0) : json(nullptr);
    j["k_star"] = r.kStar ? json(*r.kStar) : json(nullptr);
    j["beta_numeric"] = r.betaNumeric ? json(*r.betaNumeric) : json(nullptr);
    if (!analyticNote.empty()) j["analytic_status"] = analyticNote;
    out << j.dump(2) << "\n";
  } else {
    out << "kernel       " << label << "\n"
        << "regime       " << to_string(r.regime) << "\n"
        << "M            " << format_double(in.mass) << "\n"
        << "C0           " << format_double(in.c0) << "\n"
        << "l1_norm      " << format_double(l1) << "\n"
        << "k0           " << opt_str(r.k0) << "\n"
        << "k_star       " << opt_str(r.kStar) << "\n"
        << "beta         " << format_double(r.beta) << "\n";
    if (r.betaNumeric) out << "beta_numeric " << format_double(*r.betaNumeric) << "\n";
    out << "gamma        " << format_double(r.gamma) << "\n"
        << "rho_bound    " << format_double(r.rhoBound) << "\n"
        << "G_bound      " << format_double(r.gBound) << "\n";
    if (!analyticNote.empty()) out << "analytic     unavailable: " << analyticNote << "\n";
  }

  if (!a.csv.empty()) {
    CsvTable t{{"kernel", "M", "C0", "l1_norm", "k0", "k_star", "beta", "gamma", "regime", "beta_numeric"}, {}};
    auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    t.add_row({label, format_double(in.mass), format_double(in.c0), format_double(l1), cell(r.k0), cell(r.kStar),
               format_double(r.beta), format_double(r.gamma), std::string(to_string(r.regime)),
               cell(r.betaNumeric)});
    write_csv(std::filesystem::path(a.csv), t);
  }
  return kExitOk;
}

void print_bounds_if_subcritical(const Kernel& k, const InitialData& d, const RunConfig& cfg, std::ostream& out) {
  const double c0 = cfg.bound.c0.value_or(d.c0);
  if (!(c0 > 0.0)) {
    out << "inf G0       " << format_double(d.infG0) << " (no uniform bound, blow-up expected)\n";
    return;
  }
  const BoundReport b = bound_report(BoundInputs{cfg.bound.mass.value_or(d.mass), c0, k,
                                                 cfg.bound.rho0Sup.value_or(d.rho0Sup),
                                                 cfg.bound.g0Sup.value_or(d.g0Sup)});
  out << "rho_bound    " << format_double(b.rhoBound) << "\n"
      << "G_bound      " << format_double(b.gBound) << "\n";
}

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  RunConfig cfg = parse_config(a.config);
  if (!a.scheme.empty()) cfg.solver.scheme = a.scheme;
  const Kernel k = cfg.kernel.build();
  const InitialData d = make_initial_data(cfg.data, k);
  out << "scheme       " << cfg.solver.scheme << "\n"
      << "kernel       " << cfg.kernel.label() << "\n"
      << "C0           " << format_double(d.c0) << "\n";

  if (cfg.solver.scheme == "eulerian") {
    eulerian::SimConfig sc;
    sc.N = cfg.solver.N;
    sc.cflNumber = cfg.solver.cfl;
    sc.tEnd = cfg.solver.tEnd;
    sc.order = cfg.solver.order;
    sc.rhoCap = cfg.solver.rhoCap;
    sc.gFloor = cfg.solver.gFloor;
    sc.dtMax = cfg.solver.dtMax;
    sc.outputStride = cfg.output.stride;
    sc.snapshotTimes = cfg.output.snapshotTimes;
    const auto run = eulerian::run(sc, sample_cells(d.rho0, sc.N), sample_cells(d.u0, sc.N), k);
    if (!cfg.output.diagnosticsCsv.empty()) write_csv(std::filesystem::path(cfg.output.diagnosticsCsv), diagnostics_table(run));
    if (!cfg.output.snapshotCsv.empty()) write_csv(std::filesystem::path(cfg.output.snapshotCsv), snapshot_table(run.snapshots));
    out << "outcome      " << to_string(run.outcome) << "\n";
    if (run.tHit) out << "t_hit        " << format_double(*run.tHit) << "\n";
    out << "t_final      " << format_double(run.final.t) << "\n"
        << "steps        " << run.steps << "\n"
        << "rho_inf_max  " << format_double(run.runningRhoInf) << "\n"
        << "G_inf_max    " << format_double(run.runningGInf) << "\n"
        << "mass_drift   " << format_double(run.samples.back().massDrift) << "\n"
        << "momentum_drift " << format_double(run.samples.back().momentumDrift) << "\n";
  } else {
    const std::size_t n = cfg.solver.n.value_or(cfg.solver.N);
    const auto sys = lagrangian::seed_particles(d.rho0, d.u0, d.G0, n);
    lagrangian::IntegrateOptions opt;
    opt.dt = cfg.solver.dt;
    opt.tEnd = cfg.solver.tEnd;
    opt.rhoCap = cfg.solver.rhoCap;
    opt.recordStride = cfg.output.stride;
    opt.trajectoryStride = cfg.output.trajectoryCsv.empty() ? 0 : cfg.output.stride;
    const auto tr = lagrangian::integrate(sys, k, opt);
    if (!cfg.output.diagnosticsCsv.empty()) write_csv(std::filesystem::path(cfg.output.diagnosticsCsv), diagnostics_table(tr));
    if (!cfg.output.trajectoryCsv.empty()) write_csv(std::filesystem::path(cfg.output.trajectoryCsv), trajectory_table(tr));
    out << "outcome      " << to_string(tr.outcome) << "\n";
    if (tr.tHit) out << "t_hit        " << format_double(*tr.tHit) << "\n";
    out << "substeps     " << tr.substeps << "\n"
        << "rho_max      " << format_double(tr.runningRhoMax) << "\n"
        << "G_inf_max    " << format_double(tr.runningGInf) << "\n"
        << "ratio_drift  " << format_double(tr.maxRatioDrift) << "\n"
        << "momentum_drift " << format_double(tr.maxMomentumDrift) << "\n"
        << "degeneracies " << tr.degeneracyEvents << "\n";
  }
  print_bounds_if_subcritical(k, d, cfg, out);
  return kExitOk;
}

// A campaign over the config's kernel and data, with a ladder ending at the configured resolution.
harness::Campaign campaign_from_config(const RunConfig& cfg, harness::Scenario s, const std::string& name) {
  harness::Campaign c;
  c.name = name;
  c.scenario = s;
  c.kernel = cfg.kernel;
  c.data = cfg.data;
  c.tEnd = cfg.solver.tEnd;
  c.order = cfg.solver.order;
  c.cfl = cfg.solver.cfl;
  c.rhoCap = cfg.solver.rhoCap;
  c.eulerianRhoCap = std::min(c.eulerianRhoCap, cfg.solver.rhoCap);
  c.boundC0 = cfg.bound.c0;
  const bool deep = s == harness::Scenario::Supercritical || s == harness::Scenario::CrossValidate ||
                    s == harness::Scenario::BlowupRefinement;
  const std::size_t N = cfg.solver.n.value_or(cfg.solver.N);
  for (std::size_t div : deep ? std::vector<std::size_t>{4, 2, 1} : std::vector<std::size_t>{2, 1})
    if (N / div >= 32 && (N / div) % 2 == 0) c.ladder.push_back(harness::Rung{N / div, cfg.solver.dt});
  return c;
}

int report_campaigns(const std::vector<harness::Campaign>& campaigns, const std::string& reportPath,
                     std::ostream& out) {
  const auto reports = harness::run_campaigns(campaigns);
  json all = json::array();
  std::size_t passed = 0;
  for (const auto& r : reports) {
    out << r.to_text();
    all.push_back(r.to_json());
    passed += r.passed() ? 1 : 0;
  }
  out << passed << "/" << reports.size() << " campaigns passed\n";
  if (!reportPath.empty()) write_json(reportPath, all);
  return passed == reports.size() ? kExitOk : kExitAssertion;
}

int run_verify(const VerifyArgs& a, std::ostream& out) {
  std::vector<harness::Campaign> campaigns;
  std::optional<harness::Scenario> scenario;
  if (!a.scenario.empty()) scenario = harness::scenario_from_string(a.scenario);
  if (!a.campaign.empty()) {
    std::ifstream in(a.campaign);
    if (!in) throw ConfigError("cannot open campaign file '" + a.campaign + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("campaign file is not valid JSON: ") + e.what());
    }
    for (const auto& item : j.is_array() ? j : json::array({j})) campaigns.push_back(harness::campaign_from_json(item));
    if (scenario)
      for (const auto& c : campaigns)
        if (c.scenario != *scenario) throw ConfigError("campaign '" + c.name + "' does not match --scenario");
  } else if (!scenario) {
    throw ConfigError("verify needs --scenario or --campaign");
  } else if (!a.config.empty()) {
    const RunConfig cfg = parse_config(a.config);
    campaigns.push_back(campaign_from_config(cfg, *scenario, std::filesystem::path(a.config).stem().string()));
  } else {
    campaigns = harness::preset_matrix(*scenario);
  }
  return report_campaigns(campaigns, a.report, out);
}

int run_sweep(const SweepArgs& a, std::ostream& out) {
  std::vector<KernelDescription> family;
  for (double alpha : a.alphas) {
    KernelDescription k;
    k.alpha = alpha;
    family.push_back(k);
  }
  for (double v : a.constants) {
    KernelDescription k;
    k.kind = "constant";
    k.supNorm = v;
    family.push_back(k);
  }
  for (const auto& k : family) (void)k.build();
  const CsvTable t = harness::sweep_beta_surface(family, a.masses, a.c0s);
  if (a.csv.empty())
    write_csv(out, t);
  else
    write_csv(std::filesystem::path(a.csv), t);
  return kExitOk;
}

int run_compare(const CompareArgs& a, std::ostream& out) {
  const RunConfig cfg = parse_config(a.config);
  const auto c = campaign_from_config(cfg, harness::Scenario::CrossValidate,
                                      std::filesystem::path(a.config).stem().string());
  return report_campaigns({c}, a.report, out);
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uniform bounds and simulations for the 1D Euler-alignment system on the torus", "ealign"};
  app.require_subcommand(1, 1);

  BoundArgs ba;
  auto* bound = app.add_subcommand("bound", "Compute beta, gamma, k0 and k* for a kernel and data constants");
  bound->add_option("--alpha", ba.alpha, "Power-law exponent, psi(r) = r^-alpha");
  bound->add_option("--constant", ba.constant, "Constant kernel value");
  bound->add_option("--mass", ba.mass, "Total mass M");
  bound->add_option("--c0", ba.c0, "C0 = inf G0/rho0");
  bound->add_option("--rho0-sup", ba.rho0Sup, "||rho0||_inf (defaults to M)");
  bound->add_option("--g0-sup", ba.g0Sup, "||G0||_inf (defaults to 0)");
  bound->add_option("--config", ba.config, "Run config; kernel and data supply the defaults");
  bound->add_option("--csv", ba.csv, "Also write a one-row CSV");
  bound->add_flag("--json", ba.json, "Print JSON instead of text");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Run one solver from a config and write its CSV outputs");
  simulate->add_option("--config", sa.config, "Run config")->required();
  simulate->add_option("--scheme", sa.scheme, "Override solver.scheme")
      ->check(CLI::IsMember({"eulerian", "lagrangian"}));

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run verification campaigns; exit 0 iff every assertion passes");
  verify->add_option("--scenario", va.scenario,
                     "subcritical | supercritical | max_principle | bounded_kernel | cross_validate | "
                     "blowup_refinement");
  verify->add_option("--config", va.config, "Build one campaign from a run config instead of the preset matrix");
  verify->add_option("--campaign", va.campaign, "Campaign JSON (object or array)");
  verify->add_option("--report", va.report, "Write the structured report here");

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "Tabulate k0, k*, beta and gamma over kernel x M x C0 grids");
  sweep->add_option("--alphas", wa.alphas, "Power-law exponents")->delimiter(',');
  sweep->add_option("--constants", wa.constants, "Constant kernel values")->delimiter(',');
  sweep->add_option("--masses", wa.masses, "Masses M")->delimiter(',');
  sweep->add_option("--c0s", wa.c0s, "Values of C0")->delimiter(',');
  sweep->add_option("--csv", wa.csv, "Output path (stdout when omitted)");

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "Cross-validate the Eulerian and Lagrangian solvers on a config");
  compare->add_option("--config", ca.config, "Run config")->required();
  compare->add_option("--report", ca.report, "Write the structured report here");

  if (argc <= 1) {
    err << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << "\n" << app.help();
    return kExitUsage;
  }

  return guarded(err, [&] {
    if (*bound) return run_bound(ba, out);
    if (*simulate) return run_simulate(sa, out);
    if (*verify) return run_verify(va, out);
    if (*sweep) return run_sweep(wa, out);
    return run_compare(ca, out);
  });
}

}  // namespace ealign::cli
