// fusionlab: simulate causal-quantum protocols, test classical compatibility
// of fused observational/interventional data, evaluate witnesses.
//
// Exit codes: 0 success (Feasible), 2 Infeasible, 3 Unknown (also for a
// threshold search that hits an Unknown probe), 1 any error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fusionlab/classical.hpp"
#include "fusionlab/feasibility.hpp"
#include "fusionlab/quantum.hpp"
#include "fusionlab/scenario.hpp"
#include "fusionlab/tables.hpp"
#include "fusionlab/witness.hpp"
#include "manifest.hpp"

#ifndef FUSIONLAB_VERSION
#define FUSIONLAB_VERSION "unknown"
#endif

namespace fl = fusionlab;
using fusionlab::cli::RunManifest;

namespace {

constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUnknown = 3;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& t : split_list(s)) {
    try {
      out.push_back(std::stoi(t));
    } catch (const std::exception&) {
      throw fl::Error(fl::ErrorCode::InvalidArgument, "not an integer: '" + t + "'");
    }
  }
  return out;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw fl::Error(fl::ErrorCode::ParseError, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw fl::Error(fl::ErrorCode::ParseError, path + ": " + ex.what());
  }
}

bool is_swig_file(const nlohmann::json& j) { return j.contains("targets") && j.contains("probs"); }

std::string dir_of(const std::string& path) {
  const auto pos = path.find_last_of('/');
  return pos == std::string::npos ? "." : path.substr(0, pos);
}

/// Observables with at least one observable child.
std::vector<std::string> informative_targets(const fl::Scenario& s) {
  std::vector<std::string> out;
  for (const auto& o : s.observables)
    for (const auto& e : s.edges)
      if (e.from == o.name && s.is_observable(e.to)) {
        out.push_back(o.name);
        break;
      }
  return out;
}

std::string with_manifest(nlohmann::json j, const RunManifest& m) {
  j["manifest"] = m.embedded();
  return j.dump(2) + "\n";
}

/// Moves wall-clock fields out of a verdict so the output stays reproducible.
nlohmann::json strip_timing(nlohmann::json& verdict) {
  nlohmann::json t;
  if (verdict.contains("diagnostics") && verdict["diagnostics"].contains("runtime_seconds")) {
    t["solver_runtime_seconds"] = verdict["diagnostics"]["runtime_seconds"];
    verdict["diagnostics"].erase("runtime_seconds");
  }
  return t;
}

struct Options {
  // shared
  std::string out;
  double tol = 1e-8;
  double budget = 600.0;
  // simulate / sweep / threshold
  std::string protocol;
  double visibility = 1.0;
  std::string targets;
  bool swig = false;
  // sample
  std::string scenario;
  std::uint64_t seed = 0;
  std::string cardinalities;
  bool deterministic = false;
  // feasibility
  std::string solver;
  std::string bundle;
  std::string tables;
  int cardinality = 0;
  bool exact = false;
  int order = 2;
  std::size_t max_variables = 10'000'000;
  // witness / sweep
  std::string name;
  double from = 0.0, to = 1.0;
  int steps = 101;
  unsigned threads = 0;
  std::string svg;
  // threshold
  std::string test;
  double precision = 0.01;
  // interrupt
  std::vector<std::string> nodes;
};

int cmd_simulate(const Options& o, RunManifest& m) {
  const auto id = fl::parse_protocol(o.protocol);
  if (!(o.visibility >= 0.0 && o.visibility <= 1.0)) {
    throw fl::Error(fl::ErrorCode::OutOfRange, "visibility must lie in [0, 1]");
  }
  const auto model = fl::build_protocol({id, o.visibility});
  const auto targets = o.targets.empty() ? fl::default_targets(id) : split_list(o.targets);
  if (o.swig) {
    fl::cli::write_output(o.out, with_manifest(fl::swig_to_json(fl::generate_swig(model, targets)), m));
  } else {
    fl::cli::write_output(o.out, with_manifest(fl::bundle_to_json(fl::generate_bundle(model, targets)), m));
  }
  return 0;
}

int cmd_sample(const Options& o, RunManifest& m) {
  m.add_input(o.scenario);
  m.seed = o.seed;
  const auto s = fl::load_scenario(o.scenario);
  std::vector<int> cards = split_ints(o.cardinalities);
  if (cards.empty()) cards.assign(s.latents.size(), 2);
  std::mt19937_64 rng(o.seed);
  const auto model = fl::random_classical_model(s, cards, rng, o.deterministic);
  const auto targets = o.targets.empty() ? informative_targets(s) : split_list(o.targets);
  auto j = fl::bundle_to_json(fl::generate_bundle(model, targets));
  j["generating_model"] = fl::model_to_json(model);
  fl::cli::write_output(o.out, with_manifest(j, m));
  return 0;
}

int cmd_feasibility(const Options& o, RunManifest& m) {
  m.add_input(o.bundle);
  const auto solver = fl::parse_solver(o.solver);
  const auto j = read_json(o.bundle);
  std::optional<fl::Scenario> scenario;
  if (!o.scenario.empty()) {
    m.add_input(o.scenario);
    scenario = fl::load_scenario(o.scenario);
  }

  fl::FeasibilityVerdict v;
  if (is_swig_file(j)) {
    if (solver != fl::SolverId::Inflation) {
      throw fl::Error(fl::ErrorCode::InvalidArgument, "a full SWIG distribution can only be tested with inflation");
    }
    auto q = fl::swig_from_json(j);
    if (scenario) q.scenario = *scenario;
    fl::check_normalized(q);
    fl::InflationOptions io;
    io.order = o.order;
    io.tol = o.tol;
    io.max_variables = o.max_variables;
    v = fl::inflation_lp(q, io);
  } else {
    auto b = fl::bundle_from_json(j, dir_of(o.bundle));
    if (scenario) b.scenario = *scenario;
    fl::require_valid(b);
    switch (solver) {
      case fl::SolverId::Lp: {
        fl::LpOptions lo;
        lo.tol = o.tol;
        lo.exact = o.exact;
        lo.cardinality = o.cardinality;
        if (!o.tables.empty()) lo.tables = fl::select_tables(b, o.tables);
        v = fl::lp_membership(b, lo);
        break;
      }
      case fl::SolverId::Bnb: {
        fl::BnbOptions bo;
        bo.tol = o.tol;
        bo.budget_seconds = o.budget;
        bo.cardinalities = split_ints(o.cardinalities);
        if (!o.tables.empty()) b = b.subset(fl::select_tables(b, o.tables));
        v = fl::bb_feasibility(b, bo);
        break;
      }
      case fl::SolverId::Inflation: {
        fl::InflationOptions io;
        io.order = o.order;
        io.use_swig = o.swig;
        io.tol = o.tol;
        io.max_variables = o.max_variables;
        if (!o.tables.empty()) b = b.subset(fl::select_tables(b, o.tables));
        v = fl::inflation_lp(b, io);
        break;
      }
    }
  }
  auto vj = fl::verdict_to_json(v);
  const auto timing = strip_timing(vj);
  fl::cli::write_output(o.out, with_manifest(vj, m));
  fl::cli::write_run_record(o.out, m, timing);
  std::cerr << "verdict: " << fl::to_string(v.status) << "\n";
  switch (v.status) {
    case fl::Feasibility::Feasible: return 0;
    case fl::Feasibility::Infeasible: return kExitInfeasible;
    case fl::Feasibility::Unknown: return kExitUnknown;
  }
  return kExitError;
}

int cmd_witness(const Options& o, RunManifest& m) {
  m.add_input(o.bundle);
  const auto id = fl::parse_witness(o.name);
  const auto j = read_json(o.bundle);
  fl::WitnessReport r;
  if (is_swig_file(j)) {
    const auto q = fl::swig_from_json(j);
    r = id == fl::WitnessId::CHSH ? fl::eval_chsh_fritz(q)
        : id == fl::WitnessId::W  ? fl::eval_W(fl::bundle_from_swig(q))
                                  : fl::eval_D(fl::bundle_from_swig(q));
  } else {
    if (id == fl::WitnessId::CHSH) {
      throw fl::Error(fl::ErrorCode::MissingRegime, "CHSH needs a SWIG distribution (simulate --swig)");
    }
    const auto b = fl::bundle_from_json(j, dir_of(o.bundle));
    fl::require_valid(b);
    r = id == fl::WitnessId::W ? fl::eval_W(b) : fl::eval_D(b);
  }
  fl::cli::write_output(o.out, with_manifest(fl::report_to_json(r), m));
  return 0;
}

int cmd_sweep(const Options& o, RunManifest& m) {
  const auto res = fl::sweep(fl::parse_protocol(o.protocol), fl::parse_witness(o.name), o.from, o.to, o.steps,
                             o.threads);
  std::string csv = "# manifest: " + m.embedded().dump() + "\n";
  csv += "# noise model: " + res.noise_model + "\n";
  csv += "# crossings:";
  for (double c : res.crossings) csv += " " + fl::format17(c);
  csv += res.monotone ? "\n" : "\n# violation is not monotone in v\n";
  csv += fl::sweep_csv(res);
  fl::cli::write_output(o.out, csv);
  if (!o.svg.empty()) {
    std::string svg = fl::sweep_svg(res);
    svg.insert(svg.find('\n') + 1, "<!-- manifest: " + m.embedded().dump() + " -->\n");
    fl::cli::write_output(o.svg, svg);
  }
  std::size_t failed = 0;
  for (const auto& row : res.rows) failed += row.ok ? 0 : 1;
  if (failed) std::cerr << failed << " sweep point(s) failed, see the error column\n";
  return 0;
}

int cmd_threshold(const Options& o, RunManifest& m) {
  fl::ThresholdOptions to;
  to.precision = o.precision;
  to.tol = o.tol;
  to.budget_seconds = o.budget;
  to.inflation_order = o.order;
  to.use_swig = o.swig;
  const auto protocol = fl::parse_protocol(o.protocol);
  const auto solver = fl::parse_solver(o.test);
  try {
    auto r = fl::visibility_threshold(protocol, solver, to);
    auto j = fl::threshold_to_json(r);
    nlohmann::json timing = nlohmann::json::array();
    for (auto& p : j["probes"]) {
      timing.push_back({{"v", p["v"]}, {"runtime_seconds", p["runtime_seconds"]}});
      p.erase("runtime_seconds");
    }
    j["protocol"] = std::string(fl::to_string(protocol));
    j["test"] = std::string(fl::to_string(solver));
    fl::cli::write_output(o.out, with_manifest(j, m));
    fl::cli::write_run_record(o.out, m, timing);
    return 0;
  } catch (const fl::Error& e) {
    if (e.code() != fl::ErrorCode::NonMonotoneOrBudget) throw;
    nlohmann::json j{{"error", e.what()}, {"protocol", std::string(fl::to_string(protocol))},
                     {"test", std::string(fl::to_string(solver))}};
    fl::cli::write_output(o.out, with_manifest(j, m));
    std::cerr << e.what() << "\n";
    return kExitUnknown;
  }
}

int cmd_interrupt(const Options& o, RunManifest& m) {
  m.add_input(o.scenario);
  const auto s = fl::interrupt(fl::load_scenario(o.scenario), o.nodes);
  nlohmann::json j = s;
  fl::cli::write_output(o.out, with_manifest(j, m));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fusionlab: classical compatibility of fused observational and interventional data"};
  app.set_version_flag("--version", FUSIONLAB_VERSION);
  app.require_subcommand(1);
  Options o;

  auto add_out = [&](CLI::App* c) { c->add_option("--out,-o", o.out, "Output file ('-' or omitted: stdout)"); };

  auto* sim = app.add_subcommand("simulate", "Generate a data bundle (or SWIG distribution) from a protocol");
  sim->add_option("--protocol", o.protocol, "uc-relaxation | chain | fritz-edge-triangle")->required();
  sim->add_option("--visibility,-v", o.visibility, "Visibility of the entangled source in [0, 1]")
      ->capture_default_str();
  sim->add_option("--targets", o.targets, "Comma-separated intervention targets (default per protocol)");
  sim->add_flag("--swig", o.swig, "Write the full SWIG distribution instead of a bundle");
  add_out(sim);

  auto* sample = app.add_subcommand("sample", "Bundle from a random classical model of a scenario");
  sample->add_option("--scenario", o.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sample->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  sample->add_option("--cardinalities", o.cardinalities, "Latent sizes, comma-separated (default 2 each)");
  sample->add_option("--targets", o.targets, "Intervention targets (default: observables with observable children)");
  sample->add_flag("--deterministic", o.deterministic, "Deterministic responses");
  add_out(sample);

  auto* feas = app.add_subcommand("feasibility", "Decide classical compatibility of a bundle");
  feas->add_option("--solver", o.solver, "lp | bnb | inflation")->required();
  feas->add_option("--bundle", o.bundle, "Bundle JSON or full SWIG distribution JSON")
      ->required()
      ->check(CLI::ExistingFile);
  feas->add_option("--scenario", o.scenario, "Scenario JSON overriding the bundle's")->check(CLI::ExistingFile);
  feas->add_option("--tables", o.tables, "Table subset, e.g. obs,doA1,doB0");
  feas->add_option("--cardinality", o.cardinality, "lp: latent size of the returned model (0 = support)");
  feas->add_option("--cardinalities", o.cardinalities, "bnb: per-latent sizes, comma-separated");
  feas->add_flag("--exact", o.exact, "lp: rational arithmetic");
  feas->add_option("--order", o.order, "inflation order")->capture_default_str();
  feas->add_flag("--swig", o.swig, "inflation: pin the data through SWIG constraints");
  feas->add_option("--max-variables", o.max_variables, "inflation: cap on inflated outcomes")->capture_default_str();
  feas->add_option("--tol", o.tol, "Tolerance")->capture_default_str();
  feas->add_option("--budget", o.budget, "bnb: time budget in seconds")->capture_default_str();
  add_out(feas);

  auto* wit = app.add_subcommand("witness", "Evaluate a witness on a bundle or SWIG distribution");
  wit->add_option("--name", o.name, "W | D | CHSH")->required();
  wit->add_option("--bundle", o.bundle, "Bundle or SWIG JSON")->required()->check(CLI::ExistingFile);
  add_out(wit);

  auto* sw = app.add_subcommand("sweep", "Witness value against visibility");
  sw->add_option("--protocol", o.protocol, "Protocol")->required();
  sw->add_option("--witness,--name", o.name, "W | D | CHSH")->required();
  sw->add_option("--from", o.from, "First visibility")->capture_default_str();
  sw->add_option("--to", o.to, "Last visibility")->capture_default_str();
  sw->add_option("--steps", o.steps, "Grid points")->capture_default_str();
  sw->add_option("--threads", o.threads, "Workers (default FUSIONLAB_THREADS or 1)");
  sw->add_option("--svg", o.svg, "Also write a line plot");
  add_out(sw);

  auto* th = app.add_subcommand("threshold", "Bisect the visibility at which a solver's verdict flips");
  th->add_option("--protocol", o.protocol, "Protocol")->required();
  th->add_option("--test", o.test, "lp | bnb | inflation")->required();
  th->add_option("--precision", o.precision, "Bracket width")->capture_default_str();
  th->add_option("--order", o.order, "inflation order")->capture_default_str();
  th->add_flag("--swig", o.swig, "inflation: pin the data through SWIG constraints");
  th->add_option("--tol", o.tol, "Tolerance")->capture_default_str();
  th->add_option("--budget", o.budget, "bnb: time budget per probe in seconds")->capture_default_str();
  add_out(th);

  auto* intr = app.add_subcommand("interrupt", "Split nodes into outcome and setting (SWIG scenario)");
  intr->add_option("--scenario", o.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  intr->add_option("--node", o.nodes, "Node to interrupt (repeatable)")->required();
  add_out(intr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  RunManifest m;
  m.command = app.get_subcommands().front()->get_name();
  for (int i = 1; i < argc; ++i) m.args.emplace_back(argv[i]);
  m.version = FUSIONLAB_VERSION;
  m.started_utc = fl::cli::utc_now();
  const auto t0 = std::chrono::steady_clock::now();

  int rc = kExitError;
  try {
    if (sim->parsed()) rc = cmd_simulate(o, m);
    else if (sample->parsed()) rc = cmd_sample(o, m);
    else if (feas->parsed()) rc = cmd_feasibility(o, m);
    else if (wit->parsed()) rc = cmd_witness(o, m);
    else if (sw->parsed()) rc = cmd_sweep(o, m);
    else if (th->parsed()) rc = cmd_threshold(o, m);
    else if (intr->parsed()) rc = cmd_interrupt(o, m);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!feas->parsed() && !th->parsed()) fl::cli::write_run_record(o.out, m, nullptr);
  return rc;
}
