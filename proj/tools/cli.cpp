#include "cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>

#include <CLI11.hpp>

#include "dem/dem.hpp"

namespace dem::cli {
namespace {

namespace fs = std::filesystem;

struct SolveArgs {
  std::string spec;
  std::string out;
};

struct SimulateArgs {
  std::string spec;
  std::size_t count = 1;
  std::uint64_t seed = 1;
  std::string out = ".";
  bool full = false;
  unsigned jobs = 1;
};

struct VerifyArgs {
  std::string spec;
  std::size_t count = 100;
  std::uint64_t seed = 1;
  std::string mode = "plain";
  std::string check = "strict";
  std::string report;
  std::string anchors;
  unsigned jobs = 1;
};

struct BoundsArgs {
  std::int64_t a = 1;
  std::int64_t n = 1;
  std::int64_t m = 1;
  std::int64_t k = 0;
  double lambda = 0.0;
  double T = 1.0;
  double beta = 1.0;
  double b = 1.0;
  double gamma = 0.0;
  double x = 0.0;
  double c = 1.0;
  double t = 0.0;
  double L = 0.0;
  double C = 1.0;
  double delta = 0.0;
  double ga = 1.0;  // discrete Gronwall 'a'
};

void warn_lipschitz(const ProcessSpec& spec, std::ostream& err) {
  const double estimate = estimate_lipschitz_lower_bound(spec, 0x5eed);
  if (estimate > spec.lipschitz() * (1.0 + 1e-6) + 1e-12) {
    err << "warning: sampled Lipschitz lower bound " << estimate << " exceeds supplied L = "
        << spec.lipschitz() << '\n';
  }
}

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  const ProcessSpec spec = load_spec(args.spec);
  warn_lipschitz(spec, err);
  const DriftBound rt = compute_RT(spec);
  const OdeSolution sol = solve_ode(spec, rt.R, rt.T);
  const Admissibility adm = check_lambda_admissible(spec, rt.R, rt.T);

  std::ostream* summary = &out;
  if (args.out.empty()) {
    write_solution_csv(out, sol);
    summary = &err;
  } else {
    std::ofstream file(args.out);
    if (!file) throw SchemaError("cannot write '" + args.out + "'");
    write_solution_csv(file, sol);
  }
  auto& s = *summary;
  s << "R = " << rt.R << '\n'
    << "T = " << rt.T << '\n'
    << "sigma = " << sol.sigma() << '\n'
    << "margin = " << sol.constants().margin << '\n'
    << "lambda admissible: " << (adm.admissible ? "yes" : "no") << " (" << adm.inequality << ")\n";
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  const ProcessSpec spec = load_spec(args.spec);
  const auto plugin = resolve_process(spec);
  if (args.count < 1) throw SchemaError("--count must be at least 1");

  EnsembleOptions opts;
  opts.jobs = args.jobs;
  opts.simulation.keep_full_path = args.full;
  const OdeSolution sol = solve_ode(spec);
  opts.simulation.reference = &sol;
  const Ensemble ens = run_ensemble(*plugin, spec, args.count, args.seed, opts);

  fs::create_directories(args.out);
  for (std::size_t idx = 0; idx < ens.trajectories.size(); ++idx) {
    const auto& traj = ens.trajectories[idx];
    const fs::path path = fs::path(args.out) / ("trajectory_" + std::to_string(idx) + ".csv");
    std::ofstream file(path);
    if (!file) throw SchemaError("cannot write '" + path.string() + "'");
    write_trajectory_csv(file, traj);
    out << path.string() << ": seed=" << traj.seed << " stop_index=" << traj.stop_index
        << " sup_deviation=" << traj.sup_deviation.value_or(0.0)
        << " flagged_steps=" << traj.flag_totals.boundedness + traj.flag_totals.trend << '\n';
  }
  return kExitOk;
}

void print_summary(const VerificationReport& r, std::ostream& out) {
  out << "status: " << to_string(r.status) << '\n'
      << "mode: " << to_string(r.mode) << '\n'
      << "R = " << r.constants.R << ", T = " << r.constants.T << ", sigma = " << r.constants.sigma
      << '\n'
      << "lambda admissible: " << r.admissibility.inequality << '\n'
      << "envelope 3e^{LT} lambda n = " << r.theoretical_envelope << '\n'
      << "failure probability bound = " << r.failure_probability << '\n'
      << "failures: " << r.failure_count << " / " << r.count()
      << " (allowed fraction " << r.failure_probability_display() + r.sampling_slack << ")\n"
      << "martingale event failures: " << r.martingale_failure_count << '\n'
      << "hypothesis violations: " << r.hypothesis_violations << '\n'
      << "gronwall replay: " << r.replay_checked - r.replay_failures << " / " << r.replay_checked
      << " hold\n";
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  const ProcessSpec spec = load_spec(args.spec);
  warn_lipschitz(spec, err);
  const auto plugin = resolve_process(spec);
  if (args.count < 1) throw SchemaError("--count must be at least 1");

  VerifyOptions opts;
  opts.mode = parse_extension_mode(args.mode);
  if (args.check == "strict") {
    opts.check = CheckMode::kStrict;
  } else if (args.check == "proof") {
    opts.check = CheckMode::kProofStructure;
  } else {
    throw SchemaError("--check must be 'strict' or 'proof'");
  }
  opts.jobs = args.jobs;

  std::vector<VerificationReport> reports;
  if (args.anchors.empty()) {
    reports.push_back(verify(spec, *plugin, args.count, args.seed, opts));
  } else {
    reports = verify_multi_anchor(spec, *plugin, args.count, args.seed, load_anchors(args.anchors),
                                  opts);
  }

  bool all_passed = true;
  for (std::size_t idx = 0; idx < reports.size(); ++idx) {
    if (reports.size() > 1) out << "== anchor " << idx << '\n';
    print_summary(reports[idx], out);
    all_passed = all_passed && reports[idx].passed();
  }
  if (!args.report.empty()) {
    std::ofstream file(args.report);
    if (!file) throw SchemaError("cannot write '" + args.report + "'");
    if (reports.size() == 1) {
      file << to_json(reports.front()).dump(2) << '\n';
    } else {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& r : reports) list.push_back(to_json(r));
      file << list.dump(2) << '\n';
    }
  }
  return all_passed ? kExitOk : kExitVerificationFailed;
}

void add_bounds(CLI::App& app, BoundsArgs& b, std::ostream& out, std::function<void()>& action) {
  auto* bounds = app.add_subcommand("bounds", "Evaluate the probability and Gronwall bounds");
  bounds->require_subcommand(1);

  auto add = [&](const char* name, const char* help) { return bounds->add_subcommand(name, help); };

  auto* azuma = add("azuma", "2 exp(-t^2 / (2 m c^2))");
  azuma->add_option("--m", b.m)->required();
  azuma->add_option("--c", b.c)->required();
  azuma->add_option("--t", b.t)->required();
  azuma->callback([&] { action = [&] { out << azuma_bound(b.m, b.c, b.t) << '\n'; }; });

  auto* theorem = add("theorem", "2a exp(-n lambda^2 / (8 T beta^2))");
  theorem->add_option("--a", b.a)->required();
  theorem->add_option("--n", b.n)->required();
  theorem->add_option("--lambda", b.lambda)->required();
  theorem->add_option("--T", b.T)->required();
  theorem->add_option("--beta", b.beta)->required();
  theorem->callback([&] {
    action = [&] { out << theorem_failure_probability(b.a, b.n, b.lambda, b.T, b.beta) << '\n'; };
  });

  auto* freedman = add("freedman", "average one-step bound variant");
  freedman->add_option("--a", b.a)->required();
  freedman->add_option("--n", b.n)->required();
  freedman->add_option("--lambda", b.lambda)->required();
  freedman->add_option("--T", b.T)->required();
  freedman->add_option("--beta", b.beta)->required();
  freedman->add_option("--b", b.b)->required();
  freedman->callback([&] {
    action = [&] {
      out << freedman_failure_probability(b.a, b.n, b.lambda, b.T, b.beta, b.b) << '\n'
          << "two-term: " << freedman_two_term_probability(b.a, b.n, b.lambda, b.T, b.beta, b.b)
          << '\n';
    };
  });

  auto* truncated = add("truncated", "truncated large-step variant");
  truncated->add_option("--a", b.a)->required();
  truncated->add_option("--n", b.n)->required();
  truncated->add_option("--lambda", b.lambda)->required();
  truncated->add_option("--T", b.T)->required();
  truncated->add_option("--beta", b.beta)->required();
  truncated->add_option("--gamma", b.gamma)->required();
  truncated->add_option("--x", b.x)->required();
  truncated->callback([&] {
    action = [&] {
      out << truncated_failure_probability(b.a, b.n, b.lambda, b.T, b.beta, b.gamma, b.x)
          << '\n';
    };
  });

  auto* binomial = add("binomial", "exact Pr(Bin(m, gamma) >= k)");
  binomial->add_option("--m", b.m)->required();
  binomial->add_option("--gamma", b.gamma)->required();
  binomial->add_option("--k", b.k)->required();
  binomial->callback([&] { action = [&] { out << binomial_tail(b.m, b.gamma, b.k) << '\n'; }; });

  auto* gd = add("gronwall-discrete", "(c + b min{m, 1/a}) e^{am}");
  gd->add_option("--c", b.C)->required();
  gd->add_option("--b", b.b)->required();
  gd->add_option("--a", b.ga)->required();
  gd->add_option("--m", b.m)->required();
  gd->callback([&] {
    action = [&] { out << gronwall_discrete_bound({b.C, b.b, b.ga, b.m}) << '\n'; };
  });

  auto* gc = add("gronwall-continuous", "C e^{Lt}");
  gc->add_option("--C", b.C)->required();
  gc->add_option("--L", b.L)->required();
  gc->add_option("--t", b.t)->required();
  gc->callback([&] { action = [&] { out << gronwall_continuous_bound(b.C, b.L, b.t) << '\n'; }; });

  auto* st = add("stability", "(lambda + delta T) e^{LT}");
  st->add_option("--lambda", b.lambda)->required();
  st->add_option("--delta", b.delta)->required();
  st->add_option("--L", b.L)->required();
  st->add_option("--T", b.T)->required();
  st->callback([&] {
    action = [&] { out << stability_bound(b.lambda, b.delta, b.L, b.T) << '\n'; };
  });

  auto* env = add("envelope", "lambda + int_0^t delta(s) ds for constant delta");
  env->add_option("--lambda", b.lambda)->required();
  env->add_option("--delta", b.delta)->required();
  env->add_option("--t", b.t)->required();
  env->callback([&] {
    action = [&] {
      const double d = b.delta;
      out << error_envelope(b.lambda, [d](double) { return d; }, b.t) << '\n';
    };
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differential equation method toolkit: ODE limits, bounds, simulation, verification",
               "dem"};
  app.require_subcommand(1);

  std::function<void()> action;
  int status = kExitOk;

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve the limiting ODE and print R, T, sigma");
  solve->add_option("spec", solve_args.spec, "Spec JSON file")->required();
  solve->add_option("--out", solve_args.out, "CSV output file (default: stdout)");
  solve->callback([&] { action = [&] { status = cmd_solve(solve_args, out, err); }; });

  SimulateArgs sim_args;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate trajectories to CSV files");
  simulate_cmd->add_option("spec", sim_args.spec, "Spec JSON file")->required();
  simulate_cmd->add_option("--count", sim_args.count, "Number of trajectories");
  simulate_cmd->add_option("--seed", sim_args.seed, "Base seed");
  simulate_cmd->add_option("--out", sim_args.out, "Output directory");
  simulate_cmd->add_flag("--full", sim_args.full, "Keep every step instead of a thinned path");
  simulate_cmd->add_option("--jobs", sim_args.jobs, "Worker threads");
  simulate_cmd->callback([&] { action = [&] { status = cmd_simulate(sim_args, out); }; });

  VerifyArgs ver_args;
  auto* verify_cmd = app.add_subcommand("verify", "Check the concentration guarantee empirically");
  verify_cmd->add_option("spec", ver_args.spec, "Spec JSON file")->required();
  verify_cmd->add_option("--count", ver_args.count, "Number of trajectories");
  verify_cmd->add_option("--seed", ver_args.seed, "Base seed");
  verify_cmd->add_option("--mode", ver_args.mode, "plain | side-events | averaged | truncated");
  verify_cmd->add_option("--check", ver_args.check, "strict | proof");
  verify_cmd->add_option("--report", ver_args.report, "JSON report output file");
  verify_cmd->add_option("--anchors", ver_args.anchors, "JSON file with extra anchors y_hat");
  verify_cmd->add_option("--jobs", ver_args.jobs, "Worker threads");
  verify_cmd->callback([&] { action = [&] { status = cmd_verify(ver_args, out, err); }; });

  BoundsArgs bounds_args;
  add_bounds(app, bounds_args, out, action);

  std::vector<const char*> argv{"dem"};
  for (const auto& a : args) argv.push_back(a.c_str());

  const auto old_precision = out.precision(12);
  const auto old_err_precision = err.precision(12);
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    out.precision(old_precision);
    err.precision(old_err_precision);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (action) action();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    status = kExitUsage;
  }
  out.precision(old_precision);
  err.precision(old_err_precision);
  return status;
}

}  // namespace dem::cli
