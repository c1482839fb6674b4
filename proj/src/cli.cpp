#include "pgas/cli.hpp"

#include "pgas/errors.hpp"
#include "pgas/format.hpp"
#include "pgas/harness.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <ostream>

namespace pgas::cli {

namespace {

std::vector<AlphaRule> parse_alphas(const std::vector<std::string>& raw) {
  std::vector<AlphaRule> rules;
  for (const std::string& s : raw) {
    if (s.empty()) throw ConfigError("empty entry in the alpha sweep list");
    rules.push_back(AlphaRule::parse(s));
  }
  if (rules.empty()) throw ConfigError("alpha sweep list is empty");
  return rules;
}

void add_generate_flags(CLI::App* cmd, GenerateParams& p) {
  cmd->add_option("--kind", p.kind, "Instance family: l1 or nonneg")
      ->check(CLI::IsMember({"l1", "nonneg"}));
  cmd->add_option("--n", p.n, "Dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--nnz", p.nnz,
                  "Nonzeros of x* (l1) or coordinates pinned at zero (nonneg)");
  cmd->add_option("--lambda", p.lambda, "L1 weight");
  cmd->add_option("--delta-target", p.delta_target, "Planted margin delta");
  cmd->add_option("--cond", p.cond, "Hessian condition number");
  cmd->add_option("--seed", p.seed, "Generator seed");
  cmd->add_option("--mu0", p.options.mu0, "Smallest Hessian eigenvalue");
  cmd->add_option("--radius", p.options.x0_radius_factor,
                  "x0 distance from x*, as a multiple of ||x*||");
}

void add_solver_flags(CLI::App* cmd, SolverConfig& c) {
  cmd->add_option("--max-iter", c.max_iter, "Iteration cap");
  cmd->add_option("--fp-tol", c.fixed_point_tol,
                  "Stop when ||x - pg_step(x)||_inf <= tol");
  cmd->add_flag("--allow-large-step", c.allow_large_step,
                "Permit alpha >= 2/L");
}

SpectralBounds bounds_for(const ProblemInstance& inst) {
  SpectralOptions so;
  so.seed = inst.seed;
  return spectral_bounds(inst.objective, so);
}

int exit_for(const ExperimentResult& r) {
  if (r.violations > 0) return kBoundViolation;
  if (r.degenerate_refused > 0) return kDegenerate;
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Proximal gradient active-set identification toolkit", "pgas"};
  app.require_subcommand(1);

  GenerateParams gen;
  SolverConfig solver;
  std::string out_path;
  std::string instance_path;
  std::string trace_path;
  std::string dir;
  std::vector<std::string> alpha_raw{"inv-l"};
  double stationarity_tol = kDefaultStationarityTol;
  bool allow_degenerate = false;
  bool write_traces = false;
  std::size_t reps = 1;

  auto* generate = app.add_subcommand("generate", "Write a synthetic instance");
  add_generate_flags(generate, gen);
  generate->add_option("--out", out_path, "Instance JSON path")->required();

  auto* solve_cmd = app.add_subcommand("solve", "Run proximal gradient on an instance");
  solve_cmd->add_option("--instance", instance_path)->required();
  solve_cmd->add_option("--alpha", alpha_raw, "inv-l | optimal | <c>/L | <float>");
  add_solver_flags(solve_cmd, solver);
  solve_cmd->add_option("--trace", trace_path, "Write the trace CSV here");
  solve_cmd->add_option("--out", out_path, "Write the final iterate as JSON");

  auto* analyze = app.add_subcommand(
      "analyze", "Active-set report, bounds and empirical identification");
  analyze->add_option("--instance", instance_path)->required();
  analyze->add_option("--alpha", alpha_raw, "Comma-separated step rules: inv-l, optimal, <c>/L, <float>")->delimiter(',');
  add_solver_flags(analyze, solver);
  analyze->add_option("--stationarity-tol", stationarity_tol, "Gradient tolerance on free smooth coordinates");
  analyze->add_flag("--allow-degenerate", allow_degenerate, "Solve degenerate instances instead of refusing");
  analyze->add_option("--out", out_path, "Write the report JSON here");

  auto* experiment = app.add_subcommand(
      "experiment", "Bound-versus-empirical sweep over seeds and step sizes");
  add_generate_flags(experiment, gen);
  experiment->add_option("--instance", instance_path,
                         "Use this instance instead of generating");
  experiment->add_option("--alpha", alpha_raw, "Comma-separated step rules: inv-l, optimal, <c>/L, <float>")->delimiter(',');
  experiment->add_option("--reps", reps, "Number of consecutive seeds");
  add_solver_flags(experiment, solver);
  experiment->add_option("--stationarity-tol", stationarity_tol, "Gradient tolerance on free smooth coordinates");
  experiment->add_flag("--allow-degenerate", allow_degenerate, "Solve degenerate instances instead of refusing");
  experiment->add_flag("--trace", write_traces, "Write per-run trace CSVs");
  experiment->add_option("--out", out_path, "Results directory")->required();

  auto* summarize = app.add_subcommand("summarize", "Aggregate a results directory");
  summarize->add_option("--dir", dir)->required();
  summarize->add_option("--out", out_path, "Write the table here");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (generate->parsed()) {
      const ProblemInstance inst = generate_instance(gen);
      save_instance(inst, out_path);
      out << "wrote " << out_path << " (n=" << gen.n << ", kind=" << gen.kind
          << ", seed=" << gen.seed << ")\n";
      return kSuccess;
    }

    if (solve_cmd->parsed()) {
      const ProblemInstance inst = load_instance(instance_path);
      const auto rules = parse_alphas(alpha_raw);
      if (rules.size() != 1) throw ConfigError("solve takes a single --alpha");
      solver.alpha = rules.front();
      const SpectralBounds sb = bounds_for(inst);
      std::optional<Reference> ref;
      if (inst.ground_truth)
        ref = Reference{inst.ground_truth->x_star, inst.ground_truth->active};
      const SolveTrace t =
          solve(inst.objective, inst.regularizer, inst.x0, solver, sb, ref);
      if (!trace_path.empty()) {
        std::ofstream os(trace_path);
        write_trace_csv(t, os);
      }
      const double obj = inst.objective.eval(t.final_x) +
                         inst.regularizer.eval(t.final_x);
      out << "alpha=" << format_double(t.alpha)
          << " iterations=" << t.iterations_run << " termination="
          << (t.termination == Termination::FixedPoint ? "fixed_point"
                                                       : "max_iter")
          << " objective=" << format_double(obj) << '\n';
      if (!out_path.empty()) {
        nlohmann::json j;
        j["alpha"] = t.alpha;
        j["iterations_run"] = t.iterations_run;
        j["termination"] =
            t.termination == Termination::FixedPoint ? "fixed_point" : "max_iter";
        j["x"] = std::vector<double>(t.final_x.begin(), t.final_x.end());
        std::ofstream os(out_path);
        os << j.dump(1) << '\n';
      }
      return kSuccess;
    }

    if (analyze->parsed() || experiment->parsed()) {
      ExperimentSpec spec;
      spec.generate = gen;
      spec.repetitions = reps;
      spec.solver = solver;
      spec.alphas = parse_alphas(alpha_raw);
      spec.stationarity_tol = stationarity_tol;
      spec.allow_degenerate = allow_degenerate;
      if (!instance_path.empty()) spec.instance_file = instance_path;
      if (experiment->parsed()) {
        spec.out_dir = out_path;
        spec.write_traces = write_traces;
        const ExperimentResult r = run_experiment(spec);
        out << r.runs.size() << " runs, " << r.degenerate_refused
            << " degenerate refused, " << r.violations << " violations; see "
            << out_path << "/summary.csv\n";
        return exit_for(r);
      }
      const ExperimentResult r = run_experiment(spec);
      std::string reports;
      for (const RunResult& run : r.runs) reports += run_to_json(run, solver) + "\n";
      if (out_path.empty()) {
        out << reports;
      } else {
        std::ofstream os(out_path);
        os << reports;
      }
      if (r.degenerate_refused > 0)
        err << "instance is degenerate (delta = "
            << format_double(r.runs.front().active.delta)
            << "); rerun with --allow-degenerate to solve anyway\n";
      return exit_for(r);
    }

    if (summarize->parsed()) {
      const SummaryTable table = report_summary(dir);
      for (const std::string& f : table.unreadable)
        err << "unreadable: " << f << '\n';
      if (out_path.empty()) {
        write_summary_table(table, out);
      } else {
        std::ofstream os(out_path);
        write_summary_table(table, os);
      }
      return kSuccess;
    }
  } catch (const DegenerateError& e) {
    err << "degenerate: " << e.what() << '\n';
    return kDegenerate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace pgas::cli
