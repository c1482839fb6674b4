#include "pgas/harness.hpp"

#include "pgas/errors.hpp"
#include "pgas/format.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace pgas {

using nlohmann::json;

ProblemInstance generate_instance(const GenerateParams& p) {
  if (p.kind == "l1")
    return generate_l1(p.n, p.nnz, p.lambda, p.delta_target, p.cond, p.seed,
                       p.options);
  if (p.kind == "nonneg")
    return generate_nonneg(p.n, p.nnz, p.delta_target, p.cond, p.seed,
                           p.options);
  throw ConfigError("unknown instance kind '" + p.kind +
                    "' (expected l1 or nonneg)");
}

Vector reference_solution(const ProblemInstance& inst,
                          const SpectralBounds& bounds,
                          const SolverConfig& config, std::string* source) {
  if (inst.ground_truth) {
    if (source) *source = "ground_truth";
    return inst.ground_truth->x_star;
  }
  SolverConfig cfg = config;
  cfg.alpha = AlphaRule::inverse_l();
  cfg.record_trace = false;
  cfg.keep_iterates = false;
  const SolveTrace t =
      solve(inst.objective, inst.regularizer, inst.x0, cfg, bounds);
  if (source) *source = "polished";
  return polish_solution(inst.objective, inst.regularizer, t.final_x);
}

double identification_radius_for(const AlphaRule& rule, double alpha,
                                 const SpectralBounds& bounds, double delta) {
  if (rule.kind() == AlphaRule::Kind::InverseL)
    return identification_radius_inv_l(bounds.L, delta);
  return identification_radius(alpha, delta);
}

TraceChecks check_trace(const SolveTrace& trace, const BoundReport& bounds,
                        const SpectralBounds& spectrum, bool inverse_l_step,
                        double radius) {
  TraceChecks c;
  const auto& rows = trace.rows;
  const double inv_l_rate = 1.0 - 1.0 / spectrum.kappa;
  for (std::size_t j = 0; j + 1 < rows.size(); ++j) {
    const double d = rows[j].dist_to_ref;
    const double d_next = rows[j + 1].dist_to_ref;
    const double slack = kContractionSlack * (1.0 + d);
    const double excess = d_next - (bounds.q * d + slack);
    if (excess > 0.0) {
      ++c.contraction_violations;
      c.worst_contraction_excess = std::max(c.worst_contraction_excess, excess);
    }
    if (inverse_l_step && d_next > inv_l_rate * d + slack)
      ++c.inv_l_rate_violations;
    if (d <= radius && !rows[j + 1].active_match) ++c.sufficiency_violations;
  }
  // Matching may occur transiently before the threshold is crossed; from the
  // step after the first crossing on it must hold on every row.
  bool crossed = false;
  bool matched = false;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (crossed && !rows[j].active_match) ++c.persistence_violations;
    if (matched && !rows[j].active_match) ++c.transient_matches;
    matched = rows[j].active_match;
    crossed = crossed || rows[j].dist_to_ref <= radius;
  }
  if (std::isfinite(bounds.bound_delta)) {
    const double from = std::ceil(bounds.bound_delta);
    for (const TraceRow& r : rows)
      if (static_cast<double>(r.k) >= from && r.free_on_kink)
        ++c.delta_cap_violations;
  }
  return c;
}

RunResult analyze_run(const ProblemInstance& inst, const Vector& x_star,
                      const ActiveSetReport& report,
                      const SpectralBounds& spectrum, const AlphaRule& rule,
                      const SolverConfig& config, bool allow_degenerate,
                      SolveTrace* trace_out) {
  RunResult r;
  r.seed = inst.seed;
  r.n = inst.objective.dimension();
  r.kind = std::string(inst.regularizer.kind_name());
  r.alpha_label = rule.label();
  r.spectrum = spectrum;
  r.active = report;
  r.degenerate = !report.nondegenerate;

  const double alpha = rule.resolve(spectrum);
  const double dist0 = (inst.x0 - x_star).norm();
  r.bounds = make_bound_report(report, spectrum, alpha, dist0);
  if (r.degenerate && !allow_degenerate) {
    r.skipped = true;
    return r;
  }

  SolverConfig cfg = config;
  cfg.alpha = rule;
  cfg.record_trace = true;
  SolveTrace trace = solve(inst.objective, inst.regularizer, inst.x0, cfg,
                           spectrum, Reference{x_star, report.active});
  r.iterations_run = trace.iterations_run;
  r.termination = trace.termination;

  const bool inv_l = rule.kind() == AlphaRule::Kind::InverseL;
  const double radius =
      identification_radius_for(rule, alpha, spectrum, report.delta);
  const Identification id = detect_identification(trace, radius);
  r.bounds.k_identified = id.first_match;
  r.bounds.k_threshold = id.threshold_cross;
  r.checks = check_trace(trace, r.bounds, spectrum, inv_l, radius);

  r.bound_satisfied = false;
  if (!r.degenerate && id.first_match) {
    const double k = static_cast<double>(*id.first_match);
    r.bound_satisfied = k <= std::ceil(r.bounds.bound_cor2) + 1.0;
    if (inv_l)
      r.bound_satisfied =
          r.bound_satisfied && k <= std::ceil(r.bounds.bound_cor1) + 1.0;
  }
  if (trace_out) *trace_out = std::move(trace);
  return r;
}

namespace {

json opt_index(const std::optional<std::size_t>& v) {
  if (v) return *v;
  return nullptr;
}

json real(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

std::string file_stem(const RunResult& run) {
  std::string label = run.alpha_label;
  std::string safe;
  for (char ch : label) {
    if (ch == '/')
      safe += "_over_";
    else
      safe += ch;
  }
  return "seed" + std::to_string(run.seed) + "_alpha" + safe;
}

std::string opt_to_csv(const std::optional<std::size_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double ratio(const json& j, const char* bound_key) {
  const double k = j.at("k_identified").get<double>();
  const json& b = j.at(bound_key);
  const double bound = b.is_number() ? b.get<double>() : parse_double(b.get<std::string>());
  return k / (std::ceil(bound) + 1.0);
}

}  // namespace

std::string run_to_json(const RunResult& run, const SolverConfig& config) {
  const BoundReport& b = run.bounds;
  json j;
  j["alpha"] = b.alpha;
  j["Q"] = b.q;
  j["delta"] = real(b.delta);
  j["Delta"] = real(b.delta_cap);
  j["bound_cor1"] = real(b.bound_cor1);
  j["bound_cor2"] = real(b.bound_cor2);
  j["bound_delta"] = real(b.bound_delta);
  j["k_identified"] = opt_index(b.k_identified);
  j["k_threshold"] = opt_index(b.k_threshold);
  j["dist0"] = b.dist0;

  j["Z"] = run.active.active;
  j["margins"] = json::array();
  for (double m : run.active.margins) j["margins"].push_back(real(m));
  j["nondegenerate"] = run.active.nondegenerate;
  j["smooth_residual"] = run.active.smooth_residual;

  j["seed"] = run.seed;
  j["n"] = run.n;
  j["kind"] = run.kind;
  j["alpha_rule"] = run.alpha_label;
  j["L"] = run.spectrum.L;
  j["mu"] = run.spectrum.mu;
  j["kappa"] = run.spectrum.kappa;
  j["spectral_mode"] =
      run.spectrum.mode == SpectralMode::Exact ? "exact" : "estimated";
  j["x_star_source"] = run.x_star_source;
  j["max_iter"] = config.max_iter;
  j["fp_tol"] = config.fixed_point_tol;

  j["degenerate"] = run.degenerate;
  j["skipped"] = run.skipped;
  j["bound_satisfied"] = run.bound_satisfied;
  j["iterations_run"] = run.iterations_run;
  j["termination"] =
      run.termination == Termination::FixedPoint ? "fixed_point" : "max_iter";
  j["checks"] = {
      {"contraction_violations", run.checks.contraction_violations},
      {"inv_l_rate_violations", run.checks.inv_l_rate_violations},
      {"sufficiency_violations", run.checks.sufficiency_violations},
      {"persistence_violations", run.checks.persistence_violations},
      {"transient_matches", run.checks.transient_matches},
      {"delta_cap_violations", run.checks.delta_cap_violations}};
  return j.dump(1);
}

void write_summary_row(const RunResult& run, std::ostream& os) {
  const BoundReport& b = run.bounds;
  os << run.seed << ',' << run.n << ',' << format_double(b.alpha) << ','
     << format_double(run.spectrum.L) << ',' << format_double(run.spectrum.mu)
     << ',' << format_double(run.spectrum.kappa) << ','
     << format_double(b.delta) << ',' << format_double(b.delta_cap) << ','
     << format_double(b.dist0) << ',' << format_double(b.bound_cor1) << ','
     << format_double(b.bound_cor2) << ',' << format_double(b.bound_delta)
     << ',' << opt_to_csv(b.k_identified) << ',' << opt_to_csv(b.k_threshold)
     << ',';
  if (run.skipped)
    os << "degenerate";
  else
    os << (run.bound_satisfied ? "true" : "false");
  os << '\n';
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.alphas.empty()) throw ConfigError("alpha sweep list is empty");
  if (spec.repetitions == 0) throw ConfigError("repetitions must be positive");

  if (!spec.out_dir.empty()) std::filesystem::create_directories(spec.out_dir);
  std::ofstream summary;
  if (!spec.out_dir.empty()) {
    summary.open(spec.out_dir / "summary.csv");
    if (!summary) throw ConfigError("cannot write summary.csv");
    summary << kSummaryHeader << '\n';
  }

  const std::size_t reps = spec.instance_file ? 1 : spec.repetitions;
  ExperimentResult out;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    ProblemInstance inst = [&] {
      if (spec.instance_file) return load_instance(*spec.instance_file);
      GenerateParams p = spec.generate;
      p.seed = spec.generate.seed + rep;
      return generate_instance(p);
    }();

    SpectralOptions so = spec.spectral;
    so.seed = inst.seed;
    const SpectralBounds spectrum = spectral_bounds(inst.objective, so);
    std::string source;
    const Vector x_star = reference_solution(inst, spectrum, spec.solver, &source);
    const ActiveSetReport report = check_nondegeneracy(
        inst.objective, inst.regularizer, x_star, spec.stationarity_tol);

    for (const AlphaRule& rule : spec.alphas) {
      SolveTrace trace;
      RunResult run = analyze_run(inst, x_star, report, spectrum, rule,
                                  spec.solver, spec.allow_degenerate, &trace);
      run.x_star_source = source;
      if (run.skipped) ++out.degenerate_refused;
      if (!run.degenerate && (!run.bound_satisfied || !run.checks.ok()))
        ++out.violations;

      if (!spec.out_dir.empty()) {
        const std::string stem = file_stem(run);
        std::ofstream js(spec.out_dir / ("run_" + stem + ".json"));
        js << run_to_json(run, spec.solver) << '\n';
        if (spec.write_traces && !run.skipped) {
          std::ofstream tr(spec.out_dir / ("trace_" + stem + ".csv"));
          write_trace_csv(trace, tr);
        }
        write_summary_row(run, summary);
      }
      out.runs.push_back(std::move(run));
    }
  }
  return out;
}

SummaryTable report_summary(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw ConfigError("results directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.starts_with("run_") &&
        e.path().extension() == ".json")
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw ConfigError("no run JSON files in " + dir.string());

  struct Group {
    std::size_t runs = 0, degenerate = 0, violations = 0;
    std::vector<double> k, r2, r1;
  };
  std::map<std::string, Group> groups;
  SummaryTable table;
  for (const fs::path& f : files) {
    try {
      std::ifstream is(f);
      const json j = json::parse(is);
      Group& g = groups[j.at("alpha_rule").get<std::string>()];
      if (j.at("skipped").get<bool>() || j.at("degenerate").get<bool>()) {
        ++g.degenerate;
        continue;
      }
      ++g.runs;
      if (!j.at("bound_satisfied").get<bool>()) ++g.violations;
      if (j.at("k_identified").is_null()) continue;
      g.k.push_back(j.at("k_identified").get<double>());
      g.r2.push_back(ratio(j, "bound_cor2"));
      if (j.at("alpha_rule").get<std::string>() == "inv-l")
        g.r1.push_back(ratio(j, "bound_cor1"));
    } catch (const std::exception&) {
      table.unreadable.push_back(f.string());
    }
  }
  if (table.unreadable.size() == files.size())
    throw ConfigError("all run files in " + dir.string() + " are unreadable");

  for (const auto& [label, g] : groups) {
    SummaryRow row;
    row.alpha_rule = label;
    row.runs = g.runs;
    row.degenerate_excluded = g.degenerate;
    row.bound_violations = g.violations;
    row.median_k_identified = median(g.k);
    row.median_ratio_cor2 = median(g.r2);
    row.max_ratio_cor2 =
        g.r2.empty() ? std::nan("") : *std::max_element(g.r2.begin(), g.r2.end());
    if (!g.r1.empty()) {
      row.median_ratio_cor1 = median(g.r1);
      row.max_ratio_cor1 = *std::max_element(g.r1.begin(), g.r1.end());
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_summary_table(const SummaryTable& table, std::ostream& os) {
  os << kAggregateHeader << '\n';
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const SummaryRow& r : table.rows) {
    os << r.alpha_rule << ',' << r.runs << ',' << r.degenerate_excluded << ','
       << r.bound_violations << ',' << format_double(r.median_k_identified)
       << ',' << format_double(r.median_ratio_cor2) << ','
       << format_double(r.max_ratio_cor2) << ',' << opt(r.median_ratio_cor1)
       << ',' << opt(r.max_ratio_cor1) << '\n';
  }
}

}  // namespace pgas
