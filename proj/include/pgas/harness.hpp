#pragma once

#include "pgas/activeset.hpp"
#include "pgas/instances.hpp"
#include "pgas/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pgas {

struct GenerateParams {
  std::string kind = "l1";  // "l1" or "nonneg"
  std::size_t n = 20;
  /// Nonzeros of x* for l1; coordinates pinned at zero for nonneg.
  std::size_t nnz = 4;
  double lambda = 1.0;
  double delta_target = 0.1;
  double cond = 10.0;
  std::uint64_t seed = 1;
  GeneratorOptions options;
};

ProblemInstance generate_instance(const GenerateParams& params);

struct ExperimentSpec {
  GenerateParams generate;
  /// When set, the instance is loaded from here instead of generated.
  std::optional<std::filesystem::path> instance_file;
  /// Seeds generate.seed, generate.seed + 1, ... (ignored for files).
  std::size_t repetitions = 1;
  SolverConfig solver;
  std::vector<AlphaRule> alphas;
  SpectralOptions spectral;
  double stationarity_tol = kDefaultStationarityTol;
  bool allow_degenerate = false;
  bool write_traces = true;
  /// Empty: nothing is written.
  std::filesystem::path out_dir;
};

/// Per-iteration checks of the contraction and identification theory.
struct TraceChecks {
  std::size_t contraction_violations = 0;
  double worst_contraction_excess = 0.0;
  std::size_t inv_l_rate_violations = 0;  // 1 - 1/kappa factor, alpha = 1/L only
  std::size_t sufficiency_violations = 0;
  std::size_t persistence_violations = 0;  // unmatched rows after the threshold crossing
  std::size_t transient_matches = 0;       // matches lost again (allowed before the crossing)
  std::size_t delta_cap_violations = 0;   // rows k >= ceil(bound_delta) with a free coordinate on a kink
  bool ok() const {
    return contraction_violations == 0 && inv_l_rate_violations == 0 &&
           sufficiency_violations == 0 && persistence_violations == 0 &&
           delta_cap_violations == 0;
  }
};

struct RunResult {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::string kind;
  std::string alpha_label;
  std::string x_star_source;  // "ground_truth" or "polished"
  SpectralBounds spectrum;
  ActiveSetReport active;
  BoundReport bounds;
  TraceChecks checks;
  bool degenerate = false;
  bool skipped = false;
  bool bound_satisfied = false;
  std::size_t iterations_run = 0;
  Termination termination = Termination::MaxIter;
};

/// Contraction slack allowed on top of Q(alpha) ||x^k - x*||.
inline constexpr double kContractionSlack = 1e-10;

/// x* from the ground truth when present, else solve to the fixed-point
/// tolerance with step 1/L and polish.
Vector reference_solution(const ProblemInstance& inst,
                          const SpectralBounds& bounds,
                          const SolverConfig& config, std::string* source);

/// Identification radius matching the step rule: delta/(2L) for 1/L,
/// delta alpha/3 otherwise.
double identification_radius_for(const AlphaRule& rule, double alpha,
                                 const SpectralBounds& bounds, double delta);

TraceChecks check_trace(const SolveTrace& trace, const BoundReport& bounds,
                        const SpectralBounds& spectrum, bool inverse_l_step,
                        double radius);

/// Bounds, solve and checks for one (instance, alpha). The solve runs even for
/// degenerate instances when allow_degenerate is set; otherwise the result is
/// flagged skipped.
RunResult analyze_run(const ProblemInstance& inst, const Vector& x_star,
                      const ActiveSetReport& report,
                      const SpectralBounds& spectrum, const AlphaRule& rule,
                      const SolverConfig& config, bool allow_degenerate,
                      SolveTrace* trace_out = nullptr);

struct ExperimentResult {
  std::vector<RunResult> runs;
  std::size_t degenerate_refused = 0;
  std::size_t violations = 0;  // runs with a failed bound or trace check
};

/// Throws ConfigError for an empty alpha list.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Per-run JSON (bound report, active-set report and config echo).
std::string run_to_json(const RunResult& run, const SolverConfig& config);

inline constexpr const char* kSummaryHeader =
    "seed,n,alpha,L,mu,kappa,delta,Delta,dist0,bound_cor1,bound_cor2,"
    "bound_delta,k_identified,k_threshold,bound_satisfied";

void write_summary_row(const RunResult& run, std::ostream& os);

struct SummaryRow {
  std::string alpha_rule;
  std::size_t runs = 0;
  std::size_t degenerate_excluded = 0;
  std::size_t bound_violations = 0;
  double median_k_identified = 0.0;
  double median_ratio_cor2 = 0.0;
  double max_ratio_cor2 = 0.0;
  std::optional<double> median_ratio_cor1;  // 1/L runs only
  std::optional<double> max_ratio_cor1;
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
  std::vector<std::string> unreadable;
};

/// Aggregates run_*.json files of a results directory by alpha rule. The
/// tightness ratio is k_identified / (ceil(bound) + 1). Throws ConfigError
/// for a missing or empty directory, or when every file is unreadable.
SummaryTable report_summary(const std::filesystem::path& dir);

inline constexpr const char* kAggregateHeader =
    "alpha_rule,runs,degenerate_excluded,bound_violations,median_k_identified,"
    "median_ratio_cor2,max_ratio_cor2,median_ratio_cor1,max_ratio_cor1";

void write_summary_table(const SummaryTable& table, std::ostream& os);

}  // namespace pgas
