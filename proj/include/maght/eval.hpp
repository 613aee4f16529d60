#pragma once

#include <optional>
#include <string>
#include <vector>

#include "maght/pfilter.hpp"
#include "maght/pipeline.hpp"
#include "maght/synth.hpp"

namespace maght {

// Correctness thresholds: a convergence counts as correct below 1 m of
// translation error and 12 degrees of yaw error.
inline constexpr double kCorrectTranslation = 1.0;            // m
inline constexpr double kCorrectYaw = 12.0 * kPi / 180.0;     // rad

struct ScoreResult {
  double translation_error = 0.0;  // m
  double yaw_error = 0.0;          // rad, in [0, pi]
  bool correct = false;
};

ScoreResult score(const GravityPose& truth, const GravityPose& est);

struct MethodSpec {
  enum class Kind { maght, pf };
  Kind kind = Kind::maght;
  int particles = 1600;  // pf only
  std::string name = "maght";
};

// Parses "maght" or "pf<N>" (e.g. pf1600). Throws std::invalid_argument.
MethodSpec parse_method(const std::string& name);

struct CaseOutcome {
  std::string scenario_id;
  int case_id = 0;
  std::string method;
  double traj_len = 0.0;  // m
  bool in_map = false;
  bool converged = false;
  double translation_error = 0.0;  // m, valid iff converged
  double yaw_error = 0.0;          // rad, valid iff converged
  bool correct = false;            // converged, in map, below both thresholds
  double wall_ms = 0.0;
  int votes = 0;         // maght only
  int cluster_size = 0;  // maght only
  std::string failure;   // nonempty when the method raised an error
  std::string tag;       // case grouping carried over from the scenario
};

struct RunOptions {
  bool timing = true;           // measure wall clock (off for byte-stable files)
  std::vector<double> lengths;  // empty = every length present
};

struct EvalReport {
  std::string scenario_id;
  MaghtParams maght_params;
  PfParams pf_params;
  std::vector<CaseOutcome> outcomes;
};

// Runs every requested method on every (length-filtered) case. Walls are
// measured around the relocalization call only; the particle filter clock
// stops at its first convergence, when the answer is available. Per-case
// errors become failure-tagged non-convergences instead of aborting the
// sweep.
EvalReport run_experiment(const Scenario& scenario,
                          const std::vector<MethodSpec>& methods,
                          const MaghtParams& maght_params,
                          const PfParams& pf_params,
                          const RunOptions& options = {});

// Aggregate over one (method, trajectory length, tag) group.
struct Aggregate {
  std::string method;
  double traj_len = 0.0;
  std::string tag;
  int cases = 0;
  int in_map_cases = 0;
  int converged = 0;
  int correct = 0;
  std::optional<double> recall;     // correct / in_map_cases
  std::optional<double> precision;  // correct / converged; absent when 0 conv
  // Error quantiles over correct convergences (false positives excluded).
  std::optional<double> median_translation_error;  // m
  std::optional<double> p90_translation_error;     // m
  std::optional<double> median_yaw_error;          // rad
  double median_wall_ms = 0.0;
  double p90_wall_ms = 0.0;
};

// Pure fold over the outcomes; case order does not matter. Groups are
// sorted by (method, length, tag).
std::vector<Aggregate> aggregate(const EvalReport& report);

// Human table with recall/precision as one-decimal percentages.
std::string emit_table(const EvalReport& report);

// Fixed-column CSV, one row per case outcome:
// scenario_id,case_id,method,traj_len_m,converged,t_err_m,yaw_err_deg,
// correct,wall_ms,votes,cluster_size
std::string emit_csv(const EvalReport& report);

// Lossless json-lines: a header line with the parameter snapshot, then one
// line per outcome. parse_jsonl(emit_jsonl(r)) reproduces r.
std::string emit_jsonl(const EvalReport& report);
EvalReport parse_jsonl(const std::string& text);

}  // namespace maght
