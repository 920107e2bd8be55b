#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdc/protocol.hpp"
#include "sdc/task_graph.hpp"

namespace sdc {

inline constexpr int kSchemaVersion = 1;

/// Constant pair (K, kappa) in the delta formula:
/// lemma (4, c+2), theorem (8e, c+1), strict (8e, c+2).
enum class ConstantProfile { Lemma, Theorem, Strict };
ConstantProfile parse_profile(std::string_view text);
std::string_view to_string(ConstantProfile p);

struct DerivedParams {
  int delta = 0;
  int gamma = 0;
  // The four candidates whose maximum is rounded up to delta.
  double floor_term = 2.0;
  double concentration_term = 0;
  double degree_term = 0;
  double work_term = 0;
};

/**
 * gamma = ceil((c+5)/(1-alpha) * log_{1/beta} n) first, then
 * delta = ceil(max{2, K/(alpha^2 ln^2(1/beta)), 2 log_{1/beta}(2 e gamma d)/alpha + 1,
 *                  ((c+kappa)/2) log_{1/beta} log2 n}).
 * Throws Error{ParamOutOfRange} unless 0 < beta < 1, 0 < alpha < 1, c > 0, n >= 1.
 */
DerivedParams compute_params(double n, double d, double beta, double alpha, double c, ConstantProfile profile);

enum class ProtocolKind { Main, LegacyPath, LegacyDag };
ProtocolKind parse_protocol(std::string_view text);
std::string_view to_string(ProtocolKind p);

/// Where the task graph comes from: a JSON file or a generator.
struct GraphSpec {
  enum class Kind { File, Path, Diamond, Random, Infeasible };
  Kind kind = Kind::Path;
  std::filesystem::path file;
  std::size_t n = 10;           // tasks (path, random) or levels (infeasible)
  std::size_t degree_cap = 3;   // random
  std::size_t max_width = 4;    // random
  std::size_t c = 3;            // infeasible
};

/// Random graphs are drawn from `seed`. Throws Error{GraphLoadFailed}.
TaskGraph resolve_graph(const GraphSpec& spec, std::uint64_t seed);

struct RunConfig {
  GraphSpec graph;
  double beta = 0.0;
  std::optional<int> delta;
  std::optional<int> gamma;
  bool auto_params = false;
  double alpha = 0.5;
  double hp_exponent = 1.0;
  ConstantProfile profile = ConstantProfile::Strict;
  std::string adversary = "never";
  ProtocolKind protocol = ProtocolKind::Main;
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::uint64_t round_cap = 1'000'000;  // legacy protocols only
  std::filesystem::path out_dir;        // empty: write nothing

  /// Throws Error{ConfigInvalid} describing the first problem found.
  void validate() const;
};

struct TrialRow {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::string protocol;
  std::uint64_t n = 0;
  int depth = 0;
  std::uint64_t d = 0;
  double beta = 0;
  int delta = 0;
  int gamma = 0;
  std::string adversary;
  bool success = false;
  std::uint64_t rounds = 0;
  std::uint64_t honest_executions = 0;
  double executions_per_task = 0;
  std::uint64_t verifications = 0;
  double verifications_per_honest_worker = 0;
  std::uint64_t source_sends = 0;
  std::uint64_t target_receives = 0;
  std::uint64_t target_verifications = 0;
  std::uint64_t supervisor_assignments = 0;
  std::uint64_t supervisor_introductions = 0;
  std::uint64_t honest_workers = 0;
};

struct Estimate {
  double mean = 0;
  double lo = 0;  // normal-approximation 95% interval
  double hi = 0;
};

struct Aggregates {
  std::uint64_t trials = 0;
  Estimate success_rate;
  Estimate rounds;
  std::uint64_t max_rounds = 0;
  Estimate executions_per_task;
  Estimate verifications_per_honest_worker;
  Estimate source_sends;
  Estimate target_receives;
};

Aggregates aggregate(const std::vector<TrialRow>& rows);

struct TrialReport {
  std::vector<TrialRow> rows;  // ordered by trial index
  Aggregates aggregates;
};

/// Runs one trial; exposed so tests can replay single trials.
TrialRow run_trial(const RunConfig& config, std::uint64_t trial_index, const TaskGraph* fixed_graph);

/**
 * Runs config.trials independent trials, each seeded with
 * derive_seed(config.seed, trial), on config.threads threads. Output does
 * not depend on the thread count. Writes trials.csv and aggregate.json to
 * out_dir when set. Throws Error{ConfigInvalid, GraphLoadFailed}.
 */
TrialReport run_trials(const RunConfig& config);

enum class SweepAxis { Beta, Delta, Gamma, N };
SweepAxis parse_axis(std::string_view text);
std::string_view to_string(SweepAxis a);

struct SweepPoint {
  double value = 0;
  TrialReport report;
};

/// One report per value; value k runs with master seed derive_seed(config.seed, k).
std::vector<SweepPoint> sweep(const RunConfig& config, SweepAxis axis, const std::vector<double>& values);

std::string trials_csv(const std::vector<TrialRow>& rows);
std::vector<TrialRow> parse_trials_csv(std::string_view text);
std::string aggregate_json(const RunConfig& config, const Aggregates& a);

}  // namespace sdc
