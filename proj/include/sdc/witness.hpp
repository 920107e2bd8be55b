#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdc/protocol.hpp"
#include "sdc/worker_graph.hpp"

namespace sdc {

/// Contiguous run of workers of one task, rounds first..last. All empty runs
/// compare equal regardless of task.
struct WorkerRun {
  TaskId task = 0;
  int first = 1;
  int last = 0;

  static WorkerRun none() { return {}; }
  static WorkerRun span(TaskId task, int first, int last) {
    if (last < first) return none();
    return {task, first, last};
  }

  bool empty() const noexcept { return last < first; }
  std::size_t size() const noexcept { return empty() ? 0 : static_cast<std::size_t>(last - first + 1); }
  bool contains(const WorkerNode& w) const noexcept {
    return !empty() && w.task == task && first <= w.round && w.round <= last;
  }
  bool overlaps(const WorkerRun& o) const noexcept {
    return !empty() && !o.empty() && task == o.task && first <= o.last && o.first <= last;
  }
  friend bool operator==(const WorkerRun& a, const WorkerRun& b) noexcept {
    if (a.empty() || b.empty()) return a.empty() && b.empty();
    return a.task == b.task && a.first == b.first && a.last == b.last;
  }
};

/// (M, M', w); w == nullopt stands for the terminator.
struct WitnessTriple {
  WorkerRun m;
  WorkerRun m_prime;
  std::optional<WorkerNode> w;
  friend bool operator==(const WitnessTriple&, const WitnessTriple&) = default;
};

struct WitnessSequence {
  std::vector<WitnessTriple> triples;

  /// Number of pivots (triples with w set).
  std::size_t length() const noexcept { return triples.empty() ? 0 : triples.size() - 1; }
  std::vector<WorkerNode> pivots() const;
  /// For each pivot: true iff the sequence moves on without touching a
  /// successor task of that pivot (the "upwards" pivots).
  std::vector<bool> upward(const TaskGraph& g) const;
  std::size_t malicious_run_size() const;   // sum of |M_i|
  std::size_t additional_run_size() const;  // sum of |M'_i|
  friend bool operator==(const WitnessSequence&, const WitnessSequence&) = default;
};

struct WitnessCheck {
  bool ok = true;
  /// 0: shape (terminator placement, node existence), 1..4: the numbered
  /// properties. -1 when ok.
  int clause = -1;
  std::string detail;
};

/// Structural check. Property 1 is read as "M_1 is the run from t_min of
/// w_1's task up to w_1" (may be empty); with no pivots M_1 must start at
/// t_min of its task. Throws Error{UnknownNode} when a node is outside G_W.
WitnessCheck check_witness_sequence(const WitnessSequence& w, const WorkerGraph& workers);
inline bool is_witness_sequence(const WitnessSequence& w, const WorkerGraph& workers) {
  return check_witness_sequence(w, workers).ok;
}

/// All of M and M' malicious, upward pivots honest and failed, the other
/// pivots honest and successful.
bool is_valid_wrt(const WitnessSequence& w, const WorkerGraph& workers, const Assignment& assignment,
                  const std::vector<Status>& status);

/// Construction for path graphs. Throws Error{NotAPath} or
/// Error{ComputationSucceeded} when its preconditions fail.
WitnessSequence construct_witness_path(const WorkerGraph& workers, const Assignment& assignment,
                                       const std::vector<Status>& status);

/// Stack-based construction for leveled DAGs. Ties break toward the smaller
/// task id. Asserts the success barrier at every pivot and throws
/// Error{Internal} if it is missing. Throws Error{ComputationSucceeded}.
WitnessSequence construct_witness_dag(const WorkerGraph& workers, const Assignment& assignment,
                                      const std::vector<Status>& status);

/// |M ∪ M'| over the whole sequence.
std::size_t malicious_count(const WitnessSequence& w);
/// m >= max((delta - 1) * pivots, gamma).
bool check_bound(const WitnessSequence& w, int delta, int gamma);

struct WitnessClass {
  std::size_t malicious = 0;  // |M|, the union of the M runs
  std::size_t pivots = 0;     // |H|
  std::size_t upward = 0;     // |F|
  friend auto operator<=>(const WitnessClass&, const WitnessClass&) = default;
};

struct EnumerationCaps {
  std::size_t max_malicious = std::numeric_limits<std::size_t>::max();  // caps |M| + |M'|
  std::size_t max_pivots = std::numeric_limits<std::size_t>::max();
};

/// Optional filter: only count sequences valid w.r.t. this assignment.
struct ValidityFilter {
  const Assignment* assignment = nullptr;
  const std::vector<Status>* status = nullptr;
};

/// Exhaustive backtracking count of witness sequences, grouped by class.
/// Throws Error{InstanceTooLarge} when n * gamma > 40.
std::map<WitnessClass, std::uint64_t> enumerate_witness_sequences(const WorkerGraph& workers,
                                                                  const EnumerationCaps& caps = {},
                                                                  const ValidityFilter& filter = {});

/// n * C(|M| + |H|, |H|) * (2 gamma d)^|H| with d clamped to >= 1.
long double witness_count_bound(std::size_t n, std::size_t d, int gamma, const WitnessClass& cls);

struct FailureBound {
  double bound = 0;          // min(1, ...) is not applied; may exceed 1
  double log_bound = 0;      // natural log of the bound
  double log_target = 0;     // ln(n^-c)
  double star_threshold = 0; // log_{1/beta}(2 e delta gamma d) / (delta - 1)
  bool star_holds = false;
  bool gamma_holds = false;  // gamma >= (c+5)/(1-alpha) log_{1/beta} n
  bool gamma_cubed_holds = false;
  bool premises = false;
};

/// Union bound (gamma n)^3 * n * (1/beta)^(-gamma (1 - alpha)) and the
/// premises under which it is at most n^-c. Throws Error{ParamOutOfRange}.
FailureBound failure_probability_bound(double n, double d, double beta, int delta, int gamma, double alpha,
                                       double c = 1.0);

std::string write_witness_json(const WitnessSequence& w, const TaskGraph& g);
/// Throws Error{ConfigInvalid} on malformed input or non-contiguous runs.
WitnessSequence parse_witness_json(std::string_view text, const TaskGraph& g);

}  // namespace sdc
