#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "sdc/protocol.hpp"
#include "sdc/task_graph.hpp"

namespace sdc {

/// Birth-death walk on {0, ..., n+1} started at 1; 0 and n+1 absorb.
struct RandomWalkModel {
  double p = 0.5;  // step towards n+1
  double q = 0.5;  // step towards 0
  std::size_t n = 1;

  static RandomWalkModel from_beta(double beta, std::size_t n) { return {1.0 - beta, beta, n}; }
};

/// Probability of reaching n+1 before 0 from state 1:
/// (1 - q/p) / (1 - (q/p)^(n+1)), or 1/(n+1) when p == q.
/// Throws Error{DegenerateWalk} if p is 0 or 1 or p + q != 1.
double gambler_hitting_probability(const RandomWalkModel& model);

/// Monte Carlo: number of `walks` that reach n+1 before 0.
std::uint64_t count_target_hits(const RandomWalkModel& model, std::uint64_t walks, std::uint64_t seed);

struct PathRunResult {
  bool terminated = false;
  std::uint64_t rounds = 0;
  std::uint64_t source_sends = 0;
  std::uint64_t target_receives = 0;
  std::uint64_t honest_assignments = 0;
  std::uint64_t rejects = 0;          // REJECT replies
  std::uint64_t clamped_rejects = 0;  // REJECTs at task 1 (nothing to roll back)
  std::uint64_t timeouts = 0;
  std::uint64_t excursions = 0;       // completed runs from task 1 to the source or the target
  std::uint64_t target_hits = 0;
  std::size_t position = 1;           // current task, n+1 once the target accepted
};

/**
 * Sequential path protocol with rollback. One assignment per round: an
 * honest worker (or an adversary sending a correct output) replies DONE and
 * the supervisor advances; a Garbage decision is a REJECT that rolls back
 * to max(i-1, 1); a Silent decision is a TIMEOUT that only costs the round.
 * After DONE on the last task the target needs one more round to accept.
 * Stops at `round_cap` rounds without terminating.
 */
PathRunResult simulate_path_protocol(std::size_t n, double beta, const AdversaryStrategy& strategy,
                                     std::uint64_t seed, std::uint64_t round_cap);

/// Reply of the worker on one task in one round of the rollback DAG protocol.
struct LegacyReply {
  enum class Kind : std::uint8_t { Done, Reject, Timeout };
  TaskId task = 0;
  Kind kind = Kind::Done;
  std::vector<TaskId> rejected;  // for Reject: predecessors named as bad
};

/// Supervisor state of the rollback DAG protocol: the finished set F.
class LegacyDagSupervisor {
 public:
  explicit LegacyDagSupervisor(const TaskGraph& g);

  /// Tasks not in F whose predecessors are all in F.
  std::vector<TaskId> frontier() const;

  /// Applies one round of replies: DONEs enter F first, then every REJECT
  /// removes its task, the named tasks and everything reachable from them.
  void apply(const std::vector<LegacyReply>& replies);

  bool finished(TaskId v) const { return finished_.at(v) != 0; }
  std::size_t finished_count() const;
  bool all_final_finished() const;
  /// pred(v) ⊆ F for every v in F.
  bool downward_closed() const;

 private:
  const TaskGraph& g_;
  std::vector<std::uint8_t> finished_;
};

struct LegacyDagResult {
  bool terminated = false;
  std::uint64_t rounds = 0;
  std::uint64_t assignments = 0;
  std::uint64_t rejects = 0;
};

/**
 * Rollback DAG protocol. Each round every frontier task gets a fresh
 * worker; malicious workers decide per `strategy` and a Garbage decision
 * is REJECT naming all predecessors. Terminates at the end of the round in
 * which every final task is in F. `observer` (optional) sees the state
 * after each round.
 */
LegacyDagResult simulate_legacy_dag_protocol(const TaskGraph& g, double beta, const AdversaryStrategy& strategy,
                                             std::uint64_t seed, std::uint64_t round_cap,
                                             const std::function<void(const LegacyDagSupervisor&)>& observer = {});

/// n_levels levels of c*c tasks split into c blocks of c; block j feeds block
/// j of the next level completely, and task k of every block also feeds
/// task k of every other block. Throws Error{ParamOutOfRange} for c < 2 or
/// n_levels < 2.
LeveledTaskGraph build_infeasibility_dag(std::size_t c, std::size_t n_levels);

}  // namespace sdc
