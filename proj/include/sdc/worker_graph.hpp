#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sdc/task_graph.hpp"

namespace sdc {

/// delta: round offset between consecutive levels (also sets the 2*delta
/// lookback). gamma: workers assigned to every task, one per round.
struct ScheduleWindow {
  int delta = 1;
  int gamma = 1;

  /// Throws Error{ParamOutOfRange} unless delta >= 1 and gamma >= 1.
  void validate() const;
};

/// Worker assigned to `task` in `round`.
struct WorkerNode {
  TaskId task = 0;
  int round = 0;
  friend auto operator<=>(const WorkerNode&, const WorkerNode&) = default;
};

/// Closed interval of rounds; empty when last < first.
struct RoundInterval {
  int first = 1;
  int last = 0;
  bool empty() const noexcept { return last < first; }
  int size() const noexcept { return empty() ? 0 : last - first + 1; }
  bool contains(int t) const noexcept { return first <= t && t <= last; }
  friend bool operator==(const RoundInterval&, const RoundInterval&) = default;
};

/// Rounds in which a task of depth `depth` receives workers:
/// [(depth-1)*delta + 1, (depth-1)*delta + gamma].
RoundInterval assignment_window(int depth, const ScheduleWindow& window);

enum class Relation { SameTask, PrecedingTask };

/**
 * The worker graph G_W: one node per (task, assignment round) and an edge
 * w -> w' whenever w might send data to w' (same task or task -> successor,
 * with w' assigned 1..2*delta rounds after w).
 *
 * Edges are not materialized; windows are computed on demand. Nodes are
 * densely indexed task-major: index = offset(task) + (round - t_min(task)).
 */
class WorkerGraph {
 public:
  WorkerGraph(LeveledTaskGraph tasks, ScheduleWindow window);

  const LeveledTaskGraph& leveled() const noexcept { return tasks_; }
  const TaskGraph& tasks() const noexcept { return tasks_.graph(); }
  const ScheduleWindow& window() const noexcept { return window_; }
  int delta() const noexcept { return window_.delta; }
  int gamma() const noexcept { return window_.gamma; }

  std::size_t node_count() const noexcept { return tasks().size() * static_cast<std::size_t>(gamma()); }
  /// gamma + (D - 1) * delta.
  int total_rounds() const noexcept { return gamma() + (tasks().depth() - 1) * delta(); }

  int t_min(TaskId v) const { return (tasks().depth(v) - 1) * delta() + 1; }
  int t_max(TaskId v) const { return (tasks().depth(v) - 1) * delta() + gamma(); }
  RoundInterval rounds_of(TaskId v) const { return {t_min(v), t_max(v)}; }

  bool contains(const WorkerNode& w) const noexcept;
  /// Throws Error{UnknownNode} when w is not in the graph.
  std::size_t index(const WorkerNode& w) const;
  WorkerNode node(std::size_t index) const;

  /// Rounds of workers at `source_task` that may send to a worker assigned
  /// in `recipient_round`: [max(round - 2*delta, t_min), min(round - 1, t_max)].
  RoundInterval sender_window(TaskId source_task, int recipient_round) const;

  /// In-window senders of `w`. SameTask: same-task window; PrecedingTask:
  /// the windows over every predecessor task. Ordered by (task ascending,
  /// round descending), i.e. newest first within a task.
  std::vector<WorkerNode> in_window_predecessors(const WorkerNode& w, Relation relation) const;

  /// Out-neighbours of w (E1 then E2), for export and oracles.
  std::vector<WorkerNode> successors(const WorkerNode& w) const;

  std::size_t edge_count() const;

  /// JSON node/edge lists (debug export; size grows with n*gamma*delta).
  std::string to_json() const;

 private:
  LeveledTaskGraph tasks_;
  ScheduleWindow window_;
};

}  // namespace sdc
