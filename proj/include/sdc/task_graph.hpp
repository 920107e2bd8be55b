#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sdc {

/// Dense task index. Its order (declaration order) is the "task identifier"
/// order used for every deterministic tie-break in the library.
using TaskId = std::uint32_t;

struct Edge {
  TaskId from;
  TaskId to;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/**
 * Validated directed acyclic task graph.
 *
 * Depths are 1-based: initial tasks (no in-edges) have depth 1 and every
 * other task sits one below its deepest predecessor. Adjacency lists are
 * kept sorted by TaskId. Immutable once built.
 */
class TaskGraph {
 public:
  /// Throws Error{EmptyGraph, DuplicateTask, UnknownTask, DuplicateEdge, CycleDetected}.
  static TaskGraph build(std::vector<std::string> tasks,
                         const std::vector<std::pair<std::string, std::string>>& edges);

  std::size_t size() const noexcept { return names_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const std::string& name(TaskId v) const { return names_.at(v); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<TaskId> find(std::string_view name) const;

  std::span<const TaskId> predecessors(TaskId v) const { return pred_.at(v); }
  std::span<const TaskId> successors(TaskId v) const { return succ_.at(v); }
  bool has_edge(TaskId from, TaskId to) const;

  /// Edges in declaration order.
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  int depth(TaskId v) const { return depth_.at(v); }
  int depth() const noexcept { return max_depth_; }

  bool is_initial(TaskId v) const { return pred_.at(v).empty(); }
  bool is_final(TaskId v) const { return succ_.at(v).empty(); }
  const std::vector<TaskId>& initial_tasks() const noexcept { return initial_; }
  const std::vector<TaskId>& final_tasks() const noexcept { return final_; }

  /// Deterministic topological order (Kahn, smallest ready id first).
  const std::vector<TaskId>& topological_order() const noexcept { return topo_; }

  /// All ancestors of v (excluding v), ascending.
  std::vector<TaskId> ancestors(TaskId v) const;
  /// All tasks reachable from v (excluding v), ascending.
  std::vector<TaskId> descendants(TaskId v) const;

  /// True when every edge joins adjacent depth levels.
  bool is_leveled() const;
  /// True for a single directed chain v1 -> v2 -> ... -> vn.
  bool is_path() const;

 private:
  TaskGraph() = default;

  std::vector<std::string> names_;
  std::unordered_map<std::string, TaskId> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<TaskId>> pred_;
  std::vector<std::vector<TaskId>> succ_;
  std::vector<int> depth_;
  int max_depth_ = 0;
  std::vector<TaskId> initial_;
  std::vector<TaskId> final_;
  std::vector<TaskId> topo_;
};

/// max over tasks of max(in-degree, out-degree).
std::size_t degree_bound(const TaskGraph& g);

/// Where a relay task came from: hop k (1-based) on the original edge from -> to,
/// with ids referring to the source graph.
struct RelayOrigin {
  TaskId from;
  TaskId to;
  int hop;
};

/**
 * Task graph whose edges only join adjacent levels. Relay tasks inserted by
 * levelize() are appended after the original tasks and keep a provenance
 * record back to the edge they subdivide.
 */
class LeveledTaskGraph {
 public:
  /// Wraps an already leveled graph; throws Error{NotLeveled} otherwise.
  explicit LeveledTaskGraph(TaskGraph g);

  const TaskGraph& graph() const noexcept { return graph_; }
  std::size_t size() const noexcept { return graph_.size(); }
  int depth() const noexcept { return graph_.depth(); }

  std::size_t original_size() const noexcept { return graph_.size() - relays_.size(); }
  std::size_t relay_count() const noexcept { return relays_.size(); }
  bool is_relay(TaskId v) const noexcept { return v >= original_size(); }
  const RelayOrigin& relay_origin(TaskId v) const { return relays_.at(v - original_size()); }

 private:
  friend LeveledTaskGraph levelize(const TaskGraph& g);
  LeveledTaskGraph(TaskGraph g, std::vector<RelayOrigin> relays);

  TaskGraph graph_;
  std::vector<RelayOrigin> relays_;
};

/// Replaces every edge spanning k > 1 levels by a chain of k-1 relay tasks
/// named "relay(u,v,j)". Already-leveled graphs come back unchanged.
LeveledTaskGraph levelize(const TaskGraph& g);

}  // namespace sdc
