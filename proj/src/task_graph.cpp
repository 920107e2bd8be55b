#include "sdc/task_graph.hpp"

#include <algorithm>
#include <queue>

#include "sdc/error.hpp"

namespace sdc {

TaskGraph TaskGraph::build(std::vector<std::string> tasks,
                           const std::vector<std::pair<std::string, std::string>>& edges) {
  if (tasks.empty()) throw Error(ErrorCode::EmptyGraph, "task list is empty");

  TaskGraph g;
  g.names_ = std::move(tasks);
  const std::size_t n = g.names_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!g.index_.emplace(g.names_[i], static_cast<TaskId>(i)).second) {
      throw Error(ErrorCode::DuplicateTask, "task '" + g.names_[i] + "' declared twice");
    }
  }

  g.pred_.assign(n, {});
  g.succ_.assign(n, {});
  g.edges_.reserve(edges.size());
  for (const auto& [from, to] : edges) {
    auto u = g.find(from);
    auto v = g.find(to);
    if (!u) throw Error(ErrorCode::UnknownTask, "edge endpoint '" + from + "' is not a task");
    if (!v) throw Error(ErrorCode::UnknownTask, "edge endpoint '" + to + "' is not a task");
    if (*u == *v) throw Error(ErrorCode::CycleDetected, "self-loop on '" + from + "'");
    if (std::find(g.succ_[*u].begin(), g.succ_[*u].end(), *v) != g.succ_[*u].end()) {
      throw Error(ErrorCode::DuplicateEdge, "edge (" + from + ", " + to + ") repeated");
    }
    g.succ_[*u].push_back(*v);
    g.pred_[*v].push_back(*u);
    g.edges_.push_back({*u, *v});
  }
  for (auto& list : g.pred_) std::sort(list.begin(), list.end());
  for (auto& list : g.succ_) std::sort(list.begin(), list.end());

  // Kahn's algorithm, smallest ready id first.
  std::vector<std::size_t> indeg(n);
  std::priority_queue<TaskId, std::vector<TaskId>, std::greater<>> ready;
  for (TaskId v = 0; v < n; ++v) {
    indeg[v] = g.pred_[v].size();
    if (indeg[v] == 0) ready.push(v);
  }
  g.depth_.assign(n, 1);
  while (!ready.empty()) {
    TaskId u = ready.top();
    ready.pop();
    g.topo_.push_back(u);
    for (TaskId v : g.succ_[u]) {
      g.depth_[v] = std::max(g.depth_[v], g.depth_[u] + 1);
      if (--indeg[v] == 0) ready.push(v);
    }
  }
  if (g.topo_.size() != n) throw Error(ErrorCode::CycleDetected, "edge set contains a directed cycle");

  g.max_depth_ = *std::max_element(g.depth_.begin(), g.depth_.end());
  for (TaskId v = 0; v < n; ++v) {
    if (g.pred_[v].empty()) g.initial_.push_back(v);
    if (g.succ_[v].empty()) g.final_.push_back(v);
  }
  return g;
}

std::optional<TaskId> TaskGraph::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool TaskGraph::has_edge(TaskId from, TaskId to) const {
  const auto& s = succ_.at(from);
  return std::binary_search(s.begin(), s.end(), to);
}

namespace {

std::vector<TaskId> reach(const std::vector<std::vector<TaskId>>& adj, TaskId start) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<TaskId> stack{start};
  std::vector<TaskId> out;
  while (!stack.empty()) {
    TaskId u = stack.back();
    stack.pop_back();
    for (TaskId v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        out.push_back(v);
        stack.push_back(v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<TaskId> TaskGraph::ancestors(TaskId v) const { return reach(pred_, v); }
std::vector<TaskId> TaskGraph::descendants(TaskId v) const { return reach(succ_, v); }

bool TaskGraph::is_leveled() const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [&](const Edge& e) { return depth_[e.to] == depth_[e.from] + 1; });
}

bool TaskGraph::is_path() const {
  if (initial_.size() != 1 || final_.size() != 1) return false;
  for (TaskId v = 0; v < size(); ++v) {
    if (pred_[v].size() > 1 || succ_[v].size() > 1) return false;
  }
  // Acyclic, connected through a single source, all degrees <= 1: a chain.
  return static_cast<std::size_t>(max_depth_) == size();
}

std::size_t degree_bound(const TaskGraph& g) {
  std::size_t d = 0;
  for (TaskId v = 0; v < g.size(); ++v) {
    d = std::max({d, g.predecessors(v).size(), g.successors(v).size()});
  }
  return d;
}

LeveledTaskGraph::LeveledTaskGraph(TaskGraph g) : graph_(std::move(g)) {
  if (!graph_.is_leveled()) throw Error(ErrorCode::NotLeveled, "graph has an edge spanning several levels");
}

LeveledTaskGraph::LeveledTaskGraph(TaskGraph g, std::vector<RelayOrigin> relays)
    : graph_(std::move(g)), relays_(std::move(relays)) {
  if (!graph_.is_leveled()) throw Error(ErrorCode::Internal, "levelize produced a non-leveled graph");
}

LeveledTaskGraph levelize(const TaskGraph& g) {
  std::vector<std::string> names = g.names();
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<RelayOrigin> relays;
  edges.reserve(g.edge_count());

  for (const Edge& e : g.edges()) {
    const int span = g.depth(e.to) - g.depth(e.from);
    const std::string& u = g.name(e.from);
    const std::string& v = g.name(e.to);
    if (span == 1) {
      edges.emplace_back(u, v);
      continue;
    }
    std::string prev = u;
    for (int k = 1; k < span; ++k) {
      std::string relay = "relay(" + u + "," + v + "," + std::to_string(k) + ")";
      names.push_back(relay);
      relays.push_back({e.from, e.to, k});
      edges.emplace_back(prev, relay);
      prev = std::move(relay);
    }
    edges.emplace_back(prev, v);
  }
  return LeveledTaskGraph(TaskGraph::build(std::move(names), edges), std::move(relays));
}

}  // namespace sdc
