#include "sdc/worker_graph.hpp"

#include <algorithm>

#include "json.hpp"
#include "sdc/error.hpp"

namespace sdc {

void ScheduleWindow::validate() const {
  if (delta < 1) throw Error(ErrorCode::ParamOutOfRange, "delta must be >= 1");
  if (gamma < 1) throw Error(ErrorCode::ParamOutOfRange, "gamma must be >= 1");
}

RoundInterval assignment_window(int depth, const ScheduleWindow& window) {
  const int base = (depth - 1) * window.delta;
  return {base + 1, base + window.gamma};
}

WorkerGraph::WorkerGraph(LeveledTaskGraph tasks, ScheduleWindow window)
    : tasks_(std::move(tasks)), window_(window) {
  window_.validate();
}

bool WorkerGraph::contains(const WorkerNode& w) const noexcept {
  return w.task < tasks().size() && w.round >= t_min(w.task) && w.round <= t_max(w.task);
}

std::size_t WorkerGraph::index(const WorkerNode& w) const {
  if (!contains(w)) {
    throw Error(ErrorCode::UnknownNode,
                "(" + std::to_string(w.task) + ", " + std::to_string(w.round) + ") is not a worker node");
  }
  return static_cast<std::size_t>(w.task) * static_cast<std::size_t>(gamma()) +
         static_cast<std::size_t>(w.round - t_min(w.task));
}

WorkerNode WorkerGraph::node(std::size_t index) const {
  const auto g = static_cast<std::size_t>(gamma());
  const auto task = static_cast<TaskId>(index / g);
  return {task, t_min(task) + static_cast<int>(index % g)};
}

RoundInterval WorkerGraph::sender_window(TaskId source_task, int recipient_round) const {
  return {std::max(recipient_round - 2 * delta(), t_min(source_task)),
          std::min(recipient_round - 1, t_max(source_task))};
}

std::vector<WorkerNode> WorkerGraph::in_window_predecessors(const WorkerNode& w, Relation relation) const {
  index(w);  // validates
  std::vector<WorkerNode> out;
  auto append = [&](TaskId task) {
    const RoundInterval r = sender_window(task, w.round);
    for (int t = r.last; t >= r.first; --t) out.push_back({task, t});
  };
  if (relation == Relation::SameTask) {
    append(w.task);
  } else {
    for (TaskId p : tasks().predecessors(w.task)) append(p);
  }
  return out;
}

std::vector<WorkerNode> WorkerGraph::successors(const WorkerNode& w) const {
  index(w);
  std::vector<WorkerNode> out;
  auto append = [&](TaskId task) {
    const int first = std::max(w.round + 1, t_min(task));
    const int last = std::min(w.round + 2 * delta(), t_max(task));
    for (int t = first; t <= last; ++t) out.push_back({task, t});
  };
  append(w.task);
  for (TaskId s : tasks().successors(w.task)) append(s);
  return out;
}

std::size_t WorkerGraph::edge_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < node_count(); ++i) count += successors(node(i)).size();
  return count;
}

std::string WorkerGraph::to_json() const {
  nlohmann::ordered_json doc;
  doc["delta"] = delta();
  doc["gamma"] = gamma();
  auto nodes = nlohmann::ordered_json::array();
  auto edges = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < node_count(); ++i) {
    const WorkerNode w = node(i);
    nodes.push_back({tasks().name(w.task), w.round});
    for (const WorkerNode& s : successors(w)) {
      edges.push_back({{tasks().name(w.task), w.round}, {tasks().name(s.task), s.round}});
    }
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  return doc.dump() + "\n";
}

}  // namespace sdc
