#include "sdc/generators.hpp"

#include <algorithm>
#include <string>

#include "sdc/error.hpp"

namespace sdc {

namespace {

std::string task_label(std::size_t i) { return "t" + std::to_string(i); }

}  // namespace

TaskGraph path_graph(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::EmptyGraph, "path needs at least one task");
  std::vector<std::string> tasks;
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    tasks.push_back("v" + std::to_string(i + 1));
    if (i > 0) edges.emplace_back(tasks[i - 1], tasks[i]);
  }
  return TaskGraph::build(std::move(tasks), edges);
}

TaskGraph diamond_graph() {
  return TaskGraph::build({"a", "b", "c", "d"}, {{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}});
}

TaskGraph random_leveled_dag(const RandomDagSpec& spec, Rng& rng) {
  if (spec.tasks == 0) throw Error(ErrorCode::EmptyGraph, "random DAG needs at least one task");
  if (spec.max_width == 0 || spec.degree_cap == 0) {
    throw Error(ErrorCode::ConfigInvalid, "max_width and degree_cap must be positive");
  }

  std::vector<std::string> tasks;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::size_t> prev_level;
  std::vector<std::size_t> out_degree;

  while (tasks.size() < spec.tasks) {
    std::size_t width_cap = spec.max_width;
    if (!prev_level.empty()) width_cap = std::min(width_cap, spec.degree_cap * prev_level.size());
    std::size_t width = rng.uniform_int(1, width_cap);
    width = std::min(width, spec.tasks - tasks.size());

    std::vector<std::size_t> level;
    for (std::size_t k = 0; k < width; ++k) {
      const std::size_t id = tasks.size();
      tasks.push_back(task_label(id));
      out_degree.push_back(0);
      level.push_back(id);
      if (prev_level.empty()) continue;

      std::vector<std::size_t> open;
      std::size_t spare = 0;
      for (std::size_t p : prev_level) {
        if (out_degree[p] < spec.degree_cap) open.push_back(p);
        spare += spec.degree_cap - out_degree[p];
      }
      // Leave at least one free out-slot for each task still to come in this level.
      const std::size_t still_to_come = width - k - 1;
      const std::size_t most = std::min({spec.degree_cap, open.size(), spare - still_to_come});
      const std::size_t want = rng.uniform_int(1, most);
      for (std::size_t j = 0; j < want; ++j) {
        const std::size_t pick = rng.uniform_int(j, open.size() - 1);
        std::swap(open[j], open[pick]);
        ++out_degree[open[j]];
        edges.emplace_back(tasks[open[j]], tasks[id]);
      }
    }
    prev_level = std::move(level);
  }
  return TaskGraph::build(std::move(tasks), edges);
}

TaskGraph random_dag(std::size_t n, double edge_probability, Rng& rng) {
  std::vector<std::string> tasks;
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t i = 0; i < n; ++i) tasks.push_back(task_label(i));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.bernoulli(edge_probability)) edges.emplace_back(tasks[i], tasks[j]);
    }
  }
  return TaskGraph::build(std::move(tasks), edges);
}

}  // namespace sdc
