#include <algorithm>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "sdc/error.hpp"
#include "sdc/generators.hpp"
#include "sdc/graph_io.hpp"
#include "sdc/legacy.hpp"
#include "sdc/task_graph.hpp"

using namespace sdc;

namespace {

using NamedEdges = std::set<std::pair<std::string, std::string>>;

NamedEdges named_edges(const TaskGraph& g) {
  NamedEdges out;
  for (const Edge& e : g.edges()) out.emplace(g.name(e.from), g.name(e.to));
  return out;
}

// Longest-path depth by memoized recursion over predecessor edges.
std::vector<int> depth_oracle(const TaskGraph& g) {
  std::vector<int> depth(g.size(), 0);
  std::function<int(TaskId)> visit = [&](TaskId v) {
    if (depth[v] != 0) return depth[v];
    int best = 0;
    for (const Edge& e : g.edges()) {
      if (e.to == v) best = std::max(best, visit(e.from));
    }
    return depth[v] = best + 1;
  };
  for (TaskId v = 0; v < g.size(); ++v) visit(v);
  return depth;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("path graph depths and boundary sets") {
  const TaskGraph g = TaskGraph::build({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
  CHECK(g.depth(0) == 1);
  CHECK(g.depth(1) == 2);
  CHECK(g.depth(2) == 3);
  CHECK(g.depth() == 3);
  CHECK(g.initial_tasks() == std::vector<TaskId>{0});
  CHECK(g.final_tasks() == std::vector<TaskId>{2});
  CHECK(g.is_path());
  CHECK(g.is_leveled());
  CHECK(degree_bound(g) == 1);
}

TEST_CASE("diamond depth and degree bound") {
  const TaskGraph g = TaskGraph::build({"a", "b", "c", "d"}, {{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}});
  CHECK(g.depth(*g.find("d")) == 3);
  CHECK(degree_bound(g) == 2);
  CHECK_FALSE(g.is_path());
  CHECK(named_edges(diamond_graph()) == named_edges(g));
}

TEST_CASE("build rejects invalid graphs") {
  CHECK(code_of([] { TaskGraph::build({"a", "b"}, {{"a", "b"}, {"b", "a"}}); }) == ErrorCode::CycleDetected);
  CHECK(code_of([] { TaskGraph::build({"a"}, {{"a", "a"}}); }) == ErrorCode::CycleDetected);
  CHECK(code_of([] { TaskGraph::build({"a", "b"}, {{"a", "z"}}); }) == ErrorCode::UnknownTask);
  CHECK(code_of([] { TaskGraph::build({"a", "b"}, {{"a", "b"}, {"a", "b"}}); }) == ErrorCode::DuplicateEdge);
  CHECK(code_of([] { TaskGraph::build({"a", "a"}, {}); }) == ErrorCode::DuplicateTask);
  CHECK(code_of([] { TaskGraph::build({}, {}); }) == ErrorCode::EmptyGraph);
}

TEST_CASE("leveled wrapper refuses graphs with level-skipping edges") {
  const TaskGraph g = TaskGraph::build({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"a", "c"}});
  CHECK(code_of([&] { LeveledTaskGraph{g}; }) == ErrorCode::NotLeveled);
}

TEST_CASE("levelize leaves a leveled diamond unchanged") {
  const TaskGraph g = diamond_graph();
  const LeveledTaskGraph lg = levelize(g);
  CHECK(lg.relay_count() == 0);
  CHECK(lg.graph().names() == g.names());
  CHECK(named_edges(lg.graph()) == named_edges(g));
}

TEST_CASE("levelize subdivides a skipping edge with one relay") {
  const TaskGraph g =
      TaskGraph::build({"a", "b", "c", "d"}, {{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}, {"a", "d"}});
  const LeveledTaskGraph lg = levelize(g);
  REQUIRE(lg.size() == 5);
  REQUIRE(lg.relay_count() == 1);
  const TaskId r = 4;
  CHECK(lg.is_relay(r));
  CHECK(lg.graph().depth(r) == 2);
  CHECK(lg.graph().predecessors(r).size() == 1);
  CHECK(lg.graph().successors(r).size() == 1);
  CHECK(lg.graph().name(lg.graph().predecessors(r)[0]) == "a");
  CHECK(lg.graph().name(lg.graph().successors(r)[0]) == "d");
  CHECK_FALSE(lg.graph().has_edge(0, 3));
  CHECK(lg.relay_origin(r).from == 0);
  CHECK(lg.relay_origin(r).to == 3);
  CHECK(lg.relay_origin(r).hop == 1);
  CHECK(lg.depth() == 3);
}

TEST_CASE("levelize leaves paths unchanged") {
  for (std::size_t n : {1u, 2u, 7u, 40u}) {
    const TaskGraph g = path_graph(n);
    const LeveledTaskGraph lg = levelize(g);
    CHECK(lg.relay_count() == 0);
    CHECK(named_edges(lg.graph()) == named_edges(g));
  }
}

TEST_CASE("degree bound of the infeasibility graph is 2c-1") {
  for (std::size_t c : {2u, 3u, 5u}) {
    CHECK(degree_bound(build_infeasibility_dag(c, 4).graph()) == 2 * c - 1);
  }
}

TEST_CASE("property: depth map matches a longest-path oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const TaskGraph g = random_dag(1 + rng.uniform_int(0, 29), 0.2, rng);
    const auto expected = depth_oracle(g);
    for (TaskId v = 0; v < g.size(); ++v) REQUIRE(g.depth(v) == expected[v]);
    REQUIRE(g.depth() == *std::max_element(expected.begin(), expected.end()));
  }
}

TEST_CASE("property: levelize preserves depth, levels every edge and is idempotent") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(0, 49);
    const TaskGraph g = random_dag(n, 0.15, rng);
    const LeveledTaskGraph lg = levelize(g);
    REQUIRE(lg.depth() == g.depth());
    for (const Edge& e : lg.graph().edges()) {
      REQUIRE(lg.graph().depth(e.to) == lg.graph().depth(e.from) + 1);
    }
    const LeveledTaskGraph twice = levelize(lg.graph());
    REQUIRE(twice.relay_count() == 0);
    REQUIRE(twice.graph().names() == lg.graph().names());
    REQUIRE(named_edges(twice.graph()) == named_edges(lg.graph()));
  }
}

TEST_CASE("property: contracting relay chains recovers the source graph") {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const TaskGraph g = random_dag(2 + rng.uniform_int(0, 30), 0.25, rng);
    const LeveledTaskGraph lg = levelize(g);
    const TaskGraph& h = lg.graph();
    REQUIRE(lg.original_size() == g.size());
    for (TaskId v = 0; v < g.size(); ++v) REQUIRE(h.name(v) == g.name(v));

    // Walk each chain starting at an original task until the next original task.
    NamedEdges contracted;
    for (TaskId u = 0; u < g.size(); ++u) {
      for (TaskId s : h.successors(u)) {
        TaskId cur = s;
        while (lg.is_relay(cur)) {
          REQUIRE(h.predecessors(cur).size() == 1);
          REQUIRE(h.successors(cur).size() == 1);
          cur = h.successors(cur)[0];
        }
        contracted.emplace(h.name(u), h.name(cur));
      }
    }
    REQUIRE(contracted == named_edges(g));
  }
}

TEST_CASE("relay names are deterministic") {
  const TaskGraph g = TaskGraph::build({"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"c", "d"}, {"a", "d"}});
  const LeveledTaskGraph first = levelize(g);
  const LeveledTaskGraph second = levelize(g);
  CHECK(first.graph().names() == second.graph().names());
  CHECK(first.relay_count() == 2);
}

TEST_CASE("random leveled generator respects its caps") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const RandomDagSpec spec{1 + rng.uniform_int(0, 60), 1 + rng.uniform_int(0, 5), 1 + rng.uniform_int(0, 3)};
    const TaskGraph g = random_leveled_dag(spec, rng);
    REQUIRE(g.size() == spec.tasks);
    REQUIRE(g.is_leveled());
    REQUIRE(degree_bound(g) <= spec.degree_cap);
  }
}

TEST_CASE("graph JSON round-trips bit-exactly") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const TaskGraph g = random_dag(1 + rng.uniform_int(0, 20), 0.3, rng);
    const std::string text = write_task_graph(g);
    const TaskGraph back = parse_task_graph(text);
    CHECK(write_task_graph(back) == text);
    CHECK(back.names() == g.names());
    CHECK(named_edges(back) == named_edges(g));
  }
  const TaskGraph parsed = parse_task_graph(R"({"tasks": ["x","y"], "edges": [["x","y"]]})");
  CHECK(parsed.size() == 2);
  CHECK(parsed.has_edge(0, 1));
}

TEST_CASE("graph loading errors") {
  CHECK(code_of([] { parse_task_graph("{not json"); }) == ErrorCode::GraphLoadFailed);
  CHECK(code_of([] { parse_task_graph(R"({"tasks": "a"})"); }) == ErrorCode::GraphLoadFailed);
  CHECK(code_of([] { parse_task_graph(R"({"tasks": ["a","b"], "edges": [["a","b"],["b","a"]]})"); }) ==
        ErrorCode::CycleDetected);
  CHECK(code_of([] { load_task_graph("/nonexistent/graph.json"); }) == ErrorCode::GraphLoadFailed);

  const auto path = std::filesystem::temp_directory_path() / "sdc_task_graph_roundtrip.json";
  save_task_graph(path, diamond_graph());
  CHECK(write_task_graph(load_task_graph(path)) == write_task_graph(diamond_graph()));
  std::filesystem::remove(path);
}
