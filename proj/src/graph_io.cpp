#include "sdc/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sdc/error.hpp"

namespace sdc {

namespace {

std::string task_name(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw Error(ErrorCode::GraphLoadFailed, "task identifiers must be strings or integers");
}

}  // namespace

TaskGraph parse_task_graph(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::GraphLoadFailed, e.what());
  }
  if (!doc.is_object() || !doc.contains("tasks") || !doc["tasks"].is_array()) {
    throw Error(ErrorCode::GraphLoadFailed, "missing \"tasks\" array");
  }
  std::vector<std::string> tasks;
  for (const auto& t : doc["tasks"]) tasks.push_back(task_name(t));

  std::vector<std::pair<std::string, std::string>> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw Error(ErrorCode::GraphLoadFailed, "\"edges\" must be an array");
    for (const auto& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::GraphLoadFailed, "edge must be a pair");
      edges.emplace_back(task_name(e[0]), task_name(e[1]));
    }
  }
  return TaskGraph::build(std::move(tasks), edges);
}

std::string write_task_graph(const TaskGraph& g) {
  nlohmann::ordered_json doc;
  doc["tasks"] = g.names();
  auto edges = nlohmann::ordered_json::array();
  for (const Edge& e : g.edges()) edges.push_back({g.name(e.from), g.name(e.to)});
  doc["edges"] = std::move(edges);
  return doc.dump() + "\n";
}

TaskGraph load_task_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::GraphLoadFailed, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_task_graph(buf.str());
}

void save_task_graph(const std::filesystem::path& path, const TaskGraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + path.string());
  out << write_task_graph(g);
}

}  // namespace sdc
