#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "sdc/task_graph.hpp"

namespace sdc {

/// Parses `{"tasks": [...], "edges": [[u, v], ...]}`. Integer task ids are
/// accepted and read as their decimal string. Throws Error{GraphLoadFailed}
/// on malformed JSON and the build() errors on invalid graphs.
TaskGraph parse_task_graph(std::string_view json_text);

/// Canonical single-line encoding; parse_task_graph(write(g)) re-encodes
/// byte-identically.
std::string write_task_graph(const TaskGraph& g);

TaskGraph load_task_graph(const std::filesystem::path& path);
void save_task_graph(const std::filesystem::path& path, const TaskGraph& g);

}  // namespace sdc
