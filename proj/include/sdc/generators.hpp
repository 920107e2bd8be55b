#pragma once

#include <cstddef>

#include "sdc/rng.hpp"
#include "sdc/task_graph.hpp"

namespace sdc {

/// Chain v1 -> ... -> vn.
TaskGraph path_graph(std::size_t n);

/// a -> {b, c} -> d.
TaskGraph diamond_graph();

struct RandomDagSpec {
  std::size_t tasks = 20;
  std::size_t max_width = 4;
  std::size_t degree_cap = 3;
};

/**
 * Random leveled DAG. Level widths are drawn in [1, max_width] (and never
 * more than degree_cap times the previous width); each non-initial task
 * picks 1..degree_cap distinct predecessors uniformly among previous-level
 * tasks whose out-degree is still below the cap, so in- and out-degree
 * both stay <= degree_cap.
 */
TaskGraph random_leveled_dag(const RandomDagSpec& spec, Rng& rng);

/// Random DAG on n tasks (not leveled): edge i -> j (i < j) with probability p.
TaskGraph random_dag(std::size_t n, double edge_probability, Rng& rng);

}  // namespace sdc
