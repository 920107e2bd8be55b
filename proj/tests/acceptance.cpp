// Acceptance checks. Each case prints exactly one "PASS|FAIL criterion N: ..." line.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "doctest.h"
#include "sdc/error.hpp"
#include "sdc/generators.hpp"
#include "sdc/harness.hpp"
#include "sdc/legacy.hpp"
#include "sdc/protocol.hpp"
#include "sdc/rng.hpp"
#include "sdc/task_graph.hpp"
#include "sdc/witness.hpp"
#include "sdc/worker_graph.hpp"

using namespace sdc;

namespace {

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  CHECK_MESSAGE(ok, detail);
}

unsigned pool_size() { return std::max(1u, std::thread::hardware_concurrency()); }

RunConfig adversarial_cell(std::size_t n, double beta) {
  RunConfig cfg;
  cfg.graph.kind = GraphSpec::Kind::Random;
  cfg.graph.n = n;
  cfg.graph.degree_cap = 3;
  cfg.beta = beta;
  cfg.auto_params = true;
  cfg.alpha = 0.5;
  cfg.hp_exponent = 1.0;
  cfg.profile = ConstantProfile::Lemma;
  cfg.adversary = "never";
  cfg.trials = 100;
  cfg.seed = 20240601 + n + static_cast<std::uint64_t>(beta * 100);
  cfg.threads = pool_size();
  return cfg;
}

// Test-local absorbing-chain solve for the hit probability from state 1.
double absorbing_chain_hit(double p, std::size_t n) {
  const double q = 1.0 - p;
  std::vector<std::vector<long double>> a(n, std::vector<long double>(n + 1, 0.0L));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = 1.0L;
    if (i + 1 < n) a[i][i + 1] = -p; else a[i][n] += p;
    if (i > 0) a[i][i - 1] = -q;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const long double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return static_cast<double>(a[0][n] / a[0][0]);
}

struct Instance {
  WorkerGraph workers;
  Assignment assignment;
  ExecutionTrace trace;
};

Instance random_instance(Rng& rng, std::size_t max_tasks, int delta, int gamma, double beta) {
  const TaskGraph g = random_leveled_dag({1 + rng.uniform_int(0, max_tasks - 1), 3, 2}, rng);
  WorkerGraph wg(levelize(g), {delta, gamma});
  Assignment a = sample_assignment(wg, beta, rng.next());
  ExecutionTrace t = simulate(wg, a, AdversaryStrategy::never_correct());
  return {std::move(wg), std::move(a), std::move(t)};
}

}  // namespace

TEST_CASE("criterion 1") {
  std::ostringstream detail;
  bool ok = true;
  for (std::size_t n : {50u, 200u}) {
    for (double beta : {0.6, 0.8}) {
      const TrialReport r = run_trials(adversarial_cell(n, beta));
      const double rate = r.aggregates.success_rate.mean;
      ok = ok && rate >= 0.95;
      detail << "n=" << n << " beta=" << beta << " success=" << rate << "; ";
    }
  }
  report(1, ok, "success rate >= 0.95 per cell: " + detail.str());
}

TEST_CASE("criterion 2") {
  std::ostringstream detail;
  bool ok = true;
  for (std::size_t n : {50u, 200u}) {
    for (double beta : {0.3, 0.5, 0.8}) {
      const TrialReport r = run_trials(adversarial_cell(n, beta));
      const double work = r.aggregates.executions_per_task.mean;
      ok = ok && work <= (beta <= 0.5 ? 1.10 : 1.5);
      detail << "n=" << n << " beta=" << beta << " executions/task=" << work << "; ";
    }
  }
  report(2, ok, "mean honest executions per task within limits: " + detail.str());
}

TEST_CASE("criterion 3") {
  std::uint64_t trials = 0;
  std::uint64_t exact = 0;
  for (std::size_t n : {50u, 200u}) {
    for (double beta : {0.3, 0.6, 0.8}) {
      RunConfig cfg = adversarial_cell(n, beta);
      cfg.seed += 7;
      for (const TrialRow& row : run_trials(cfg).rows) {
        ++trials;
        exact += row.rounds == static_cast<std::uint64_t>(row.gamma + (row.depth - 1) * row.delta);
      }
    }
  }
  // Explicit windows on fixed graphs as well.
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const int delta = static_cast<int>(1 + rng.uniform_int(0, 4));
    const int gamma = static_cast<int>(1 + rng.uniform_int(0, 12));
    const Instance inst = random_instance(rng, 12, delta, gamma, rng.uniform01() * 0.9);
    ++trials;
    exact += inst.trace.rounds_elapsed == gamma + (inst.workers.tasks().depth() - 1) * delta;
  }
  report(3, exact == trials,
         "rounds equal gamma + (D-1) delta in " + std::to_string(exact) + "/" + std::to_string(trials) + " trials");
}

TEST_CASE("criterion 4") {
  Rng rng(44);
  std::uint64_t failing = 0, sound = 0, valid = 0, bounded = 0, attempts = 0;
  while (failing < 1000 && attempts < 1'000'000) {
    ++attempts;
    const int delta = static_cast<int>(1 + rng.uniform_int(0, 2));
    const int gamma = static_cast<int>(2 + rng.uniform_int(0, 4));
    const Instance inst = random_instance(rng, 8, delta, gamma, 0.7);
    if (inst.trace.success) continue;
    ++failing;
    const WitnessSequence w = construct_witness_dag(inst.workers, inst.assignment, inst.trace.status);
    sound += is_witness_sequence(w, inst.workers);
    valid += is_valid_wrt(w, inst.workers, inst.assignment, inst.trace.status);
    bounded += check_bound(w, delta, gamma);
  }
  const bool ok = failing >= 1000 && sound == failing && valid == failing && bounded == failing;
  std::ostringstream detail;
  detail << failing << " failing traces; structural " << sound << ", valid " << valid << ", size bound " << bounded;
  report(4, ok, detail.str());
}

TEST_CASE("criterion 5") {
  Rng rng(55);
  std::uint64_t successful = 0, found = 0, attempts = 0, largest = 0;
  // Control: the same filtered search must find witnesses on failing traces.
  std::uint64_t failing = 0, failing_found = 0;
  while ((successful < 200 || failing < 200) && attempts < 100'000) {
    ++attempts;
    const int gamma = static_cast<int>(1 + rng.uniform_int(0, 5));
    const int delta = static_cast<int>(1 + rng.uniform_int(0, 2));
    const TaskGraph g = random_leveled_dag({1 + rng.uniform_int(0, 5), 3, 2}, rng);
    const LeveledTaskGraph lg = levelize(g);
    if (lg.size() * static_cast<std::size_t>(gamma) > 30) continue;
    const WorkerGraph wg(lg, {delta, gamma});
    const Assignment a = sample_assignment(wg, 0.2 + 0.4 * rng.uniform01(), rng.next());
    const ExecutionTrace t = simulate(wg, a, AdversaryStrategy::never_correct());
    if (!t.success) {
      if (failing >= 200) continue;
      ++failing;
      std::uint64_t hits = 0;
      for (const auto& [cls, count] : enumerate_witness_sequences(wg, {}, {&a, &t.status})) hits += count;
      failing_found += hits > 0;
      continue;
    }
    if (successful >= 200) continue;
    ++successful;
    largest = std::max<std::uint64_t>(largest, wg.node_count());
    for (const auto& [cls, count] : enumerate_witness_sequences(wg, {}, {&a, &t.status})) found += count;
  }
  std::ostringstream detail;
  detail << successful << " successful traces (up to " << largest << " workers); valid witness sequences found: "
         << found << "; control: " << failing_found << "/" << failing << " failing traces have one";
  report(5, successful >= 200 && found == 0 && failing_found == failing, detail.str());
}

TEST_CASE("criterion 6") {
  Rng rng(66);
  std::uint64_t matched = 0;
  const std::uint64_t trials = 1000;
  for (std::uint64_t i = 0; i < trials; ++i) {
    const int delta = static_cast<int>(1 + rng.uniform_int(0, 3));
    const int gamma = static_cast<int>(1 + rng.uniform_int(0, 10));
    const Instance inst = random_instance(rng, 15, delta, gamma, 0.95 * rng.uniform01());
    const std::vector<Status> oracle = classify_by_reachability(inst.workers, inst.assignment);
    bool same = true;
    for (std::size_t k = 0; k < inst.workers.node_count(); ++k) {
      if (inst.assignment.is_malicious(k)) continue;
      same = same && oracle[k] == inst.trace.status[k];
    }
    matched += same;
  }
  report(6, matched == trials,
         "simulator matches the reachability classifier in " + std::to_string(matched) + "/" +
             std::to_string(trials) + " trials");
}

TEST_CASE("criterion 7") {
  const std::vector<TaskGraph> graphs = {
      path_graph(2),
      path_graph(3),
      TaskGraph::build({"a", "b", "c"}, {{"a", "b"}, {"a", "c"}}),
      TaskGraph::build({"a", "b", "c"}, {{"a", "c"}, {"b", "c"}}),
      TaskGraph::build({"a", "b"}, {}),
  };
  std::uint64_t classes = 0, within = 0, instances = 0;
  for (const TaskGraph& g : graphs) {
    const std::size_t d = degree_bound(g);
    for (int delta = 1; delta <= 3; ++delta) {
      for (int gamma = 1; gamma * static_cast<int>(g.size()) <= 12; ++gamma) {
        const WorkerGraph wg(levelize(g), {delta, gamma});
        ++instances;
        for (const auto& [cls, count] : enumerate_witness_sequences(wg)) {
          ++classes;
          within += static_cast<long double>(count) <= witness_count_bound(g.size(), d, gamma, cls);
        }
      }
    }
  }
  report(7, classes > 0 && within == classes,
         std::to_string(within) + "/" + std::to_string(classes) + " realized classes within the count bound over " +
             std::to_string(instances) + " instances");
}

TEST_CASE("criterion 8") {
  auto mean_rounds = [](double beta, std::uint64_t seed) {
    double sum = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
      const PathRunResult r =
          simulate_path_protocol(1000, beta, AdversaryStrategy::never_correct(), derive_seed(seed, i), 10'000'000);
      REQUIRE(r.terminated);
      sum += static_cast<double>(r.rounds);
    }
    return sum / 200.0;
  };
  const double quarter = mean_rounds(0.25, 8);
  const double tenth = mean_rounds(0.10, 9);
  const bool quarter_ok = std::abs(quarter - 1333.3) <= 0.10 * 1333.3;
  const bool tenth_ok = std::abs(tenth - 1250.0) <= 0.10 * 1250.0;
  std::ostringstream detail;
  detail << "beta=0.25 mean rounds " << quarter << " vs 1333.3 (" << (quarter_ok ? "within" : "outside")
         << " 10%); beta=0.1 mean rounds " << tenth << " vs 1250 (" << (tenth_ok ? "within" : "outside") << " 10%)";
  report(8, quarter_ok && tenth_ok, detail.str());
}

TEST_CASE("criterion 9") {
  std::uint64_t stuck = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const PathRunResult r =
        simulate_path_protocol(50, 0.75, AdversaryStrategy::never_correct(), derive_seed(91, i), 1'000'000);
    stuck += !r.terminated;
  }
  const double stuck_rate = static_cast<double>(stuck) / 100.0;

  // Every run ends on its first hit, so hits / excursions estimates the per-excursion rate.
  std::uint64_t excursions = 0, hits = 0;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    const PathRunResult r =
        simulate_path_protocol(10, 0.6, AdversaryStrategy::never_correct(), derive_seed(92, i), 100'000'000);
    excursions += r.excursions;
    hits += r.target_hits;
  }
  const double oracle = absorbing_chain_hit(0.4, 10);
  const double formula = gambler_hitting_probability({0.4, 0.6, 10});
  const double e = static_cast<double>(excursions);
  const double freq = static_cast<double>(hits) / e;
  const double sigma = std::sqrt(formula * (1 - formula) / e);
  const bool freq_ok = std::abs(freq - formula) <= 3 * sigma && std::abs(formula - oracle) <= 1e-12;
  std::ostringstream detail;
  detail << "non-termination " << stuck_rate << " at beta=0.75 n=50; hit frequency " << freq << " over " << excursions
         << " excursions vs " << formula << " (chain solve " << oracle << ", sigma " << sigma << ")";
  report(9, stuck_rate >= 0.99 && freq_ok, detail.str());
}

TEST_CASE("criterion 10") {
  const std::pair<double, std::size_t> points[] = {{0.6, 5}, {0.4, 10}, {0.55, 8}};
  bool ok = true;
  std::ostringstream detail;
  std::uint64_t seed = 1000;
  for (const auto& [p, n] : points) {
    const RandomWalkModel m{p, 1.0 - p, n};
    const double f = gambler_hitting_probability(m);
    const double walks = 1e5;
    const double hits = static_cast<double>(count_target_hits(m, 100000, seed++));
    const double z = (hits - walks * f) / std::sqrt(walks * f * (1 - f));
    ok = ok && std::abs(z) <= 3.0;
    detail << "(p=" << p << ", n=" << n << ") formula " << f << " MC " << hits / walks << " z=" << z << "; ";
  }
  report(10, ok, detail.str());
}

TEST_CASE("criterion 11") {
  const LeveledTaskGraph g = build_infeasibility_dag(5, 20);
  std::uint64_t stuck = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const LegacyDagResult r =
        simulate_legacy_dag_protocol(g.graph(), 0.10, AdversaryStrategy::never_correct(), derive_seed(111, i), 100'000);
    stuck += !r.terminated;
  }
  const double rate = static_cast<double>(stuck) / 50.0;
  report(11, rate >= 0.95, "non-termination rate " + std::to_string(rate) + " on c=5, 20 levels, beta=0.10");
}

TEST_CASE("criterion 12") {
  std::uint64_t points = 0, with_premises = 0, bounded = 0;
  for (double n : {1e12, 1e20, 1e30, 1e60, 1e100}) {
    for (double d : {2.0, 8.0}) {
      for (double beta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        for (double alpha : {0.3, 0.6}) {
          const double c = points % 2 == 0 ? 1.0 : 2.0;
          ++points;
          const DerivedParams p = compute_params(n, d, beta, alpha, c, ConstantProfile::Strict);
          const FailureBound fb = failure_probability_bound(n, d, beta, p.delta, p.gamma, alpha, c);
          if (!fb.premises) continue;
          ++with_premises;
          bounded += fb.log_bound <= fb.log_target + 1e-9 * std::abs(fb.log_target);
        }
      }
    }
  }
  report(12, points == 100 && with_premises > 0 && bounded == with_premises,
         std::to_string(bounded) + "/" + std::to_string(with_premises) + " grid points with premises satisfy bound <= n^-c (" +
             std::to_string(points) + " points)");
}
