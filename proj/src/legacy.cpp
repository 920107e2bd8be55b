#include "sdc/legacy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdc/error.hpp"
#include "sdc/rng.hpp"

namespace sdc {

double gambler_hitting_probability(const RandomWalkModel& m) {
  if (!(m.p > 0.0 && m.p < 1.0) || std::abs(m.p + m.q - 1.0) > 1e-12) {
    throw Error(ErrorCode::DegenerateWalk, "walk needs 0 < p < 1 and p + q = 1");
  }
  if (m.n == 0) throw Error(ErrorCode::DegenerateWalk, "walk needs n >= 1");
  const double steps = static_cast<double>(m.n) + 1.0;
  if (std::abs(m.p - m.q) < 1e-15) return 1.0 / steps;
  const double log_ratio = std::log(m.q / m.p);
  // expm1 keeps precision when q/p is close to 1.
  return std::expm1(log_ratio) / std::expm1(steps * log_ratio);
}

std::uint64_t count_target_hits(const RandomWalkModel& m, std::uint64_t walks, std::uint64_t seed) {
  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t k = 0; k < walks; ++k) {
    std::size_t state = 1;
    while (state != 0 && state != m.n + 1) state = rng.bernoulli(m.p) ? state + 1 : state - 1;
    hits += state == m.n + 1 ? 1 : 0;
  }
  return hits;
}

PathRunResult simulate_path_protocol(std::size_t n, double beta, const AdversaryStrategy& strategy,
                                     std::uint64_t seed, std::uint64_t round_cap) {
  if (n == 0) throw Error(ErrorCode::ParamOutOfRange, "path protocol needs n >= 1");
  if (round_cap == 0) throw Error(ErrorCode::ParamOutOfRange, "round_cap must be positive");
  if (!(beta >= 0.0 && beta < 1.0)) throw Error(ErrorCode::BetaOutOfRange, "beta must lie in [0, 1)");

  Rng rng(seed);
  PathRunResult r;
  std::uint64_t assignment = 0;
  while (r.rounds < round_cap) {
    ++r.rounds;
    if (r.position == n + 1) {
      // The target accepts the submission handed over last round.
      r.terminated = true;
      ++r.target_hits;
      ++r.excursions;
      break;
    }
    const std::size_t i = r.position;
    if (i == 1) ++r.source_sends;
    const bool malicious = rng.bernoulli(beta);
    const Message reply = malicious ? strategy.decide(assignment, i, MessageKind::PrecedingTask) : Message::Correct;
    ++assignment;

    if (reply == Message::Silent) {
      ++r.timeouts;
    } else if (reply == Message::Correct) {
      ++r.honest_assignments;
      if (i == n) ++r.target_receives;
      r.position = i + 1;
    } else {
      ++r.rejects;
      if (i == 1) {
        ++r.clamped_rejects;
        ++r.excursions;  // the walk fell back to the source
      } else {
        r.position = i - 1;
      }
    }
  }
  return r;
}

LegacyDagSupervisor::LegacyDagSupervisor(const TaskGraph& g) : g_(g), finished_(g.size(), 0) {}

std::vector<TaskId> LegacyDagSupervisor::frontier() const {
  std::vector<TaskId> out;
  for (TaskId v = 0; v < g_.size(); ++v) {
    if (finished_[v]) continue;
    const auto preds = g_.predecessors(v);
    if (std::all_of(preds.begin(), preds.end(), [&](TaskId u) { return finished_[u] != 0; })) out.push_back(v);
  }
  return out;
}

void LegacyDagSupervisor::apply(const std::vector<LegacyReply>& replies) {
  for (const auto& r : replies) {
    if (r.kind == LegacyReply::Kind::Done) finished_.at(r.task) = 1;
  }
  std::vector<TaskId> stack;
  for (const auto& r : replies) {
    if (r.kind != LegacyReply::Kind::Reject) continue;
    stack.push_back(r.task);
    stack.insert(stack.end(), r.rejected.begin(), r.rejected.end());
  }
  // Remove rejected tasks and everything reachable from them.
  std::vector<std::uint8_t> seen(g_.size(), 0);
  while (!stack.empty()) {
    const TaskId u = stack.back();
    stack.pop_back();
    if (seen.at(u)) continue;
    seen[u] = 1;
    finished_[u] = 0;
    for (TaskId s : g_.successors(u)) stack.push_back(s);
  }
}

std::size_t LegacyDagSupervisor::finished_count() const {
  return static_cast<std::size_t>(std::count(finished_.begin(), finished_.end(), 1));
}

bool LegacyDagSupervisor::all_final_finished() const {
  const auto& finals = g_.final_tasks();
  return std::all_of(finals.begin(), finals.end(), [&](TaskId v) { return finished_[v] != 0; });
}

bool LegacyDagSupervisor::downward_closed() const {
  for (TaskId v = 0; v < g_.size(); ++v) {
    if (!finished_[v]) continue;
    for (TaskId u : g_.predecessors(v)) {
      if (!finished_[u]) return false;
    }
  }
  return true;
}

LegacyDagResult simulate_legacy_dag_protocol(const TaskGraph& g, double beta, const AdversaryStrategy& strategy,
                                             std::uint64_t seed, std::uint64_t round_cap,
                                             const std::function<void(const LegacyDagSupervisor&)>& observer) {
  if (round_cap == 0) throw Error(ErrorCode::ParamOutOfRange, "round_cap must be positive");
  if (!(beta >= 0.0 && beta < 1.0)) throw Error(ErrorCode::BetaOutOfRange, "beta must lie in [0, 1)");

  Rng rng(seed);
  LegacyDagSupervisor sup(g);
  LegacyDagResult r;
  std::vector<LegacyReply> replies;
  while (r.rounds < round_cap) {
    ++r.rounds;
    replies.clear();
    for (TaskId v : sup.frontier()) {
      const bool malicious = rng.bernoulli(beta);
      const Message m = malicious ? strategy.decide(r.assignments, v, MessageKind::PrecedingTask) : Message::Correct;
      ++r.assignments;
      LegacyReply reply{v, LegacyReply::Kind::Done, {}};
      if (m == Message::Silent) {
        reply.kind = LegacyReply::Kind::Timeout;
      } else if (m == Message::Garbage) {
        reply.kind = LegacyReply::Kind::Reject;
        const auto preds = g.predecessors(v);
        reply.rejected.assign(preds.begin(), preds.end());
        ++r.rejects;
      }
      replies.push_back(std::move(reply));
    }
    sup.apply(replies);
    if (observer) observer(sup);
    if (sup.all_final_finished()) {
      r.terminated = true;
      break;
    }
  }
  return r;
}

LeveledTaskGraph build_infeasibility_dag(std::size_t c, std::size_t n_levels) {
  if (c < 2 || n_levels < 2) throw Error(ErrorCode::ParamOutOfRange, "needs c >= 2 and at least two levels");
  const std::size_t width = c * c;
  auto name = [](std::size_t level, std::size_t k) { return "L" + std::to_string(level) + "." + std::to_string(k); };

  std::vector<std::string> tasks;
  for (std::size_t i = 0; i < n_levels; ++i) {
    for (std::size_t k = 0; k < width; ++k) tasks.push_back(name(i, k));
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t i = 0; i + 1 < n_levels; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      for (std::size_t k = 0; k < c; ++k) {
        const std::string from = name(i, c * j + k);
        for (std::size_t k2 = 0; k2 < c; ++k2) edges.emplace_back(from, name(i + 1, c * j + k2));
        for (std::size_t j2 = 0; j2 < c; ++j2) {
          if (j2 != j) edges.emplace_back(from, name(i + 1, c * j2 + k));
        }
      }
    }
  }
  return LeveledTaskGraph(TaskGraph::build(std::move(tasks), edges));
}

}  // namespace sdc
