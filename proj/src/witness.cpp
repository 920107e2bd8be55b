#include "sdc/witness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "sdc/error.hpp"

namespace sdc {

std::vector<WorkerNode> WitnessSequence::pivots() const {
  std::vector<WorkerNode> out;
  for (const auto& tr : triples) {
    if (tr.w) out.push_back(*tr.w);
  }
  return out;
}

std::vector<bool> WitnessSequence::upward(const TaskGraph& g) const {
  std::vector<bool> out;
  for (std::size_t i = 0; i + 1 < triples.size(); ++i) {
    if (!triples[i].w) break;
    const TaskId v = triples[i].w->task;
    const WitnessTriple& next = triples[i + 1];
    const bool down = (!next.m.empty() && g.has_edge(v, next.m.task)) || (next.w && g.has_edge(v, next.w->task));
    out.push_back(!down);
  }
  return out;
}

std::size_t WitnessSequence::malicious_run_size() const {
  std::size_t k = 0;
  for (const auto& tr : triples) k += tr.m.size();
  return k;
}

std::size_t WitnessSequence::additional_run_size() const {
  std::size_t k = 0;
  for (const auto& tr : triples) k += tr.m_prime.size();
  return k;
}

namespace {

WitnessCheck fail(int clause, std::string detail) { return {false, clause, std::move(detail)}; }

void require_run(const WorkerRun& r, const WorkerGraph& workers) {
  if (r.empty()) return;
  if (!workers.contains({r.task, r.first}) || !workers.contains({r.task, r.last})) {
    throw Error(ErrorCode::UnknownNode, "witness run leaves the worker graph");
  }
}

// M' of an upward step from (v, t) onto predecessor u.
bool upward_extra_ok(const WorkerRun& mp, TaskId u, int t, const WorkerGraph& workers) {
  if (mp.empty() || mp.task != u) return false;
  const int two_delta = 2 * workers.delta();
  return mp.first <= t - two_delta && mp.last == std::min(mp.first + two_delta - 1, workers.t_max(u));
}

}  // namespace

WitnessCheck check_witness_sequence(const WitnessSequence& ws, const WorkerGraph& workers) {
  const TaskGraph& g = workers.tasks();
  const auto& T = ws.triples;

  for (const auto& tr : T) {
    require_run(tr.m, workers);
    require_run(tr.m_prime, workers);
    if (tr.w && !workers.contains(*tr.w)) throw Error(ErrorCode::UnknownNode, "witness pivot is not a worker");
  }
  if (T.empty()) return fail(0, "empty sequence");
  for (std::size_t i = 0; i + 1 < T.size(); ++i) {
    if (!T[i].w) return fail(0, "terminator before the last triple");
  }
  if (T.back().w) return fail(0, "last triple must end with the terminator");
  if (!T.back().m_prime.empty()) return fail(0, "last triple must have an empty M'");

  const std::size_t ell = T.size() - 1;
  const int delta = workers.delta();

  // Property 1.
  if (ell == 0) {
    const WorkerRun& m1 = T[0].m;
    if (m1.empty() || m1.first != workers.t_min(m1.task)) return fail(1, "M_1 does not start at t_min");
  } else {
    const WorkerNode w1 = *T[0].w;
    if (!(T[0].m == WorkerRun::span(w1.task, workers.t_min(w1.task), w1.round - 1))) {
      return fail(1, "M_1 is not the run from t_min up to w_1");
    }
  }

  // Property 2, including the step into the terminating triple.
  for (std::size_t i = 0; i < ell; ++i) {
    const auto [v, t] = *T[i].w;
    const WitnessTriple& next = T[i + 1];
    const WorkerRun& mp = T[i].m_prime;
    int matches = 0;

    for (TaskId s : g.successors(v)) {
      if (!mp.empty()) break;
      if (next.w && next.w->task == s && next.w->round > t &&
          next.m == WorkerRun::span(s, t + 1, next.w->round - 1)) {
        ++matches;  // (a)
      }
      if (!next.w && !next.m.empty() && next.m == WorkerRun::span(s, t + 1, workers.t_max(s))) ++matches;  // (b)
    }
    if (t >= workers.t_min(v) + delta) {
      for (TaskId p : g.predecessors(v)) {
        if (!upward_extra_ok(mp, p, t, workers)) continue;
        if (next.w && next.w->task == p && next.w->round >= t &&
            next.m == WorkerRun::span(p, t, next.w->round - 1)) {
          ++matches;  // (c)
        }
        if (!next.w && next.m == WorkerRun::span(p, t, workers.t_max(p))) ++matches;  // (d)
      }
    }
    if (matches != 1) {
      return fail(2, "step " + std::to_string(i + 1) + " matches " + std::to_string(matches) + " cases");
    }
  }

  // Property 3.
  std::vector<WorkerRun> runs;
  for (const auto& tr : T) {
    if (!tr.m.empty()) runs.push_back(tr.m);
    if (!tr.m_prime.empty()) runs.push_back(tr.m_prime);
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      if (runs[i].overlaps(runs[j])) return fail(3, "runs overlap at task " + g.name(runs[i].task));
    }
  }

  // Property 4.
  const WorkerRun& last = T.back().m;
  const bool reaches_end = !last.empty() && last.last == workers.t_max(last.task);
  bool stops_late = false;
  if (ell >= 1 && last.empty()) {
    const WorkerNode wl = *T[ell - 1].w;
    stops_late = wl.round >= workers.t_max(wl.task) - delta + 1;
  }
  if (reaches_end == stops_late) return fail(4, "termination condition");
  return {};
}

bool is_valid_wrt(const WitnessSequence& ws, const WorkerGraph& workers, const Assignment& assignment,
                  const std::vector<Status>& status) {
  auto all_malicious = [&](const WorkerRun& r) {
    for (int t = r.first; t <= r.last; ++t) {
      if (!assignment.is_malicious(workers.index({r.task, t}))) return false;
    }
    return true;
  };
  for (const auto& tr : ws.triples) {
    if (!all_malicious(tr.m) || !all_malicious(tr.m_prime)) return false;
  }
  const std::vector<bool> up = ws.upward(workers.tasks());
  const std::vector<WorkerNode> pivots = ws.pivots();
  if (up.size() != pivots.size()) return false;
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    const std::size_t idx = workers.index(pivots[i]);
    if (assignment.is_malicious(idx)) return false;
    if (status.at(idx) != (up[i] ? Status::Failed : Status::Successful)) return false;
  }
  return true;
}

namespace {

// Read-only queries over one classified assignment.
class Landscape {
 public:
  Landscape(const WorkerGraph& workers, const Assignment& a, const std::vector<Status>& s)
      : workers_(workers), a_(a), s_(s) {
    if (a.size() != workers.node_count() || s.size() != workers.node_count()) {
      throw Error(ErrorCode::InconsistentInputs, "assignment or statuses do not match the worker graph");
    }
  }

  const WorkerGraph& workers() const { return workers_; }
  const TaskGraph& graph() const { return workers_.tasks(); }
  Status status(TaskId v, int t) const { return s_[workers_.index({v, t})]; }
  bool honest(TaskId v, int t) const { return !a_.is_malicious(workers_.index({v, t})); }

  std::optional<int> first_honest(TaskId v, int from) const {
    for (int t = std::max(from, workers_.t_min(v)); t <= workers_.t_max(v); ++t) {
      if (honest(v, t)) return t;
    }
    return std::nullopt;
  }
  std::optional<int> first_successful(TaskId v) const {
    for (int t = workers_.t_min(v); t <= workers_.t_max(v); ++t) {
      if (status(v, t) == Status::Successful) return t;
    }
    return std::nullopt;
  }
  std::optional<int> last_successful_before(TaskId v, int round) const {
    for (int t = std::min(round - 1, workers_.t_max(v)); t >= workers_.t_min(v); --t) {
      if (status(v, t) == Status::Successful) return t;
    }
    return std::nullopt;
  }
  bool all_malicious(TaskId v) const { return !first_honest(v, workers_.t_min(v)); }
  bool delivers(TaskId u, int round) const {
    const RoundInterval r = workers_.sender_window(u, round);
    for (int t = r.first; t <= r.last; ++t) {
      if (status(u, t) == Status::Successful) return true;
    }
    return false;
  }
  bool succeeded() const {
    for (TaskId f : graph().final_tasks()) {
      if (!first_successful(f)) return false;
    }
    return true;
  }
  /// Smallest-id predecessor that gave (v, t) no correct output.
  std::optional<TaskId> silent_predecessor(TaskId v, int t) const {
    for (TaskId p : graph().predecessors(v)) {
      if (!delivers(p, t)) return p;
    }
    return std::nullopt;
  }
  /// M' for a failed pivot (v, t).
  WorkerRun extra_run(TaskId v, int t) const {
    const auto p = silent_predecessor(v, t);
    if (!p) throw Error(ErrorCode::Internal, "failed pivot has no silent predecessor");
    const auto s = last_successful_before(*p, t);
    if (!s) throw Error(ErrorCode::Internal, "no successful worker before a failed pivot");
    return WorkerRun::span(*p, *s + 1, std::min(*s + 2 * workers_.delta(), workers_.t_max(*p)));
  }
  WitnessTriple triple(WorkerRun m, TaskId v, int t) const {
    WitnessTriple tr{m, WorkerRun::none(), WorkerNode{v, t}};
    if (status(v, t) == Status::Failed) tr.m_prime = extra_run(v, t);
    return tr;
  }

 private:
  const WorkerGraph& workers_;
  const Assignment& a_;
  const std::vector<Status>& s_;
};

std::optional<WitnessSequence> all_malicious_witness(const Landscape& L) {
  for (TaskId v = 0; v < L.graph().size(); ++v) {
    if (L.all_malicious(v)) {
      return WitnessSequence{{{WorkerRun::span(v, L.workers().t_min(v), L.workers().t_max(v)), WorkerRun::none(),
                                std::nullopt}}};
    }
  }
  return std::nullopt;
}

// Success barrier at pivot (v, t): every ancestor has a last successful
// worker before t that no earlier upward step has already used.
void assert_success_barrier(const Landscape& L, const std::vector<WitnessTriple>& W, TaskId v, int t) {
  const TaskGraph& g = L.graph();
  for (TaskId u : g.ancestors(v)) {
    const auto s = L.last_successful_before(u, t);
    if (!s) throw Error(ErrorCode::Internal, "success barrier missing at ancestor " + g.name(u));
    for (std::size_t j = 0; j + 1 < W.size(); ++j) {
      const auto& wj = W[j].w;
      const auto& next = W[j + 1].w;
      if (!wj || !next || next->task != u) continue;
      if (L.status(wj->task, wj->round) != Status::Failed || !g.has_edge(u, wj->task)) continue;
      if (*s < wj->round && wj->round < t) {
        throw Error(ErrorCode::Internal, "success barrier worker at " + g.name(u) + " is already linked");
      }
    }
  }
}

}  // namespace

WitnessSequence construct_witness_dag(const WorkerGraph& workers, const Assignment& assignment,
                                      const std::vector<Status>& status) {
  const Landscape L(workers, assignment, status);
  const TaskGraph& g = workers.tasks();
  if (auto w = all_malicious_witness(L)) return *w;
  if (L.succeeded()) throw Error(ErrorCode::ComputationSucceeded, "every final task has a successful worker");

  std::optional<TaskId> v_fail;
  for (TaskId v = 0; v < g.size(); ++v) {
    if (L.first_successful(v)) continue;
    if (!v_fail || g.depth(v) < g.depth(*v_fail)) v_fail = v;
  }
  if (!v_fail) throw Error(ErrorCode::Internal, "failed computation without a failed task");

  // Walk up to a task whose first honest worker succeeded.
  std::vector<TaskId> stack;
  TaskId v = *v_fail;
  int t = *L.first_honest(v, workers.t_min(v));
  while (L.status(v, t) != Status::Successful) {
    std::optional<TaskId> best;
    int best_round = 0;
    for (TaskId p : g.predecessors(v)) {
      const auto fs = L.first_successful(p);
      if (!fs) throw Error(ErrorCode::Internal, "predecessor above the first failed level has no success");
      if (!best || *fs > best_round) {
        best = p;
        best_round = *fs;
      }
    }
    if (!best) throw Error(ErrorCode::Internal, "initial task with a failed first honest worker");
    stack.push_back(v);
    v = *best;
    t = *L.first_honest(v, workers.t_min(v));
  }

  std::vector<WitnessTriple> W;
  W.push_back({WorkerRun::span(v, workers.t_min(v), t - 1), WorkerRun::none(), WorkerNode{v, t}});
  assert_success_barrier(L, W, v, t);

  const std::size_t guard = 4 * workers.node_count() + 16;
  for (std::size_t step = 0;; ++step) {
    if (step > guard) throw Error(ErrorCode::Internal, "witness construction did not terminate");
    const auto [cur, round] = *W.back().w;

    if (L.status(cur, round) == Status::Successful) {
      if (stack.empty()) throw Error(ErrorCode::Internal, "successful pivot with an empty stack");
      const TaskId next = stack.back();
      stack.pop_back();
      if (!g.has_edge(cur, next)) throw Error(ErrorCode::Internal, "stack top is not a successor");
      if (round + 1 < workers.t_min(next)) {
        const int t1 = *L.first_honest(next, workers.t_min(next));
        W.clear();
        W.push_back(L.triple(WorkerRun::span(next, workers.t_min(next), t1 - 1), next, t1));
        assert_success_barrier(L, W, next, t1);
        continue;
      }
      const auto h = L.first_honest(next, round + 1);
      if (!h) {
        W.push_back({WorkerRun::span(next, round + 1, workers.t_max(next)), WorkerRun::none(), std::nullopt});
        break;
      }
      W.push_back(L.triple(WorkerRun::span(next, round + 1, *h - 1), next, *h));
      assert_success_barrier(L, W, next, *h);
    } else {
      const auto up = L.silent_predecessor(cur, round);
      if (!up) throw Error(ErrorCode::Internal, "failed pivot has no silent predecessor");
      stack.push_back(cur);
      if (round > workers.t_max(*up)) {
        W.push_back({WorkerRun::none(), WorkerRun::none(), std::nullopt});
        break;
      }
      const auto h = L.first_honest(*up, round);
      if (!h) {
        W.push_back({WorkerRun::span(*up, round, workers.t_max(*up)), WorkerRun::none(), std::nullopt});
        break;
      }
      W.push_back(L.triple(WorkerRun::span(*up, round, *h - 1), *up, *h));
      assert_success_barrier(L, W, *up, *h);
    }
  }
  return WitnessSequence{std::move(W)};
}

WitnessSequence construct_witness_path(const WorkerGraph& workers, const Assignment& assignment,
                                       const std::vector<Status>& status) {
  const TaskGraph& g = workers.tasks();
  if (!g.is_path()) throw Error(ErrorCode::NotAPath, "construction needs a directed path");
  const Landscape L(workers, assignment, status);
  if (auto w = all_malicious_witness(L)) return *w;
  if (L.succeeded()) throw Error(ErrorCode::ComputationSucceeded, "the final task has a successful worker");

  const std::vector<TaskId>& order = g.topological_order();
  auto next_of = [&](TaskId v) -> std::optional<TaskId> {
    if (g.successors(v).empty()) return std::nullopt;
    return g.successors(v)[0];
  };
  auto prev_of = [&](TaskId v) -> std::optional<TaskId> {
    if (g.predecessors(v).empty()) return std::nullopt;
    return g.predecessors(v)[0];
  };

  std::optional<TaskId> start;
  for (TaskId v : order) {
    const int fh = *L.first_honest(v, workers.t_min(v));
    if (L.status(v, fh) == Status::Successful) start = v;
  }
  if (!start) throw Error(ErrorCode::Internal, "no task with a successful first honest worker");

  std::vector<WitnessTriple> W;
  {
    const int t1 = *L.first_honest(*start, workers.t_min(*start));
    W.push_back({WorkerRun::span(*start, workers.t_min(*start), t1 - 1), WorkerRun::none(), WorkerNode{*start, t1}});
  }

  const std::size_t guard = 4 * workers.node_count() + 16;
  for (std::size_t step = 0;; ++step) {
    if (step > guard) throw Error(ErrorCode::Internal, "witness construction did not terminate");
    const auto [cur, round] = *W.back().w;
    if (L.status(cur, round) == Status::Successful) {
      const auto next = next_of(cur);
      if (!next) throw Error(ErrorCode::Internal, "successful pivot on the last task");
      if (round + 1 < workers.t_min(*next)) {
        const int t1 = *L.first_honest(*next, workers.t_min(*next));
        W.clear();
        W.push_back(L.triple(WorkerRun::span(*next, workers.t_min(*next), t1 - 1), *next, t1));
        continue;
      }
      const auto h = L.first_honest(*next, round + 1);
      if (!h) {
        W.push_back({WorkerRun::span(*next, round + 1, workers.t_max(*next)), WorkerRun::none(), std::nullopt});
        break;
      }
      W.push_back(L.triple(WorkerRun::span(*next, round + 1, *h - 1), *next, *h));
    } else {
      const auto prev = prev_of(cur);
      if (!prev) throw Error(ErrorCode::Internal, "failed pivot on the first task");
      if (round > workers.t_max(*prev)) {
        W.push_back({WorkerRun::none(), WorkerRun::none(), std::nullopt});
        break;
      }
      const auto h = L.first_honest(*prev, round);
      if (!h) {
        W.push_back({WorkerRun::span(*prev, round, workers.t_max(*prev)), WorkerRun::none(), std::nullopt});
        break;
      }
      W.push_back(L.triple(WorkerRun::span(*prev, round, *h - 1), *prev, *h));
    }
  }
  return WitnessSequence{std::move(W)};
}

std::size_t malicious_count(const WitnessSequence& ws) {
  std::vector<std::pair<TaskId, int>> nodes;
  for (const auto& tr : ws.triples) {
    for (const WorkerRun* r : {&tr.m, &tr.m_prime}) {
      for (int t = r->first; t <= r->last; ++t) nodes.emplace_back(r->task, t);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  return static_cast<std::size_t>(std::unique(nodes.begin(), nodes.end()) - nodes.begin());
}

bool check_bound(const WitnessSequence& ws, int delta, int gamma) {
  const auto ell = static_cast<long long>(ws.length());
  const long long need = std::max(static_cast<long long>(delta - 1) * ell, static_cast<long long>(gamma));
  return static_cast<long long>(malicious_count(ws)) >= need;
}

namespace {

class Enumerator {
 public:
  Enumerator(const WorkerGraph& workers, const EnumerationCaps& caps, const ValidityFilter& filter)
      : workers_(workers), g_(workers.tasks()), caps_(caps), filter_(filter), used_(workers.node_count(), 0) {}

  std::map<WitnessClass, std::uint64_t> run() {
    for (TaskId v = 0; v < g_.size(); ++v) {
      // No pivots: the whole task.
      {
        Scoped all(*this, WorkerRun::span(v, workers_.t_min(v), workers_.t_max(v)), &m_size_);
        if (all.ok) record(0);
      }
      for (int t1 = workers_.t_min(v); t1 <= workers_.t_max(v); ++t1) {
        Scoped m1(*this, WorkerRun::span(v, workers_.t_min(v), t1 - 1), &m_size_);
        if (m1.ok) extend({v, t1}, 0);
      }
    }
    return std::move(counts_);
  }

 private:
  bool filtered() const { return filter_.assignment != nullptr; }
  bool malicious(const WorkerNode& w) const { return filter_.assignment->is_malicious(workers_.index(w)); }

  // Marks a run as used if it is disjoint from everything taken so far.
  bool take(const WorkerRun& r) {
    if (r.empty()) return true;
    if (m_size_ + mp_size_ + r.size() > caps_.max_malicious) return false;
    for (int t = r.first; t <= r.last; ++t) {
      const std::size_t i = workers_.index({r.task, t});
      if (used_[i] || (filtered() && !malicious({r.task, t}))) return false;
    }
    for (int t = r.first; t <= r.last; ++t) used_[workers_.index({r.task, t})] = 1;
    return true;
  }
  void release(const WorkerRun& r) {
    for (int t = r.first; t <= r.last; ++t) used_[workers_.index({r.task, t})] = 0;
  }

  struct Scoped {
    Enumerator& e;
    WorkerRun r;
    std::size_t* counter;
    bool ok;
    Scoped(Enumerator& e_, WorkerRun r_, std::size_t* c) : e(e_), r(r_), counter(c), ok(e_.take(r_)) {
      if (ok) *counter += r.size();
    }
    ~Scoped() {
      if (ok) {
        e.release(r);
        *counter -= r.size();
      }
    }
  };

  void record(std::size_t pivots) { ++counts_[WitnessClass{m_size_, pivots, upward_}]; }

  bool pivot_allowed(const WorkerNode& w, bool up) const {
    if (!filtered()) return true;
    const std::size_t i = workers_.index(w);
    if (filter_.assignment->is_malicious(i)) return false;
    return (*filter_.status)[i] == (up ? Status::Failed : Status::Successful);
  }

  // `w` is the latest pivot; `pivots` counts those before it.
  void extend(const WorkerNode& w, std::size_t pivots) {
    const std::size_t h = pivots + 1;
    if (h > caps_.max_pivots) return;
    const auto [v, t] = w;
    const int delta = workers_.delta();

    if (pivot_allowed(w, false)) {
      for (TaskId s : g_.successors(v)) {
        if (t + 1 < workers_.t_min(s)) continue;
        {
          Scoped stop(*this, WorkerRun::span(s, t + 1, workers_.t_max(s)), &m_size_);
          if (stop.ok) record(h);
        }
        for (int t2 = t + 1; t2 <= workers_.t_max(s); ++t2) {
          Scoped m(*this, WorkerRun::span(s, t + 1, t2 - 1), &m_size_);
          if (m.ok) extend({s, t2}, h);
        }
      }
    }
    if (t >= workers_.t_min(v) + delta && pivot_allowed(w, true)) {
      ++upward_;
      for (TaskId p : g_.predecessors(v)) {
        for (int t3 = workers_.t_min(p); t3 <= std::min(t - 2 * delta, workers_.t_max(p)); ++t3) {
          Scoped extra(*this, WorkerRun::span(p, t3, std::min(t3 + 2 * delta - 1, workers_.t_max(p))), &mp_size_);
          if (!extra.ok) continue;
          {
            Scoped stop(*this, WorkerRun::span(p, t, workers_.t_max(p)), &m_size_);
            if (stop.ok) record(h);
          }
          for (int t2 = t; t2 <= workers_.t_max(p); ++t2) {
            Scoped m(*this, WorkerRun::span(p, t, t2 - 1), &m_size_);
            if (m.ok) extend({p, t2}, h);
          }
        }
      }
      --upward_;
    }
  }

  const WorkerGraph& workers_;
  const TaskGraph& g_;
  EnumerationCaps caps_;
  ValidityFilter filter_;
  std::vector<std::uint8_t> used_;
  std::size_t m_size_ = 0;
  std::size_t mp_size_ = 0;
  std::size_t upward_ = 0;
  std::map<WitnessClass, std::uint64_t> counts_;
};

}  // namespace

std::map<WitnessClass, std::uint64_t> enumerate_witness_sequences(const WorkerGraph& workers,
                                                                  const EnumerationCaps& caps,
                                                                  const ValidityFilter& filter) {
  if (workers.node_count() > 40) {
    throw Error(ErrorCode::InstanceTooLarge, "enumeration is limited to n * gamma <= 40");
  }
  if ((filter.assignment == nullptr) != (filter.status == nullptr)) {
    throw Error(ErrorCode::InconsistentInputs, "validity filter needs both assignment and statuses");
  }
  return Enumerator(workers, caps, filter).run();
}

long double witness_count_bound(std::size_t n, std::size_t d, int gamma, const WitnessClass& cls) {
  const long double dd = static_cast<long double>(std::max<std::size_t>(d, 1));
  long double binom = 1.0L;
  for (std::size_t i = 1; i <= cls.pivots; ++i) {
    binom = binom * static_cast<long double>(cls.malicious + i) / static_cast<long double>(i);
  }
  return static_cast<long double>(n) * binom *
         std::pow(2.0L * static_cast<long double>(gamma) * dd, static_cast<long double>(cls.pivots));
}

FailureBound failure_probability_bound(double n, double d, double beta, int delta, int gamma, double alpha,
                                       double c) {
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorCode::ParamOutOfRange, "beta must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::ParamOutOfRange, "alpha must lie in (0, 1)");
  if (delta < 2) throw Error(ErrorCode::ParamOutOfRange, "delta must be >= 2");
  if (gamma < 1 || !(n >= 1.0) || !(d >= 1.0) || !(c > 0.0)) {
    throw Error(ErrorCode::ParamOutOfRange, "n, d, gamma must be >= 1 and c > 0");
  }
  const double ln_inv_beta = std::log(1.0 / beta);
  const double g = static_cast<double>(gamma);

  FailureBound b;
  b.log_bound = 3.0 * std::log(g * n) + std::log(n) - g * (1.0 - alpha) * ln_inv_beta;
  b.bound = std::exp(b.log_bound);
  b.log_target = -c * std::log(n);
  b.star_threshold = std::log(2.0 * std::numbers::e * delta * g * d) / ln_inv_beta / (delta - 1);
  b.star_holds = alpha >= b.star_threshold;
  // Same relative slack as the parameter solver's ceil, so exact integers are accepted.
  const double gamma_floor = (c + 5.0) / (1.0 - alpha) * std::log(n) / ln_inv_beta;
  b.gamma_holds = g >= gamma_floor * (1.0 - 1e-9);
  b.gamma_cubed_holds = g * g * g <= n;
  b.premises = b.star_holds && b.gamma_holds && b.gamma_cubed_holds;
  return b;
}

namespace {

nlohmann::ordered_json run_json(const WorkerRun& r, const TaskGraph& g) {
  auto out = nlohmann::ordered_json::array();
  for (int t = r.first; t <= r.last; ++t) out.push_back({g.name(r.task), t});
  return out;
}

WorkerNode node_from(const nlohmann::json& j, const TaskGraph& g) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::ConfigInvalid, "node must be [task, round]");
  const std::string name = j[0].is_string() ? j[0].get<std::string>() : j[0].dump();
  const auto v = g.find(name);
  if (!v) throw Error(ErrorCode::UnknownNode, "unknown task '" + name + "' in witness");
  return {*v, j[1].get<int>()};
}

WorkerRun run_from(const nlohmann::json& j, const TaskGraph& g) {
  if (!j.is_array()) throw Error(ErrorCode::ConfigInvalid, "run must be a list of nodes");
  if (j.empty()) return WorkerRun::none();
  WorkerRun r{};
  for (std::size_t i = 0; i < j.size(); ++i) {
    const WorkerNode w = node_from(j[i], g);
    if (i == 0) {
      r = {w.task, w.round, w.round};
    } else if (w.task == r.task && w.round == r.last + 1) {
      r.last = w.round;
    } else {
      throw Error(ErrorCode::ConfigInvalid, "run is not contiguous within one task");
    }
  }
  return r;
}

}  // namespace

std::string write_witness_json(const WitnessSequence& ws, const TaskGraph& g) {
  nlohmann::ordered_json doc;
  auto triples = nlohmann::ordered_json::array();
  for (const auto& tr : ws.triples) {
    nlohmann::ordered_json j;
    j["M"] = run_json(tr.m, g);
    j["M_prime"] = run_json(tr.m_prime, g);
    j["w"] = tr.w ? nlohmann::ordered_json::array({g.name(tr.w->task), tr.w->round}) : nlohmann::ordered_json();
    triples.push_back(std::move(j));
  }
  doc["triples"] = std::move(triples);
  return doc.dump() + "\n";
}

WitnessSequence parse_witness_json(std::string_view text, const TaskGraph& g) {
  try {
    const auto doc = nlohmann::json::parse(text);
    WitnessSequence ws;
    for (const auto& j : doc.at("triples")) {
      WitnessTriple tr;
      tr.m = run_from(j.at("M"), g);
      tr.m_prime = run_from(j.value("M_prime", nlohmann::json::array()), g);
      if (j.contains("w") && !j["w"].is_null()) tr.w = node_from(j["w"], g);
      ws.triples.push_back(tr);
    }
    return ws;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("witness: ") + e.what());
  }
}

}  // namespace sdc
