#include "sdc/protocol.hpp"

#include <cstdio>
#include <cmath>

#include "json.hpp"
#include "sdc/error.hpp"
#include "sdc/graph_io.hpp"
#include "sdc/rng.hpp"

namespace sdc {

namespace {

std::uint64_t hash_labels(const std::vector<Label>& labels) {
  std::uint64_t h = mix64(labels.size());
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    word = (word << 1) | (labels[i] == Label::Malicious ? 1U : 0U);
    if (i % 64 == 63) {
      h = mix64(h ^ word);
      word = 0;
    }
  }
  return mix64(h ^ word ^ 0x5bd1e995ULL);
}

}  // namespace

Assignment::Assignment(std::vector<Label> labels) : labels_(std::move(labels)), fingerprint_(hash_labels(labels_)) {}

std::size_t Assignment::malicious_count() const noexcept {
  std::size_t k = 0;
  for (Label l : labels_) k += l == Label::Malicious ? 1 : 0;
  return k;
}

Assignment sample_assignment(const WorkerGraph& workers, double beta, std::uint64_t seed) {
  if (!(beta >= 0.0 && beta < 1.0)) throw Error(ErrorCode::BetaOutOfRange, "beta must lie in [0, 1)");
  Rng rng(seed);
  std::vector<Label> labels(workers.node_count(), Label::Honest);
  for (auto& l : labels) {
    if (rng.bernoulli(beta)) l = Label::Malicious;
  }
  return Assignment(std::move(labels));
}

AdversaryStrategy AdversaryStrategy::probabilistic(double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "adversary probability must lie in [0, 1]");
  return {Kind::ProbabilisticCorrect, p, seed};
}

AdversaryStrategy AdversaryStrategy::parse(std::string_view text, std::uint64_t seed) {
  if (text == "never") return never_correct();
  if (text == "always") return always_correct();
  if (text == "silent") return silent();
  if (text.starts_with("prob:")) {
    const std::string number(text.substr(5));
    std::size_t used = 0;
    double p = 0;
    try {
      p = std::stod(number, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != number.size()) {
      throw Error(ErrorCode::ConfigInvalid, "bad adversary probability '" + number + "'");
    }
    return probabilistic(p, seed);
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown adversary '" + std::string(text) + "'");
}

std::string AdversaryStrategy::to_string() const {
  switch (kind_) {
    case Kind::NeverCorrect: return "never";
    case Kind::AlwaysCorrect: return "always";
    case Kind::Silent: return "silent";
    case Kind::ProbabilisticCorrect: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "prob:%.17g", p_);
      return buf;
    }
  }
  return "never";
}

Message AdversaryStrategy::decide(std::size_t sender, std::size_t recipient, MessageKind kind) const {
  switch (kind_) {
    case Kind::NeverCorrect: return Message::Garbage;
    case Kind::AlwaysCorrect: return Message::Correct;
    case Kind::Silent: return Message::Silent;
    case Kind::ProbabilisticCorrect: {
      std::uint64_t h = mix64(seed_ ^ mix64(sender));
      h = mix64(h ^ mix64(recipient + 0x9E37ULL));
      h = mix64(h ^ static_cast<std::uint64_t>(kind));
      const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
      return u < p_ ? Message::Correct : Message::Garbage;
    }
  }
  return Message::Garbage;
}

double Metrics::mean_executions_per_task() const {
  if (executions_per_task.empty()) return 0.0;
  return static_cast<double>(total_honest_executions) / static_cast<double>(executions_per_task.size());
}

double Metrics::verifications_per_honest_worker() const {
  if (honest_workers == 0) return 0.0;
  return static_cast<double>(total_verifications) / static_cast<double>(honest_workers);
}

ExecutionTrace simulate(const WorkerGraph& workers, const Assignment& assignment,
                        const AdversaryStrategy& strategy) {
  const std::size_t nodes = workers.node_count();
  if (assignment.size() != nodes) {
    throw Error(ErrorCode::InconsistentInputs, "assignment covers " + std::to_string(assignment.size()) +
                                                   " nodes, worker graph has " + std::to_string(nodes));
  }
  const TaskGraph& g = workers.tasks();
  const std::size_t n = g.size();

  ExecutionTrace tr;
  tr.assignment_fingerprint = assignment.fingerprint();
  tr.labels = assignment.labels();
  tr.status.assign(nodes, Status::Failed);
  tr.executed.assign(nodes, 0);
  tr.verifications.assign(nodes, 0);
  tr.messages_sent.assign(nodes, 0);
  tr.messages_received.assign(nodes, 0);
  tr.source_sends.assign(n, 0);
  tr.target_receives.assign(n, 0);
  tr.target_verifications.assign(n, 0);
  Metrics& m = tr.metrics;
  m.executions_per_task.assign(n, 0);

  // What recipient `to` finds in a message from already-processed node `from`.
  auto message = [&](std::size_t from, std::size_t to, MessageKind kind) {
    if (assignment.is_malicious(from)) return strategy.decide(from, to, kind);
    return tr.status[from] == Status::Successful ? Message::Correct : Message::Garbage;
  };

  // Delivers every message of one sender window and verifies newest first
  // until one verifies (when `verify` is set). Returns whether one did.
  auto receive_window = [&](std::size_t to, TaskId source, int round, MessageKind kind, bool verify) {
    const RoundInterval r = workers.sender_window(source, round);
    bool ok = false;
    for (int s = r.last; s >= r.first; --s) {
      const std::size_t from = workers.index({source, s});
      ++m.supervisor_introductions;
      const Message msg = message(from, to, kind);
      if (msg == Message::Silent) continue;
      ++tr.messages_sent[from];
      ++tr.messages_received[to];
      if (verify && !ok) {
        ++tr.verifications[to];
        ok = msg == Message::Correct;
      }
    }
    return ok;
  };

  const int rounds = workers.total_rounds();
  for (int t = 1; t <= rounds; ++t) {
    for (TaskId v = 0; v < n; ++v) {
      if (t < workers.t_min(v) || t > workers.t_max(v)) continue;
      const std::size_t w = workers.index({v, t});
      ++m.supervisor_assignments;

      if (assignment.is_malicious(w)) {
        tr.status[w] = Status::Malicious;
      } else {
        ++m.honest_workers;
        bool has_output = receive_window(w, v, t, MessageKind::SameTask, true);
        if (!has_output) {
          if (g.is_initial(v)) {
            ++tr.source_sends[v];
            ++m.supervisor_introductions;
            has_output = true;
          } else {
            bool all = true;
            for (TaskId p : g.predecessors(v)) {
              // Once one predecessor has failed to deliver there is nothing left to verify for.
              all = receive_window(w, p, t, MessageKind::PrecedingTask, all) && all;
            }
            has_output = all;
          }
          if (has_output) {
            tr.executed[w] = 1;
            ++m.executions_per_task[v];
            ++m.total_honest_executions;
          }
        }
        tr.status[w] = has_output ? Status::Successful : Status::Failed;
        m.total_verifications += tr.verifications[w];
      }

      if (g.is_final(v)) {
        bool submits = false;
        if (assignment.is_malicious(w)) {
          submits = strategy.decide(w, AdversaryStrategy::target_recipient, MessageKind::Target) != Message::Silent;
        } else {
          submits = tr.status[w] == Status::Successful;
        }
        if (submits) {
          ++m.supervisor_introductions;
          ++tr.messages_sent[w];
          ++tr.target_receives[v];
          ++tr.target_verifications[v];
        }
      }
    }
  }

  tr.rounds_elapsed = rounds;
  m.rounds = rounds;
  tr.success = true;
  for (TaskId f : g.final_tasks()) {
    bool delivered = false;
    for (int t = workers.t_min(f); t <= workers.t_max(f) && !delivered; ++t) {
      delivered = tr.status[workers.index({f, t})] == Status::Successful;
    }
    tr.success = tr.success && delivered;
  }
  for (TaskId v = 0; v < n; ++v) {
    m.source_sends += tr.source_sends[v];
    m.target_receives += tr.target_receives[v];
    m.target_verifications += tr.target_verifications[v];
  }
  return tr;
}

std::vector<Status> classify_by_reachability(const WorkerGraph& workers, const Assignment& assignment) {
  const TaskGraph& g = workers.tasks();
  const std::size_t n = g.size();
  const int gamma = workers.gamma();
  if (assignment.size() != workers.node_count()) {
    throw Error(ErrorCode::InconsistentInputs, "assignment does not match worker graph");
  }

  // reached[v][k] = number of successful nodes among the first k workers of v.
  std::vector<std::vector<int>> reached(n, std::vector<int>(static_cast<std::size_t>(gamma) + 1, 0));
  std::vector<Status> out(workers.node_count(), Status::Malicious);

  auto successes_between = [&](TaskId u, int first_round, int last_round) {
    first_round = std::max(first_round, workers.t_min(u));
    last_round = std::min(last_round, workers.t_max(u));
    if (last_round < first_round) return 0;
    const auto& pre = reached[u];
    return pre[static_cast<std::size_t>(last_round - workers.t_min(u) + 1)] -
           pre[static_cast<std::size_t>(first_round - workers.t_min(u))];
  };

  // Round-major sweep; a node's in-edges all come from strictly earlier rounds.
  const int span = 2 * workers.delta();
  for (int t = 1; t <= workers.total_rounds(); ++t) {
    for (TaskId v = 0; v < n; ++v) {
      const int k = t - workers.t_min(v);
      if (k < 0 || k >= gamma) continue;
      const std::size_t node = static_cast<std::size_t>(v) * static_cast<std::size_t>(gamma) + static_cast<std::size_t>(k);
      bool ok = false;
      if (assignment.label(node) == Label::Honest) {
        ok = g.is_initial(v) || successes_between(v, t - span, t - 1) > 0;
        if (!ok) {
          ok = true;
          for (TaskId u : g.predecessors(v)) ok = ok && successes_between(u, t - span, t - 1) > 0;
        }
        out[node] = ok ? Status::Successful : Status::Failed;
      }
      auto& pre = reached[v];
      pre[static_cast<std::size_t>(k) + 1] = pre[static_cast<std::size_t>(k)] + (ok ? 1 : 0);
    }
  }
  return out;
}

bool dominance_violated(const ExecutionTrace& never_correct, const ExecutionTrace& other) {
  if (never_correct.assignment_fingerprint != other.assignment_fingerprint ||
      never_correct.labels != other.labels) {
    throw Error(ErrorCode::AssignmentMismatch, "traces were produced from different assignments");
  }
  return never_correct.success && !other.success;
}

char status_code(Status s) {
  switch (s) {
    case Status::Successful: return 'S';
    case Status::Failed: return 'F';
    case Status::Malicious: return 'M';
  }
  return '?';
}

namespace {

nlohmann::ordered_json metrics_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["rounds"] = m.rounds;
  j["executions_per_task"] = m.executions_per_task;
  j["total_honest_executions"] = m.total_honest_executions;
  j["total_verifications"] = m.total_verifications;
  j["supervisor_assignments"] = m.supervisor_assignments;
  j["supervisor_introductions"] = m.supervisor_introductions;
  j["source_sends"] = m.source_sends;
  j["target_receives"] = m.target_receives;
  j["target_verifications"] = m.target_verifications;
  j["honest_workers"] = m.honest_workers;
  return j;
}

}  // namespace

std::string write_trace_jsonl(const WorkerGraph& workers, const ExecutionTrace& trace) {
  const TaskGraph& g = workers.tasks();
  std::string out;
  for (std::size_t i = 0; i < workers.node_count(); ++i) {
    const WorkerNode w = workers.node(i);
    nlohmann::ordered_json rec;
    rec["task"] = g.name(w.task);
    rec["round"] = w.round;
    rec["label"] = trace.labels[i] == Label::Honest ? "H" : "M";
    rec["status"] = std::string(1, status_code(trace.status[i]));
    rec["executed"] = trace.executed[i] != 0;
    rec["verifications"] = trace.verifications[i];
    out += rec.dump();
    out += '\n';
  }
  nlohmann::ordered_json trailer;
  trailer["trailer"] = true;
  trailer["delta"] = workers.delta();
  trailer["gamma"] = workers.gamma();
  trailer["graph"] = nlohmann::ordered_json::parse(write_task_graph(g));
  trailer["success"] = trace.success;
  trailer["rounds_elapsed"] = trace.rounds_elapsed;
  trailer["metrics"] = metrics_json(trace.metrics);
  out += trailer.dump();
  out += '\n';
  return out;
}

LoadedTrace read_trace_jsonl(std::string_view text) {
  std::vector<nlohmann::json> records;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      records.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::GraphLoadFailed, std::string("trace line: ") + e.what());
    }
  }
  if (records.empty() || !records.back().value("trailer", false)) {
    throw Error(ErrorCode::GraphLoadFailed, "trace has no trailer record");
  }
  const nlohmann::json& trailer = records.back();
  try {
    TaskGraph g = parse_task_graph(trailer.at("graph").dump());
    ScheduleWindow window{trailer.at("delta").get<int>(), trailer.at("gamma").get<int>()};
    WorkerGraph workers(LeveledTaskGraph(g), window);
    if (records.size() - 1 != workers.node_count()) {
      throw Error(ErrorCode::GraphLoadFailed, "trace node count does not match its schedule");
    }
    std::vector<Label> labels(workers.node_count(), Label::Honest);
    std::vector<Status> status(workers.node_count(), Status::Malicious);
    for (std::size_t i = 0; i + 1 < records.size(); ++i) {
      const auto& r = records[i];
      auto task = g.find(r.at("task").get<std::string>());
      if (!task) throw Error(ErrorCode::GraphLoadFailed, "trace names an unknown task");
      const std::size_t idx = workers.index({*task, r.at("round").get<int>()});
      labels[idx] = r.at("label").get<std::string>() == "M" ? Label::Malicious : Label::Honest;
      const std::string s = r.at("status").get<std::string>();
      status[idx] = s == "S" ? Status::Successful : s == "F" ? Status::Failed : Status::Malicious;
    }
    return LoadedTrace{std::move(g), window, Assignment(std::move(labels)), std::move(status),
                       trailer.value("success", false)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::GraphLoadFailed, std::string("trace: ") + e.what());
  }
}

}  // namespace sdc
