#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdc/worker_graph.hpp"

namespace sdc {

enum class Label : std::uint8_t { Honest, Malicious };
enum class Status : std::uint8_t { Successful, Failed, Malicious };

/// What a recipient finds when it inspects a message. Outputs are symbolic:
/// verification is a perfect predicate that accepts exactly Correct.
enum class Message : std::uint8_t { Correct, Garbage, Silent };
enum class MessageKind : std::uint8_t { SameTask, PrecedingTask, Target };

/// Honesty label for every worker-graph node, indexed like WorkerGraph::index.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::vector<Label> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  Label label(std::size_t node) const { return labels_.at(node); }
  bool is_malicious(std::size_t node) const { return labels_.at(node) == Label::Malicious; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  std::size_t malicious_count() const noexcept;

  /// Hash of the labels; two traces came from the same assignment iff equal.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

 private:
  std::vector<Label> labels_;
  std::uint64_t fingerprint_ = 0;
};

/// Each node is malicious independently with probability beta.
/// Throws Error{BetaOutOfRange} unless 0 <= beta < 1.
Assignment sample_assignment(const WorkerGraph& workers, double beta, std::uint64_t seed);

/**
 * Behaviour of malicious workers. Decisions are a pure function of
 * (sender, recipient, kind, seed) so a trace can be replayed exactly.
 * Silent is an extra variant modelling workers that withhold messages.
 */
class AdversaryStrategy {
 public:
  enum class Kind : std::uint8_t { NeverCorrect, AlwaysCorrect, ProbabilisticCorrect, Silent };

  static AdversaryStrategy never_correct() { return {Kind::NeverCorrect, 0.0, 0}; }
  static AdversaryStrategy always_correct() { return {Kind::AlwaysCorrect, 1.0, 0}; }
  static AdversaryStrategy probabilistic(double p, std::uint64_t seed);
  static AdversaryStrategy silent() { return {Kind::Silent, 0.0, 0}; }

  /// Accepts "never", "always", "silent", "prob:<p>". Throws Error{ConfigInvalid}.
  static AdversaryStrategy parse(std::string_view text, std::uint64_t seed = 0);
  std::string to_string() const;

  Kind kind() const noexcept { return kind_; }
  double p() const noexcept { return p_; }
  AdversaryStrategy with_seed(std::uint64_t seed) const { return {kind_, p_, seed}; }

  /// `recipient` is a worker index, or target_recipient for submissions.
  Message decide(std::size_t sender, std::size_t recipient, MessageKind kind) const;

  static constexpr std::size_t target_recipient = static_cast<std::size_t>(-1);

 private:
  AdversaryStrategy(Kind kind, double p, std::uint64_t seed) : kind_(kind), p_(p), seed_(seed) {}
  Kind kind_;
  double p_;
  std::uint64_t seed_;
};

struct Metrics {
  int rounds = 0;
  std::vector<std::uint64_t> executions_per_task;
  std::uint64_t total_honest_executions = 0;
  std::uint64_t total_verifications = 0;
  std::uint64_t supervisor_assignments = 0;
  std::uint64_t supervisor_introductions = 0;
  std::uint64_t source_sends = 0;
  std::uint64_t target_receives = 0;
  std::uint64_t target_verifications = 0;
  std::uint64_t honest_workers = 0;

  double mean_executions_per_task() const;
  double verifications_per_honest_worker() const;
};

struct ExecutionTrace {
  std::uint64_t assignment_fingerprint = 0;
  std::vector<Label> labels;
  std::vector<Status> status;
  std::vector<std::uint8_t> executed;
  std::vector<std::uint32_t> verifications;
  std::vector<std::uint32_t> messages_sent;
  std::vector<std::uint32_t> messages_received;
  // Per task.
  std::vector<std::uint32_t> source_sends;
  std::vector<std::uint32_t> target_receives;
  std::vector<std::uint32_t> target_verifications;
  int rounds_elapsed = 0;
  bool success = false;
  Metrics metrics;
};

/**
 * Round-by-round run of the scheduling algorithm. Rounds 1..total_rounds;
 * in round t every task whose window contains t gets its worker. Honest
 * workers try same-task outputs newest first and adopt the first one that
 * verifies; otherwise they fall back to the source (initial tasks) or to
 * every predecessor task's window, and compute only if each predecessor
 * delivered a verified output.
 *
 * Throws Error{InconsistentInputs} if the assignment does not cover `workers`.
 */
ExecutionTrace simulate(const WorkerGraph& workers, const Assignment& assignment,
                        const AdversaryStrategy& strategy);

/**
 * Independent status oracle: forward propagation over the worker graph in
 * round order using per-task prefix counts of successful workers. An honest
 * node is successful iff its task is initial, or a same-task in-window node
 * is successful, or every predecessor task has a successful in-window node.
 */
std::vector<Status> classify_by_reachability(const WorkerGraph& workers, const Assignment& assignment);

/// True iff `never_correct` succeeded but `other` failed on the same
/// assignment. Throws Error{AssignmentMismatch} if the traces differ in it.
bool dominance_violated(const ExecutionTrace& never_correct, const ExecutionTrace& other);

/// One JSON object per node, then a trailer carrying the schedule, the task
/// graph and the global metrics.
std::string write_trace_jsonl(const WorkerGraph& workers, const ExecutionTrace& trace);

struct LoadedTrace {
  TaskGraph graph;
  ScheduleWindow window;
  Assignment assignment;
  std::vector<Status> status;
  bool success = false;
};

/// Throws Error{GraphLoadFailed} on malformed input.
LoadedTrace read_trace_jsonl(std::string_view text);

char status_code(Status s);

}  // namespace sdc
