#include "sdc/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sdc/error.hpp"
#include "sdc/generators.hpp"
#include "sdc/graph_io.hpp"
#include "sdc/legacy.hpp"
#include "sdc/rng.hpp"
#include "sdc/worker_graph.hpp"

namespace sdc {

ConstantProfile parse_profile(std::string_view text) {
  if (text == "lemma") return ConstantProfile::Lemma;
  if (text == "theorem") return ConstantProfile::Theorem;
  if (text == "strict") return ConstantProfile::Strict;
  throw Error(ErrorCode::ConfigInvalid, "unknown constant profile '" + std::string(text) + "'");
}

std::string_view to_string(ConstantProfile p) {
  switch (p) {
    case ConstantProfile::Lemma: return "lemma";
    case ConstantProfile::Theorem: return "theorem";
    case ConstantProfile::Strict: return "strict";
  }
  return "strict";
}

namespace {

// ceil that ignores floating-point noise just above an integer.
int ceil_int(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(x));
}

}  // namespace

DerivedParams compute_params(double n, double d, double beta, double alpha, double c, ConstantProfile profile) {
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorCode::ParamOutOfRange, "beta must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::ParamOutOfRange, "alpha must lie in (0, 1)");
  if (!(c > 0.0)) throw Error(ErrorCode::ParamOutOfRange, "hp exponent must be positive");
  if (!(n >= 1.0)) throw Error(ErrorCode::ParamOutOfRange, "n must be >= 1");
  d = std::max(d, 1.0);

  const double ln_inv_beta = std::log(1.0 / beta);
  auto log_base = [&](double x) { return std::log(x) / ln_inv_beta; };

  double K = 8.0 * std::numbers::e;
  double kappa = c + 2.0;
  if (profile == ConstantProfile::Lemma) K = 4.0;
  if (profile == ConstantProfile::Theorem) kappa = c + 1.0;

  DerivedParams p;
  p.gamma = std::max(1, ceil_int((c + 5.0) / (1.0 - alpha) * log_base(n)));
  p.concentration_term = K / (alpha * alpha * ln_inv_beta * ln_inv_beta);
  p.degree_term = 2.0 * log_base(2.0 * std::numbers::e * p.gamma * d) / alpha + 1.0;
  const double log2n = std::log2(n);
  p.work_term = log2n > 1.0 ? (c + kappa) / 2.0 * log_base(log2n) : 0.0;
  p.delta = ceil_int(std::max({p.floor_term, p.concentration_term, p.degree_term, p.work_term}));
  return p;
}

ProtocolKind parse_protocol(std::string_view text) {
  if (text == "main") return ProtocolKind::Main;
  if (text == "legacy-path" || text == "legacy_path") return ProtocolKind::LegacyPath;
  if (text == "legacy-dag" || text == "legacy_dag") return ProtocolKind::LegacyDag;
  throw Error(ErrorCode::ConfigInvalid, "unknown protocol '" + std::string(text) + "'");
}

std::string_view to_string(ProtocolKind p) {
  switch (p) {
    case ProtocolKind::Main: return "main";
    case ProtocolKind::LegacyPath: return "legacy_path";
    case ProtocolKind::LegacyDag: return "legacy_dag";
  }
  return "main";
}

TaskGraph resolve_graph(const GraphSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case GraphSpec::Kind::File: return load_task_graph(spec.file);
    case GraphSpec::Kind::Path: return path_graph(spec.n);
    case GraphSpec::Kind::Diamond: return diamond_graph();
    case GraphSpec::Kind::Random: {
      Rng rng(seed);
      return random_leveled_dag({spec.n, spec.max_width, spec.degree_cap}, rng);
    }
    case GraphSpec::Kind::Infeasible: return build_infeasibility_dag(spec.c, spec.n).graph();
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown graph kind");
}

void RunConfig::validate() const {
  auto bad = [](const std::string& why) { throw Error(ErrorCode::ConfigInvalid, why); };
  if (!(beta >= 0.0 && beta < 1.0)) bad("beta must lie in [0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) bad("alpha must lie in (0, 1)");
  if (!(hp_exponent > 0.0)) bad("hp exponent must be positive");
  if (threads == 0) bad("threads must be >= 1");
  if (round_cap == 0) bad("round cap must be positive");
  if (delta && *delta < 1) bad("delta must be >= 1");
  if (gamma && *gamma < 1) bad("gamma must be >= 1");
  if (protocol == ProtocolKind::Main) {
    if (auto_params && beta == 0.0 && !(delta && gamma)) bad("automatic parameters need beta > 0");
    if (!auto_params && !(delta && gamma)) bad("main protocol needs --delta and --gamma, or --auto");
  }
  if (graph.kind == GraphSpec::Kind::File && graph.file.empty()) bad("graph file path is empty");
  if (graph.kind != GraphSpec::Kind::File && graph.kind != GraphSpec::Kind::Diamond && graph.n == 0) {
    bad("generated graph needs n >= 1");
  }
  AdversaryStrategy::parse(adversary);
}

TrialRow run_trial(const RunConfig& config, std::uint64_t trial_index, const TaskGraph* fixed_graph) {
  const std::uint64_t trial_seed = derive_seed(config.seed, trial_index);
  std::optional<TaskGraph> generated;
  if (fixed_graph == nullptr) generated.emplace(resolve_graph(config.graph, derive_seed(trial_seed, 1)));
  const TaskGraph& g = fixed_graph ? *fixed_graph : *generated;
  const AdversaryStrategy strategy = AdversaryStrategy::parse(config.adversary, derive_seed(trial_seed, 2));

  TrialRow row;
  row.trial = trial_index;
  row.seed = trial_seed;
  row.protocol = std::string(to_string(config.protocol));
  row.beta = config.beta;
  row.adversary = strategy.to_string();

  switch (config.protocol) {
    case ProtocolKind::Main: {
      LeveledTaskGraph leveled = levelize(g);
      const std::size_t d = degree_bound(leveled.graph());
      row.n = leveled.size();
      row.depth = leveled.depth();
      row.d = d;
      int delta = config.delta.value_or(0);
      int gamma = config.gamma.value_or(0);
      if (config.auto_params && !(config.delta && config.gamma)) {
        const DerivedParams p = compute_params(static_cast<double>(row.n), static_cast<double>(std::max<std::size_t>(d, 1)),
                                               config.beta, config.alpha, config.hp_exponent, config.profile);
        delta = config.delta.value_or(p.delta);
        gamma = config.gamma.value_or(p.gamma);
      }
      row.delta = delta;
      row.gamma = gamma;
      const WorkerGraph workers(std::move(leveled), {delta, gamma});
      const Assignment a = sample_assignment(workers, config.beta, derive_seed(trial_seed, 0));
      const ExecutionTrace tr = simulate(workers, a, strategy);
      const Metrics& m = tr.metrics;
      row.success = tr.success;
      row.rounds = static_cast<std::uint64_t>(tr.rounds_elapsed);
      row.honest_executions = m.total_honest_executions;
      row.executions_per_task = m.mean_executions_per_task();
      row.verifications = m.total_verifications;
      row.verifications_per_honest_worker = m.verifications_per_honest_worker();
      row.source_sends = m.source_sends;
      row.target_receives = m.target_receives;
      row.target_verifications = m.target_verifications;
      row.supervisor_assignments = m.supervisor_assignments;
      row.supervisor_introductions = m.supervisor_introductions;
      row.honest_workers = m.honest_workers;
      break;
    }
    case ProtocolKind::LegacyPath: {
      if (!g.is_path()) throw Error(ErrorCode::ConfigInvalid, "legacy path protocol needs a path graph");
      row.n = g.size();
      row.depth = g.depth();
      row.d = degree_bound(g);
      const PathRunResult r =
          simulate_path_protocol(g.size(), config.beta, strategy, derive_seed(trial_seed, 0), config.round_cap);
      row.success = r.terminated;
      row.rounds = r.rounds;
      row.source_sends = r.source_sends;
      row.target_receives = r.target_receives;
      row.target_verifications = r.target_receives;
      row.supervisor_assignments = r.honest_assignments + r.rejects + r.timeouts;
      row.honest_executions = r.honest_assignments;
      row.executions_per_task = static_cast<double>(r.honest_assignments) / static_cast<double>(g.size());
      break;
    }
    case ProtocolKind::LegacyDag: {
      row.n = g.size();
      row.depth = g.depth();
      row.d = degree_bound(g);
      const LegacyDagResult r =
          simulate_legacy_dag_protocol(g, config.beta, strategy, derive_seed(trial_seed, 0), config.round_cap);
      row.success = r.terminated;
      row.rounds = r.rounds;
      row.supervisor_assignments = r.assignments;
      break;
    }
  }
  return row;
}

namespace {

Estimate estimate(const std::vector<double>& xs) {
  Estimate e;
  if (xs.empty()) return e;
  const double n = static_cast<double>(xs.size());
  double sum = 0;
  for (double x : xs) sum += x;
  e.mean = sum / n;
  double ss = 0;
  for (double x : xs) ss += (x - e.mean) * (x - e.mean);
  const double sd = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const double half = 1.96 * sd / std::sqrt(n);
  e.lo = e.mean - half;
  e.hi = e.mean + half;
  return e;
}

template <class F>
Estimate column(const std::vector<TrialRow>& rows, F f) {
  std::vector<double> xs;
  xs.reserve(rows.size());
  for (const auto& r : rows) xs.push_back(static_cast<double>(f(r)));
  return estimate(xs);
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + path.string());
  out << text;
}

nlohmann::ordered_json estimate_json(const Estimate& e) {
  nlohmann::ordered_json j;
  j["mean"] = e.mean;
  j["ci95"] = {e.lo, e.hi};
  return j;
}

}  // namespace

Aggregates aggregate(const std::vector<TrialRow>& rows) {
  Aggregates a;
  a.trials = rows.size();
  a.success_rate = column(rows, [](const TrialRow& r) { return r.success ? 1.0 : 0.0; });
  a.rounds = column(rows, [](const TrialRow& r) { return r.rounds; });
  for (const auto& r : rows) a.max_rounds = std::max(a.max_rounds, r.rounds);
  a.executions_per_task = column(rows, [](const TrialRow& r) { return r.executions_per_task; });
  a.verifications_per_honest_worker = column(rows, [](const TrialRow& r) { return r.verifications_per_honest_worker; });
  a.source_sends = column(rows, [](const TrialRow& r) { return r.source_sends; });
  a.target_receives = column(rows, [](const TrialRow& r) { return r.target_receives; });
  return a;
}

namespace {

const char* const kCsvHeader =
    "schema_version,protocol,trial,seed,n,depth,d,beta,delta,gamma,adversary,success,rounds,"
    "honest_executions,executions_per_task,verifications,verifications_per_honest_worker,source_sends,"
    "target_receives,target_verifications,supervisor_assignments,supervisor_introductions,honest_workers";

}  // namespace

std::string trials_csv(const std::vector<TrialRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    std::ostringstream line;
    line << kSchemaVersion << ',' << r.protocol << ',' << r.trial << ',' << r.seed << ',' << r.n << ',' << r.depth
         << ',' << r.d << ',' << fmt_double(r.beta) << ',' << r.delta << ',' << r.gamma << ',' << r.adversary << ','
         << (r.success ? 1 : 0) << ',' << r.rounds << ',' << r.honest_executions << ','
         << fmt_double(r.executions_per_task) << ',' << r.verifications << ','
         << fmt_double(r.verifications_per_honest_worker) << ',' << r.source_sends << ',' << r.target_receives << ','
         << r.target_verifications << ',' << r.supervisor_assignments << ',' << r.supervisor_introductions << ','
         << r.honest_workers << '\n';
    out += line.str();
  }
  return out;
}

std::vector<TrialRow> parse_trials_csv(std::string_view text) {
  std::vector<TrialRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(ErrorCode::ConfigInvalid, "unexpected trials CSV header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 23) throw Error(ErrorCode::ConfigInvalid, "trials CSV row has wrong arity");
    try {
      TrialRow r;
      if (std::stoi(f[0]) != kSchemaVersion) throw Error(ErrorCode::ConfigInvalid, "unsupported schema version");
      r.protocol = f[1];
      r.trial = std::stoull(f[2]);
      r.seed = std::stoull(f[3]);
      r.n = std::stoull(f[4]);
      r.depth = std::stoi(f[5]);
      r.d = std::stoull(f[6]);
      r.beta = std::stod(f[7]);
      r.delta = std::stoi(f[8]);
      r.gamma = std::stoi(f[9]);
      r.adversary = f[10];
      r.success = f[11] == "1";
      r.rounds = std::stoull(f[12]);
      r.honest_executions = std::stoull(f[13]);
      r.executions_per_task = std::stod(f[14]);
      r.verifications = std::stoull(f[15]);
      r.verifications_per_honest_worker = std::stod(f[16]);
      r.source_sends = std::stoull(f[17]);
      r.target_receives = std::stoull(f[18]);
      r.target_verifications = std::stoull(f[19]);
      r.supervisor_assignments = std::stoull(f[20]);
      r.supervisor_introductions = std::stoull(f[21]);
      r.honest_workers = std::stoull(f[22]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ConfigInvalid, "malformed number in trials CSV");
    }
  }
  return rows;
}

std::string aggregate_json(const RunConfig& config, const Aggregates& a) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  nlohmann::ordered_json cfg;
  cfg["protocol"] = std::string(to_string(config.protocol));
  cfg["beta"] = config.beta;
  cfg["delta"] = config.delta ? nlohmann::ordered_json(*config.delta) : nlohmann::ordered_json();
  cfg["gamma"] = config.gamma ? nlohmann::ordered_json(*config.gamma) : nlohmann::ordered_json();
  cfg["auto"] = config.auto_params;
  cfg["alpha"] = config.alpha;
  cfg["hp_exponent"] = config.hp_exponent;
  cfg["profile"] = std::string(to_string(config.profile));
  cfg["adversary"] = config.adversary;
  cfg["trials"] = config.trials;
  cfg["seed"] = config.seed;
  cfg["round_cap"] = config.round_cap;
  j["config"] = std::move(cfg);
  j["trials"] = a.trials;
  j["success_rate"] = estimate_json(a.success_rate);
  j["rounds"] = estimate_json(a.rounds);
  j["max_rounds"] = a.max_rounds;
  j["executions_per_task"] = estimate_json(a.executions_per_task);
  j["verifications_per_honest_worker"] = estimate_json(a.verifications_per_honest_worker);
  j["source_sends"] = estimate_json(a.source_sends);
  j["target_receives"] = estimate_json(a.target_receives);
  return j.dump(2) + "\n";
}

TrialReport run_trials(const RunConfig& config) {
  config.validate();
  std::optional<TaskGraph> fixed;
  if (config.graph.kind != GraphSpec::Kind::Random) fixed.emplace(resolve_graph(config.graph, config.seed));

  TrialReport report;
  report.rows.resize(config.trials);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::uint64_t i = next++; i < config.trials; i = next++) {
      try {
        report.rows[i] = run_trial(config, i, fixed ? &*fixed : nullptr);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.trials;
      }
    }
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(config.threads, std::max<std::uint64_t>(config.trials, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  report.aggregates = aggregate(report.rows);
  if (!config.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) throw Error(ErrorCode::ConfigInvalid, "cannot create " + config.out_dir.string());
    write_file(config.out_dir / "trials.csv", trials_csv(report.rows));
    if (config.trials > 0) write_file(config.out_dir / "aggregate.json", aggregate_json(config, report.aggregates));
  }
  return report;
}

SweepAxis parse_axis(std::string_view text) {
  if (text == "beta") return SweepAxis::Beta;
  if (text == "delta") return SweepAxis::Delta;
  if (text == "gamma") return SweepAxis::Gamma;
  if (text == "n") return SweepAxis::N;
  throw Error(ErrorCode::ConfigInvalid, "unknown sweep axis '" + std::string(text) + "'");
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Beta: return "beta";
    case SweepAxis::Delta: return "delta";
    case SweepAxis::Gamma: return "gamma";
    case SweepAxis::N: return "n";
  }
  return "beta";
}

std::vector<SweepPoint> sweep(const RunConfig& config, SweepAxis axis, const std::vector<double>& values) {
  auto whole = [](double x, const char* what) {
    if (!(x >= 1.0) || x != std::floor(x)) {
      throw Error(ErrorCode::ConfigInvalid, std::string(what) + " sweep values must be positive integers");
    }
    return x;
  };
  std::vector<SweepPoint> out;
  std::string summary = "schema_version,axis,value,trials,success_rate,success_lo,success_hi,mean_rounds,"
                        "max_rounds,executions_per_task,verifications_per_honest_worker\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    RunConfig cfg = config;
    const double v = values[k];
    switch (axis) {
      case SweepAxis::Beta: cfg.beta = v; break;
      case SweepAxis::Delta: cfg.delta = static_cast<int>(whole(v, "delta")); break;
      case SweepAxis::Gamma: cfg.gamma = static_cast<int>(whole(v, "gamma")); break;
      case SweepAxis::N:
        if (cfg.graph.kind == GraphSpec::Kind::File || cfg.graph.kind == GraphSpec::Kind::Diamond) {
          throw Error(ErrorCode::ConfigInvalid, "n sweep needs a generated graph family");
        }
        cfg.graph.n = static_cast<std::size_t>(whole(v, "n"));
        break;
    }
    cfg.seed = derive_seed(config.seed, k);
    if (!config.out_dir.empty()) cfg.out_dir = config.out_dir / (std::string(to_string(axis)) + "_" + std::to_string(k));
    SweepPoint point{v, run_trials(cfg)};
    const Aggregates& a = point.report.aggregates;
    summary += std::to_string(kSchemaVersion) + "," + std::string(to_string(axis)) + "," + fmt_double(v) + "," +
               std::to_string(a.trials) + "," + fmt_double(a.success_rate.mean) + "," + fmt_double(a.success_rate.lo) +
               "," + fmt_double(a.success_rate.hi) + "," + fmt_double(a.rounds.mean) + "," +
               std::to_string(a.max_rounds) + "," + fmt_double(a.executions_per_task.mean) + "," +
               fmt_double(a.verifications_per_honest_worker.mean) + "\n";
    out.push_back(std::move(point));
  }
  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    write_file(config.out_dir / "sweep.csv", summary);
  }
  return out;
}

}  // namespace sdc
