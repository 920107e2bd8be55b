#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdc/error.hpp"
#include "sdc/graph_io.hpp"
#include "sdc/harness.hpp"
#include "sdc/protocol.hpp"
#include "sdc/rng.hpp"
#include "sdc/witness.hpp"
#include "sdc/worker_graph.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitPremise = 3;
constexpr int kExitInvalidWitness = 1;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sdc::Error(sdc::ErrorCode::ConfigInvalid, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sdc::Error(sdc::ErrorCode::ConfigInvalid, "cannot write " + path);
  out << text;
}

sdc::GraphSpec::Kind parse_graph_kind(const std::string& s) {
  using K = sdc::GraphSpec::Kind;
  if (s == "path") return K::Path;
  if (s == "diamond") return K::Diamond;
  if (s == "random") return K::Random;
  if (s == "infeasible") return K::Infeasible;
  throw sdc::Error(sdc::ErrorCode::ConfigInvalid, "unknown graph type '" + s + "'");
}

// Flags shared by `run` and `sweep`.
struct RunFlags {
  std::string graph_file;
  std::string generator;
  std::size_t n = 10;
  std::size_t d = 3;
  std::size_t width = 4;
  std::size_t c = 3;
  double beta = 0;
  int delta = 0;
  int gamma = 0;
  bool auto_params = false;
  double alpha = 0.5;
  double hp = 1.0;
  std::string profile = "strict";
  std::string adversary = "never";
  std::string protocol = "main";
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::uint64_t round_cap = 1'000'000;
  std::string out_dir;
  std::string trace_out;
  std::string worker_graph_out;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--graph", f.graph_file, "Task graph JSON file");
  cmd->add_option("--generate", f.generator, "Generate the graph instead: path|diamond|random|infeasible");
  cmd->add_option("--n", f.n, "Tasks for path/random, levels for infeasible");
  cmd->add_option("--d", f.d, "Degree cap for random graphs");
  cmd->add_option("--width", f.width, "Maximum level width for random graphs");
  cmd->add_option("--c", f.c, "Block size for the infeasibility graph");
  cmd->add_option("--beta", f.beta, "Fraction of malicious workers")->required();
  cmd->add_option("--delta", f.delta, "Window half-width delta");
  cmd->add_option("--gamma", f.gamma, "Workers per task gamma");
  cmd->add_flag("--auto", f.auto_params, "Derive delta and gamma");
  cmd->add_option("--alpha", f.alpha, "Tuning constant alpha");
  cmd->add_option("--hp-exp", f.hp, "High-probability exponent c");
  cmd->add_option("--profile", f.profile, "Constant profile: lemma|theorem|strict");
  cmd->add_option("--adversary", f.adversary, "never|always|silent|prob:p");
  cmd->add_option("--protocol", f.protocol, "main|legacy-path|legacy-dag");
  cmd->add_option("--trials", f.trials, "Number of trials");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--threads", f.threads, "Worker threads");
  cmd->add_option("--round-cap", f.round_cap, "Round cap for legacy protocols");
  cmd->add_option("--out-dir", f.out_dir, "Directory for trials.csv and aggregate.json");
}

sdc::RunConfig to_config(const RunFlags& f) {
  sdc::RunConfig cfg;
  if (!f.graph_file.empty() && !f.generator.empty()) {
    throw sdc::Error(sdc::ErrorCode::ConfigInvalid, "--graph and --generate are exclusive");
  }
  if (!f.graph_file.empty()) {
    cfg.graph.kind = sdc::GraphSpec::Kind::File;
    cfg.graph.file = f.graph_file;
  } else if (!f.generator.empty()) {
    cfg.graph.kind = parse_graph_kind(f.generator);
  } else {
    throw sdc::Error(sdc::ErrorCode::ConfigInvalid, "need --graph or --generate");
  }
  cfg.graph.n = f.n;
  cfg.graph.degree_cap = f.d;
  cfg.graph.max_width = f.width;
  cfg.graph.c = f.c;
  cfg.beta = f.beta;
  if (f.delta > 0) cfg.delta = f.delta;
  if (f.gamma > 0) cfg.gamma = f.gamma;
  cfg.auto_params = f.auto_params;
  cfg.alpha = f.alpha;
  cfg.hp_exponent = f.hp;
  cfg.profile = sdc::parse_profile(f.profile);
  cfg.adversary = f.adversary;
  cfg.protocol = sdc::parse_protocol(f.protocol);
  cfg.trials = f.trials;
  cfg.seed = f.seed;
  cfg.threads = f.threads;
  cfg.round_cap = f.round_cap;
  cfg.out_dir = f.out_dir;
  return cfg;
}

void print_aggregates(const sdc::Aggregates& a) {
  std::printf("trials=%llu success_rate=%.4f [%.4f, %.4f] mean_rounds=%.2f max_rounds=%llu "
              "executions_per_task=%.4f verifications_per_honest_worker=%.4f\n",
              static_cast<unsigned long long>(a.trials), a.success_rate.mean, a.success_rate.lo, a.success_rate.hi,
              a.rounds.mean, static_cast<unsigned long long>(a.max_rounds), a.executions_per_task.mean,
              a.verifications_per_honest_worker.mean);
}

// Replays trial 0 of the main protocol to dump its trace or worker graph.
void dump_first_trial(const sdc::RunConfig& cfg, const RunFlags& f) {
  if (f.trace_out.empty() && f.worker_graph_out.empty()) return;
  if (cfg.protocol != sdc::ProtocolKind::Main) {
    throw sdc::Error(sdc::ErrorCode::ConfigInvalid, "trace output needs the main protocol");
  }
  const std::uint64_t trial_seed = sdc::derive_seed(cfg.seed, 0);
  const sdc::TaskGraph g = sdc::resolve_graph(cfg.graph, cfg.graph.kind == sdc::GraphSpec::Kind::Random
                                                              ? sdc::derive_seed(trial_seed, 1)
                                                              : cfg.seed);
  const sdc::TrialRow row = sdc::run_trial(cfg, 0, &g);
  const sdc::WorkerGraph workers(sdc::levelize(g), {row.delta, row.gamma});
  if (!f.worker_graph_out.empty()) write_file(f.worker_graph_out, workers.to_json());
  if (!f.trace_out.empty()) {
    const sdc::Assignment a = sdc::sample_assignment(workers, cfg.beta, sdc::derive_seed(trial_seed, 0));
    const auto strategy = sdc::AdversaryStrategy::parse(cfg.adversary, sdc::derive_seed(trial_seed, 2));
    write_file(f.trace_out, sdc::write_trace_jsonl(workers, sdc::simulate(workers, a, strategy)));
  }
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw sdc::Error(sdc::ErrorCode::ConfigInvalid, "bad sweep value '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for supervised distributed computation with untrusted workers"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a task graph");
  std::string gen_type = "path";
  std::size_t gen_n = 10, gen_d = 3, gen_width = 4, gen_c = 3;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--type", gen_type, "path|diamond|random|infeasible")->required();
  gen->add_option("--n", gen_n, "Tasks for path/random, levels for infeasible");
  gen->add_option("--d", gen_d, "Degree cap for random graphs");
  gen->add_option("--width", gen_width, "Maximum level width for random graphs");
  gen->add_option("--c", gen_c, "Block size for the infeasibility graph");
  gen->add_option("--seed", gen_seed, "Seed for random graphs");
  gen->add_option("--out", gen_out, "Output file (stdout if omitted)");

  // run
  auto* run = app.add_subcommand("run", "Run Monte Carlo trials");
  RunFlags run_flags;
  add_run_flags(run, run_flags);
  run->add_option("--trace-out", run_flags.trace_out, "Write the JSONL trace of trial 0");
  run->add_option("--worker-graph-out", run_flags.worker_graph_out, "Write the worker graph of trial 0 as JSON");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Run trials over a list of parameter values");
  RunFlags sweep_flags;
  add_run_flags(sw, sweep_flags);
  std::string axis = "beta";
  std::string values;
  sw->add_option("--axis", axis, "beta|delta|gamma|n")->required();
  sw->add_option("--values", values, "Comma-separated values")->required();

  // witness
  auto* wit = app.add_subcommand("witness", "Construct or check a witness sequence for a failing trace");
  std::string trace_path, witness_in, witness_out;
  bool do_check = false, do_construct = false;
  wit->add_option("--trace", trace_path, "JSONL trace")->required();
  wit->add_flag("--check", do_check, "Check the witness given by --witness");
  wit->add_flag("--construct", do_construct, "Construct a witness from the trace");
  wit->add_option("--witness", witness_in, "Witness JSON to check");
  wit->add_option("--out", witness_out, "Output file for --construct (stdout if omitted)");

  // bound
  auto* bnd = app.add_subcommand("bound", "Evaluate the failure probability bound");
  double b_n = 0, b_d = 1, b_beta = 0, b_alpha = 0.5, b_c = 1;
  int b_delta = 0, b_gamma = 0;
  bool strict = false;
  bnd->add_option("--n", b_n, "Number of tasks")->required();
  bnd->add_option("--d", b_d, "Degree bound");
  bnd->add_option("--beta", b_beta, "Fraction of malicious workers")->required();
  bnd->add_option("--delta", b_delta, "Window half-width")->required();
  bnd->add_option("--gamma", b_gamma, "Workers per task")->required();
  bnd->add_option("--alpha", b_alpha, "Tuning constant alpha");
  bnd->add_option("--hp-exp", b_c, "High-probability exponent c");
  bnd->add_flag("--strict", strict, "Exit with code 3 if a premise fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      sdc::GraphSpec spec;
      spec.kind = parse_graph_kind(gen_type);
      spec.n = gen_n;
      spec.degree_cap = gen_d;
      spec.max_width = gen_width;
      spec.c = gen_c;
      const std::string text = sdc::write_task_graph(sdc::resolve_graph(spec, gen_seed));
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        write_file(gen_out, text);
      }
      return 0;
    }
    if (*run) {
      const sdc::RunConfig cfg = to_config(run_flags);
      const sdc::TrialReport report = sdc::run_trials(cfg);
      print_aggregates(report.aggregates);
      dump_first_trial(cfg, run_flags);
      return 0;
    }
    if (*sw) {
      const sdc::RunConfig cfg = to_config(sweep_flags);
      const auto points = sdc::sweep(cfg, sdc::parse_axis(axis), parse_values(values));
      for (const auto& p : points) {
        std::printf("%s=%g ", axis.c_str(), p.value);
        print_aggregates(p.report.aggregates);
      }
      return 0;
    }
    if (*wit) {
      if (do_check == do_construct) {
        throw sdc::Error(sdc::ErrorCode::ConfigInvalid, "pass exactly one of --check and --construct");
      }
      const sdc::LoadedTrace trace = sdc::read_trace_jsonl(read_file(trace_path));
      const sdc::WorkerGraph workers(sdc::levelize(trace.graph), trace.window);
      if (do_construct) {
        const sdc::WitnessSequence ws = sdc::construct_witness_dag(workers, trace.assignment, trace.status);
        const std::string text = sdc::write_witness_json(ws, workers.tasks());
        if (witness_out.empty()) {
          std::cout << text;
        } else {
          write_file(witness_out, text);
        }
        return 0;
      }
      if (witness_in.empty()) throw sdc::Error(sdc::ErrorCode::ConfigInvalid, "--check needs --witness");
      const sdc::WitnessSequence ws = sdc::parse_witness_json(read_file(witness_in), workers.tasks());
      const sdc::WitnessCheck chk = sdc::check_witness_sequence(ws, workers);
      if (!chk.ok) {
        std::printf("invalid: clause %d: %s\n", chk.clause, chk.detail.c_str());
        return kExitInvalidWitness;
      }
      if (!sdc::is_valid_wrt(ws, workers, trace.assignment, trace.status)) {
        std::printf("witness sequence is not valid with respect to the trace\n");
        return kExitInvalidWitness;
      }
      std::printf("valid: length=%zu malicious=%zu bound=%s\n", ws.length(), sdc::malicious_count(ws),
                  sdc::check_bound(ws, workers.delta(), workers.gamma()) ? "holds" : "violated");
      return 0;
    }
    if (*bnd) {
      const sdc::FailureBound fb = sdc::failure_probability_bound(b_n, b_d, b_beta, b_delta, b_gamma, b_alpha, b_c);
      std::printf("bound=%.6e log_bound=%.6f log_target=%.6f star_threshold=%.6f\n", fb.bound, fb.log_bound,
                  fb.log_target, fb.star_threshold);
      std::printf("premises: star=%s gamma=%s gamma_cubed=%s\n", fb.star_holds ? "ok" : "violated",
                  fb.gamma_holds ? "ok" : "violated", fb.gamma_cubed_holds ? "ok" : "violated");
      if (!fb.premises) {
        std::fprintf(stderr, "warning: premises of the bound do not hold\n");
        if (strict) return kExitPremise;
      }
      return 0;
    }
  } catch (const sdc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}
