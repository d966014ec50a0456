// Command-line driver: instance generation, single solves, batch experiments,
// the two-player continuous walkthrough and the KKT counterexample search.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nne/continuous.hpp"
#include "nne/cutting_plane.hpp"
#include "nne/errors.hpp"
#include "nne/experiment.hpp"
#include "nne/kkt.hpp"
#include "nne/knapsack.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUnconverged = 2;

struct InstanceArgs {
  std::string instance_path;
  std::size_t players = 3;
  std::size_t markets = 4;
  std::uint64_t seed = 1;
  std::int64_t gamma = 1000;

  void add_to(CLI::App* cmd, bool allow_file) {
    if (allow_file) cmd->add_option("--instance", instance_path, "Instance JSON file (overrides generation flags)");
    cmd->add_option("--players", players, "Number of players |J|")->check(CLI::PositiveNumber);
    cmd->add_option("--markets", markets, "Number of markets |L|")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "Generator seed");
    cmd->add_option("--gamma", gamma, "Parameter scale gamma")->check(CLI::PositiveNumber);
  }

  nne::knapsack::Instance load() const {
    if (!instance_path.empty()) return nne::experiment::read_instance(instance_path);
    return nne::knapsack::generate_instance({seed, players, markets, gamma});
  }
};

std::string point_string(std::span<const double> y) {
  std::ostringstream out;
  for (std::size_t k = 0; k < y.size(); ++k) out << (k ? " " : "") << y[k] + 0.0;
  return out.str();
}

std::vector<nne::experiment::SizePair> parse_pairs(const std::string& text) {
  std::vector<nne::experiment::SizePair> pairs;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos) throw nne::UsageError("pair '" + item + "' must look like 5x10");
    pairs.push_back({std::stoul(item.substr(0, x)), std::stoul(item.substr(x + 1))});
  }
  return pairs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normalized Nash equilibrium solver for nonconvex generalized games"};
  app.require_subcommand(1);

  // generate
  InstanceArgs gen_args;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Generate a random knapsack game instance as JSON");
  gen_args.add_to(generate, false);
  generate->add_option("--out", gen_out, "Output file (stdout when omitted)");

  // solve
  InstanceArgs solve_args;
  double solve_epsilon = 0.01;
  std::size_t solve_max_iters = 100;
  std::string solve_trace;
  auto* solve = app.add_subcommand("solve", "Solve one knapsack game with the cutting-plane method");
  solve_args.add_to(solve, true);
  solve->add_option("--epsilon", solve_epsilon, "Termination tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--max-iters", solve_max_iters, "Iteration limit")->check(CLI::PositiveNumber);
  solve->add_option("--trace", solve_trace, "Write line-delimited iteration records to this file ('-' for stdout)");

  // batch
  nne::experiment::BatchConfig batch_cfg;
  std::string batch_pairs = "3x4,5x6,5x10";
  std::optional<std::size_t> batch_players, batch_markets;
  std::string batch_out = "batch_out";
  bool no_timing = false;
  auto* batch = app.add_subcommand("batch", "Run the randomized experiment over (players, markets) pairs");
  batch->add_option("--pairs", batch_pairs, "Comma-separated PLAYERSxMARKETS list");
  batch->add_option("--players", batch_players, "Single-pair shortcut: players")->check(CLI::PositiveNumber);
  batch->add_option("--markets", batch_markets, "Single-pair shortcut: markets")->check(CLI::PositiveNumber);
  batch->add_option("--instances", batch_cfg.instances, "Instances per pair")->check(CLI::PositiveNumber);
  batch->add_option("--seed", batch_cfg.base_seed, "Base seed");
  batch->add_option("--epsilon", batch_cfg.epsilon, "Termination tolerance")->check(CLI::PositiveNumber);
  batch->add_option("--gamma", batch_cfg.gamma, "Parameter scale gamma")->check(CLI::PositiveNumber);
  batch->add_option("--out", batch_out, "Output directory");
  batch->add_option("--workers", batch_cfg.workers, "Concurrent solves")->check(CLI::PositiveNumber);
  batch->add_option("--max-iters", batch_cfg.max_iterations, "Iteration limit per solve")->check(CLI::PositiveNumber);
  batch->add_flag("--no-timing", no_timing, "Write zero timing columns so reruns are byte-identical");

  // trace-example
  double trace_epsilon = 0.01;
  std::size_t trace_resolution = nne::continuous::kDefaultResolution;
  bool trace_jsonl = false;
  auto* trace = app.add_subcommand("trace-example", "Walk through the two-player nonconvex example");
  trace->add_option("--epsilon", trace_epsilon, "Termination tolerance")->check(CLI::PositiveNumber);
  trace->add_option("--resolution", trace_resolution, "Grid intervals per axis")
      ->check(CLI::Range(nne::continuous::kMinResolution, std::size_t{1} << 14));
  trace->add_flag("--jsonl", trace_jsonl, "Emit iteration records instead of the transcript");

  // kkt-demo
  InstanceArgs kkt_args;
  kkt_args.players = 2;
  kkt_args.markets = 2;
  auto* kkt_demo = app.add_subcommand("kkt-demo", "Find a KKT point of the complementarity system that is not an equilibrium");
  kkt_args.add_to(kkt_demo, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) {
      const auto inst = gen_args.load();
      if (gen_out.empty()) {
        std::cout << nne::experiment::instance_to_json(inst);
      } else {
        nne::experiment::write_instance(gen_out, inst);
      }
      return kExitOk;
    }

    if (*solve) {
      const auto inst = solve_args.load();
      const nne::knapsack::KnapsackMnd problem(inst);
      nne::cutting::SolverConfig config;
      config.epsilon = solve_epsilon;
      config.max_iterations = solve_max_iters;
      std::ofstream trace_file;
      std::ostream* trace_out = nullptr;
      if (solve_trace == "-") {
        trace_out = &std::cout;
      } else if (!solve_trace.empty()) {
        trace_file.open(solve_trace);
        if (!trace_file) throw nne::UsageError("cannot open " + solve_trace);
        trace_out = &trace_file;
      }
      if (trace_out) {
        config.on_iteration = [trace_out](const nne::cutting::IterationRecord& r) {
          *trace_out << nne::cutting::trace_line(r) << '\n' << std::flush;
        };
      }
      const auto report = nne::cutting::solve_mnd(problem, nne::cutting::initialize_cuts_joint(problem), config);
      std::ostream& out = solve_trace == "-" ? std::cerr : std::cout;
      out << "status: " << nne::cutting::to_string(report.status) << "\n"
          << "iterations: " << report.num_iterations() << "\n"
          << "delta_l: " << report.delta_lower << "\n"
          << "delta_u: " << report.delta_upper << "\n"
          << "point: " << point_string(report.point) << "\n";
      if (report.converged()) {
        out << "gne_verified: " << (nne::knapsack::verify_gne(inst, report.point, solve_epsilon) ? "yes" : "no") << "\n";
      }
      return report.converged() ? kExitOk : kExitUnconverged;
    }

    if (*batch) {
      batch_cfg.pairs = parse_pairs(batch_pairs);
      if (batch_players || batch_markets) {
        if (!(batch_players && batch_markets)) throw nne::UsageError("--players and --markets go together");
        batch_cfg.pairs = {{*batch_players, *batch_markets}};
      }
      batch_cfg.output_dir = batch_out;
      const auto result = nne::experiment::run_batch(batch_cfg);
      nne::experiment::write_outputs(batch_cfg, result, !no_timing);
      for (const auto& s : result.summaries) {
        std::cout << s.size.players << "x" << s.size.markets << ": " << s.converged << "/" << s.instances
                  << " converged, mode " << s.mode_iterations << " iteration(s), max " << s.max_iterations
                  << ", mean " << s.mean_iter_time_s << " s/iteration\n";
      }
      std::cout << "results written to " << batch_out << "\n";
      return result.all_converged() ? kExitOk : kExitUnconverged;
    }

    if (*trace) {
      const auto result = nne::continuous::run_example_trace(trace_epsilon, trace_resolution);
      if (trace_jsonl) {
        nne::cutting::write_trace(std::cout, result.report);
      } else {
        nne::continuous::write_transcript(std::cout, result);
      }
      return result.report.converged() ? kExitOk : kExitUnconverged;
    }

    if (*kkt_demo) {
      const auto inst = kkt_args.load();
      try {
        const auto witness = nne::kkt::demonstrate_failure(inst);
        std::cout << nne::kkt::certificate_json(inst, witness.point, witness.certificate) << "\n";
        std::cout << "KKT residual " << witness.certificate.residuals.max() << ", max player regret "
                  << witness.disequilibrium << ": point satisfies the KKT system but is not an equilibrium\n";
        return kExitOk;
      } catch (const nne::kkt::NoCounterexample& e) {
        std::cout << "no counterexample: " << e.what() << "\n";
        return kExitUnconverged;
      }
    }
  } catch (const nne::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
