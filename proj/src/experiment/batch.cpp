#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>
#include <omp.h>

#include "nne/cutting_plane.hpp"
#include "nne/experiment.hpp"

namespace nne::experiment {

void BatchConfig::validate() const {
  if (pairs.empty()) throw UsageError("batch needs at least one (players, markets) pair");
  for (const SizePair& p : pairs) {
    if (p.players == 0 || p.markets == 0) throw UsageError("players and markets must be positive");
  }
  if (instances == 0) throw UsageError("instances per pair must be positive");
  if (!(epsilon > 0.0)) throw UsageError("epsilon must be positive");
  if (gamma <= 0) throw UsageError("gamma must be positive");
  if (workers <= 0) throw UsageError("workers must be positive");
  if (max_iterations == 0) throw UsageError("max iterations must be positive");
}

std::uint64_t instance_seed(const BatchConfig& cfg, std::size_t pair, std::size_t k) {
  return cfg.base_seed + static_cast<std::uint64_t>(pair * cfg.instances + k);
}

bool BatchResult::all_converged() const {
  return std::all_of(rows.begin(), rows.end(), [](const BatchResultRow& r) { return r.converged; });
}

BatchResultRow solve_instance(const knapsack::Instance& inst, const BatchConfig& cfg, std::size_t pair) {
  BatchResultRow row;
  row.pair = pair;
  row.players = inst.players;
  row.markets = inst.markets;
  row.seed = inst.seed;
  try {
    const knapsack::KnapsackMnd problem(inst, cfg.node_limit);
    cutting::SolverConfig solver;
    solver.epsilon = cfg.epsilon;
    solver.max_iterations = cfg.max_iterations;
    solver.node_limit = cfg.node_limit;
    const cutting::SolveReport report =
        cutting::solve_mnd(problem, cutting::initialize_cuts_joint(problem), solver);

    row.iterations = report.num_iterations();
    row.status = cutting::to_string(report.status);
    row.delta_u = report.delta_upper;
    row.converged = report.converged();
    row.point = report.point;
    double total = 0.0;
    for (const auto& it : report.iterations) {
      row.max_iter_time_s = std::max(row.max_iter_time_s, it.seconds);
      total += it.seconds;
      row.lbp_nodes += it.lbp_nodes;
      row.llp_nodes += it.llp_nodes;
    }
    if (row.iterations > 0) row.mean_iter_time_s = total / static_cast<double>(row.iterations);
    if (row.converged && cfg.verify) row.gne_verified = knapsack::verify_gne(inst, report.point, cfg.epsilon);
  } catch (const std::exception& e) {
    row.status = "error";
    row.error = e.what();
    row.converged = false;
  }
  return row;
}

BatchResult run_batch(const BatchConfig& cfg) {
  cfg.validate();
  const std::size_t per_pair = cfg.instances;
  const auto total = static_cast<std::int64_t>(cfg.pairs.size() * per_pair);
  BatchResult result;
  result.rows.resize(static_cast<std::size_t>(total));

#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.workers)
  for (std::int64_t k = 0; k < total; ++k) {
    const std::size_t pair = static_cast<std::size_t>(k) / per_pair;
    const std::size_t index = static_cast<std::size_t>(k) % per_pair;
    knapsack::GeneratorConfig gen;
    gen.seed = instance_seed(cfg, pair, index);
    gen.players = cfg.pairs[pair].players;
    gen.markets = cfg.pairs[pair].markets;
    gen.gamma = cfg.gamma;
    result.rows[static_cast<std::size_t>(k)] = solve_instance(knapsack::generate_instance(gen), cfg, pair);
  }
  result.summaries = summarize(cfg, result.rows);
  return result;
}

std::vector<PairSummary> summarize(const BatchConfig& cfg, const std::vector<BatchResultRow>& rows) {
  std::vector<PairSummary> summaries(cfg.pairs.size());
  std::vector<double> time_sum(cfg.pairs.size(), 0.0);
  std::vector<std::size_t> timed_iterations(cfg.pairs.size(), 0);
  for (std::size_t p = 0; p < cfg.pairs.size(); ++p) summaries[p].size = cfg.pairs[p];
  for (const BatchResultRow& row : rows) {
    PairSummary& s = summaries.at(row.pair);
    ++s.instances;
    if (row.converged) ++s.converged;
    if (row.gne_verified) ++s.gne_verified;
    ++s.histogram[row.iterations];
    s.max_iterations = std::max(s.max_iterations, row.iterations);
    s.max_iter_time_s = std::max(s.max_iter_time_s, row.max_iter_time_s);
    time_sum[row.pair] += row.mean_iter_time_s * static_cast<double>(row.iterations);
    timed_iterations[row.pair] += row.iterations;
  }
  for (std::size_t p = 0; p < summaries.size(); ++p) {
    PairSummary& s = summaries[p];
    if (timed_iterations[p] > 0) s.mean_iter_time_s = time_sum[p] / static_cast<double>(timed_iterations[p]);
    std::size_t best_count = 0;
    for (const auto& [iterations, count] : s.histogram) {
      if (count > best_count) {
        best_count = count;
        s.mode_iterations = iterations;
      }
    }
  }
  return summaries;
}

namespace {

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.10g", v);
  return buffer;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<BatchResultRow>& rows, bool timings) {
  out << kCsvHeader << '\n';
  for (const BatchResultRow& r : rows) {
    out << r.pair << ',' << r.players << ',' << r.markets << ',' << r.seed << ',' << r.iterations << ','
        << r.status << ',' << format_double(r.delta_u) << ','
        << format_double(timings ? r.max_iter_time_s : 0.0) << ','
        << format_double(timings ? r.mean_iter_time_s : 0.0) << '\n';
  }
}

void write_histogram(std::ostream& out, const PairSummary& summary) {
  for (const auto& [iterations, count] : summary.histogram) out << iterations << ' ' << count << '\n';
}

std::string summary_json(const BatchConfig& cfg, const BatchResult& result) {
  nlohmann::ordered_json doc;
  doc["epsilon"] = cfg.epsilon;
  doc["gamma"] = cfg.gamma;
  doc["base_seed"] = cfg.base_seed;
  doc["instances_per_pair"] = cfg.instances;
  doc["timing_scope"] = "cutting-plane loop only (excludes generation and joint seeding)";
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const PairSummary& s : result.summaries) {
    nlohmann::ordered_json p;
    p["players"] = s.size.players;
    p["markets"] = s.size.markets;
    p["instances"] = s.instances;
    p["converged"] = s.converged;
    p["gne_verified"] = s.gne_verified;
    p["mode_iterations"] = s.mode_iterations;
    p["max_iterations"] = s.max_iterations;
    p["max_iter_time_s"] = s.max_iter_time_s;
    p["mean_iter_time_s"] = s.mean_iter_time_s;
    nlohmann::ordered_json hist = nlohmann::ordered_json::object();
    for (const auto& [iterations, count] : s.histogram) hist[std::to_string(iterations)] = count;
    p["histogram"] = hist;
    pairs.push_back(p);
  }
  doc["pairs"] = pairs;
  nlohmann::ordered_json errors = nlohmann::ordered_json::array();
  for (const BatchResultRow& r : result.rows) {
    if (!r.error.empty()) errors.push_back({{"seed", r.seed}, {"error", r.error}});
  }
  doc["errors"] = errors;
  return doc.dump(2) + "\n";
}

void write_outputs(const BatchConfig& cfg, const BatchResult& result, bool timings) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  auto open = [](const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot open " + path.string() + " for writing");
    return out;
  };
  {
    auto out = open(cfg.output_dir / "rows.csv");
    write_csv(out, result.rows, timings);
  }
  {
    auto out = open(cfg.output_dir / "summary.json");
    out << summary_json(cfg, result);
  }
  for (const PairSummary& s : result.summaries) {
    auto out = open(cfg.output_dir /
                    ("hist_" + std::to_string(s.size.players) + "x" + std::to_string(s.size.markets) + ".txt"));
    write_histogram(out, s);
  }
}

}  // namespace nne::experiment
