#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nne/errors.hpp"
#include "nne/knapsack.hpp"

namespace nne::experiment {

// ---- instance files -------------------------------------------------------

/// Malformed or invalid instance file. The message carries line/column context
/// when the failure is syntactic.
class ParseError : public UsageError {
 public:
  using UsageError::UsageError;
};

/// {players, markets, alpha[], beta[], c[][], a[][], b[], d[][], e[], seed, gamma}
std::string instance_to_json(const knapsack::Instance& inst);
knapsack::Instance instance_from_json(std::string_view text);

void write_instance(const std::filesystem::path& path, const knapsack::Instance& inst);
knapsack::Instance read_instance(const std::filesystem::path& path);

// ---- batch runs ------------------------------------------------------------

struct SizePair {
  std::size_t players;
  std::size_t markets;
};

struct BatchConfig {
  std::vector<SizePair> pairs{{3, 4}, {5, 6}, {5, 10}};
  std::size_t instances = 100;
  std::uint64_t base_seed = 1;
  double epsilon = 0.01;
  std::int64_t gamma = 1000;
  std::filesystem::path output_dir;
  int workers = 1;
  std::size_t max_iterations = 100;
  std::size_t node_limit = 1'000'000;
  /// Re-check converged points with verify_gne at tol = epsilon.
  bool verify = true;

  void validate() const;
};

/// Seed of instance k of pair p. Strictly increasing in generation order.
std::uint64_t instance_seed(const BatchConfig& cfg, std::size_t pair, std::size_t k);

struct BatchResultRow {
  std::size_t pair = 0;
  std::size_t players = 0;
  std::size_t markets = 0;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::string status;
  double delta_u = 0.0;
  double max_iter_time_s = 0.0;
  double mean_iter_time_s = 0.0;
  std::size_t lbp_nodes = 0;
  std::size_t llp_nodes = 0;
  bool converged = false;
  bool gne_verified = false;
  std::string error;
  std::vector<double> point;
};

struct PairSummary {
  SizePair size{};
  std::size_t instances = 0;
  std::size_t converged = 0;
  std::size_t gne_verified = 0;
  std::map<std::size_t, std::size_t> histogram;  // iterations -> count
  double max_iter_time_s = 0.0;
  double mean_iter_time_s = 0.0;
  std::size_t max_iterations = 0;
  std::size_t mode_iterations = 0;
};

struct BatchResult {
  std::vector<BatchResultRow> rows;
  std::vector<PairSummary> summaries;

  bool all_converged() const;
};

/// Solves one instance end to end (joint seeding, cutting-plane loop, optional
/// equilibrium re-check). Failures are recorded in the row, never thrown.
BatchResultRow solve_instance(const knapsack::Instance& inst, const BatchConfig& cfg, std::size_t pair);

/// Runs every (pair, instance) with up to cfg.workers concurrent solves. Rows
/// come back in generation order regardless of the worker count.
BatchResult run_batch(const BatchConfig& cfg);

std::vector<PairSummary> summarize(const BatchConfig& cfg, const std::vector<BatchResultRow>& rows);

inline constexpr std::string_view kCsvHeader =
    "pair,players,markets,seed,iterations,status,delta_u,max_iter_time_s,mean_iter_time_s";

/// With `timings` false the two timing columns are written as 0 so reruns are
/// byte-identical.
void write_csv(std::ostream& out, const std::vector<BatchResultRow>& rows, bool timings = true);
void write_histogram(std::ostream& out, const PairSummary& summary);
std::string summary_json(const BatchConfig& cfg, const BatchResult& result);

/// rows.csv, summary.json and hist_<players>x<markets>.txt under cfg.output_dir.
void write_outputs(const BatchConfig& cfg, const BatchResult& result, bool timings = true);

}  // namespace nne::experiment
