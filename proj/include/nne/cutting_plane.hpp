#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nne/game.hpp"

namespace nne::cutting {

/// Finite set of lower-level points generating the cuts
/// w <= Σ_i g_i(x, y'_i) of the relaxed problem. Insertion-ordered, no duplicates.
class CutSet {
 public:
  CutSet() = default;
  explicit CutSet(std::vector<std::vector<double>> points);

  /// Returns false (and leaves the set unchanged) when `point` is already present.
  bool add(std::vector<double> point);
  bool contains(std::span<const double> point) const;

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<std::vector<double>>& points() const { return points_; }
  const std::vector<double>& operator[](std::size_t k) const { return points_[k]; }

 private:
  std::vector<std::vector<double>> points_;
};

struct LowerBoundingResult {
  std::vector<double> point;
  double w = 0.0;
  double delta_lower = 0.0;
  std::size_t nodes = 0;
};

struct LowerLevelResult {
  std::vector<double> point;
  double value = 0.0;
  std::size_t nodes = 0;
};

/// Global subsolvers for one game family. Implementations must solve each
/// problem to global optimality (up to their documented tolerance).
class MndSubproblems {
 public:
  virtual ~MndSubproblems() = default;

  virtual const game::GameInstance& game() const = 0;

  /// min Σ_i g_i(y, y_i) - w over y ∈ Y with w <= Σ_i g_i(y, y'_i) for every y' in `cuts`.
  virtual LowerBoundingResult solve_lower_bounding(const CutSet& cuts) const = 0;

  /// g^N(x) = min Σ_i g_i(x, y'_i) over y' ∈ Y.
  virtual LowerLevelResult solve_lower_level(std::span<const double> x) const = 0;

  /// Global minimizer of Σ_i g_i(y, y_i) over Y.
  virtual std::vector<double> solve_joint() const = 0;
};

enum class Termination { kEquilibriumFound, kToleranceReached, kIterationLimit };

const char* to_string(Termination status);

struct IterationRecord {
  std::size_t iteration = 0;
  double delta_lower = 0.0;
  double delta_upper = std::numeric_limits<double>::infinity();
  double w = 0.0;
  double normalized_value = 0.0;  // g^N(x)
  std::size_t cuts = 0;           // |F^L| after this iteration
  std::size_t lbp_nodes = 0;
  std::size_t llp_nodes = 0;
  double seconds = 0.0;
  bool cut_added = false;
  bool upper_post_hoc = false;
};

struct SolverConfig {
  double epsilon = 0.01;
  std::size_t max_iterations = 100;
  std::size_t node_limit = 1'000'000;
  /// Tolerance on the w <= g^N(x) equilibrium test.
  double equilibrium_tol = 1e-7;
  std::function<void(const IterationRecord&)> on_iteration;

  void validate() const;
};

struct SolveReport {
  Termination status = Termination::kIterationLimit;
  std::vector<double> point;  // y* (x* = y*)
  double w = 0.0;
  double delta_lower = -std::numeric_limits<double>::infinity();
  double delta_upper = std::numeric_limits<double>::infinity();
  /// True when the report exits through the equilibrium test, in which case
  /// delta_upper is computed at return rather than through the incumbent update.
  bool upper_post_hoc = false;
  std::vector<IterationRecord> iterations;
  std::vector<std::vector<double>> cuts;  // final F^L

  std::size_t num_iterations() const { return iterations.size(); }
  std::vector<double> lower_history() const;
  std::vector<double> upper_history() const;
  bool converged() const { return status != Termination::kIterationLimit; }
};

/// Cutting-plane method for the minimum normalized disequilibrium problem.
///
/// Each iteration solves the relaxed lower-bounding problem over the current
/// cut set, evaluates g^N at its x, and either certifies an equilibrium
/// (w <= g^N(x)) or adds the lower-level optimizer as a new cut. The upper bound
/// Σ_i g_i - g^N(x) tracks its best point; the loop stops once
/// δ^U - max(δ^L, 0) < epsilon.
SolveReport solve_mnd(const MndSubproblems& problem, CutSet cuts, const SolverConfig& config);

/// Cut set seeded with a global optimizer of the joint problem.
CutSet initialize_cuts_joint(const MndSubproblems& problem);

/// Line-delimited JSON record for streaming traces.
std::string trace_line(const IterationRecord& record);
void write_trace(std::ostream& out, const SolveReport& report);

}  // namespace nne::cutting
