#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace nne::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Engine tolerances.
inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr double kIntegralityTol = 1e-6;
inline constexpr double kGapTol = 1e-6;
inline constexpr double kPivotTol = 1e-11;
inline constexpr int kDegeneratePivotsBeforeBland = 500;

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  std::size_t var;
  double coef;
};

struct Constraint {
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  std::string name;
};

/// min c'x + offset  s.t.  rows, lower <= x <= upper.
struct LinearProgram {
  std::vector<double> objective;
  double objective_offset = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> names;
  std::vector<Constraint> rows;

  std::size_t num_variables() const { return objective.size(); }

  std::size_t add_variable(double lb, double ub, double cost, std::string name = {});
  std::size_t add_constraint(std::vector<Term> terms, Sense sense, double rhs,
                             std::string name = {});

  double evaluate(std::span<const double> x) const;
  /// Largest bound or row violation of x (0 when feasible).
  double max_violation(std::span<const double> x) const;

  /// Throws UsageError on non-finite coefficients, inverted bounds or bad indices.
  void validate() const;
};

struct MixedIntegerProgram {
  LinearProgram lp;
  std::vector<std::size_t> binaries;

  std::size_t add_binary(double cost, std::string name = {});
  void validate() const;
};

enum class Status { kOptimal, kInfeasible, kUnbounded, kNodeLimit };

const char* to_string(Status status);

struct MipSolution {
  Status status = Status::kInfeasible;
  std::vector<double> point;
  double objective = kInfinity;
  double best_bound = -kInfinity;
  std::size_t nodes = 0;
  std::size_t simplex_iterations = 0;
};

/// Bounded-variable two-phase primal simplex on a dense tableau. Dantzig pricing
/// switches to Bland's rule after kDegeneratePivotsBeforeBland consecutive
/// degenerate pivots. Throws SolverError on numerical breakdown.
MipSolution solve_lp(const LinearProgram& lp);

struct NodeEvent {
  std::size_t node;
  double node_bound;
  double best_bound;
  double incumbent;
};

struct MipOptions {
  std::size_t node_limit = 1'000'000;
  // When positive, every integral-feasible objective value is a multiple of
  // this step, so node bounds may be rounded up to the next multiple.
  double objective_step = 0.0;
  // Re-solve node LPs from the previous node's optimal basis with the dual
  // simplex. Off (the default) starts every node from the crash basis.
  bool warm_start = false;
  std::function<void(const NodeEvent&)> on_node;
};

/// Best-first LP-based branch and bound over the binary variables.
/// Branches on the most fractional binary (lowest index on ties); nodes with
/// equal bounds are explored first-in first-out.
MipSolution solve_mip(const MixedIntegerProgram& mip, const MipOptions& options);
MipSolution solve_mip(const MixedIntegerProgram& mip, std::size_t node_limit);

/// Plain-text dump (objective, rows, bounds, binaries) in declaration order.
void write_lp_text(std::ostream& out, const MixedIntegerProgram& mip);
std::string to_lp_text(const MixedIntegerProgram& mip);

}  // namespace nne::milp
