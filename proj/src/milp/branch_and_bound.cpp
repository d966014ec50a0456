#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "nne/errors.hpp"
#include "nne/milp.hpp"
#include "simplex.hpp"

namespace nne::milp {
namespace {

struct Node {
  double bound;
  std::uint64_t sequence;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct NodeOrder {
  // Best bound first, FIFO among equal bounds.
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.sequence > b.sequence;
  }
};

// Index of the most fractional binary, or npos when the point is integral.
std::size_t branching_variable(std::span<const std::size_t> binaries, std::span<const double> x) {
  std::size_t chosen = static_cast<std::size_t>(-1);
  double worst = kIntegralityTol;
  for (std::size_t j : binaries) {
    const double frac = std::min(x[j] - std::floor(x[j]), std::ceil(x[j]) - x[j]);
    if (frac > worst || (frac == worst && frac > kIntegralityTol && j < chosen)) {
      worst = frac;
      chosen = j;
    }
  }
  return chosen;
}

}  // namespace

MipSolution solve_mip(const MixedIntegerProgram& mip, const MipOptions& options) {
  mip.validate();
  if (!(options.objective_step >= 0.0) || !std::isfinite(options.objective_step)) {
    throw UsageError("solve_mip: objective_step must be finite and non-negative");
  }
  const LinearProgram& lp = mip.lp;
  std::vector<std::size_t> binaries = mip.binaries;
  std::sort(binaries.begin(), binaries.end());
  binaries.erase(std::unique(binaries.begin(), binaries.end()), binaries.end());
  constexpr std::size_t npos = static_cast<std::size_t>(-1);

  MipSolution result;
  result.status = Status::kInfeasible;
  std::vector<double> incumbent_point;
  double incumbent = kInfinity;
  std::size_t nodes = 0;
  std::size_t simplex_iterations = 0;
  std::uint64_t sequence = 0;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;

  detail::LpWorkspace workspace(lp);
  auto solve_node = [&](std::span<const double> lower, std::span<const double> upper) {
    return options.warm_start ? workspace.solve(lower, upper) : detail::solve_lp_bounded(lp, lower, upper);
  };

  auto current_bound = [&]() { return open.empty() ? incumbent : std::min(open.top().bound, incumbent); };

  // Solves one node; returns false when the node is infeasible or pruned.
  auto process = [&](std::vector<double> lower, std::vector<double> upper) -> Status {
    MipSolution relaxation = solve_node(lower, upper);
    ++nodes;
    simplex_iterations += relaxation.simplex_iterations;
    if (relaxation.status == Status::kUnbounded) return Status::kUnbounded;
    if (relaxation.status != Status::kOptimal) return Status::kInfeasible;
    double bound = relaxation.objective;
    if (options.objective_step > 0.0) {
      bound = options.objective_step * std::ceil((bound - kGapTol) / options.objective_step);
    }
    if (options.on_node) options.on_node({nodes, bound, std::min(current_bound(), bound), incumbent});
    if (bound >= incumbent - kGapTol) return Status::kOptimal;
    const std::size_t j = branching_variable(binaries, relaxation.point);
    if (j == npos) {
      incumbent = relaxation.objective;
      incumbent_point = std::move(relaxation.point);
      return Status::kOptimal;
    }
    // Children inherit this node's bound and are solved when popped.
    std::vector<double> down_upper = upper;
    down_upper[j] = 0.0;
    std::vector<double> up_lower = lower;
    up_lower[j] = 1.0;
    open.push({bound, sequence++, lower, std::move(down_upper)});
    open.push({bound, sequence++, std::move(up_lower), std::move(upper)});
    return Status::kOptimal;
  };

  std::vector<double> root_lower = lp.lower;
  std::vector<double> root_upper = lp.upper;
  for (std::size_t j : binaries) {
    root_lower[j] = std::ceil(root_lower[j] - kIntegralityTol);
    root_upper[j] = std::floor(root_upper[j] + kIntegralityTol);
  }
  if (process(std::move(root_lower), std::move(root_upper)) == Status::kUnbounded) {
    result.status = Status::kUnbounded;
    result.objective = -kInfinity;
    result.nodes = nodes;
    result.simplex_iterations = simplex_iterations;
    return result;
  }

  bool hit_limit = false;
  while (!open.empty()) {
    if (open.top().bound >= incumbent - kGapTol) break;
    if (nodes >= options.node_limit) {
      hit_limit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (process(std::move(node.lower), std::move(node.upper)) == Status::kUnbounded) {
      throw SolverError("branch and bound: unbounded relaxation below a bounded root");
    }
  }

  result.nodes = nodes;
  result.simplex_iterations = simplex_iterations;
  result.best_bound = current_bound();
  if (incumbent_point.empty()) {
    result.status = hit_limit ? Status::kNodeLimit : Status::kInfeasible;
    return result;
  }

  // Snap binaries and re-solve the continuous part so the returned point is
  // exactly integral and consistent with the constraints.
  std::vector<double> lower = lp.lower;
  std::vector<double> upper = lp.upper;
  for (std::size_t j : binaries) {
    incumbent_point[j] = std::round(incumbent_point[j]);
    lower[j] = upper[j] = incumbent_point[j];
  }
  MipSolution polished = detail::solve_lp_bounded(lp, lower, upper);
  if (polished.status == Status::kOptimal && polished.objective <= incumbent + kGapTol) {
    incumbent_point = std::move(polished.point);
  }
  for (std::size_t j : binaries) incumbent_point[j] = std::round(incumbent_point[j]);
  if (lp.max_violation(incumbent_point) > kFeasibilityTol * 1e3) {
    throw SolverError("branch and bound: incumbent fails independent feasibility re-check");
  }
  result.point = std::move(incumbent_point);
  result.objective = lp.evaluate(result.point);
  result.best_bound = std::min(result.best_bound, result.objective);
  result.status = hit_limit ? Status::kNodeLimit : Status::kOptimal;
  return result;
}

MipSolution solve_mip(const MixedIntegerProgram& mip, std::size_t node_limit) {
  MipOptions options;
  options.node_limit = node_limit;
  return solve_mip(mip, options);
}

}  // namespace nne::milp
