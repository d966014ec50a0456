#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "nne/milp.hpp"

namespace nne::milp::detail {

/// Solves `lp` with its variable bounds replaced by [lower, upper].
MipSolution solve_lp_bounded(const LinearProgram& lp, std::span<const double> lower,
                             std::span<const double> upper);

/// Re-solves one LP under changing bounds, reusing the last optimal basis
/// through the dual simplex. Every kRefactorInterval warm solves, and whenever
/// a warm start fails, the next solve starts cold from the crash basis.
class LpWorkspace {
 public:
  static constexpr std::size_t kRefactorInterval = 100;

  explicit LpWorkspace(const LinearProgram& lp);
  ~LpWorkspace();
  LpWorkspace(const LpWorkspace&) = delete;
  LpWorkspace& operator=(const LpWorkspace&) = delete;

  MipSolution solve(std::span<const double> lower, std::span<const double> upper);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace nne::milp::detail
