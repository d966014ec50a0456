#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <omp.h>

#include "nne/continuous.hpp"
#include "nne/errors.hpp"

namespace nne::continuous {
namespace {

void offer(ScanResult& best, double value, std::size_t index) {
  if (!best.found || value < best.value || (value == best.value && index < best.index)) {
    best.found = true;
    best.value = value;
    best.index = index;
  }
}

using Scanner = ScanResult (*)(const Objective2&, const Constraint2&, const GridBox&);

GridResult solve_with(Scanner scan, const Objective2& objective, const Constraint2& feasible,
                      std::size_t resolution) {
  if (resolution < kMinResolution) {
    throw UsageError("grid resolution must be at least " + std::to_string(kMinResolution));
  }
  GridBox box{0.0, 1.0, 0.0, 1.0, resolution};
  ScanResult best = scan(objective, feasible, box);
  if (!best.found) throw InfeasibleGameError("no feasible grid point");

  GridResult result;
  result.point = box.point(best.index);
  result.value = best.value;
  result.evaluations = (resolution + 1) * (resolution + 1);

  double spacing = 1.0 / static_cast<double>(resolution);
  for (int round = 0; round < kRefinementRounds; ++round) {
    const double finer = spacing / static_cast<double>(kRefinementFactor);
    GridBox local;
    local.lo1 = std::max(0.0, result.point[0] - spacing);
    local.hi1 = std::min(1.0, result.point[0] + spacing);
    local.lo2 = std::max(0.0, result.point[1] - spacing);
    local.hi2 = std::min(1.0, result.point[1] + spacing);
    // The clipped window is square only in the interior; keep the finer spacing
    // on the longer side and let the shorter side be covered by the same count.
    const double width = std::max(local.hi1 - local.lo1, local.hi2 - local.lo2);
    local.intervals = static_cast<std::size_t>(std::llround(width / finer));
    if (local.intervals == 0) break;
    const ScanResult refined = scan(objective, feasible, local);
    result.evaluations += (local.intervals + 1) * (local.intervals + 1);
    if (refined.found && refined.value < result.value) {
      result.value = refined.value;
      result.point = local.point(refined.index);
    }
    spacing = finer;
  }
  return result;
}

}  // namespace

Point2 GridBox::point(std::size_t index) const {
  const std::size_t i = index / (intervals + 1);
  const std::size_t j = index % (intervals + 1);
  const double n = static_cast<double>(intervals);
  return {lo1 + (hi1 - lo1) * (static_cast<double>(i) / n), lo2 + (hi2 - lo2) * (static_cast<double>(j) / n)};
}

ScanResult scan_grid_serial(const Objective2& objective, const Constraint2& feasible, const GridBox& box) {
  ScanResult best;
  const std::size_t total = (box.intervals + 1) * (box.intervals + 1);
  for (std::size_t k = 0; k < total; ++k) {
    const Point2 p = box.point(k);
    if (!feasible(p)) continue;
    offer(best, objective(p), k);
  }
  return best;
}

ScanResult scan_grid(const Objective2& objective, const Constraint2& feasible, const GridBox& box) {
  ScanResult best;
  const auto total = static_cast<std::int64_t>((box.intervals + 1) * (box.intervals + 1));
#pragma omp parallel
  {
    ScanResult local;
#pragma omp for schedule(static) nowait
    for (std::int64_t k = 0; k < total; ++k) {
      const Point2 p = box.point(static_cast<std::size_t>(k));
      if (!feasible(p)) continue;
      offer(local, objective(p), static_cast<std::size_t>(k));
    }
#pragma omp critical(nne_grid_merge)
    if (local.found) offer(best, local.value, local.index);
  }
  return best;
}

GridResult global_solve_2d(const Objective2& objective, const Constraint2& feasible, std::size_t resolution) {
  return solve_with(&scan_grid, objective, feasible, resolution);
}

GridResult global_solve_2d_serial(const Objective2& objective, const Constraint2& feasible,
                                  std::size_t resolution) {
  return solve_with(&scan_grid_serial, objective, feasible, resolution);
}

}  // namespace nne::continuous
