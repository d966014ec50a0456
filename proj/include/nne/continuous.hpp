#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "nne/cutting_plane.hpp"
#include "nne/game.hpp"

namespace nne::continuous {

using Point2 = std::array<double, 2>;
using Objective2 = std::function<double(const Point2&)>;
using Constraint2 = std::function<bool(const Point2&)>;

inline constexpr std::size_t kMinResolution = 64;
inline constexpr std::size_t kDefaultResolution = 1024;
inline constexpr int kRefinementRounds = 2;
inline constexpr std::size_t kRefinementFactor = 4;

struct GridResult {
  Point2 point{0.0, 0.0};
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Index and value of the best feasible point of a (n+1)x(n+1) grid over a box.
/// Ties go to the lowest flattened index (first coordinate major).
struct ScanResult {
  bool found = false;
  std::size_t index = 0;
  double value = 0.0;
};

struct GridBox {
  double lo1, hi1, lo2, hi2;
  std::size_t intervals;

  Point2 point(std::size_t index) const;
};

ScanResult scan_grid_serial(const Objective2& objective, const Constraint2& feasible, const GridBox& box);
ScanResult scan_grid(const Objective2& objective, const Constraint2& feasible, const GridBox& box);

/// Global minimization over [0,1]² by exhaustive grid scan at `resolution`
/// intervals per axis, followed by kRefinementRounds rounds of local grid
/// refinement (spacing divided by kRefinementFactor over a ±1-cell window).
/// Refinement only accepts strict improvements. For an L-Lipschitz objective
/// the incumbent is within L·√2/resolution of the global optimum over the
/// feasible grid neighbourhood of the optimizer. Throws InfeasibleGameError
/// when no grid point is feasible.
GridResult global_solve_2d(const Objective2& objective, const Constraint2& feasible,
                           std::size_t resolution = kDefaultResolution);
GridResult global_solve_2d_serial(const Objective2& objective, const Constraint2& feasible,
                                  std::size_t resolution = kDefaultResolution);

/// Two-player game g1 = -2 y1 x2, g2 = x1 y2 over [0,1]² with the shared
/// nonconvex constraint y1^r + y2^r <= 1, r in (0,1).
class PowerConstraintGame {
 public:
  explicit PowerConstraintGame(double exponent = 0.5);

  double exponent() const { return r_; }
  bool feasible(const Point2& y) const;
  /// g_1(x, y1) and g_2(x, y2).
  double objective(std::size_t player, const Point2& x, double own) const;
  /// Σ_i g_i(x, y'_i).
  double cut_value(const Point2& x, const Point2& cut) const;

  game::GameInstance make_game() const;

 private:
  double r_;
};

class PowerGameMnd final : public cutting::MndSubproblems {
 public:
  explicit PowerGameMnd(PowerConstraintGame game = PowerConstraintGame{},
                        std::size_t resolution = kDefaultResolution);

  const game::GameInstance& game() const override { return instance_; }
  const PowerConstraintGame& power_game() const { return game_; }

  /// w is eliminated: at each grid point it equals the smallest cut value.
  cutting::LowerBoundingResult solve_lower_bounding(const cutting::CutSet& cuts) const override;
  cutting::LowerLevelResult solve_lower_level(std::span<const double> x) const override;
  std::vector<double> solve_joint() const override;

 private:
  PowerConstraintGame game_;
  game::GameInstance instance_;
  std::size_t resolution_;
};

/// Player i's best-response value at x by a 1-D grid over [0,1].
double grid_best_response(const PowerConstraintGame& game, std::size_t player, const Point2& x,
                          std::size_t resolution = kDefaultResolution * 16);

std::vector<double> grid_regrets(const PowerConstraintGame& game, const Point2& y,
                                 std::size_t resolution = kDefaultResolution * 16);

struct ExampleTrace {
  std::vector<double> joint_optimizer;
  cutting::LowerBoundingResult first_lower_bounding;
  cutting::LowerLevelResult first_lower_level;
  cutting::SolveReport report;
  double epsilon = 0.01;
};

/// Runs the cutting-plane method on the default game, seeded with the
/// joint-problem optimizer.
ExampleTrace run_example_trace(double epsilon = 0.01, std::size_t resolution = kDefaultResolution);

/// Human-readable transcript keyed by the cutting-plane loop's step numbers.
void write_transcript(std::ostream& out, const ExampleTrace& trace);

}  // namespace nne::continuous
