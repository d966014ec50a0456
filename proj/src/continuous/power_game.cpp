#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "nne/continuous.hpp"
#include "nne/errors.hpp"

namespace nne::continuous {

PowerConstraintGame::PowerConstraintGame(double exponent) : r_(exponent) {
  if (!(exponent > 0.0 && exponent < 1.0)) throw UsageError("exponent must lie in (0, 1)");
}

bool PowerConstraintGame::feasible(const Point2& y) const {
  for (double v : y) {
    if (v < -game::kFeasibilityTolerance || v > 1.0 + game::kFeasibilityTolerance) return false;
  }
  return std::pow(std::max(y[0], 0.0), r_) + std::pow(std::max(y[1], 0.0), r_) <=
         1.0 + game::kFeasibilityTolerance;
}

double PowerConstraintGame::objective(std::size_t player, const Point2& x, double own) const {
  return player == 0 ? -2.0 * own * x[1] : x[0] * own;
}

double PowerConstraintGame::cut_value(const Point2& x, const Point2& cut) const {
  return objective(0, x, cut[0]) + objective(1, x, cut[1]);
}

game::GameInstance PowerConstraintGame::make_game() const {
  const PowerConstraintGame self = *this;
  return game::GameInstance(
      {1, 1},
      [self](std::size_t player, std::span<const double> x, std::span<const double> own) {
        return self.objective(player, {x[0], x[1]}, own[0]);
      },
      [self](std::span<const double> y) { return self.feasible({y[0], y[1]}); });
}

PowerGameMnd::PowerGameMnd(PowerConstraintGame game, std::size_t resolution)
    : game_(game), instance_(game_.make_game()), resolution_(resolution) {
  if (resolution < kMinResolution) throw UsageError("grid resolution below minimum");
}

cutting::LowerBoundingResult PowerGameMnd::solve_lower_bounding(const cutting::CutSet& cuts) const {
  if (cuts.empty()) throw UsageError("lower-bounding problem needs at least one cut");
  std::vector<Point2> points;
  for (const auto& c : cuts.points()) points.push_back({c[0], c[1]});
  const PowerConstraintGame& g = game_;
  auto min_cut = [&points, &g](const Point2& y) {
    double w = std::numeric_limits<double>::infinity();
    for (const Point2& c : points) w = std::min(w, g.cut_value(y, c));
    return w;
  };
  const GridResult best = global_solve_2d(
      [&](const Point2& y) { return g.cut_value(y, y) - min_cut(y); },
      [&g](const Point2& y) { return g.feasible(y); }, resolution_);
  cutting::LowerBoundingResult result;
  result.point = {best.point[0], best.point[1]};
  result.w = min_cut(best.point);
  result.delta_lower = best.value;
  return result;
}

cutting::LowerLevelResult PowerGameMnd::solve_lower_level(std::span<const double> x) const {
  const Point2 at{x[0], x[1]};
  const PowerConstraintGame& g = game_;
  const GridResult best = global_solve_2d([&](const Point2& y) { return g.cut_value(at, y); },
                                          [&g](const Point2& y) { return g.feasible(y); }, resolution_);
  return {{best.point[0], best.point[1]}, best.value, 0};
}

std::vector<double> PowerGameMnd::solve_joint() const {
  const PowerConstraintGame& g = game_;
  const GridResult best = global_solve_2d([&g](const Point2& y) { return g.cut_value(y, y); },
                                          [&g](const Point2& y) { return g.feasible(y); }, resolution_);
  return {best.point[0], best.point[1]};
}

double grid_best_response(const PowerConstraintGame& game, std::size_t player, const Point2& x,
                          std::size_t resolution) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= resolution; ++k) {
    const double v = static_cast<double>(k) / static_cast<double>(resolution);
    Point2 y = x;
    y[player] = v;
    if (!game.feasible(y)) continue;
    best = std::min(best, game.objective(player, x, v));
  }
  if (!std::isfinite(best)) throw InfeasibleGameError("player has no feasible grid response");
  return best;
}

std::vector<double> grid_regrets(const PowerConstraintGame& game, const Point2& y, std::size_t resolution) {
  return {game.objective(0, y, y[0]) - grid_best_response(game, 0, y, resolution),
          game.objective(1, y, y[1]) - grid_best_response(game, 1, y, resolution)};
}

ExampleTrace run_example_trace(double epsilon, std::size_t resolution) {
  const PowerGameMnd problem(PowerConstraintGame{0.5}, resolution);
  ExampleTrace trace;
  trace.epsilon = epsilon;
  trace.joint_optimizer = problem.solve_joint();
  cutting::CutSet cuts;
  cuts.add(trace.joint_optimizer);
  trace.first_lower_bounding = problem.solve_lower_bounding(cuts);
  trace.first_lower_level = problem.solve_lower_level(trace.first_lower_bounding.point);
  cutting::SolverConfig config;
  config.epsilon = epsilon;
  trace.report = cutting::solve_mnd(problem, cuts, config);
  return trace;
}

namespace {

struct Pt {
  std::span<const double> v;
};

std::ostream& operator<<(std::ostream& out, Pt p) {
  out << '(';
  for (std::size_t k = 0; k < p.v.size(); ++k) out << (k ? ", " : "") << p.v[k];
  return out << ')';
}

}  // namespace

void write_transcript(std::ostream& out, const ExampleTrace& trace) {
  const auto& lbp = trace.first_lower_bounding;
  const auto& llp = trace.first_lower_level;
  const auto& report = trace.report;
  out << std::setprecision(6);
  out << "Two-player game with constraint y1^(1/2) + y2^(1/2) <= 1\n";
  out << "  g1(x, y1) = -2 y1 x2,  g2(x, y2) = x1 y2\n";
  out << "Initialize F^L with the joint-problem optimizer " << Pt{trace.joint_optimizer}
      << ", epsilon = " << trace.epsilon << "\n";
  out << "Step 1: delta_U = +inf\n";
  for (const auto& it : report.iterations) {
    out << "Iteration " << it.iteration << "\n";
    if (it.iteration == 1) {
      out << "  Step 3: lower-bounding problem -> y = " << Pt{lbp.point} << ", w = " << lbp.w
          << ", delta_L = " << lbp.delta_lower << "\n";
      out << "  Step 4: lower-level problem at x = " << Pt{lbp.point} << " -> g^N = " << llp.value
          << ", y' = " << Pt{llp.point} << "\n";
    } else {
      out << "  Step 3: delta_L = " << it.delta_lower << ", w = " << it.w << "\n";
      out << "  Step 4: g^N = " << it.normalized_value << "\n";
    }
    if (!it.cut_added) {
      out << "  Step 5: w = " << it.w << " <= g^N = " << it.normalized_value << " -> equilibrium\n";
      continue;
    }
    out << "  Step 5: w = " << it.w << " > g^N = " << it.normalized_value << " -> add y' to F^L (|F^L| = "
        << it.cuts << ")\n";
    out << "  Step 10: delta_U = " << it.delta_upper << "\n";
  }
  const double gap = report.delta_upper - std::max(report.delta_lower, 0.0);
  if (report.status == cutting::Termination::kToleranceReached)
    out << "Step 13: delta_U - max(delta_L, 0) = " << gap << (gap < trace.epsilon ? " < " : " >= ")
      << "epsilon\n";
  out << "Return y* = " << Pt{report.point} << " (" << cutting::to_string(report.status) << ", "
      << report.num_iterations() << " iteration" << (report.num_iterations() == 1 ? "" : "s") << ")\n";
}

}  // namespace nne::continuous
