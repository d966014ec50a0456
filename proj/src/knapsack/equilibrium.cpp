#include <string>

#include "nne/errors.hpp"
#include "nne/knapsack.hpp"

namespace nne::knapsack {

double best_response_value(const Instance& inst, std::size_t player, std::span<const double> y,
                           std::size_t node_limit) {
  const milp::MipSolution sol = milp::solve_mip(build_best_response(inst, player, y), node_limit);
  if (sol.status != milp::Status::kOptimal) {
    throw SolverError("best response of player " + std::to_string(player) + ": " +
                      milp::to_string(sol.status));
  }
  // Re-evaluate exactly on the integral response.
  return player_objective(inst, player, y, sol.point);
}

std::vector<double> player_regrets(const Instance& inst, std::span<const double> y) {
  const game::GameInstance game = make_game(inst);
  if (!game::is_feasible(game, y)) throw UsageError("player_regrets: point is not feasible");
  return game::per_player_disequilibrium(
      game, y, [&inst](const game::GameInstance&, std::size_t player, std::span<const double> x) {
        return best_response_value(inst, player, x);
      });
}

bool verify_gne(const Instance& inst, std::span<const double> y, double tol) {
  for (double regret : player_regrets(inst, y)) {
    if (regret > tol) return false;
  }
  return true;
}

}  // namespace nne::knapsack
