#include "nne/game.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "nne/errors.hpp"

namespace nne::game {

GameInstance::GameInstance(std::vector<std::size_t> player_dims, Objective objective,
                           Membership membership)
    : dims_(std::move(player_dims)),
      objective_(std::move(objective)),
      membership_(std::move(membership)) {
  if (dims_.empty()) throw UsageError("game needs at least one player");
  offsets_.reserve(dims_.size());
  for (std::size_t d : dims_) {
    if (d == 0) throw UsageError("every player needs at least one decision variable");
    offsets_.push_back(total_);
    total_ += d;
  }
  if (!objective_ || !membership_) throw UsageError("game needs an objective and a membership test");
}

std::span<const double> GameInstance::block(std::span<const double> y, std::size_t player) const {
  return y.subspan(offsets_.at(player), dims_.at(player));
}

double GameInstance::objective(std::size_t player, std::span<const double> x,
                               std::span<const double> own) const {
  return objective_(player, x, own);
}

void GameInstance::check_dimension(std::span<const double> y) const {
  if (y.size() != total_) {
    throw UsageError("point has dimension " + std::to_string(y.size()) + ", game expects " +
                     std::to_string(total_));
  }
}

double measure(DisequilibriumMeasure kind, std::span<const double> regrets) {
  if (regrets.empty()) return 0.0;
  switch (kind) {
    case DisequilibriumMeasure::kSum:
      return std::accumulate(regrets.begin(), regrets.end(), 0.0);
    case DisequilibriumMeasure::kMax:
      return *std::max_element(regrets.begin(), regrets.end());
  }
  return 0.0;
}

double aggregate_objective(const GameInstance& game, std::span<const double> y) {
  game.check_dimension(y);
  double total = 0.0;
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    total += game.objective(i, y, game.block(y, i));
  }
  return total;
}

bool is_feasible(const GameInstance& game, std::span<const double> y) {
  game.check_dimension(y);
  return game.contains(y);
}

std::vector<double> per_player_disequilibrium(const GameInstance& game, std::span<const double> y,
                                              const BestResponseSolver& best_response) {
  game.check_dimension(y);
  std::vector<double> regrets(game.num_players());
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    regrets[i] = game.objective(i, y, game.block(y, i)) - best_response(game, i, y);
  }
  return regrets;
}

double normalized_disequilibrium(const GameInstance& game, std::span<const double> y,
                                 double normalized_value) {
  return aggregate_objective(game, y) - normalized_value;
}

}  // namespace nne::game
