#include <doctest.h>

#include <cmath>
#include <vector>

#include "nne/continuous.hpp"
#include "nne/errors.hpp"
#include "nne/game.hpp"
#include "nne/knapsack.hpp"
#include "oracles.hpp"

using namespace nne;
using game::DisequilibriumMeasure;

namespace {

// Brute-force best response for the knapsack family, in the signature game-core expects.
game::BestResponseSolver enumerated_best_response(const knapsack::Instance& inst) {
  return [&inst](const game::GameInstance&, std::size_t player, std::span<const double> x) {
    return oracle::enumerate_best_response(inst, player, x);
  };
}

}  // namespace

TEST_CASE("measure: zero exactly on the zero vector") {
  for (auto kind : {DisequilibriumMeasure::kSum, DisequilibriumMeasure::kMax}) {
    CHECK(game::measure(kind, std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
    CHECK(game::measure(kind, std::vector<double>{0.0, 1e-3, 0.0}) > 0.0);
    CHECK(game::measure(kind, std::vector<double>{2.0}) > 0.0);
  }
  CHECK(game::measure(DisequilibriumMeasure::kSum, std::vector<double>{1.0, 2.0}) == 3.0);
  CHECK(game::measure(DisequilibriumMeasure::kMax, std::vector<double>{1.0, 2.0}) == 2.0);
}

TEST_CASE("continuous example: aggregate and feasibility") {
  const continuous::PowerConstraintGame pg;
  const auto g = pg.make_game();
  CHECK(g.num_players() == 2);
  CHECK(game::aggregate_objective(g, std::vector<double>{1.0, 0.0}) == 0.0);
  CHECK(game::is_feasible(g, std::vector<double>{0.25, 0.25}));
  CHECK_FALSE(game::is_feasible(g, std::vector<double>{1.0, 1.0}));
  CHECK(game::normalized_disequilibrium(g, std::vector<double>{1.0, 0.0}, 0.0) == 0.0);

  // At (1,0) neither player can do better: player 1 is indifferent, player 2 is pinned to 0.
  const game::BestResponseSolver br = [&pg](const game::GameInstance&, std::size_t player,
                                            std::span<const double> x) {
    return continuous::grid_best_response(pg, player, {x[0], x[1]});
  };
  const auto regrets = game::per_player_disequilibrium(g, std::vector<double>{1.0, 0.0}, br);
  REQUIRE(regrets.size() == 2);
  CHECK(regrets[0] == doctest::Approx(0.0));
  CHECK(regrets[1] == doctest::Approx(0.0));
}

TEST_CASE("knapsack aggregate: zero at the origin, hand value elsewhere") {
  const auto inst = knapsack::generate_instance({7, 2, 2, 1000});
  const auto g = knapsack::make_game(inst);
  CHECK(game::aggregate_objective(g, std::vector<double>(4, 0.0)) == 0.0);
  CHECK(game::is_feasible(g, std::vector<double>(4, 0.0)));

  // y = (player 0 in market 1, player 1 in markets 0 and 1), evaluated term by term.
  const std::vector<double> y{0.0, 1.0, 1.0, 1.0};
  const double f0 = static_cast<double>(inst.c[1] - inst.alpha[1] + inst.beta[1] * 2);
  const double f1 = static_cast<double>(inst.c[2] - inst.alpha[0] + inst.beta[0] * 1) +
                    static_cast<double>(inst.c[3] - inst.alpha[1] + inst.beta[1] * 2);
  CHECK(game::aggregate_objective(g, y) == f0 + f1);
}

TEST_CASE("per-player disequilibrium: zero at best responses, positive at a bad point") {
  // Player 0 profits in market 0, player 1 in market 1; caps admit one entrant per market.
  const auto inst = oracle::make_instance(2, 2, {100, 100}, {1, 1}, {10, 500, 500, 10}, {1, 1, 1, 1}, {1, 1, 1, 1});
  const auto g = knapsack::make_game(inst);
  const auto br = enumerated_best_response(inst);
  const std::vector<double> good{1.0, 0.0, 0.0, 1.0};
  REQUIRE(game::is_feasible(g, good));
  for (double r : game::per_player_disequilibrium(g, good, br)) CHECK(r == 0.0);
  const std::vector<double> bad{0.0, 0.0, 0.0, 1.0};
  const auto regrets = game::per_player_disequilibrium(g, bad, br);
  CHECK(regrets[0] > 0.0);
  CHECK(regrets[1] == 0.0);
}

TEST_CASE("single player at its optimum: normalized disequilibrium zero") {
  const auto inst = knapsack::generate_instance({11, 1, 4, 1000});
  const auto g = knapsack::make_game(inst);
  const auto feasible = knapsack::enumerate_feasible(inst);
  std::vector<double> best;
  double best_value = oracle::kInf;
  for (const auto& y : feasible) {
    const double v = game::aggregate_objective(g, y);
    if (v < best_value) {
      best_value = v;
      best = y;
    }
  }
  const double gn = knapsack::enumerate_normalized_value(inst, best, feasible);
  CHECK(game::normalized_disequilibrium(g, best, gn) == 0.0);
}

TEST_CASE("property: normalized disequilibrium bounds every player's regret") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const std::size_t players = 2 + seed % 2;
    const std::size_t markets = 2 + (seed / 2) % 2;
    const auto inst = knapsack::generate_instance({seed, players, markets, 50});
    const auto g = knapsack::make_game(inst);
    const auto feasible = knapsack::enumerate_feasible(inst);
    const auto br = enumerated_best_response(inst);
    for (const auto& y : feasible) {
      const double gn = knapsack::enumerate_normalized_value(inst, y, feasible);
      const double delta = game::normalized_disequilibrium(g, y, gn);
      CHECK(delta >= -1e-9);
      const auto regrets = game::per_player_disequilibrium(g, y, br);
      CHECK(game::measure(DisequilibriumMeasure::kMax, regrets) <= delta + 1e-9);
      // Identical inputs, identical outputs.
      CHECK(game::normalized_disequilibrium(g, y, gn) == delta);
    }
  }
}

TEST_CASE("dimension mismatch is a usage error") {
  const auto inst = knapsack::generate_instance({1, 2, 2, 1000});
  const auto g = knapsack::make_game(inst);
  CHECK_THROWS_AS(game::aggregate_objective(g, std::vector<double>(3, 0.0)), UsageError);
}
