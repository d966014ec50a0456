#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nne/cutting_plane.hpp"
#include "nne/errors.hpp"
#include "nne/experiment.hpp"
#include "nne/knapsack.hpp"
#include "oracles.hpp"

using namespace nne;
using knapsack::Instance;

namespace {

const std::string kGolden = std::string(NNE_TEST_DATA_DIR) + "/instance_seed1_2x2.json";

std::vector<double> random_feasible(const Instance& inst, std::mt19937_64& rng) {
  // Greedy random fill: visit entries in random order, keep each with probability 1/2 if it fits.
  std::vector<std::size_t> order(inst.num_binaries());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<double> y(inst.num_binaries(), 0.0);
  for (std::size_t k : order) {
    if (rng() % 2 == 0) continue;
    y[k] = 1.0;
    if (!knapsack::is_feasible(inst, y)) y[k] = 0.0;
  }
  return y;
}

}  // namespace

TEST_CASE("generator: same seed, identical instance") {
  const auto a = knapsack::generate_instance({42, 3, 4, 1000});
  const auto b = knapsack::generate_instance({42, 3, 4, 1000});
  CHECK(a == b);
  const auto c = knapsack::generate_instance({43, 3, 4, 1000});
  CHECK_FALSE(a == c);
}

TEST_CASE("generator: budgets and caps equal the row and column maxima") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto inst = knapsack::generate_instance({seed, 1 + seed % 5, 1 + seed % 7, 1000});
    for (std::size_t j = 0; j < inst.players; ++j) {
      std::int64_t m = 0;
      for (std::size_t l = 0; l < inst.markets; ++l) m = std::max(m, inst.a[inst.index(j, l)]);
      CHECK(inst.b[j] == m);
    }
    for (std::size_t l = 0; l < inst.markets; ++l) {
      std::int64_t m = 0;
      for (std::size_t j = 0; j < inst.players; ++j) m = std::max(m, inst.d[inst.index(j, l)]);
      CHECK(inst.e[l] == m);
      CHECK(inst.alpha[l] >= 1);
      CHECK(inst.alpha[l] <= static_cast<std::int64_t>(inst.players) * 1000);
      CHECK(inst.beta[l] >= 1);
      CHECK(inst.beta[l] <= 1000);
    }
    for (auto v : inst.c) CHECK((v >= 1 && v <= 1000));
  }
}

TEST_CASE("generator: seed 1, 2x2 matches the frozen golden file") {
  const auto golden = experiment::read_instance(kGolden);
  CHECK(golden == knapsack::generate_instance({1, 2, 2, 1000}));
  CHECK(golden.alpha == std::vector<std::int64_t>{1004, 1001});
  CHECK(golden.b == std::vector<std::int64_t>{977, 779});
}

TEST_CASE("generator: bad configs rejected") {
  CHECK_THROWS_AS(knapsack::generate_instance({1, 0, 2, 1000}), UsageError);
  CHECK_THROWS_AS(knapsack::generate_instance({1, 2, 2, 0}), UsageError);
}

TEST_CASE("feasibility: origin feasible, fractional and over-budget not") {
  const auto inst = oracle::make_instance(1, 2, {10, 10}, {1, 1}, {1, 1}, {3, 3}, {1, 1});
  CHECK(knapsack::is_feasible(inst, std::vector<double>{0.0, 0.0}));
  CHECK(knapsack::is_feasible(inst, std::vector<double>{1.0, 0.0}));
  CHECK_FALSE(knapsack::is_feasible(inst, std::vector<double>{1.0, 1.0}));
  CHECK_FALSE(knapsack::is_feasible(inst, std::vector<double>{0.5, 0.0}));
}

TEST_CASE("lbp: variable count and linearization on random assignments") {
  const auto inst = knapsack::generate_instance({5, 4, 5, 1000});
  std::mt19937_64 rng(5);
  cutting::CutSet cuts;
  cuts.add(random_feasible(inst, rng));
  cuts.add(random_feasible(inst, rng));
  const auto lbp = knapsack::build_lbp(inst, cuts);
  CHECK(lbp.lp.num_variables() == 4 * 5 + 5 * 4 + 5 + 1);
  CHECK(lbp.binaries.size() == 2 * 4 * 5);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> y(inst.num_binaries());
    for (double& v : y) v = static_cast<double>(rng() % 2);
    const double w = static_cast<double>(static_cast<std::int64_t>(rng() % 2001) - 1000);
    CHECK(knapsack::lbp_objective_at(inst, lbp, y, w) == oracle::quadratic_z_form(inst, y) - w);
  }
}

TEST_CASE("lbp: origin bounds w by the cut constant") {
  const auto inst = knapsack::generate_instance({9, 2, 3, 1000});
  const auto feasible = knapsack::enumerate_feasible(inst);
  for (const auto& cut : feasible) {
    double constant = 0.0;
    for (std::size_t j = 0; j < inst.players; ++j) {
      for (std::size_t l = 0; l < inst.markets; ++l) {
        constant += static_cast<double>(inst.c[inst.index(j, l)] - inst.alpha[l] + inst.beta[l]) * cut[inst.index(j, l)];
      }
    }
    CHECK(knapsack::cut_value(inst, std::vector<double>(6, 0.0), cut) == constant);
  }
}

TEST_CASE("property: cut value is the sum of player objectives at the cut") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto inst = knapsack::generate_instance({seed, 3, 2, 1000});
    const auto feasible = knapsack::enumerate_feasible(inst);
    for (const auto& y : feasible) {
      for (const auto& cut : feasible) {
        double direct = 0.0;
        for (std::size_t j = 0; j < inst.players; ++j) {
          direct += knapsack::player_objective(inst, j, y, std::span<const double>(cut).subspan(j * 2, 2));
        }
        CHECK(knapsack::cut_value(inst, y, cut) == direct);
      }
    }
  }
}

TEST_CASE("property: linearized lbp objective equals the quadratic form on every 0/1 point") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = knapsack::generate_instance({seed, 3, 3, 1000});
    cutting::CutSet cuts;
    cuts.add(std::vector<double>(9, 0.0));
    const auto lbp = knapsack::build_lbp(inst, cuts);
    for (std::uint64_t mask = 0; mask < 512; ++mask) {
      const auto y = oracle::bits(mask, 9);
      CHECK(knapsack::lbp_objective_at(inst, lbp, y, 0.0) == oracle::quadratic_z_form(inst, y));
    }
  }
}

TEST_CASE("lbp solve agrees with enumeration over (y, w)") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = knapsack::generate_instance({seed, 2, 2, 1000});
    const oracle::EnumeratedKnapsackMnd brute(inst);
    const knapsack::KnapsackMnd milp_route(inst);
    cutting::CutSet cuts;
    cuts.add(brute.solve_joint());
    const auto expected = brute.solve_lower_bounding(cuts);
    const auto got = milp_route.solve_lower_bounding(cuts);
    CHECK(got.delta_lower == expected.delta_lower);
    CHECK(knapsack::is_feasible(inst, got.point));
  }
}

TEST_CASE("llp: coefficients at the origin are c - alpha + beta") {
  const auto inst = knapsack::generate_instance({3, 2, 3, 1000});
  const auto llp = knapsack::build_llp(inst, std::vector<double>(6, 0.0));
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t l = 0; l < 3; ++l) {
      CHECK(llp.lp.objective[inst.index(j, l)] ==
            static_cast<double>(inst.c[inst.index(j, l)] - inst.alpha[l] + inst.beta[l]));
    }
  }
}

TEST_CASE("llp: coefficients match the expansion on unit responses") {
  // With a single nonzero entry in y', the sum of player objectives is that entry's coefficient.
  const auto inst = experiment::read_instance(kGolden);
  for (const auto& x : knapsack::enumerate_feasible(inst)) {
    const auto llp = knapsack::build_llp(inst, x);
    for (std::size_t k = 0; k < 4; ++k) {
      std::vector<double> unit(4, 0.0);
      unit[k] = 1.0;
      CHECK(llp.lp.objective[k] == knapsack::cut_value(inst, x, unit));
    }
  }
}

TEST_CASE("llp solve equals enumeration of every feasible response") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto inst = knapsack::generate_instance({seed, 2, 2, 1000});
    const auto feasible = knapsack::enumerate_feasible(inst);
    const knapsack::KnapsackMnd problem(inst);
    for (const auto& x : feasible) {
      const auto got = problem.solve_lower_level(x);
      CHECK(got.value == knapsack::enumerate_normalized_value(inst, x, feasible));
      CHECK(knapsack::is_feasible(inst, got.point));
    }
  }
}

TEST_CASE("joint solve equals enumeration on 3x3") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = knapsack::generate_instance({seed, 3, 3, 1000});
    const oracle::EnumeratedKnapsackMnd brute(inst);
    const knapsack::KnapsackMnd problem(inst);
    CHECK(knapsack::joint_objective(inst, problem.solve_joint()) ==
          knapsack::joint_objective(inst, brute.solve_joint()));
  }
}

TEST_CASE("brute force: serial and parallel agree exactly, value nonnegative") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = knapsack::generate_instance({seed, 2 + seed % 2, 2 + (seed / 2) % 2, 1000});
    const auto serial = knapsack::brute_force_mnd_serial(inst);
    const auto parallel = knapsack::brute_force_mnd(inst);
    CHECK(serial.delta_n == parallel.delta_n);
    CHECK(serial.point == parallel.point);
    CHECK(serial.feasible_points == parallel.feasible_points);
    CHECK(serial.delta_n >= 0.0);
  }
}

TEST_CASE("brute force: dominant costs make the origin an equilibrium") {
  // c - alpha + beta > 0 everywhere, so nobody ever enters a market.
  const auto inst = oracle::make_instance(2, 2, {5, 5}, {1, 1}, {10, 10, 10, 10}, {1, 2, 2, 1}, {1, 1, 1, 1});
  const auto result = knapsack::brute_force_mnd(inst);
  CHECK(result.delta_n == 0.0);
  CHECK(result.point == std::vector<double>(4, 0.0));
}

TEST_CASE("brute force: golden instance value cross-checked with the cutting-plane solver") {
  const auto inst = experiment::read_instance(kGolden);
  const auto result = knapsack::brute_force_mnd(inst);
  CHECK(result.delta_n == 0.0);
  const knapsack::KnapsackMnd problem(inst);
  const auto report = cutting::solve_mnd(problem, cutting::initialize_cuts_joint(problem), {});
  CHECK(std::abs(report.delta_upper - result.delta_n) <= 1e-6);
}

TEST_CASE("regression: 5x10 seed 240 lower-bounding nodes stay numerically sound") {
  // Phase 1 used to accept a small artificial remainder here and the node
  // then failed its final feasibility check.
  const auto inst = knapsack::generate_instance({240, 5, 10, 1000});
  const knapsack::KnapsackMnd problem(inst);
  cutting::SolverConfig config;
  config.max_iterations = 1;
  cutting::SolveReport report;
  REQUIRE_NOTHROW(report = cutting::solve_mnd(problem, cutting::initialize_cuts_joint(problem), config));
  REQUIRE(report.converged());
  CHECK(report.delta_upper <= config.epsilon);
  CHECK(knapsack::verify_gne(inst, report.point, 1e-6));
}

TEST_CASE("brute force: too many binaries is a usage error") {
  const auto inst = knapsack::generate_instance({1, 4, 5, 1000});
  CHECK_THROWS_AS(knapsack::brute_force_mnd(inst), UsageError);
}

TEST_CASE("verify_gne: solver equilibria pass, profitable deviations fail") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = knapsack::generate_instance({seed, 3, 3, 1000});
    const knapsack::KnapsackMnd problem(inst);
    const auto report = cutting::solve_mnd(problem, cutting::initialize_cuts_joint(problem), {});
    if (report.delta_upper <= 1e-6) CHECK(knapsack::verify_gne(inst, report.point, 1e-6));

    // A brute-force-identified non-equilibrium point fails, and its regrets match enumeration.
    for (const auto& y : knapsack::enumerate_feasible(inst)) {
      const auto regrets = knapsack::player_regrets(inst, y);
      double worst = 0.0;
      for (std::size_t j = 0; j < inst.players; ++j) {
        const std::span<const double> own(y.data() + j * inst.markets, inst.markets);
        const double expected = knapsack::player_objective(inst, j, y, own) - oracle::enumerate_best_response(inst, j, y);
        CHECK(regrets[j] == expected);
        worst = std::max(worst, expected);
      }
      CHECK(knapsack::verify_gne(inst, y, 1e-6) == (worst <= 1e-6));
    }
  }
}

TEST_CASE("verify_gne: origin fails when some market is profitable and open") {
  // Player 1 gains c + beta - alpha = 3 + 1 - 10 < 0 by entering market 0.
  const auto inst = oracle::make_instance(2, 2, {10, 1}, {1, 1}, {50, 50, 3, 50}, {1, 1, 1, 1}, {1, 1, 1, 1});
  CHECK_FALSE(knapsack::verify_gne(inst, std::vector<double>(4, 0.0), 1e-6));
  CHECK(knapsack::verify_gne(inst, std::vector<double>{0.0, 0.0, 1.0, 0.0}, 1e-6));
}
