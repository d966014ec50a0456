#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "nne/errors.hpp"
#include "nne/knapsack.hpp"

namespace nne::knapsack {
namespace {

// SplitMix64 finalizer, used to expand the user seed before it reaches the
// Mersenne Twister (std::mt19937_64, whose output stream is fixed by the
// standard and therefore identical across platforms).
std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform integer in [lo, hi] by rejection; std::uniform_int_distribution is
// implementation-defined and would break cross-platform reproducibility.
std::int64_t randint(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return lo + static_cast<std::int64_t>(draw % span);
}

bool is_binary(double v) { return std::abs(v) <= game::kFeasibilityTolerance || std::abs(v - 1.0) <= game::kFeasibilityTolerance; }

}  // namespace

void GeneratorConfig::validate() const {
  if (players == 0 || markets == 0) throw UsageError("players and markets must be positive");
  if (gamma <= 0) throw UsageError("gamma must be positive");
}

void Instance::validate() const {
  const std::size_t n = players * markets;
  if (players == 0 || markets == 0) throw UsageError("instance needs players and markets");
  if (alpha.size() != markets || beta.size() != markets || e.size() != markets)
    throw UsageError("per-market arrays must have one entry per market");
  if (b.size() != players) throw UsageError("b must have one entry per player");
  if (c.size() != n || a.size() != n || d.size() != n)
    throw UsageError("player-by-market arrays must have players*markets entries");
  auto positive = [](const std::vector<std::int64_t>& v) {
    return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x >= 1; });
  };
  if (!positive(alpha) || !positive(beta) || !positive(c) || !positive(a) || !positive(b) ||
      !positive(d) || !positive(e)) {
    throw UsageError("all instance parameters must be >= 1");
  }
  for (std::size_t j = 0; j < players; ++j) {
    for (std::size_t l = 0; l < markets; ++l) {
      if (b[j] < a[index(j, l)])
        throw UsageError("b[" + std::to_string(j) + "] is below a[" + std::to_string(j) + "][" +
                         std::to_string(l) + "]: player cannot enter every market");
    }
  }
  for (std::size_t l = 0; l < markets; ++l) {
    for (std::size_t j = 0; j < players; ++j) {
      if (e[l] < d[index(j, l)])
        throw UsageError("e[" + std::to_string(l) + "] is below d[" + std::to_string(j) + "][" +
                         std::to_string(l) + "]: player cannot enter every market");
    }
  }
}

Instance generate_instance(const GeneratorConfig& config) {
  config.validate();
  std::mt19937_64 rng(splitmix64(config.seed));
  const std::size_t J = config.players;
  const std::size_t L = config.markets;
  const std::int64_t gamma = config.gamma;

  Instance inst;
  inst.players = J;
  inst.markets = L;
  inst.seed = config.seed;
  inst.gamma = gamma;
  inst.alpha.resize(L);
  inst.beta.resize(L);
  inst.c.resize(J * L);
  inst.a.resize(J * L);
  inst.d.resize(J * L);

  for (auto& v : inst.alpha) v = randint(rng, 1, static_cast<std::int64_t>(J) * gamma);
  for (auto& v : inst.beta) v = randint(rng, 1, gamma);
  for (auto& v : inst.c) v = randint(rng, 1, gamma);
  for (auto& v : inst.a) v = randint(rng, 1, gamma);
  for (auto& v : inst.d) v = randint(rng, 1, gamma);

  inst.b.assign(J, 0);
  inst.e.assign(L, 0);
  for (std::size_t j = 0; j < J; ++j) {
    for (std::size_t l = 0; l < L; ++l) {
      inst.b[j] = std::max(inst.b[j], inst.a[inst.index(j, l)]);
      inst.e[l] = std::max(inst.e[l], inst.d[inst.index(j, l)]);
    }
  }
  return inst;
}

bool is_feasible(const Instance& inst, std::span<const double> y) {
  if (y.size() != inst.num_binaries()) {
    throw UsageError("point has dimension " + std::to_string(y.size()) + ", instance expects " +
                     std::to_string(inst.num_binaries()));
  }
  if (!std::all_of(y.begin(), y.end(), is_binary)) return false;
  for (std::size_t j = 0; j < inst.players; ++j) {
    double used = 0.0;
    for (std::size_t l = 0; l < inst.markets; ++l) used += inst.a[inst.index(j, l)] * y[inst.index(j, l)];
    if (used > inst.b[j] + game::kFeasibilityTolerance) return false;
  }
  for (std::size_t l = 0; l < inst.markets; ++l) {
    double used = 0.0;
    for (std::size_t j = 0; j < inst.players; ++j) used += inst.d[inst.index(j, l)] * y[inst.index(j, l)];
    if (used > inst.e[l] + game::kFeasibilityTolerance) return false;
  }
  return true;
}

double player_objective(const Instance& inst, std::size_t player, std::span<const double> x,
                        std::span<const double> own) {
  double value = 0.0;
  for (std::size_t l = 0; l < inst.markets; ++l) {
    double others = 0.0;
    for (std::size_t i = 0; i < inst.players; ++i) {
      if (i != player) others += x[inst.index(i, l)];
    }
    const double q = own[l];
    value += (inst.c[inst.index(player, l)] - inst.alpha[l] + inst.beta[l] * (others + q)) * q;
  }
  return value;
}

double joint_objective(const Instance& inst, std::span<const double> y) {
  double value = 0.0;
  for (std::size_t l = 0; l < inst.markets; ++l) {
    double z = 0.0;
    for (std::size_t j = 0; j < inst.players; ++j) {
      const double q = y[inst.index(j, l)];
      value += inst.c[inst.index(j, l)] * q;
      z += q;
    }
    value += (-static_cast<double>(inst.alpha[l]) + inst.beta[l] * z) * z;
  }
  return value;
}

double cut_value(const Instance& inst, std::span<const double> x, std::span<const double> cut) {
  double value = 0.0;
  for (std::size_t j = 0; j < inst.players; ++j) {
    value += player_objective(inst, j, x, cut.subspan(j * inst.markets, inst.markets));
  }
  return value;
}

game::GameInstance make_game(const Instance& inst) {
  inst.validate();
  return game::GameInstance(
      std::vector<std::size_t>(inst.players, inst.markets),
      [inst](std::size_t player, std::span<const double> x, std::span<const double> own) {
        return player_objective(inst, player, x, own);
      },
      [inst](std::span<const double> y) { return is_feasible(inst, y); });
}

}  // namespace nne::knapsack
