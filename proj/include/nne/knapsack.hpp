#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nne/cutting_plane.hpp"
#include "nne/game.hpp"
#include "nne/milp.hpp"

namespace nne::knapsack {

struct GeneratorConfig {
  std::uint64_t seed = 1;
  std::size_t players = 2;
  std::size_t markets = 2;
  std::int64_t gamma = 1000;

  void validate() const;
};

/// Discretely-constrained Nash-Cournot game: player j picks a 0/1 participation
/// vector y_j over the markets. Player-by-market arrays are row-major by player.
struct Instance {
  std::size_t players = 0;
  std::size_t markets = 0;
  std::vector<std::int64_t> alpha;  // inverse-demand intercepts, per market
  std::vector<std::int64_t> beta;   // inverse-demand slopes, per market
  std::vector<std::int64_t> c;      // participation costs
  std::vector<std::int64_t> a;      // budget consumption
  std::vector<std::int64_t> b;      // budgets, per player
  std::vector<std::int64_t> d;      // shared-cap consumption
  std::vector<std::int64_t> e;      // shared caps, per market
  std::uint64_t seed = 0;
  std::int64_t gamma = 1000;

  std::size_t index(std::size_t player, std::size_t market) const { return player * markets + market; }
  std::size_t num_binaries() const { return players * markets; }

  /// Throws UsageError when sizes or the generation invariants are violated.
  void validate() const;

  bool operator==(const Instance&) const = default;
};

Instance generate_instance(const GeneratorConfig& config);

/// Binary, budget-feasible and within every shared cap.
bool is_feasible(const Instance& inst, std::span<const double> y);

/// f_j(x_{-j}, y_j) = Σ_l (c_jl - α_l + β_l(Σ_{i≠j} x_il + y_jl)) y_jl.
double player_objective(const Instance& inst, std::size_t player, std::span<const double> x,
                        std::span<const double> own);

/// Σ_j f_j(y) = Σ_jl c_jl y_jl + Σ_l (-α_l z_l + β_l z_l²), z_l = Σ_j y_jl.
double joint_objective(const Instance& inst, std::span<const double> y);

/// Σ_j f_j(x_{-j}, y'_j): the right-hand side of the cut generated by y'.
double cut_value(const Instance& inst, std::span<const double> x, std::span<const double> cut);

game::GameInstance make_game(const Instance& inst);

/// Column layout of the lower-bounding MILP.
struct LbpLayout {
  std::size_t players;
  std::size_t markets;

  std::size_t y(std::size_t j, std::size_t l) const { return j * markets + l; }
  /// Unit-step binary k (1-based) of market l.
  std::size_t u(std::size_t l, std::size_t k) const { return players * markets + l * players + (k - 1); }
  std::size_t z(std::size_t l) const { return 2 * players * markets + l; }
  std::size_t w() const { return 2 * players * markets + markets; }
  std::size_t num_variables() const { return 2 * players * markets + markets + 1; }
};

/// Lower-bounding MILP over (y, u, z, w). z_l = Σ_j y_jl = Σ_k u_lk with ordered
/// unit steps u_l1 >= u_l2 >= ..., so β_l z_l² = β_l Σ_k (2k-1) u_lk on integers.
milp::MixedIntegerProgram build_lbp(const Instance& inst, const cutting::CutSet& cuts);

/// The same encoding without w and cuts: min Σ_j f_j(y) over Y.
milp::MixedIntegerProgram build_joint(const Instance& inst);

/// 0-1 ILP for g^N(y): min Σ_jl (c_jl - α_l + β_l + β_l Σ_{i≠j} y_il) y'_jl over Y.
milp::MixedIntegerProgram build_llp(const Instance& inst, std::span<const double> y);

/// Player j's 0-1 knapsack best response with the other players fixed at y.
milp::MixedIntegerProgram build_best_response(const Instance& inst, std::size_t player,
                                              std::span<const double> y);

/// Value of the linearized lower-bounding objective at a 0/1 assignment of y
/// (u and z derived from y) with the given w.
double lbp_objective_at(const Instance& inst, const milp::MixedIntegerProgram& lbp,
                        std::span<const double> y, double w);

class KnapsackMnd final : public cutting::MndSubproblems {
 public:
  explicit KnapsackMnd(Instance inst, std::size_t node_limit = 1'000'000);

  const game::GameInstance& game() const override { return game_; }
  const Instance& instance() const { return inst_; }

  cutting::LowerBoundingResult solve_lower_bounding(const cutting::CutSet& cuts) const override;
  cutting::LowerLevelResult solve_lower_level(std::span<const double> x) const override;
  std::vector<double> solve_joint() const override;

 private:
  Instance inst_;
  game::GameInstance game_;
  std::size_t node_limit_;
};

/// Enumeration budget for the brute-force oracles.
inline constexpr std::size_t kMaxEnumerationBinaries = 16;

/// All feasible 0/1 points in increasing bitmask order (bit k = entry k).
std::vector<std::vector<double>> enumerate_feasible(const Instance& inst);

struct BruteForceResult {
  double delta_n = 0.0;
  std::vector<double> point;
  std::size_t feasible_points = 0;
};

/// Exact minimum normalized disequilibrium by double enumeration. The OpenMP
/// version parallelizes the outer loop and breaks ties by lowest bitmask, so it
/// matches the serial reference exactly.
BruteForceResult brute_force_mnd(const Instance& inst);
BruteForceResult brute_force_mnd_serial(const Instance& inst);

/// g^N(x) by enumeration over `feasible`.
double enumerate_normalized_value(const Instance& inst, std::span<const double> x,
                                  const std::vector<std::vector<double>>& feasible);

/// Player j's best-response value at y (others fixed), via the MILP engine.
double best_response_value(const Instance& inst, std::size_t player, std::span<const double> y,
                           std::size_t node_limit = 1'000'000);

/// Per-player regrets f_j(y) - f_j*(y_{-j}).
std::vector<double> player_regrets(const Instance& inst, std::span<const double> y);

/// True iff no player can improve its objective by more than tol unilaterally.
bool verify_gne(const Instance& inst, std::span<const double> y, double tol);

}  // namespace nne::knapsack
