#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nne::game {

/// A generalized game in the jointly constrained encoding.
///
/// Every player i controls a block y_i of the joint vector y. The parameter x
/// seen by each objective is a copy of the full joint vector (the linkage
/// x_i = y_i for all i is implicit), and a single host set Y holds both the
/// per-player and the shared constraints. Instances are immutable once built.
class GameInstance {
 public:
  /// g_i(x, y_i): objective of `player` at parameter x with own block y_i.
  using Objective = std::function<double(std::size_t player, std::span<const double> x,
                                         std::span<const double> own)>;
  /// Membership test for the host set Y.
  using Membership = std::function<bool(std::span<const double> y)>;

  GameInstance(std::vector<std::size_t> player_dims, Objective objective, Membership membership);

  std::size_t num_players() const { return dims_.size(); }
  std::size_t dimension(std::size_t player) const { return dims_.at(player); }
  std::size_t offset(std::size_t player) const { return offsets_.at(player); }
  std::size_t total_dimension() const { return total_; }

  std::span<const double> block(std::span<const double> y, std::size_t player) const;

  double objective(std::size_t player, std::span<const double> x,
                   std::span<const double> own) const;
  bool contains(std::span<const double> y) const { return membership_(y); }

  /// Throws UsageError unless y has total_dimension() entries.
  void check_dimension(std::span<const double> y) const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
  Objective objective_;
  Membership membership_;
};

enum class DisequilibriumMeasure { kSum, kMax };

double measure(DisequilibriumMeasure kind, std::span<const double> regrets);

/// Returns g*_i(x), the optimal value of `player`'s problem at parameter x.
using BestResponseSolver =
    std::function<double(const GameInstance& game, std::size_t player, std::span<const double> x)>;

/// Σ_i g_i(x, y_i) with x = y.
double aggregate_objective(const GameInstance& game, std::span<const double> y);

bool is_feasible(const GameInstance& game, std::span<const double> y);

/// (g_i(y, y_i) - g*_i(y))_i. The max entry is at most a tolerance exactly when
/// y is a generalized Nash equilibrium.
std::vector<double> per_player_disequilibrium(const GameInstance& game, std::span<const double> y,
                                              const BestResponseSolver& best_response);

/// aggregate_objective(y) - g^N(y); `normalized_value` must be g^N at x = y.
double normalized_disequilibrium(const GameInstance& game, std::span<const double> y,
                                 double normalized_value);

/// Absolute tolerance for continuous constraint checks.
inline constexpr double kFeasibilityTolerance = 1e-9;

}  // namespace nne::game
