#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nne/knapsack.hpp"

namespace nne::kkt {

/// Equation groups of the concatenated KKT system of the continuous
/// reformulation (binaries relaxed to [0,1] with y(1-y) = 0).
enum class Group {
  kStationarity,    // α - c - β Σ_{i≠j} y_i - 2β y - π a + γ - 2γ y - μ + ν - ω d = 0
  kBudget,          // 0 <= b - Σ a y ⊥ π >= 0
  kComplementarity, // γ y (1 - y) = 0
  kUpperBound,      // 0 <= 1 - y ⊥ μ >= 0
  kLowerBound,      // 0 <= y ⊥ ν >= 0
  kShared,          // 0 <= e - Σ d y ⊥ ω >= 0
};

inline constexpr std::size_t kNumGroups = 6;
const char* to_string(Group group);

struct Residuals {
  std::array<double, kNumGroups> by_group{};

  double max() const;
  Group worst() const;
};

/// Multipliers for every player/market, row-major by player like the instance.
struct KktCertificate {
  std::vector<double> pi;     // per player
  std::vector<double> gamma;  // per (player, market), free
  std::vector<double> mu;     // per (player, market)
  std::vector<double> nu;     // per (player, market)
  std::vector<double> omega;  // per market
  Residuals residuals;
};

/// Explicit multipliers under which any feasible 0/1 point satisfies the KKT
/// system exactly. The free choices (π, ω on binding rows, μ when y = 1, ν when
/// y = 0) are all set to zero and γ absorbs the stationarity row.
KktCertificate construct_multipliers(const knapsack::Instance& inst, std::span<const double> y);

/// Per-group residuals: stationarity equalities, complementarity products,
/// sign violations of the multipliers and primal infeasibilities.
Residuals kkt_residuals(const knapsack::Instance& inst, std::span<const double> y,
                        const KktCertificate& cert);

/// Largest residual over all groups.
double verify_kkt(const knapsack::Instance& inst, std::span<const double> y, const KktCertificate& cert);

struct FailureWitness {
  std::vector<double> point;
  KktCertificate certificate;
  double disequilibrium = 0.0;  // max per-player regret, > 0
  std::size_t feasible_points = 0;
  std::size_t equilibria = 0;   // feasible points checked before the witness that were equilibria
};

/// Error raised when every feasible point of the instance is an equilibrium.
class NoCounterexample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scans feasible points in enumeration order and returns the first one that
/// satisfies the KKT system yet is not a Nash equilibrium.
FailureWitness demonstrate_failure(const knapsack::Instance& inst);

/// JSON object keyed by multiplier family, with residuals per group.
std::string certificate_json(const knapsack::Instance& inst, std::span<const double> y,
                             const KktCertificate& cert);

}  // namespace nne::kkt
