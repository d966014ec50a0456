#include <limits>
#include <string>

#include <omp.h>

#include "nne/errors.hpp"
#include "nne/knapsack.hpp"

namespace nne::knapsack {
namespace {

void check_budget(const Instance& inst) {
  if (inst.num_binaries() > kMaxEnumerationBinaries) {
    throw UsageError("enumeration needs at most " + std::to_string(kMaxEnumerationBinaries) +
                     " binaries, instance has " + std::to_string(inst.num_binaries()));
  }
}

// LLP objective coefficients at x: (c_jl - α_l + β_l) + β_l Σ_{i≠j} x_il.
std::vector<double> llp_coefficients(const Instance& inst, std::span<const double> x) {
  std::vector<double> coef(inst.num_binaries());
  for (std::size_t l = 0; l < inst.markets; ++l) {
    double z = 0.0;
    for (std::size_t j = 0; j < inst.players; ++j) z += x[inst.index(j, l)];
    for (std::size_t j = 0; j < inst.players; ++j) {
      const std::size_t k = inst.index(j, l);
      coef[k] = static_cast<double>(inst.c[k] - inst.alpha[l] + inst.beta[l]) + inst.beta[l] * (z - x[k]);
    }
  }
  return coef;
}

double min_over(const std::vector<double>& coef, const std::vector<std::vector<double>>& feasible) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& yp : feasible) {
    double v = 0.0;
    for (std::size_t k = 0; k < coef.size(); ++k) v += coef[k] * yp[k];
    if (v < best) best = v;
  }
  return best;
}

struct Candidate {
  double value = std::numeric_limits<double>::infinity();
  std::size_t index = std::numeric_limits<std::size_t>::max();

  void offer(double v, std::size_t k) {
    if (v < value || (v == value && k < index)) {
      value = v;
      index = k;
    }
  }
};

BruteForceResult finish(const std::vector<std::vector<double>>& feasible, const Candidate& best) {
  BruteForceResult result;
  result.feasible_points = feasible.size();
  if (best.index < feasible.size()) {
    result.delta_n = best.value;
    result.point = feasible[best.index];
  }
  return result;
}

}  // namespace

std::vector<std::vector<double>> enumerate_feasible(const Instance& inst) {
  check_budget(inst);
  inst.validate();
  const std::size_t n = inst.num_binaries();
  std::vector<std::vector<double>> feasible;
  std::vector<double> y(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t k = 0; k < n; ++k) y[k] = static_cast<double>((mask >> k) & 1U);
    if (is_feasible(inst, y)) feasible.push_back(y);
  }
  return feasible;
}

double enumerate_normalized_value(const Instance& inst, std::span<const double> x,
                                  const std::vector<std::vector<double>>& feasible) {
  return min_over(llp_coefficients(inst, x), feasible);
}

BruteForceResult brute_force_mnd_serial(const Instance& inst) {
  const auto feasible = enumerate_feasible(inst);
  Candidate best;
  for (std::size_t k = 0; k < feasible.size(); ++k) {
    const double gap = joint_objective(inst, feasible[k]) - enumerate_normalized_value(inst, feasible[k], feasible);
    best.offer(gap, k);
  }
  return finish(feasible, best);
}

BruteForceResult brute_force_mnd(const Instance& inst) {
  const auto feasible = enumerate_feasible(inst);
  const auto count = static_cast<std::int64_t>(feasible.size());
  Candidate best;
#pragma omp parallel
  {
    Candidate local;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::int64_t k = 0; k < count; ++k) {
      const auto& y = feasible[static_cast<std::size_t>(k)];
      local.offer(joint_objective(inst, y) - enumerate_normalized_value(inst, y, feasible),
                  static_cast<std::size_t>(k));
    }
#pragma omp critical(nne_brute_force_merge)
    best.offer(local.value, local.index);
  }
  return finish(feasible, best);
}

}  // namespace nne::knapsack
