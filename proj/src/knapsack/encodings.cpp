#include <algorithm>
#include <cmath>
#include <string>

#include "nne/errors.hpp"
#include "nne/knapsack.hpp"

namespace nne::knapsack {
namespace {

using milp::Sense;
using milp::Term;

std::string yname(std::size_t j, std::size_t l) {
  return "y_" + std::to_string(j) + "_" + std::to_string(l);
}

// Budgets and shared caps over the first players*markets columns.
void add_feasibility_rows(const Instance& inst, milp::LinearProgram& lp) {
  for (std::size_t j = 0; j < inst.players; ++j) {
    std::vector<Term> terms;
    for (std::size_t l = 0; l < inst.markets; ++l) {
      terms.push_back({inst.index(j, l), static_cast<double>(inst.a[inst.index(j, l)])});
    }
    lp.add_constraint(std::move(terms), Sense::kLessEqual, static_cast<double>(inst.b[j]),
                      "budget_" + std::to_string(j));
  }
  for (std::size_t l = 0; l < inst.markets; ++l) {
    std::vector<Term> terms;
    for (std::size_t j = 0; j < inst.players; ++j) {
      terms.push_back({inst.index(j, l), static_cast<double>(inst.d[inst.index(j, l)])});
    }
    lp.add_constraint(std::move(terms), Sense::kLessEqual, static_cast<double>(inst.e[l]),
                      "shared_" + std::to_string(l));
  }
}

// y, u, z columns plus the rows tying them together; objective
// Σ c y - Σ α z + Σ β Σ_k (2k-1) u.
milp::MixedIntegerProgram build_quadratic_part(const Instance& inst) {
  inst.validate();
  const LbpLayout layout{inst.players, inst.markets};
  milp::MixedIntegerProgram mip;
  milp::LinearProgram& lp = mip.lp;
  for (std::size_t j = 0; j < inst.players; ++j) {
    for (std::size_t l = 0; l < inst.markets; ++l) {
      mip.add_binary(static_cast<double>(inst.c[inst.index(j, l)]), yname(j, l));
    }
  }
  for (std::size_t l = 0; l < inst.markets; ++l) {
    for (std::size_t k = 1; k <= inst.players; ++k) {
      mip.add_binary(static_cast<double>(inst.beta[l]) * static_cast<double>(2 * k - 1),
                     "u_" + std::to_string(l) + "_" + std::to_string(k));
    }
  }
  for (std::size_t l = 0; l < inst.markets; ++l) {
    lp.add_variable(0.0, static_cast<double>(inst.players), -static_cast<double>(inst.alpha[l]),
                    "z_" + std::to_string(l));
  }

  add_feasibility_rows(inst, lp);
  for (std::size_t l = 0; l < inst.markets; ++l) {
    std::vector<Term> terms{{layout.z(l), 1.0}};
    for (std::size_t j = 0; j < inst.players; ++j) terms.push_back({layout.y(j, l), -1.0});
    lp.add_constraint(std::move(terms), Sense::kEqual, 0.0, "zsum_" + std::to_string(l));
  }
  for (std::size_t l = 0; l < inst.markets; ++l) {
    std::vector<Term> terms{{layout.z(l), 1.0}};
    for (std::size_t k = 1; k <= inst.players; ++k) terms.push_back({layout.u(l, k), -1.0});
    lp.add_constraint(std::move(terms), Sense::kEqual, 0.0, "zsteps_" + std::to_string(l));
  }
  for (std::size_t l = 0; l < inst.markets; ++l) {
    for (std::size_t k = 1; k < inst.players; ++k) {
      lp.add_constraint({{layout.u(l, k), 1.0}, {layout.u(l, k + 1), -1.0}}, Sense::kGreaterEqual,
                        0.0, "order_" + std::to_string(l) + "_" + std::to_string(k));
    }
  }
  return mip;
}

void check_point(const Instance& inst, std::span<const double> y, const char* what) {
  if (y.size() != inst.num_binaries()) throw UsageError(std::string(what) + ": dimension mismatch");
  if (!is_feasible(inst, y)) throw UsageError(std::string(what) + ": point is not feasible");
}

}  // namespace

milp::MixedIntegerProgram build_joint(const Instance& inst) { return build_quadratic_part(inst); }

milp::MixedIntegerProgram build_lbp(const Instance& inst, const cutting::CutSet& cuts) {
  if (cuts.empty()) throw UsageError("build_lbp: cut set is empty");
  for (const auto& cut : cuts.points()) check_point(inst, cut, "build_lbp cut");

  milp::MixedIntegerProgram mip = build_quadratic_part(inst);
  milp::LinearProgram& lp = mip.lp;
  const LbpLayout layout{inst.players, inst.markets};
  lp.add_variable(-milp::kInfinity, milp::kInfinity, -1.0, "w");

  // w <= Σ_jl [(c_jl - α_l + β_l) y'_jl + β_l y'_jl Σ_{i≠j} y_il]; the coefficient
  // on y_il collects β_l y'_jl over j ≠ i, i.e. β_l (Z'_l - y'_il).
  for (std::size_t t = 0; t < cuts.size(); ++t) {
    const auto& cut = cuts[t];
    double constant = 0.0;
    std::vector<Term> terms{{layout.w(), 1.0}};
    for (std::size_t l = 0; l < inst.markets; ++l) {
      double cut_total = 0.0;
      for (std::size_t j = 0; j < inst.players; ++j) cut_total += cut[inst.index(j, l)];
      for (std::size_t j = 0; j < inst.players; ++j) {
        const double q = cut[inst.index(j, l)];
        constant += (inst.c[inst.index(j, l)] - inst.alpha[l] + inst.beta[l]) * q;
        const double coupling = inst.beta[l] * (cut_total - q);
        if (coupling != 0.0) terms.push_back({layout.y(j, l), -coupling});
      }
    }
    lp.add_constraint(std::move(terms), Sense::kLessEqual, constant, "cut_" + std::to_string(t));
  }
  return mip;
}

milp::MixedIntegerProgram build_llp(const Instance& inst, std::span<const double> y) {
  check_point(inst, y, "build_llp");
  milp::MixedIntegerProgram mip;
  for (std::size_t j = 0; j < inst.players; ++j) {
    for (std::size_t l = 0; l < inst.markets; ++l) {
      double others = 0.0;
      for (std::size_t i = 0; i < inst.players; ++i) {
        if (i != j) others += y[inst.index(i, l)];
      }
      const double coef = static_cast<double>(inst.c[inst.index(j, l)] - inst.alpha[l] + inst.beta[l]) +
                          inst.beta[l] * others;
      mip.add_binary(coef, yname(j, l));
    }
  }
  add_feasibility_rows(inst, mip.lp);
  return mip;
}

milp::MixedIntegerProgram build_best_response(const Instance& inst, std::size_t player,
                                              std::span<const double> y) {
  check_point(inst, y, "build_best_response");
  if (player >= inst.players) throw UsageError("build_best_response: player out of range");
  milp::MixedIntegerProgram mip;
  milp::LinearProgram& lp = mip.lp;
  for (std::size_t l = 0; l < inst.markets; ++l) {
    double others = 0.0;
    for (std::size_t i = 0; i < inst.players; ++i) {
      if (i != player) others += y[inst.index(i, l)];
    }
    mip.add_binary(static_cast<double>(inst.c[inst.index(player, l)] - inst.alpha[l] + inst.beta[l]) +
                       inst.beta[l] * others,
                   yname(player, l));
  }
  std::vector<Term> budget;
  for (std::size_t l = 0; l < inst.markets; ++l) {
    budget.push_back({l, static_cast<double>(inst.a[inst.index(player, l)])});
  }
  lp.add_constraint(std::move(budget), Sense::kLessEqual, static_cast<double>(inst.b[player]), "budget");
  for (std::size_t l = 0; l < inst.markets; ++l) {
    double used_by_others = 0.0;
    for (std::size_t i = 0; i < inst.players; ++i) {
      if (i != player) used_by_others += inst.d[inst.index(i, l)] * y[inst.index(i, l)];
    }
    lp.add_constraint({{l, static_cast<double>(inst.d[inst.index(player, l)])}}, Sense::kLessEqual,
                      static_cast<double>(inst.e[l]) - used_by_others, "shared_" + std::to_string(l));
  }
  return mip;
}

double lbp_objective_at(const Instance& inst, const milp::MixedIntegerProgram& lbp,
                        std::span<const double> y, double w) {
  const LbpLayout layout{inst.players, inst.markets};
  std::vector<double> full(lbp.lp.num_variables(), 0.0);
  std::copy(y.begin(), y.end(), full.begin());
  for (std::size_t l = 0; l < inst.markets; ++l) {
    std::size_t z = 0;
    for (std::size_t j = 0; j < inst.players; ++j) z += y[inst.index(j, l)] > 0.5 ? 1 : 0;
    for (std::size_t k = 1; k <= z; ++k) full[layout.u(l, k)] = 1.0;
    full[layout.z(l)] = static_cast<double>(z);
  }
  if (layout.w() < full.size()) full[layout.w()] = w;
  return lbp.lp.evaluate(full);
}

KnapsackMnd::KnapsackMnd(Instance inst, std::size_t node_limit)
    : inst_(std::move(inst)), game_(make_game(inst_)), node_limit_(node_limit) {}

namespace {

std::vector<double> extract_y(const Instance& inst, const milp::MipSolution& sol) {
  std::vector<double> y(sol.point.begin(), sol.point.begin() + static_cast<std::ptrdiff_t>(inst.num_binaries()));
  for (double& v : y) v = std::round(v);
  return y;
}

// All knapsack programs have integer objective data, and w equals an integer
// cut value whenever y is integral.
milp::MipOptions integral_options(std::size_t node_limit) {
  milp::MipOptions options;
  options.node_limit = node_limit;
  options.objective_step = 1.0;
  return options;
}

void require_optimal(const milp::MipSolution& sol, const char* what) {
  switch (sol.status) {
    case milp::Status::kOptimal: return;
    case milp::Status::kInfeasible: throw InfeasibleGameError(std::string(what) + " is infeasible");
    case milp::Status::kUnbounded: throw SolverError(std::string(what) + " is unbounded");
    case milp::Status::kNodeLimit:
      throw SolverError(std::string(what) + " hit the node limit after " + std::to_string(sol.nodes) + " nodes");
  }
}

}  // namespace

cutting::LowerBoundingResult KnapsackMnd::solve_lower_bounding(const cutting::CutSet& cuts) const {
  const milp::MipSolution sol = milp::solve_mip(build_lbp(inst_, cuts), integral_options(node_limit_));
  require_optimal(sol, "lower-bounding problem");
  cutting::LowerBoundingResult result;
  result.point = extract_y(inst_, sol);
  // Recompute w and δ^L exactly from the integral y.
  double w = milp::kInfinity;
  for (const auto& cut : cuts.points()) w = std::min(w, cut_value(inst_, result.point, cut));
  result.w = w;
  result.delta_lower = joint_objective(inst_, result.point) - w;
  result.nodes = sol.nodes;
  return result;
}

cutting::LowerLevelResult KnapsackMnd::solve_lower_level(std::span<const double> x) const {
  const milp::MipSolution sol = milp::solve_mip(build_llp(inst_, x), integral_options(node_limit_));
  require_optimal(sol, "lower-level problem");
  cutting::LowerLevelResult result;
  result.point = extract_y(inst_, sol);
  result.value = cut_value(inst_, x, result.point);
  result.nodes = sol.nodes;
  return result;
}

std::vector<double> KnapsackMnd::solve_joint() const {
  const milp::MipSolution sol = milp::solve_mip(build_joint(inst_), integral_options(node_limit_));
  require_optimal(sol, "joint problem");
  return extract_y(inst_, sol);
}

}  // namespace nne::knapsack
