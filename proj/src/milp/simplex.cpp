#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nne/errors.hpp"

namespace nne::milp {
namespace detail {
namespace {

constexpr double kDualTol = 1e-9;
constexpr double kRatioPivotTol = 1e-9;
constexpr double kStepTol = 1e-12;
constexpr int kCleanupRounds = 3;

enum class VarState { kBasic, kAtLower, kAtUpper, kFree };

// Columns are ordered structural | slack (one per row) | artificial (only for
// rows whose crash slack would start outside its bounds). The tableau stores
// B^-1 A for the full column set.
class DenseSimplex {
 public:
  DenseSimplex(const LinearProgram& lp, std::span<const double> lower,
               std::span<const double> upper)
      : lp_(lp), m_(lp.rows.size()), n_(lp.num_variables()) {
    build(lower, upper);
  }

  MipSolution run() {
    MipSolution result;
    if (num_art_ > 0) {
      std::vector<double> phase1(cols_, 0.0);
      for (std::size_t k = 0; k < num_art_; ++k) phase1[n_ + m_ + k] = 1.0;
      const Outcome o = iterate(phase1);
      if (o == Outcome::kUnbounded) throw SolverError("simplex: phase 1 reported unbounded");
      double infeasibility = 0.0;
      for (std::size_t k = 0; k < num_art_; ++k) infeasibility += x_[n_ + m_ + k];
      if (infeasibility > kFeasibilityTol * (1.0 + rhs_scale_)) {
        result.status = Status::kInfeasible;
        result.simplex_iterations = iterations_;
        return result;
      }
      for (std::size_t k = 0; k < num_art_; ++k) {
        const std::size_t c = n_ + m_ + k;
        upper_[c] = 0.0;
        if (state_[c] != VarState::kBasic) {
          state_[c] = VarState::kAtLower;
          x_[c] = 0.0;
        }
      }
    }
    return finish(phase_two_cost());
  }

  // Re-solves under new structural bounds starting from the current basis:
  // nonbasic columns move to the bound their reduced cost prefers, the dual
  // simplex restores primal feasibility and a primal pass cleans up. Returns
  // false when the basis is not dual feasible for the new bounds.
  bool resolve(std::span<const double> lower, std::span<const double> upper, MipSolution& result) {
    iterations_ = 0;
    const std::vector<double> cost = phase_two_cost();
    std::vector<double> reduced = reduced_costs(cost);
    std::copy(lower.begin(), lower.end(), lower_.begin());
    std::copy(upper.begin(), upper.end(), upper_.begin());
    for (std::size_t c = 0; c < cols_; ++c) {
      if (state_[c] == VarState::kBasic) continue;
      const bool lo = std::isfinite(lower_[c]);
      const bool hi = std::isfinite(upper_[c]);
      VarState st;
      if (reduced[c] > kDualTol) {
        if (!lo) return false;
        st = VarState::kAtLower;
      } else if (reduced[c] < -kDualTol) {
        if (!hi) return false;
        st = VarState::kAtUpper;
      } else if (state_[c] == VarState::kAtUpper && hi) {
        st = VarState::kAtUpper;
      } else {
        st = lo ? VarState::kAtLower : hi ? VarState::kAtUpper : VarState::kFree;
      }
      state_[c] = st;
      x_[c] = st == VarState::kAtLower ? lower_[c] : st == VarState::kAtUpper ? upper_[c] : 0.0;
    }
    refine();
    if (!dual_iterate(reduced)) {
      result = MipSolution{};
      result.status = Status::kInfeasible;
      result.simplex_iterations = iterations_;
      return true;
    }
    result = finish(cost);
    return true;
  }

 private:
  enum class Outcome { kOptimal, kUnbounded };

  std::vector<double> phase_two_cost() const {
    std::vector<double> cost(cols_, 0.0);
    std::copy(lp_.objective.begin(), lp_.objective.end(), cost.begin());
    return cost;
  }

  std::vector<double> reduced_costs(std::span<const double> cost) const {
    std::vector<double> reduced(cost.begin(), cost.end());
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &tableau_[i * cols_];
      for (std::size_t c = 0; c < cols_; ++c) reduced[c] -= cb * row[c];
    }
    return reduced;
  }

  MipSolution finish(std::span<const double> cost) {
    MipSolution result;
    double violation = 0.0;
    for (int round = 0;; ++round) {
      const Outcome o = iterate(cost);
      result.simplex_iterations = iterations_;
      if (o == Outcome::kUnbounded) {
        result.status = Status::kUnbounded;
        result.objective = -kInfinity;
        return result;
      }
      refine();
      result.point.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
      for (std::size_t j = 0; j < n_; ++j) {
        if (result.point[j] < lower_[j] && result.point[j] > lower_[j] - kFeasibilityTol) result.point[j] = lower_[j];
        if (result.point[j] > upper_[j] && result.point[j] < upper_[j] + kFeasibilityTol) result.point[j] = upper_[j];
      }
      violation = violation_with_bounds(result.point);
      if (violation <= 1e-6 * (1.0 + rhs_scale_) || round == kCleanupRounds) break;
      // Basic values outside their bounds: either drift, or phase 1 accepted a
      // near-zero artificial remainder that B^-1 amplified. The basis is dual
      // feasible, so the dual simplex repairs the first and certifies the
      // second (artificials are fixed at zero and cannot enter).
      std::vector<double> reduced = reduced_costs(cost);
      if (!dual_iterate(reduced)) {
        result = MipSolution{};
        result.status = Status::kInfeasible;
        result.simplex_iterations = iterations_;
        return result;
      }
      refine();
    }
    if (violation > 1e-6 * (1.0 + rhs_scale_)) {
      throw SolverError("simplex: numerical breakdown, final point violates constraints by " +
                        std::to_string(violation));
    }
    result.status = Status::kOptimal;
    result.objective = lp_.evaluate(result.point);
    result.best_bound = result.objective;
    return result;
  }

  double& at(std::size_t r, std::size_t c) { return tableau_[r * cols_ + c]; }

  // A free nonbasic column may sit anywhere, so start it inside the interval
  // its rows allow given the other starting values (the point of that
  // interval nearest zero). Rows it can satisfy then need no artificial.
  void place_free_columns(std::vector<double>& x0, std::span<const double> lower,
                          std::span<const double> upper) const {
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lower[j]) || std::isfinite(upper[j])) continue;
      double lo = -kInfinity, hi = kInfinity;
      bool touched = false;
      for (const Constraint& row : lp_.rows) {
        double coef = 0.0, rest = 0.0;
        for (const Term& t : row.terms) {
          if (t.var == j) coef += t.coef;
          else rest += t.coef * x0[t.var];
        }
        if (coef == 0.0) continue;
        touched = true;
        const double v = (row.rhs - rest) / coef;
        const bool caps = row.sense == Sense::kEqual || (row.sense == Sense::kLessEqual) == (coef > 0.0);
        const bool floors = row.sense == Sense::kEqual || (row.sense == Sense::kGreaterEqual) == (coef > 0.0);
        if (caps) hi = std::min(hi, v);
        if (floors) lo = std::max(lo, v);
      }
      if (!touched || lo > hi) continue;
      x0[j] = std::clamp(0.0, lo, hi);
    }
  }

  void build(std::span<const double> lower, std::span<const double> upper) {
    // Decide which rows need an artificial before sizing the tableau.
    std::vector<double> x0(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lower[j])) x0[j] = lower[j];
      else if (std::isfinite(upper[j])) x0[j] = upper[j];
      else x0[j] = 0.0;
    }
    place_free_columns(x0, lower, upper);
    std::vector<double> residual(m_);
    std::vector<double> slack_lo(m_), slack_hi(m_);
    std::vector<int> art_of_row(m_, -1);
    for (std::size_t i = 0; i < m_; ++i) {
      const Constraint& row = lp_.rows[i];
      double activity = 0.0;
      for (const Term& t : row.terms) activity += t.coef * x0[t.var];
      residual[i] = row.rhs - activity;
      rhs_scale_ = std::max(rhs_scale_, std::abs(row.rhs));
      switch (row.sense) {
        case Sense::kLessEqual: slack_lo[i] = 0.0; slack_hi[i] = kInfinity; break;
        case Sense::kGreaterEqual: slack_lo[i] = -kInfinity; slack_hi[i] = 0.0; break;
        case Sense::kEqual: slack_lo[i] = 0.0; slack_hi[i] = 0.0; break;
      }
      const bool slack_ok = residual[i] >= slack_lo[i] && residual[i] <= slack_hi[i];
      if (!slack_ok) art_of_row[i] = static_cast<int>(num_art_++);
    }

    cols_ = n_ + m_ + num_art_;
    tableau_.assign(m_ * cols_, 0.0);
    lower_.assign(cols_, 0.0);
    upper_.assign(cols_, kInfinity);
    x_.assign(cols_, 0.0);
    state_.assign(cols_, VarState::kAtLower);
    basis_.assign(m_, 0);
    art_col_.assign(m_, 0);
    sign_.assign(m_, 1.0);

    for (std::size_t j = 0; j < n_; ++j) {
      lower_[j] = lower[j];
      upper_[j] = upper[j];
      x_[j] = x0[j];
      if (std::isfinite(lower[j])) state_[j] = VarState::kAtLower;
      else if (std::isfinite(upper[j])) state_[j] = VarState::kAtUpper;
      else state_[j] = VarState::kFree;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = n_ + i;
      lower_[s] = slack_lo[i];
      upper_[s] = slack_hi[i];
      const Constraint& row = lp_.rows[i];
      if (art_of_row[i] < 0) {
        for (const Term& t : row.terms) at(i, t.var) += t.coef;
        at(i, s) = 1.0;
        basis_[i] = s;
        state_[s] = VarState::kBasic;
        x_[s] = residual[i];
      } else {
        const std::size_t a = n_ + m_ + static_cast<std::size_t>(art_of_row[i]);
        const double sigma = residual[i] >= 0.0 ? 1.0 : -1.0;
        for (const Term& t : row.terms) at(i, t.var) += sigma * t.coef;
        at(i, s) = sigma;
        at(i, a) = 1.0;
        state_[s] = std::isfinite(slack_lo[i]) ? VarState::kAtLower : VarState::kAtUpper;
        x_[s] = 0.0;
        basis_[i] = a;
        art_col_[i] = a;
        sign_[i] = sigma;
        state_[a] = VarState::kBasic;
        x_[a] = std::abs(residual[i]);
      }
    }
  }

  Outcome iterate(std::span<const double> cost) {
    std::vector<double> reduced = reduced_costs(cost);

    int degenerate_run = 0;
    bool bland = false;
    const std::size_t iteration_cap = 50 * (m_ + cols_) + 10'000;
    std::vector<double> column(m_);

    for (;;) {
      if (++iterations_ > iteration_cap) {
        throw SolverError("simplex: iteration limit exceeded (" + std::to_string(iteration_cap) + ")");
      }
      // Pricing.
      std::size_t entering = cols_;
      double direction = 0.0;
      double best = 0.0;
      for (std::size_t c = 0; c < cols_; ++c) {
        const VarState st = state_[c];
        if (st == VarState::kBasic || lower_[c] == upper_[c]) continue;
        const double d = reduced[c];
        double dir = 0.0;
        if ((st == VarState::kAtLower || st == VarState::kFree) && d < -kDualTol) dir = 1.0;
        else if ((st == VarState::kAtUpper || st == VarState::kFree) && d > kDualTol) dir = -1.0;
        if (dir == 0.0) continue;
        if (bland) {
          entering = c;
          direction = dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          entering = c;
          direction = dir;
        }
      }
      if (entering == cols_) return Outcome::kOptimal;

      // Ratio test.
      double step = (std::isfinite(lower_[entering]) && std::isfinite(upper_[entering]))
                        ? upper_[entering] - lower_[entering]
                        : kInfinity;
      std::size_t leave_row = m_;
      double leave_alpha = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = tableau_[i * cols_ + entering];
        column[i] = alpha;
        if (std::abs(alpha) <= kRatioPivotTol) continue;
        const double rate = -direction * alpha;
        const std::size_t b = basis_[i];
        double limit;
        if (rate < 0.0) {
          if (!std::isfinite(lower_[b])) continue;
          limit = (x_[b] - lower_[b]) / -rate;
        } else {
          if (!std::isfinite(upper_[b])) continue;
          limit = (upper_[b] - x_[b]) / rate;
        }
        limit = std::max(limit, 0.0);
        bool take = limit < step - kStepTol;
        if (!take && leave_row != m_ && std::abs(limit - step) <= kStepTol) {
          take = bland ? b < basis_[leave_row] : std::abs(alpha) > std::abs(leave_alpha);
        }
        if (take) {
          step = limit;
          leave_row = i;
          leave_alpha = alpha;
        }
      }
      if (!std::isfinite(step)) return Outcome::kUnbounded;

      for (std::size_t i = 0; i < m_; ++i) {
        if (column[i] != 0.0) x_[basis_[i]] -= direction * column[i] * step;
      }
      x_[entering] += direction * step;

      if (step <= kStepTol) {
        if (++degenerate_run >= kDegeneratePivotsBeforeBland) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      if (leave_row == m_) {
        // Bound flip.
        if (direction > 0) {
          state_[entering] = VarState::kAtUpper;
          x_[entering] = upper_[entering];
        } else {
          state_[entering] = VarState::kAtLower;
          x_[entering] = lower_[entering];
        }
        continue;
      }

      const std::size_t leaving = basis_[leave_row];
      const double rate = -direction * leave_alpha;
      if (rate < 0.0) {
        x_[leaving] = lower_[leaving];
        state_[leaving] = VarState::kAtLower;
      } else {
        x_[leaving] = upper_[leaving];
        state_[leaving] = VarState::kAtUpper;
      }
      pivot(leave_row, entering, reduced);
      basis_[leave_row] = entering;
      state_[entering] = VarState::kBasic;
    }
  }

  // Bounded dual simplex. Leaves on the most infeasible basic variable (lowest
  // basic index once Bland's rule is active) and enters by the dual ratio
  // test. Returns false when a row proves primal infeasibility.
  bool dual_iterate(std::vector<double>& reduced) {
    int degenerate_run = 0;
    bool bland = false;
    const std::size_t iteration_cap = 50 * (m_ + cols_) + 10'000;
    std::vector<double> column(m_);

    for (;;) {
      if (++iterations_ > iteration_cap) {
        throw SolverError("dual simplex: iteration limit exceeded (" + std::to_string(iteration_cap) + ")");
      }
      std::size_t r = m_;
      double worst = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t b = basis_[i];
        double infeasibility = 0.0;
        if (x_[b] < lower_[b] - kFeasibilityTol * (1.0 + std::abs(lower_[b]))) infeasibility = lower_[b] - x_[b];
        else if (x_[b] > upper_[b] + kFeasibilityTol * (1.0 + std::abs(upper_[b]))) infeasibility = x_[b] - upper_[b];
        if (infeasibility == 0.0) continue;
        if (bland ? (r == m_ || b < basis_[r]) : infeasibility > worst) {
          worst = infeasibility;
          r = i;
        }
      }
      if (r == m_) return true;

      const std::size_t leaving = basis_[r];
      const bool to_lower = x_[leaving] < lower_[leaving];
      const double target = to_lower ? lower_[leaving] : upper_[leaving];
      const double* row = &tableau_[r * cols_];
      std::size_t entering = cols_;
      double best_ratio = kInfinity;
      double best_alpha = 0.0;
      for (std::size_t c = 0; c < cols_; ++c) {
        const VarState st = state_[c];
        if (st == VarState::kBasic || lower_[c] == upper_[c]) continue;
        const double alpha = row[c];
        if (std::abs(alpha) <= kRatioPivotTol) continue;
        // x_leaving moves by -alpha per unit of the entering column.
        const double dir = (to_lower ? -1.0 : 1.0) * (alpha > 0.0 ? 1.0 : -1.0);
        if (dir > 0.0 && st == VarState::kAtUpper) continue;
        if (dir < 0.0 && st == VarState::kAtLower) continue;
        const double ratio = std::abs(reduced[c]) / std::abs(alpha);
        bool take = ratio < best_ratio - kStepTol;
        if (!take && entering != cols_ && std::abs(ratio - best_ratio) <= kStepTol) {
          take = bland ? false : std::abs(alpha) > std::abs(best_alpha);
        }
        if (take) {
          entering = c;
          best_ratio = ratio;
          best_alpha = alpha;
        }
      }
      if (entering == cols_) return false;

      const double delta = (x_[leaving] - target) / best_alpha;
      for (std::size_t i = 0; i < m_; ++i) {
        column[i] = tableau_[i * cols_ + entering];
        if (column[i] != 0.0) x_[basis_[i]] -= column[i] * delta;
      }
      x_[entering] += delta;
      x_[leaving] = target;
      state_[leaving] = to_lower ? VarState::kAtLower : VarState::kAtUpper;

      if (best_ratio <= kStepTol) {
        if (++degenerate_run >= kDegeneratePivotsBeforeBland) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      pivot(r, entering, reduced);
      basis_[r] = entering;
      state_[entering] = VarState::kBasic;
    }
  }

  void pivot(std::size_t r, std::size_t q, std::vector<double>& reduced) {
    double* prow = &tableau_[r * cols_];
    const double alpha = prow[q];
    if (std::abs(alpha) < kPivotTol) {
      throw SolverError("simplex: pivot element " + std::to_string(alpha) + " below tolerance");
    }
    const double inv = 1.0 / alpha;
    nonzero_.clear();
    for (std::size_t c = 0; c < cols_; ++c) {
      if (prow[c] != 0.0) {
        prow[c] *= inv;
        nonzero_.push_back(c);
      }
    }
    prow[q] = 1.0;
    // Past a quarter fill the contiguous loop beats the gather.
    const bool dense = 4 * nonzero_.size() > cols_;
    auto eliminate = [&](double* row) {
      const double f = row[q];
      if (f == 0.0) return;
      if (dense) {
        for (std::size_t c = 0; c < cols_; ++c) row[c] -= f * prow[c];
      } else {
        for (std::size_t c : nonzero_) row[c] -= f * prow[c];
      }
      row[q] = 0.0;
    };
    for (std::size_t i = 0; i < m_; ++i) {
      if (i != r) eliminate(&tableau_[i * cols_]);
    }
    eliminate(reduced.data());
  }

  // One step of iterative refinement on the basic values. The slack columns of
  // the tableau hold B^-1 up to the per-row sign applied to artificial rows,
  // which cancels against the sign in the residual.
  void refine() {
    std::vector<double> residual(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const Constraint& row = lp_.rows[i];
      double activity = x_[n_ + i];
      for (const Term& t : row.terms) activity += t.coef * x_[t.var];
      residual[i] = row.rhs - activity;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (art_col_[i] != 0) residual[i] -= sign_[i] * x_[art_col_[i]];
    }
    for (std::size_t r = 0; r < m_; ++r) {
      double delta = 0.0;
      const double* row = &tableau_[r * cols_ + n_];
      for (std::size_t i = 0; i < m_; ++i) delta += row[i] * residual[i];
      x_[basis_[r]] += delta;
    }
  }

  double violation_with_bounds(std::span<const double> x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < n_; ++j) worst = std::max({worst, lower_[j] - x[j], x[j] - upper_[j]});
    for (const Constraint& row : lp_.rows) {
      double activity = 0.0;
      for (const Term& t : row.terms) activity += t.coef * x[t.var];
      switch (row.sense) {
        case Sense::kLessEqual: worst = std::max(worst, activity - row.rhs); break;
        case Sense::kGreaterEqual: worst = std::max(worst, row.rhs - activity); break;
        case Sense::kEqual: worst = std::max(worst, std::abs(activity - row.rhs)); break;
      }
    }
    return worst;
  }

  const LinearProgram& lp_;
  std::size_t m_;
  std::size_t n_;
  std::size_t num_art_ = 0;
  std::size_t cols_ = 0;
  double rhs_scale_ = 0.0;
  std::size_t iterations_ = 0;
  std::vector<double> tableau_;
  std::vector<double> lower_, upper_, x_;
  std::vector<VarState> state_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> art_col_;  // 0 when the row has no artificial
  std::vector<double> sign_;
  std::vector<std::size_t> nonzero_;
};

}  // namespace

struct LpWorkspace::Impl {
  explicit Impl(const LinearProgram& lp) : lp(lp) {}

  const LinearProgram& lp;
  std::optional<DenseSimplex> last;
  std::size_t warm_solves = 0;
};

LpWorkspace::LpWorkspace(const LinearProgram& lp) : impl_(std::make_unique<Impl>(lp)) {}
LpWorkspace::~LpWorkspace() = default;

MipSolution LpWorkspace::solve(std::span<const double> lower, std::span<const double> upper) {
  Impl& w = *impl_;
  for (std::size_t j = 0; j < w.lp.num_variables(); ++j) {
    if (lower[j] > upper[j]) {
      MipSolution infeasible;
      infeasible.status = Status::kInfeasible;
      return infeasible;
    }
  }
  if (w.last && w.warm_solves < kRefactorInterval) {
    MipSolution result;
    try {
      if (w.last->resolve(lower, upper, result)) {
        ++w.warm_solves;
        // An infeasible verdict leaves the basis dual feasible but primal
        // infeasible, which the next resolve handles like any other start.
        return result;
      }
    } catch (const SolverError&) {
      // Fall through to a cold solve from the crash basis.
    }
  }
  w.last.reset();
  w.warm_solves = 0;
  w.last.emplace(w.lp, lower, upper);
  MipSolution result = w.last->run();
  if (result.status != Status::kOptimal) w.last.reset();
  return result;
}

MipSolution solve_lp_bounded(const LinearProgram& lp, std::span<const double> lower,
                             std::span<const double> upper) {
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    if (lower[j] > upper[j]) {
      MipSolution infeasible;
      infeasible.status = Status::kInfeasible;
      return infeasible;
    }
  }
  DenseSimplex simplex(lp, lower, upper);
  return simplex.run();
}

}  // namespace detail

MipSolution solve_lp(const LinearProgram& lp) {
  lp.validate();
  MipSolution result = detail::solve_lp_bounded(lp, lp.lower, lp.upper);
  result.nodes = 1;
  return result;
}

}  // namespace nne::milp
