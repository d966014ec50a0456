// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and time
// limits are fixed here. Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "nne/continuous.hpp"
#include "nne/cutting_plane.hpp"
#include "nne/errors.hpp"
#include "nne/experiment.hpp"
#include "nne/kkt.hpp"
#include "nne/knapsack.hpp"
#include "nne/milp.hpp"
#include "oracles.hpp"

using namespace nne;

namespace {

constexpr double kTraceGridTol = 2e-3;
constexpr double kTraceUpperTol = 1e-6;
constexpr double kOracleTol = 1e-6;
constexpr double kGneTol = 1e-6;
constexpr double kKktTol = 1e-12;
constexpr double kMipTol = 1e-9;
constexpr double kLpTol = 1e-8;
constexpr double kBatchEpsilon = 0.01;
constexpr std::size_t kBatchInstances = 100;
constexpr std::size_t kMaxBatchIterations = 25;

constexpr double kLimitTrace = 5.0;
constexpr double kLimitOracle = 60.0;
constexpr double kLimitBatch = 15.0 * 60.0;
constexpr double kLimitKkt = 60.0;
constexpr double kLimitMilp = 120.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- 1 ---------------------------------------------------------------------

Outcome trace_reproduction() {
  Outcome o;
  const auto t = Clock::now();
  const auto trace = continuous::run_example_trace(0.01);
  const double seconds = since(t);
  const auto& r = trace.report;
  const auto& lbp = trace.first_lower_bounding;
  if (std::abs(trace.joint_optimizer[0] - 0.25) > kTraceGridTol || std::abs(trace.joint_optimizer[1] - 0.25) > kTraceGridTol)
    o.fail("joint optimizer not at (1/4, 1/4)");
  if (r.num_iterations() != 1) o.fail("expected one iteration, got " + std::to_string(r.num_iterations()));
  if (r.point.size() != 2 || std::abs(r.point[0] - 1.0) > kTraceGridTol || std::abs(r.point[1]) > kTraceGridTol)
    o.fail("returned point is not (1, 0)");
  if (!(r.delta_upper <= kTraceUpperTol)) o.fail("delta_U = " + fmt("%g", r.delta_upper));
  if (std::abs(lbp.point[0] - 1.0) > kTraceGridTol || std::abs(lbp.point[1]) > kTraceGridTol) o.fail("LBP point is not (1, 0)");
  if (std::abs(lbp.w - 0.25) > kTraceGridTol) o.fail("w = " + fmt("%g", lbp.w));
  if (std::abs(lbp.delta_lower + 0.25) > kTraceGridTol) o.fail("LBP value = " + fmt("%g", lbp.delta_lower));
  if (std::abs(trace.first_lower_level.value) > kTraceGridTol) o.fail("g^N(1,0) = " + fmt("%g", trace.first_lower_level.value));
  if (seconds >= kLimitTrace) o.fail("took " + fmt("%.2f s", seconds));
  if (o.pass) o.detail = "1 iteration, y* = (1, 0), delta_U = " + fmt("%g", r.delta_upper) + ", " + fmt("%.2f s", seconds);
  return o;
}

// ---- 2 and 3 ---------------------------------------------------------------

struct OracleRun {
  knapsack::Instance inst;
  double delta_n = 0.0;
  cutting::SolveReport report;
};

std::vector<OracleRun> oracle_runs;
double oracle_seconds = 0.0;

const std::vector<std::pair<std::size_t, std::size_t>> kTinySizes = {
    {2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}, {4, 2}, {3, 4}, {4, 3}, {2, 5}, {2, 6}, {6, 2}, {1, 6}};

void run_oracle_instances() {
  if (!oracle_runs.empty()) return;
  const auto t = Clock::now();
  for (std::size_t k = 0; k < 50; ++k) {
    const auto [players, markets] = kTinySizes[k % kTinySizes.size()];
    OracleRun run;
    run.inst = knapsack::generate_instance({1000 + k, players, markets, 1000});
    run.delta_n = knapsack::brute_force_mnd(run.inst).delta_n;
    const knapsack::KnapsackMnd problem(run.inst);
    cutting::SolverConfig config;
    config.epsilon = kOracleTol;
    run.report = cutting::solve_mnd(problem, cutting::initialize_cuts_joint(problem), config);
    oracle_runs.push_back(std::move(run));
  }
  oracle_seconds = since(t);
}

Outcome oracle_equivalence() {
  Outcome o;
  run_oracle_instances();
  std::size_t equilibria = 0;
  for (const auto& run : oracle_runs) {
    const std::string tag = "seed " + std::to_string(run.inst.seed) + ": ";
    if (!run.report.converged()) {
      o.fail(tag + "not converged");
      continue;
    }
    if (std::abs(run.report.delta_upper - run.delta_n) > kOracleTol)
      o.fail(tag + "delta_U " + fmt("%g", run.report.delta_upper) + " vs delta_N " + fmt("%g", run.delta_n));
    if (!knapsack::verify_gne(run.inst, run.report.point, kGneTol)) o.fail(tag + "returned point fails verify_gne");
    equilibria += run.delta_n <= kOracleTol ? 1 : 0;
  }
  if (oracle_seconds >= kLimitOracle) o.fail("took " + fmt("%.1f s", oracle_seconds));
  if (o.pass)
    o.detail = "50/50 match brute force, " + std::to_string(equilibria) + " with an equilibrium, " + fmt("%.1f s", oracle_seconds);
  return o;
}

Outcome bound_discipline() {
  Outcome o;
  run_oracle_instances();
  std::size_t iterations = 0;
  for (const auto& run : oracle_runs) {
    const auto lower = run.report.lower_history();
    const auto upper = run.report.upper_history();
    const std::string tag = "seed " + std::to_string(run.inst.seed) + ": ";
    for (std::size_t k = 0; k < lower.size(); ++k) {
      ++iterations;
      if (lower[k] > run.delta_n + kOracleTol) o.fail(tag + "delta_L above delta_N");
      if (run.delta_n > upper[k] + kOracleTol) o.fail(tag + "delta_N above delta_U");
      if (k > 0 && lower[k] < lower[k - 1]) o.fail(tag + "delta_L decreased");
      if (k > 0 && upper[k] > upper[k - 1]) o.fail(tag + "delta_U increased");
    }
  }
  if (o.pass) o.detail = std::to_string(iterations) + " iterations checked";
  return o;
}

// ---- 4 ---------------------------------------------------------------------

Outcome desk_replication() {
  Outcome o;
  experiment::BatchConfig cfg;
  cfg.pairs = {{3, 4}, {5, 6}, {5, 10}};
  cfg.instances = kBatchInstances;
  cfg.epsilon = kBatchEpsilon;
  cfg.verify = false;
  const auto t = Clock::now();
  const auto result = experiment::run_batch(cfg);
  const double seconds = since(t);
  for (const auto& row : result.rows) {
    const std::string tag = std::to_string(row.players) + "x" + std::to_string(row.markets) + " seed " + std::to_string(row.seed) + ": ";
    if (!row.converged) o.fail(tag + row.status + (row.error.empty() ? "" : " (" + row.error + ")"));
    else if (!(row.delta_u <= kBatchEpsilon)) o.fail(tag + "delta_U " + fmt("%g", row.delta_u));
    if (row.iterations > kMaxBatchIterations) o.fail(tag + std::to_string(row.iterations) + " iterations");
  }
  std::string modes;
  for (const auto& s : result.summaries) {
    modes += (modes.empty() ? "" : ", ") + std::to_string(s.size.players) + "x" + std::to_string(s.size.markets) +
             " mode " + std::to_string(s.mode_iterations) + " max " + std::to_string(s.max_iterations);
    if (s.mode_iterations != 1) o.fail("iteration mode " + std::to_string(s.mode_iterations) + " for " + std::to_string(s.size.players) + "x" + std::to_string(s.size.markets));
  }
  if (seconds >= kLimitBatch) o.fail("took " + fmt("%.0f s", seconds) + " (" + modes + ")");
  if (o.pass) o.detail = "300/300 converged, " + modes + ", " + fmt("%.0f s", seconds);
  return o;
}

// ---- 5 ---------------------------------------------------------------------

Outcome kkt_universality() {
  Outcome o;
  const auto t = Clock::now();
  std::size_t witnesses = 0, points = 0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto inst = knapsack::generate_instance({2000 + k, 2 + k % 2, 2 + (k / 2) % 2, 1000});
    for (const auto& y : knapsack::enumerate_feasible(inst)) {
      ++points;
      const double r = kkt::construct_multipliers(inst, y).residuals.max();
      if (!(r <= kKktTol)) o.fail("seed " + std::to_string(inst.seed) + ": residual " + fmt("%g", r));
    }
    try {
      const auto w = kkt::demonstrate_failure(inst);
      if (w.disequilibrium > 0.0 && w.certificate.residuals.max() <= kKktTol) ++witnesses;
    } catch (const kkt::NoCounterexample&) {
    }
  }
  const double seconds = since(t);
  if (witnesses < 15) o.fail("only " + std::to_string(witnesses) + "/20 instances have a witness");
  if (seconds >= kLimitKkt) o.fail("took " + fmt("%.1f s", seconds));
  if (o.pass) o.detail = std::to_string(points) + " points certified, " + std::to_string(witnesses) + "/20 witnesses, " + fmt("%.2f s", seconds);
  return o;
}

// ---- 6 ---------------------------------------------------------------------

Outcome milp_soundness() {
  Outcome o;
  const auto t = Clock::now();
  std::mt19937_64 rng(606);
  std::size_t infeasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const std::size_t m = 1 + rng() % 5;
    const auto mip = oracle::random_binary_program(rng, n, m);
    const auto expected = oracle::enumerate_binary(mip);
    const auto sol = milp::solve_mip(mip, 1'000'000);
    const std::string tag = "mip " + std::to_string(trial) + ": ";
    if (!expected.feasible) {
      ++infeasible;
      if (sol.status != milp::Status::kInfeasible) o.fail(tag + "expected infeasible");
      continue;
    }
    if (sol.status != milp::Status::kOptimal) {
      o.fail(tag + milp::to_string(sol.status));
      continue;
    }
    if (std::abs(sol.objective - expected.value) > kMipTol) o.fail(tag + "objective mismatch");
    if (mip.lp.max_violation(sol.point) > milp::kFeasibilityTol) o.fail(tag + "infeasible point");
    for (std::size_t j : mip.binaries) {
      if (sol.point[j] != 0.0 && sol.point[j] != 1.0) o.fail(tag + "fractional binary");
    }
  }
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    const std::size_t m = 1 + rng() % 6;
    const auto lp = oracle::random_lp(rng, n, m);
    const auto expected = oracle::enumerate_vertices(lp);
    const auto sol = milp::solve_lp(lp);
    const std::string tag = "lp " + std::to_string(trial) + ": ";
    if (!expected.feasible) {
      if (sol.status != milp::Status::kInfeasible) o.fail(tag + "expected infeasible");
      continue;
    }
    if (sol.status != milp::Status::kOptimal) {
      o.fail(tag + milp::to_string(sol.status));
      continue;
    }
    if (std::abs(sol.objective - expected.value) > kLpTol * (1.0 + std::abs(expected.value))) o.fail(tag + "objective mismatch");
    if (lp.max_violation(sol.point) > kLpTol) o.fail(tag + "infeasible point");
  }
  const double seconds = since(t);
  if (seconds >= kLimitMilp) o.fail("took " + fmt("%.1f s", seconds));
  if (o.pass) o.detail = "200 MIPs (" + std::to_string(infeasible) + " infeasible) and 200 LPs match enumeration, " + fmt("%.2f s", seconds);
  return o;
}

// ---- 7 ---------------------------------------------------------------------

Outcome linearization_exactness() {
  Outcome o;
  std::size_t points = 0;
  for (std::uint64_t k = 0; k < 12; ++k) {
    const auto [players, markets] = kTinySizes[k % kTinySizes.size()];
    const auto inst = knapsack::generate_instance({3000 + k, players, markets, 1000});
    const auto feasible = knapsack::enumerate_feasible(inst);
    cutting::CutSet cuts(std::vector<std::vector<double>>{feasible.back()});
    const auto lbp = knapsack::build_lbp(inst, cuts);
    for (const auto& y : feasible) {
      ++points;
      const double w = knapsack::cut_value(inst, y, feasible.back());
      const double lhs = knapsack::lbp_objective_at(inst, lbp, y, w);
      const double rhs = oracle::quadratic_z_form(inst, y) - w;
      if (lhs != rhs) o.fail("seed " + std::to_string(inst.seed) + ": " + fmt("%.17g", lhs) + " != " + fmt("%.17g", rhs));
    }
  }
  if (o.pass) o.detail = std::to_string(points) + " feasible assignments agree exactly";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"continuous example trace", trace_reproduction},
      {"oracle equivalence on 50 tiny instances", oracle_equivalence},
      {"bound discipline", bound_discipline},
      {"desk-scale batch replication", desk_replication},
      {"KKT universality and non-sufficiency", kkt_universality},
      {"MILP engine soundness", milp_soundness},
      {"linearization exactness", linearization_exactness},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
