#include "nne/cutting_plane.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <utility>

#include <json.hpp>

#include "nne/errors.hpp"

namespace nne::cutting {
namespace {

constexpr double kSameCutTol = 1e-9;

bool same_point(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - b[k]) > kSameCutTol) return false;
  }
  return true;
}

}  // namespace

CutSet::CutSet(std::vector<std::vector<double>> points) {
  for (auto& p : points) add(std::move(p));
}

bool CutSet::add(std::vector<double> point) {
  if (contains(point)) return false;
  points_.push_back(std::move(point));
  return true;
}

bool CutSet::contains(std::span<const double> point) const {
  return std::any_of(points_.begin(), points_.end(),
                     [&](const std::vector<double>& p) { return same_point(p, point); });
}

const char* to_string(Termination status) {
  switch (status) {
    case Termination::kEquilibriumFound: return "equilibrium_found";
    case Termination::kToleranceReached: return "tolerance_reached";
    case Termination::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(epsilon > 0.0)) throw UsageError("epsilon must be positive");
  if (max_iterations == 0) throw UsageError("max_iterations must be positive");
  if (node_limit == 0) throw UsageError("node_limit must be positive");
}

std::vector<double> SolveReport::lower_history() const {
  std::vector<double> h;
  h.reserve(iterations.size());
  for (const auto& r : iterations) h.push_back(r.delta_lower);
  return h;
}

std::vector<double> SolveReport::upper_history() const {
  std::vector<double> h;
  h.reserve(iterations.size());
  for (const auto& r : iterations) h.push_back(r.delta_upper);
  return h;
}

SolveReport solve_mnd(const MndSubproblems& problem, CutSet cuts, const SolverConfig& config) {
  config.validate();
  const game::GameInstance& game = problem.game();
  if (cuts.empty()) throw UsageError("cutting-plane method needs a nonempty initial cut set");
  for (const auto& cut : cuts.points()) {
    if (!game::is_feasible(game, cut)) throw UsageError("initial cut point is not feasible");
  }

  using Clock = std::chrono::steady_clock;
  SolveReport report;

  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    const auto started = Clock::now();
    IterationRecord record;
    record.iteration = it;

    LowerBoundingResult lbp;
    LowerLevelResult llp;
    try {
      lbp = problem.solve_lower_bounding(cuts);
      llp = problem.solve_lower_level(lbp.point);
    } catch (const InfeasibleGameError&) {
      throw;
    } catch (const SolverError& e) {
      throw SolverError("iteration " + std::to_string(it) + ": " + e.what());
    }

    record.delta_lower = lbp.delta_lower;
    record.w = lbp.w;
    record.normalized_value = llp.value;
    record.lbp_nodes = lbp.nodes;
    record.llp_nodes = llp.nodes;
    report.delta_lower = lbp.delta_lower;
    report.w = lbp.w;

    const double candidate_upper = game::aggregate_objective(game, lbp.point) - llp.value;

    if (lbp.w <= llp.value + config.equilibrium_tol) {
      // Exact equilibrium. The upper bound is recorded after the fact.
      report.status = Termination::kEquilibriumFound;
      report.point = lbp.point;
      report.delta_upper = std::min(report.delta_upper, candidate_upper);
      report.upper_post_hoc = true;
      record.delta_upper = report.delta_upper;
      record.upper_post_hoc = true;
      record.cuts = cuts.size();
      record.seconds = std::chrono::duration<double>(Clock::now() - started).count();
      report.iterations.push_back(record);
      if (config.on_iteration) config.on_iteration(record);
      report.cuts = cuts.points();
      return report;
    }

    if (!cuts.add(llp.point)) {
      throw SolverError("iteration " + std::to_string(it) +
                        ": lower-level optimizer is already a cut but w > g^N(x); "
                        "subsolver tolerances are inconsistent (w=" +
                        std::to_string(lbp.w) + ", g^N=" + std::to_string(llp.value) + ")");
    }
    record.cut_added = true;

    if (candidate_upper < report.delta_upper) {
      report.delta_upper = candidate_upper;
      report.point = lbp.point;
    }
    record.delta_upper = report.delta_upper;
    record.cuts = cuts.size();
    record.seconds = std::chrono::duration<double>(Clock::now() - started).count();
    report.iterations.push_back(record);
    if (config.on_iteration) config.on_iteration(record);

    if (report.delta_upper - std::max(report.delta_lower, 0.0) < config.epsilon) {
      report.status = Termination::kToleranceReached;
      report.cuts = cuts.points();
      return report;
    }
  }

  report.status = Termination::kIterationLimit;
  report.cuts = cuts.points();
  return report;
}

CutSet initialize_cuts_joint(const MndSubproblems& problem) {
  CutSet cuts;
  cuts.add(problem.solve_joint());
  return cuts;
}

std::string trace_line(const IterationRecord& r) {
  nlohmann::json j;
  j["iteration"] = r.iteration;
  j["delta_l"] = r.delta_lower;
  j["delta_u"] = std::isfinite(r.delta_upper) ? nlohmann::json(r.delta_upper) : nlohmann::json(nullptr);
  j["w"] = r.w;
  j["g_n"] = r.normalized_value;
  j["cuts"] = r.cuts;
  j["cut_added"] = r.cut_added;
  j["lbp_nodes"] = r.lbp_nodes;
  j["llp_nodes"] = r.llp_nodes;
  j["seconds"] = r.seconds;
  if (r.upper_post_hoc) j["delta_u_post_hoc"] = true;
  return j.dump();
}

void write_trace(std::ostream& out, const SolveReport& report) {
  for (const auto& r : report.iterations) out << trace_line(r) << '\n';
}

}  // namespace nne::cutting
