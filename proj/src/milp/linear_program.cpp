#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <utility>

#include "nne/errors.hpp"
#include "nne/milp.hpp"

namespace nne::milp {

std::size_t LinearProgram::add_variable(double lb, double ub, double cost, std::string name) {
  objective.push_back(cost);
  lower.push_back(lb);
  upper.push_back(ub);
  if (name.empty()) name = "x" + std::to_string(objective.size() - 1);
  names.push_back(std::move(name));
  return objective.size() - 1;
}

std::size_t LinearProgram::add_constraint(std::vector<Term> terms, Sense sense, double rhs,
                                          std::string name) {
  if (name.empty()) name = "r" + std::to_string(rows.size());
  rows.push_back({std::move(terms), sense, rhs, std::move(name)});
  return rows.size() - 1;
}

double LinearProgram::evaluate(std::span<const double> x) const {
  double value = objective_offset;
  for (std::size_t j = 0; j < objective.size(); ++j) value += objective[j] * x[j];
  return value;
}

double LinearProgram::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < objective.size(); ++j) {
    worst = std::max({worst, lower[j] - x[j], x[j] - upper[j]});
  }
  for (const Constraint& row : rows) {
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

void LinearProgram::validate() const {
  const std::size_t n = objective.size();
  if (lower.size() != n || upper.size() != n) throw UsageError("bound vectors do not match objective");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j])) throw UsageError("non-finite objective coefficient");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] ||
        lower[j] == kInfinity || upper[j] == -kInfinity) {
      throw UsageError("inconsistent bounds on variable " + std::to_string(j));
    }
  }
  for (const Constraint& row : rows) {
    if (!std::isfinite(row.rhs)) throw UsageError("non-finite right-hand side in row " + row.name);
    for (const Term& t : row.terms) {
      if (t.var >= n) throw UsageError("row " + row.name + " references unknown variable");
      if (!std::isfinite(t.coef)) throw UsageError("non-finite coefficient in row " + row.name);
    }
  }
}

std::size_t MixedIntegerProgram::add_binary(double cost, std::string name) {
  const std::size_t j = lp.add_variable(0.0, 1.0, cost, std::move(name));
  binaries.push_back(j);
  return j;
}

void MixedIntegerProgram::validate() const {
  lp.validate();
  for (std::size_t j : binaries) {
    if (j >= lp.num_variables()) throw UsageError("binary index out of range");
    if (lp.lower[j] < 0.0 || lp.upper[j] > 1.0) {
      throw UsageError("binary variable " + lp.names[j] + " has bounds outside [0,1]");
    }
  }
}

const char* to_string(Status status) {
  switch (status) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kNodeLimit: return "node_limit";
  }
  return "unknown";
}

namespace {

void write_terms(std::ostream& out, const LinearProgram& lp, std::span<const Term> terms) {
  bool first = true;
  for (const Term& t : terms) {
    if (t.coef == 0.0) continue;
    out << (t.coef < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    if (std::abs(t.coef) != 1.0) out << std::abs(t.coef) << ' ';
    out << lp.names[t.var];
    first = false;
  }
  if (first) out << '0';
}

}  // namespace

void write_lp_text(std::ostream& out, const MixedIntegerProgram& mip) {
  const LinearProgram& lp = mip.lp;
  std::ostringstream buffer;
  buffer.precision(17);

  std::vector<Term> obj;
  for (std::size_t j = 0; j < lp.num_variables(); ++j) obj.push_back({j, lp.objective[j]});
  buffer << "Minimize\n obj: ";
  write_terms(buffer, lp, obj);
  if (lp.objective_offset != 0.0) buffer << " + " << lp.objective_offset;
  buffer << "\nSubject To\n";
  for (const Constraint& row : lp.rows) {
    buffer << ' ' << row.name << ": ";
    write_terms(buffer, lp, row.terms);
    switch (row.sense) {
      case Sense::kLessEqual: buffer << " <= "; break;
      case Sense::kEqual: buffer << " = "; break;
      case Sense::kGreaterEqual: buffer << " >= "; break;
    }
    buffer << row.rhs << '\n';
  }
  buffer << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    buffer << ' ';
    if (lp.lower[j] == -kInfinity) buffer << "-inf"; else buffer << lp.lower[j];
    buffer << " <= " << lp.names[j] << " <= ";
    if (lp.upper[j] == kInfinity) buffer << "+inf"; else buffer << lp.upper[j];
    buffer << '\n';
  }
  if (!mip.binaries.empty()) {
    buffer << "Binaries\n";
    for (std::size_t j : mip.binaries) buffer << ' ' << lp.names[j] << '\n';
  }
  buffer << "End\n";
  out << buffer.str();
}

std::string to_lp_text(const MixedIntegerProgram& mip) {
  std::ostringstream out;
  write_lp_text(out, mip);
  return out.str();
}

}  // namespace nne::milp
