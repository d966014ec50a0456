#include "nne/kkt.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "nne/errors.hpp"

namespace nne::kkt {
namespace {

void bump(Residuals& r, Group g, double v) {
  double& slot = r.by_group[static_cast<std::size_t>(g)];
  slot = std::max(slot, v);
}

// 0 <= slack ⊥ multiplier >= 0
void complementary_pair(Residuals& r, Group g, double slack, double multiplier) {
  bump(r, g, std::max(-slack, 0.0));
  bump(r, g, std::max(-multiplier, 0.0));
  bump(r, g, std::abs(slack * multiplier));
}

double others_in_market(const knapsack::Instance& inst, std::span<const double> y, std::size_t j,
                        std::size_t l) {
  double s = 0.0;
  for (std::size_t i = 0; i < inst.players; ++i) {
    if (i != j) s += y[inst.index(i, l)];
  }
  return s;
}

}  // namespace

const char* to_string(Group group) {
  switch (group) {
    case Group::kStationarity: return "stationarity";
    case Group::kBudget: return "budget";
    case Group::kComplementarity: return "complementarity";
    case Group::kUpperBound: return "upper_bound";
    case Group::kLowerBound: return "lower_bound";
    case Group::kShared: return "shared";
  }
  return "unknown";
}

double Residuals::max() const { return *std::max_element(by_group.begin(), by_group.end()); }

Group Residuals::worst() const {
  return static_cast<Group>(std::max_element(by_group.begin(), by_group.end()) - by_group.begin());
}

KktCertificate construct_multipliers(const knapsack::Instance& inst, std::span<const double> y) {
  if (!knapsack::is_feasible(inst, y)) throw UsageError("construct_multipliers: point is not feasible");
  const std::size_t n = inst.num_binaries();
  KktCertificate cert;
  cert.pi.assign(inst.players, 0.0);
  cert.omega.assign(inst.markets, 0.0);
  cert.gamma.assign(n, 0.0);
  cert.mu.assign(n, 0.0);
  cert.nu.assign(n, 0.0);

  for (std::size_t j = 0; j < inst.players; ++j) {
    for (std::size_t l = 0; l < inst.markets; ++l) {
      const std::size_t k = inst.index(j, l);
      const double margin = static_cast<double>(inst.alpha[l] - inst.c[k]) -
                            inst.beta[l] * others_in_market(inst, y, j, l) - cert.pi[j] * inst.a[k] -
                            cert.omega[l] * inst.d[k];
      if (y[k] < 0.5) {
        cert.gamma[k] = -(margin + cert.nu[k]);
      } else {
        cert.gamma[k] = margin - 2.0 * inst.beta[l] - cert.mu[k];
      }
    }
  }
  cert.residuals = kkt_residuals(inst, y, cert);
  return cert;
}

Residuals kkt_residuals(const knapsack::Instance& inst, std::span<const double> y, const KktCertificate& cert) {
  const std::size_t n = inst.num_binaries();
  if (y.size() != n || cert.gamma.size() != n || cert.mu.size() != n || cert.nu.size() != n ||
      cert.pi.size() != inst.players || cert.omega.size() != inst.markets) {
    throw UsageError("kkt_residuals: dimension mismatch");
  }
  Residuals r;
  for (std::size_t j = 0; j < inst.players; ++j) {
    for (std::size_t l = 0; l < inst.markets; ++l) {
      const std::size_t k = inst.index(j, l);
      const double v = y[k];
      const double stationarity = static_cast<double>(inst.alpha[l] - inst.c[k]) -
                                  inst.beta[l] * others_in_market(inst, y, j, l) - 2.0 * inst.beta[l] * v -
                                  cert.pi[j] * inst.a[k] + cert.gamma[k] - 2.0 * cert.gamma[k] * v -
                                  cert.mu[k] + cert.nu[k] - cert.omega[l] * inst.d[k];
      bump(r, Group::kStationarity, std::abs(stationarity));
      bump(r, Group::kComplementarity, std::abs(cert.gamma[k] * v * (1.0 - v)));
      complementary_pair(r, Group::kUpperBound, 1.0 - v, cert.mu[k]);
      complementary_pair(r, Group::kLowerBound, v, cert.nu[k]);
    }
  }
  for (std::size_t j = 0; j < inst.players; ++j) {
    double slack = static_cast<double>(inst.b[j]);
    for (std::size_t l = 0; l < inst.markets; ++l) slack -= inst.a[inst.index(j, l)] * y[inst.index(j, l)];
    complementary_pair(r, Group::kBudget, slack, cert.pi[j]);
  }
  for (std::size_t l = 0; l < inst.markets; ++l) {
    double slack = static_cast<double>(inst.e[l]);
    for (std::size_t j = 0; j < inst.players; ++j) slack -= inst.d[inst.index(j, l)] * y[inst.index(j, l)];
    complementary_pair(r, Group::kShared, slack, cert.omega[l]);
  }
  return r;
}

double verify_kkt(const knapsack::Instance& inst, std::span<const double> y, const KktCertificate& cert) {
  return kkt_residuals(inst, y, cert).max();
}

FailureWitness demonstrate_failure(const knapsack::Instance& inst) {
  const auto feasible = knapsack::enumerate_feasible(inst);
  FailureWitness witness;
  witness.feasible_points = feasible.size();
  for (const auto& y : feasible) {
    const std::vector<double> regrets = knapsack::player_regrets(inst, y);
    const double worst = *std::max_element(regrets.begin(), regrets.end());
    if (worst <= 1e-9) {
      ++witness.equilibria;
      continue;
    }
    witness.point = y;
    witness.certificate = construct_multipliers(inst, y);
    witness.disequilibrium = worst;
    return witness;
  }
  throw NoCounterexample("all " + std::to_string(feasible.size()) +
                         " feasible points are equilibria; no KKT counterexample exists");
}

std::string certificate_json(const knapsack::Instance& inst, std::span<const double> y,
                             const KktCertificate& cert) {
  nlohmann::json j;
  j["point"] = std::vector<double>(y.begin(), y.end());
  j["players"] = inst.players;
  j["markets"] = inst.markets;
  j["multipliers"] = {{"pi", cert.pi}, {"gamma", cert.gamma}, {"mu", cert.mu}, {"nu", cert.nu},
                      {"omega", cert.omega}};
  nlohmann::json res;
  for (std::size_t g = 0; g < kNumGroups; ++g) res[to_string(static_cast<Group>(g))] = cert.residuals.by_group[g];
  j["residuals"] = res;
  j["max_residual"] = cert.residuals.max();
  return j.dump(2);
}

}  // namespace nne::kkt
