#include "upfair/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "upfair/error.hpp"

namespace upfair {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double aggregate_demand(const std::vector<UtilitySpec>& users, double price,
                        const SolverConfig& solver) {
  double sum = 0.0;
  for (const UtilitySpec& u : users) sum += optimal_rate(u, price, solver);
  return sum;
}

}  // namespace

OracleSolution centralized_allocate(const std::vector<UtilitySpec>& users,
                                    double total_rate,
                                    const SolverConfig& solver) {
  if (users.empty()) {
    raise(Errc::invalid_parameter, "centralized_allocate needs users");
  }
  if (!(total_rate > 0) || !std::isfinite(total_rate)) {
    raise(Errc::invalid_parameter, "total rate must be positive and finite");
  }
  const double tol = 1e-6 * total_rate;

  double lo = 1e-9;
  double d_lo = aggregate_demand(users, lo, solver);
  if (d_lo < total_rate - tol) {
    raise(Errc::solver_failure,
          "budget exceeds total demand at vanishing price; no clearing price");
  }

  double hi = 1.0;
  int doublings = 0;
  while (aggregate_demand(users, hi, solver) >= total_rate) {
    hi *= 2.0;
    if (++doublings > 80) {
      raise(Errc::solver_failure, "no price brackets the budget from above");
    }
  }

  double price = lo;
  double demand = d_lo;
  for (int iter = 0; iter < 200 && std::fabs(demand - total_rate) > tol; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket exhausted in doubles
    price = mid;
    demand = aggregate_demand(users, mid, solver);
    if (demand > total_rate) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (std::fabs(demand - total_rate) > tol) {
    raise(Errc::solver_failure, "clearing-price bisection did not settle");
  }

  OracleSolution out;
  out.price = price;
  out.rates.reserve(users.size());
  for (const UtilitySpec& u : users) {
    out.rates.push_back(optimal_rate(u, price, solver));
  }
  return out;
}

double objective(const std::vector<UtilitySpec>& users,
                 const std::vector<double>& rates) {
  if (users.size() != rates.size()) {
    raise(Errc::invalid_parameter, "objective wants one rate per user");
  }
  double sum = 0.0;
  for (size_t i = 0; i < users.size(); ++i) {
    if (!(rates[i] > 0)) return -kInf;
    sum += users[i].log_value(rates[i]);
  }
  return sum;
}

bool certify(const std::vector<UtilitySpec>& users,
             const std::vector<double>& rates, double total_rate, int trials,
             std::uint64_t seed) {
  if (users.size() != rates.size()) {
    raise(Errc::invalid_parameter, "certify wants one rate per user");
  }
  double sum = 0.0;
  for (double r : rates) sum += r;
  if (sum > total_rate * (1.0 + 1e-6)) {
    raise(Errc::invalid_parameter, "rates exceed the budget");
  }
  if (users.size() < 2) return true;

  const double base = objective(users, rates);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, users.size() - 1);
  std::uniform_real_distribution<double> amount(1e-4 * total_rate,
                                                1e-2 * total_rate);
  std::vector<double> moved = rates;
  for (int t = 0; t < trials; ++t) {
    size_t i = pick(rng);
    size_t j = pick(rng);
    while (j == i) j = pick(rng);
    double eps = std::min(amount(rng), rates[i]);  // keep the donor feasible
    moved[i] = rates[i] - eps;
    moved[j] = rates[j] + eps;
    double trial = objective(users, moved);
    moved[i] = rates[i];
    moved[j] = rates[j];
    if (trial > base + 1e-8) return false;
  }
  return true;
}

}  // namespace upfair
