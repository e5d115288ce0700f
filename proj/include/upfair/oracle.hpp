#ifndef UPFAIR_ORACLE_HPP
#define UPFAIR_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "upfair/demand.hpp"
#include "upfair/utility.hpp"

namespace upfair {

struct OracleSolution {
  std::vector<double> rates;  // one per input spec, same order
  double price = 0.0;         // the market-clearing price
};

// Centralized reference solver. Aggregate demand at a common price is
// continuous and strictly decreasing, so the price that spends the whole
// budget is unique; bisect for it until |sum demand - R| <= 1e-6 * R,
// starting from [1e-9, first power of two whose demand falls below R].
// An unbracketable budget raises Errc::solver_failure.
OracleSolution centralized_allocate(const std::vector<UtilitySpec>& users,
                                    double total_rate,
                                    const SolverConfig& solver = {});

// sum_i log U_i(r_i); -infinity as soon as any rate is not positive.
double objective(const std::vector<UtilitySpec>& users,
                 const std::vector<double>& rates);

// Numerical optimality check: `trials` random feasible pairwise transfers
// (amounts in [1e-4, 1e-2] of the budget, clamped to keep rates
// non-negative) must never improve the objective by more than 1e-8.
// Deterministic for a fixed seed. Fewer than two users is trivially true.
bool certify(const std::vector<UtilitySpec>& users,
             const std::vector<double>& rates, double total_rate, int trials,
             std::uint64_t seed = 1234);

}  // namespace upfair

#endif
