#ifndef UPFAIR_DEMAND_HPP
#define UPFAIR_DEMAND_HPP

#include "upfair/utility.hpp"

namespace upfair {

struct SolverConfig {
  double foc_tolerance = 1e-9;     // |log_slope(r) - p| <= foc_tolerance * p
  double rate_cap_multiplier = 10; // r_cap = multiplier * reference_rate
  int max_bracket_doublings = 60;  // lower-bracket halvings at extreme prices
};

// Price-taking best response: argmax over r in [0, r_cap] of
// log U(r) - price * r. log U is strictly concave with slope falling from
// +inf to 0, so the maximizer is the unique root of log_slope(r) = price,
// clamped to r_cap when the root lies beyond it. Found by bisection.
double optimal_rate(const UtilitySpec& spec, double price,
                    const SolverConfig& cfg = {});

// Kelly-style bid: what the user pays per round for `rate` at `price`.
double make_bid(double price, double rate);

// Rate a bid buys at a price; inverse of make_bid at fixed price.
double allocated_rate(double bid, double price);

}  // namespace upfair

#endif
