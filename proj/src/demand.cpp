#include "upfair/demand.hpp"

#include <cmath>
#include <limits>

#include "upfair/error.hpp"

namespace upfair {
namespace {

void require_price(double price) {
  if (!std::isfinite(price) || price <= 0.0) {
    raise(Errc::invalid_price, "price must be finite and > 0");
  }
}

}  // namespace

double optimal_rate(const UtilitySpec& spec, double price, const SolverConfig& cfg) {
  require_price(price);
  if (!(cfg.foc_tolerance > 0.0) || !(cfg.rate_cap_multiplier > 0.0)) {
    raise(Errc::invalid_parameter, "solver config must be positive");
  }

  const double r_cap = cfg.rate_cap_multiplier * spec.reference_rate();

  // Slope falls monotonically from +inf to ~0. If it still exceeds the price
  // at the cap, the objective is increasing on the whole interval.
  if (spec.log_slope(r_cap) >= price) return r_cap;

  // Lower endpoint must sit above the root; halve it for extreme prices.
  double lo = 1e-12 * r_cap;
  int tries = 0;
  while (spec.log_slope(lo) <= price) {
    if (++tries > cfg.max_bracket_doublings) {
      raise(Errc::solver_failure, "bracket failure: price beyond solvable range");
    }
    lo *= 0.5;
  }

  double hi = r_cap;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    double s = spec.log_slope(mid);
    if (std::fabs(s - price) <= cfg.foc_tolerance * price) return mid;
    if (s > price) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  // Bracket collapsed to rounding width; accept only if the residual is met.
  double s = spec.log_slope(mid);
  if (std::fabs(s - price) <= cfg.foc_tolerance * price) return mid;
  raise(Errc::solver_failure, "bisection stalled before meeting the FOC tolerance");
}

double make_bid(double price, double rate) {
  require_price(price);
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    raise(Errc::domain_error, "bid needs rate >= 0");
  }
  return price * rate;
}

double allocated_rate(double bid, double price) {
  require_price(price);
  if (!(bid >= 0.0) || !std::isfinite(bid)) {
    raise(Errc::domain_error, "allocation needs bid >= 0");
  }
  return bid / price;
}

}  // namespace upfair
