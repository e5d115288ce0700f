#ifndef UPFAIR_PROTOCOL_HPP
#define UPFAIR_PROTOCOL_HPP

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "upfair/demand.hpp"
#include "upfair/scenario.hpp"
#include "upfair/utility.hpp"

namespace upfair {

// Runtime state of the three roles. run() builds these from a Scenario and
// drives them through synchronous rounds; the step operations are public so
// custom drivers can sequence them differently.

struct User {
  std::string id;
  std::string sector_id;
  UtilitySpec utility;
  double bid = 0.0;   // w_i, equals price * rate after each step
  double rate = 0.0;  // r_i
};

struct Sector {
  std::string id;
  std::string domain_id;
  std::vector<User> users;
  double rate_share = 0.0;     // R^l
  double aggregate_bid = 0.0;  // W^l, sum of member bids once aggregated
  double price = 0.0;          // p_l = W^l / R^l, 0 until first priced
};

struct MmeDomain {
  std::string id;
  std::vector<Sector> sectors;
  double total_rate = 0.0;              // R, split across the sectors
  std::vector<double> prev_aggregates;  // W^l of the previous round (0 at start)
};

struct EngineConfig {
  double delta = 1e-3;      // convergence threshold on aggregate-bid movement
  int max_rounds = 10000;
  double damping = 1.0;     // theta in (0,1]: bid' = theta*p*r* + (1-theta)*bid
  double initial_bid = 1.0; // every user's first-round bid
  SolverConfig solver;
};

// Wire vocabulary for the role exchanges: UE -> sector bids, sector -> MME
// aggregates, MME -> sector shares, sector -> UE prices, and the stop signal.
// The built-in engine exchanges these values by direct call; the types are
// for drivers that move them across real transports. Immutable by convention.
struct BidMsg {
  std::string user_id;
  double bid;
};
struct AggregateMsg {
  std::string sector_id;
  double aggregate;
};
struct SectorRateMsg {
  std::string sector_id;
  double rate_share;
};
struct PriceMsg {
  std::string sector_id;
  double price;
};
struct StopMsg {};

using Message = std::variant<BidMsg, AggregateMsg, SectorRateMsg, PriceMsg, StopMsg>;

// Payload sanity: finite, non-negative, prices strictly positive.
// Raises Errc::validation_error.
void check_message(const Message& msg);

// Per-round log. One record per executed round of a domain, append-only.
struct UserTraceRow {
  std::string user_id;
  double bid;
  double rate;
};
struct SectorTraceRow {
  std::string sector_id;
  double aggregate;
  double rate_share;
  double price;
};
struct RoundTrace {
  std::string domain_id;
  int round = 0;
  std::vector<UserTraceRow> users;
  std::vector<SectorTraceRow> sectors;
  double max_aggregate_move = std::numeric_limits<double>::infinity();
  bool converged = false;
};

struct DomainOutcome {
  std::string domain_id;
  bool converged = false;
  int rounds = 0;      // rounds executed
  int best_round = 0;  // round whose state was adopted (== rounds if converged)
  double residual = std::numeric_limits<double>::infinity();  // move at that round
};

struct RunResult {
  std::vector<MmeDomain> domains;       // final role states, exit rates applied
  std::vector<DomainOutcome> outcomes;  // parallel to domains
  std::vector<RoundTrace> trace;        // grouped by domain, rounds ascending
  bool converged = false;               // all domains converged
};

// One user's bid update against the broadcast price: solve for the demand
// r* = optimal_rate(utility, price), then move the bid toward price * r*
// under the configured damping. Returns the new bid.
double ue_step(User& user, double price, const EngineConfig& cfg);

// Sum member bids into aggregate_bid. Returns W^l.
double sector_aggregate(Sector& sector);

// p_l = W^l / R^l. Requires both positive, else Errc::degenerate_sector.
double sector_price(Sector& sector);

// Share the domain rate in proportion to aggregates: R^l = W^l / sum W * R.
// Requires some positive aggregate, else Errc::degenerate_domain.
// Returns the shares in sector order.
std::vector<double> mme_reallocate(MmeDomain& domain);

// True iff no sector's aggregate moved by delta or more since last round.
bool mme_converged(const MmeDomain& domain, double delta);

// Drive every domain of the scenario to convergence or max_rounds.
// Round order: users bid (first round: initial_bid), sectors aggregate,
// the MME tests convergence and reallocates, sectors price and broadcast.
// On convergence the exiting round's shares and prices are kept and each
// user settles at rate = bid / price. Without convergence the round with
// the smallest aggregate movement is adopted the same way and the domain
// is reported converged = false. Deterministic: ids iterate in natural
// order, no randomness.
RunResult run(const Scenario& scenario, const EngineConfig& cfg = {});

}  // namespace upfair

#endif
