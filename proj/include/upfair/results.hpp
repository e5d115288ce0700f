#ifndef UPFAIR_RESULTS_HPP
#define UPFAIR_RESULTS_HPP

#include <string>
#include <vector>

#include "upfair/protocol.hpp"

namespace upfair {

// Per-user outcome table. One row per user per run, in domain/sector/user
// order; a sweep passes one RunResult per rate point. Columns:
//   scenario,R,domain,sector,user,kind,final_rate,final_bid,price,rounds,converged
// Floats carry nine significant digits; converged is 1 or 0. Byte-stable
// for identical inputs.
std::string results_csv(const std::string& scenario_name,
                        const std::vector<RunResult>& runs);

// Round-by-round logs of one run.
//   sectors: round,sector,W,R_l,p_l
//   users:   round,user,bid,rate
std::string sector_trace_csv(const RunResult& run);
std::string user_trace_csv(const RunResult& run);

// Plain overwrite; raises Errc::io_error on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace upfair

#endif
