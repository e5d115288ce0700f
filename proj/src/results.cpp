#include "upfair/results.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "upfair/error.hpp"

namespace upfair {
namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

const DomainOutcome& outcome_of(const RunResult& run, const std::string& id) {
  for (const DomainOutcome& o : run.outcomes) {
    if (o.domain_id == id) return o;
  }
  raise(Errc::invalid_parameter, "run result misses outcome for domain " + id);
}

}  // namespace

std::string results_csv(const std::string& scenario_name,
                        const std::vector<RunResult>& runs) {
  std::ostringstream out;
  out << "scenario,R,domain,sector,user,kind,final_rate,final_bid,price,"
         "rounds,converged\n";
  for (const RunResult& run : runs) {
    for (const MmeDomain& dom : run.domains) {
      const DomainOutcome& oc = outcome_of(run, dom.id);
      for (const Sector& s : dom.sectors) {
        for (const User& u : s.users) {
          out << scenario_name << ',' << fmt9(dom.total_rate) << ',' << dom.id
              << ',' << s.id << ',' << u.id << ','
              << (u.utility.is_sigmoid() ? "sigmoid" : "log") << ','
              << fmt9(u.rate) << ',' << fmt9(u.bid) << ',' << fmt9(s.price)
              << ',' << oc.rounds << ',' << (oc.converged ? 1 : 0) << '\n';
        }
      }
    }
  }
  return out.str();
}

std::string sector_trace_csv(const RunResult& run) {
  std::ostringstream out;
  out << "round,sector,W,R_l,p_l\n";
  for (const RoundTrace& row : run.trace) {
    for (const SectorTraceRow& s : row.sectors) {
      out << row.round << ',' << s.sector_id << ',' << fmt9(s.aggregate) << ','
          << fmt9(s.rate_share) << ',' << fmt9(s.price) << '\n';
    }
  }
  return out.str();
}

std::string user_trace_csv(const RunResult& run) {
  std::ostringstream out;
  out << "round,user,bid,rate\n";
  for (const RoundTrace& row : run.trace) {
    for (const UserTraceRow& u : row.users) {
      out << row.round << ',' << u.user_id << ',' << fmt9(u.bid) << ','
          << fmt9(u.rate) << '\n';
    }
  }
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::io_error, "cannot open '" + path + "' for writing");
  out << content;
  if (!out.flush()) raise(Errc::io_error, "short write to '" + path + "'");
}

}  // namespace upfair
