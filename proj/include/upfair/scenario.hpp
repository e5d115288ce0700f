#ifndef UPFAIR_SCENARIO_HPP
#define UPFAIR_SCENARIO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "upfair/utility.hpp"

namespace upfair {

// Rate axis for sweep runs. Defaults cover 50..1150 in steps of 50.
struct SweepSpec {
  double start = 50.0;
  double end = 1150.0;
  double step = 50.0;

  bool operator==(const SweepSpec&) const = default;
};

struct UserDef {
  std::string id;
  std::string sector_id;
  UtilitySpec utility;

  bool operator==(const UserDef&) const = default;
};

struct SectorDef {
  std::string id;
  std::string domain_id;

  bool operator==(const SectorDef&) const = default;
};

// total_rate == 0 means "not fixed here"; a sweep or a --rate override must
// supply it before the engine runs.
struct DomainDef {
  std::string id;
  double total_rate = 0.0;
  std::optional<SweepSpec> sweep;

  bool operator==(const DomainDef&) const = default;
};

// Declarative network description. Order of entries is as written; consumers
// that need a canonical order sort by natural_less on ids.
struct Scenario {
  std::string name;
  std::vector<DomainDef> domains;
  std::vector<SectorDef> sectors;
  std::vector<UserDef> users;

  bool operator==(const Scenario&) const = default;
};

// "A2" < "A10": digit runs compare numerically, everything else bytewise.
bool natural_less(const std::string& lhs, const std::string& rhs);

// Structural checks: unique ids, resolvable references, at least one user,
// positive fixed rates, well-formed sweeps. Raises Errc::validation_error.
void validate(const Scenario& scenario);

// Parse the text format (see the repo README for the grammar). `origin` is
// used in error messages, conventionally the file path. Both raise
// Errc::parse_error for syntax and Errc::validation_error for semantics;
// messages carry origin:line.
Scenario parse_scenario(std::istream& in, const std::string& origin);
Scenario load_scenario(const std::string& path);

// Serialization that load_scenario reads back to an equal Scenario.
std::string write_scenario(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::string& path);

// The built-in three-cell network: domains A/B/C (one per base station),
// three sectors each, six users per sector, swept 50..1150 by default.
Scenario builtin_table1();

// Collapse all domains into one (id "all"): every sector rebound to it,
// fixed rates summed, sweep kept only if all domains agreed on it.
void pool_domains(Scenario& scenario);

// Fix every domain's total rate to R and drop sweeps.
void set_total_rate(Scenario& scenario, double rate);

}  // namespace upfair

#endif
