#include "upfair/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "upfair/error.hpp"

namespace upfair {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Shortest decimal form that strtod parses back to the same double.
std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  if (std::strtod(buf, nullptr) != v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

// Origin line numbers for entries produced by the parser, so that semantic
// errors can point at the offending line. Absent for handcrafted scenarios.
struct SourceMap {
  std::string origin;
  std::unordered_map<std::string, int> domain, sector, user;
};

std::string at(const SourceMap* src,
               const std::unordered_map<std::string, int> SourceMap::*table,
               const std::string& id) {
  if (src == nullptr) return "";
  auto& m = src->*table;
  auto it = m.find(id);
  if (it == m.end()) return "";
  return src->origin + ":" + std::to_string(it->second) + ": ";
}

template <class Def>
void check_unique(const std::vector<Def>& defs, const char* what,
                  const SourceMap* src,
                  const std::unordered_map<std::string, int> SourceMap::*table) {
  std::unordered_map<std::string, int> seen;
  for (const Def& d : defs) {
    if (!seen.emplace(d.id, 1).second) {
      raise(Errc::validation_error, at(src, table, d.id) + "duplicate " +
                                        what + " id '" + d.id + "'");
    }
  }
}

void validate_impl(const Scenario& s, const SourceMap* src) {
  check_unique(s.domains, "domain", src, &SourceMap::domain);
  check_unique(s.sectors, "sector", src, &SourceMap::sector);
  check_unique(s.users, "user", src, &SourceMap::user);

  if (s.domains.empty()) raise(Errc::validation_error, "no domains defined");
  if (s.sectors.empty()) raise(Errc::validation_error, "no sectors defined");
  if (s.users.empty()) raise(Errc::validation_error, "no users defined");

  for (const DomainDef& d : s.domains) {
    std::string where = at(src, &SourceMap::domain, d.id) + "domain " + d.id;
    if (d.total_rate < 0 || !std::isfinite(d.total_rate)) {
      raise(Errc::validation_error, where + ": rate must be positive");
    }
    if (d.total_rate > 0 && d.sweep) {
      raise(Errc::validation_error, where + ": rate and sweep are exclusive");
    }
    if (d.sweep) {
      const SweepSpec& w = *d.sweep;
      if (!(w.start > 0) || !(w.step > 0) || w.start > w.end ||
          !std::isfinite(w.end)) {
        raise(Errc::validation_error, where + ": sweep needs 0 < start <= end"
                                              " and step > 0");
      }
    }
  }
  for (const SectorDef& c : s.sectors) {
    bool ok = std::any_of(s.domains.begin(), s.domains.end(),
                          [&](const DomainDef& d) { return d.id == c.domain_id; });
    if (!ok) {
      raise(Errc::validation_error, at(src, &SourceMap::sector, c.id) +
                                        "sector " + c.id + ": unknown domain '" +
                                        c.domain_id + "'");
    }
  }
  for (const UserDef& u : s.users) {
    bool ok = std::any_of(s.sectors.begin(), s.sectors.end(),
                          [&](const SectorDef& c) { return c.id == u.sector_id; });
    if (!ok) {
      raise(Errc::validation_error, at(src, &SourceMap::user, u.id) + "user " +
                                        u.id + ": unknown sector '" +
                                        u.sector_id + "'");
    }
  }
}

// --- text format -----------------------------------------------------------

struct LineCtx {
  const std::string& origin;
  int line;

  std::string where() const { return origin + ":" + std::to_string(line) + ": "; }
  [[noreturn]] void fail(const std::string& msg) const {
    raise(Errc::parse_error, where() + msg);
  }
};

double parse_number(const LineCtx& ctx, const std::string& tok,
                    const std::string& what) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + tok.size() || tok.empty()) {
    ctx.fail("bad number for " + what + ": '" + tok + "'");
  }
  return v;
}

// key=value arguments after the directive and id tokens.
std::unordered_map<std::string, std::string> parse_kv(
    const LineCtx& ctx, const std::vector<std::string>& toks, size_t from) {
  std::unordered_map<std::string, std::string> kv;
  for (size_t i = from; i < toks.size(); ++i) {
    size_t eq = toks[i].find('=');
    if (eq == std::string::npos || eq == 0) {
      ctx.fail("expected key=value, got '" + toks[i] + "'");
    }
    std::string key = toks[i].substr(0, eq);
    if (!kv.emplace(key, toks[i].substr(eq + 1)).second) {
      ctx.fail("duplicate key '" + key + "'");
    }
  }
  return kv;
}

std::string take(const LineCtx& ctx,
                 std::unordered_map<std::string, std::string>& kv,
                 const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) ctx.fail("missing " + key + "=");
  std::string v = it->second;
  kv.erase(it);
  return v;
}

void reject_leftovers(const LineCtx& ctx,
                      const std::unordered_map<std::string, std::string>& kv) {
  if (!kv.empty()) ctx.fail("unexpected key '" + kv.begin()->first + "'");
}

SweepSpec parse_sweep(const LineCtx& ctx, const std::string& v) {
  size_t c1 = v.find(':');
  size_t c2 = c1 == std::string::npos ? c1 : v.find(':', c1 + 1);
  if (c2 == std::string::npos || v.find(':', c2 + 1) != std::string::npos) {
    ctx.fail("sweep wants start:end:step, got '" + v + "'");
  }
  SweepSpec w;
  w.start = parse_number(ctx, v.substr(0, c1), "sweep start");
  w.end = parse_number(ctx, v.substr(c1 + 1, c2 - c1 - 1), "sweep end");
  w.step = parse_number(ctx, v.substr(c2 + 1), "sweep step");
  return w;
}

}  // namespace

bool natural_less(const std::string& lhs, const std::string& rhs) {
  size_t i = 0, j = 0;
  while (i < lhs.size() && j < rhs.size()) {
    if (is_digit(lhs[i]) && is_digit(rhs[j])) {
      size_t si = i, sj = j;
      while (i < lhs.size() && is_digit(lhs[i])) ++i;
      while (j < rhs.size() && is_digit(rhs[j])) ++j;
      size_t zi = si, zj = sj;
      while (zi < i - 1 && lhs[zi] == '0') ++zi;
      while (zj < j - 1 && rhs[zj] == '0') ++zj;
      size_t li = i - zi, lj = j - zj;
      if (li != lj) return li < lj;
      int cmp = lhs.compare(zi, li, rhs, zj, lj);
      if (cmp != 0) return cmp < 0;
      // Same value, different leading zeros: fewer digits first.
      if (i - si != j - sj) return i - si < j - sj;
    } else {
      if (lhs[i] != rhs[j]) return lhs[i] < rhs[j];
      ++i;
      ++j;
    }
  }
  return lhs.size() - i < rhs.size() - j;
}

void validate(const Scenario& scenario) { validate_impl(scenario, nullptr); }

Scenario parse_scenario(std::istream& in, const std::string& origin) {
  Scenario s;
  SourceMap src;
  src.origin = origin;
  bool named = false;

  std::string raw;
  for (int lineno = 1; std::getline(in, raw); ++lineno) {
    LineCtx ctx{origin, lineno};
    if (lineno == 1 && raw.size() >= 3 && raw.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      raw.erase(0, 3);
    }
    size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);

    std::vector<std::string> toks;
    std::istringstream ts(raw);
    for (std::string t; ts >> t;) toks.push_back(t);
    if (toks.empty()) continue;

    const std::string& directive = toks[0];
    if (directive == "name") {
      if (toks.size() != 2) ctx.fail("name wants exactly one token");
      if (named) ctx.fail("duplicate name directive");
      s.name = toks[1];
      named = true;
    } else if (directive == "domain") {
      if (toks.size() < 2) ctx.fail("domain wants an id");
      DomainDef d;
      d.id = toks[1];
      auto kv = parse_kv(ctx, toks, 2);
      if (auto it = kv.find("rate"); it != kv.end()) {
        d.total_rate = parse_number(ctx, it->second, "rate");
        kv.erase(it);
      }
      if (auto it = kv.find("sweep"); it != kv.end()) {
        d.sweep = parse_sweep(ctx, it->second);
        kv.erase(it);
      }
      reject_leftovers(ctx, kv);
      if (!src.domain.emplace(d.id, lineno).second) {
        raise(Errc::validation_error,
              ctx.where() + "duplicate domain id '" + d.id + "'");
      }
      s.domains.push_back(std::move(d));
    } else if (directive == "sector") {
      if (toks.size() < 2) ctx.fail("sector wants an id");
      SectorDef c;
      c.id = toks[1];
      auto kv = parse_kv(ctx, toks, 2);
      c.domain_id = take(ctx, kv, "domain");
      reject_leftovers(ctx, kv);
      if (!src.sector.emplace(c.id, lineno).second) {
        raise(Errc::validation_error,
              ctx.where() + "duplicate sector id '" + c.id + "'");
      }
      s.sectors.push_back(std::move(c));
    } else if (directive == "user") {
      if (toks.size() < 2) ctx.fail("user wants an id");
      std::string uid = toks[1];
      auto kv = parse_kv(ctx, toks, 2);
      std::string sector_id = take(ctx, kv, "sector");
      std::string kind = take(ctx, kv, "kind");
      std::optional<UtilitySpec> ut;
      try {
        if (kind == "sigmoid") {
          double a = parse_number(ctx, take(ctx, kv, "a"), "a");
          double b = parse_number(ctx, take(ctx, kv, "b"), "b");
          reject_leftovers(ctx, kv);
          ut = UtilitySpec::sigmoid(a, b);
        } else if (kind == "log") {
          double k = parse_number(ctx, take(ctx, kv, "k"), "k");
          double rmax = parse_number(ctx, take(ctx, kv, "r_max"), "r_max");
          reject_leftovers(ctx, kv);
          ut = UtilitySpec::logarithmic(k, rmax);
        } else {
          ctx.fail("kind must be sigmoid or log, got '" + kind + "'");
        }
      } catch (const Error& e) {
        if (e.code() == Errc::parse_error) throw;
        raise(Errc::validation_error,
              ctx.where() + "user " + uid + ": " + e.what());
      }
      if (!src.user.emplace(uid, lineno).second) {
        raise(Errc::validation_error,
              ctx.where() + "duplicate user id '" + uid + "'");
      }
      s.users.push_back({std::move(uid), std::move(sector_id), *ut});
    } else {
      ctx.fail("unknown directive '" + directive + "'");
    }
  }

  validate_impl(s, &src);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open scenario file '" + path + "'");
  return parse_scenario(in, path);
}

std::string write_scenario(const Scenario& scenario) {
  Scenario s = scenario;
  auto by_id = [](const auto& x, const auto& y) { return natural_less(x.id, y.id); };
  std::sort(s.domains.begin(), s.domains.end(), by_id);
  std::sort(s.sectors.begin(), s.sectors.end(), by_id);
  std::sort(s.users.begin(), s.users.end(), by_id);

  std::ostringstream out;
  if (!s.name.empty()) out << "name " << s.name << "\n";
  for (const DomainDef& d : s.domains) {
    out << "domain " << d.id;
    if (d.total_rate > 0) out << " rate=" << fmt_double(d.total_rate);
    if (d.sweep) {
      out << " sweep=" << fmt_double(d.sweep->start) << ":"
          << fmt_double(d.sweep->end) << ":" << fmt_double(d.sweep->step);
    }
    out << "\n";
  }
  for (const SectorDef& c : s.sectors) {
    out << "sector " << c.id << " domain=" << c.domain_id << "\n";
  }
  for (const UserDef& u : s.users) {
    out << "user " << u.id << " sector=" << u.sector_id;
    if (u.utility.is_sigmoid()) {
      out << " kind=sigmoid a=" << fmt_double(u.utility.steepness())
          << " b=" << fmt_double(u.utility.inflection());
    } else {
      out << " kind=log k=" << fmt_double(u.utility.growth())
          << " r_max=" << fmt_double(u.utility.full_rate());
    }
    out << "\n";
  }
  return out.str();
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::io_error, "cannot open '" + path + "' for writing");
  out << write_scenario(scenario);
  if (!out.flush()) raise(Errc::io_error, "short write to '" + path + "'");
}

Scenario builtin_table1() {
  // Three base stations, three sectors each; every sector serves three
  // steep-demand users and three elastic users, r_max = 100 throughout.
  struct Sig { double a, b; };
  static constexpr Sig kSig[3][3][3] = {
      {{{3, 10.0}, {3, 10.3}, {1, 10.6}},
       {{3, 10.0}, {3, 11.0}, {1, 12.0}},
       {{3, 15.1}, {3, 15.3}, {3, 15.5}}},
      {{{3, 10.9}, {3, 11.2}, {1, 11.5}},
       {{3, 13.0}, {3, 14.0}, {1, 15.0}},
       {{3, 15.7}, {3, 15.9}, {3, 17.3}}},
      {{{3, 11.8}, {3, 12.1}, {1, 12.4}},
       {{3, 16.0}, {3, 17.0}, {1, 18.0}},
       {{3, 17.5}, {3, 17.7}, {3, 17.9}}},
  };
  static constexpr double kLogK[3][3][3] = {
      {{1.1, 1.2, 1.3}, {1, 2, 3}, {10, 11, 12}},
      {{1.4, 1.5, 1.6}, {4, 5, 6}, {13, 14, 15}},
      {{1.7, 1.8, 1.9}, {7, 8, 9}, {16, 17, 18}},
  };

  Scenario s;
  s.name = "table1";
  for (int bs = 0; bs < 3; ++bs) {
    std::string bs_id(1, char('A' + bs));
    DomainDef d;
    d.id = bs_id;
    d.sweep = SweepSpec{};
    s.domains.push_back(d);
    for (int sec = 0; sec < 3; ++sec) {
      std::string sec_id = bs_id + "." + std::to_string(sec + 1);
      s.sectors.push_back({sec_id, bs_id});
      for (int i = 0; i < 3; ++i) {
        s.users.push_back(
            {bs_id + std::to_string(6 * sec + i + 1), sec_id,
             UtilitySpec::sigmoid(kSig[bs][sec][i].a, kSig[bs][sec][i].b)});
      }
      for (int i = 0; i < 3; ++i) {
        s.users.push_back({bs_id + std::to_string(6 * sec + i + 4), sec_id,
                           UtilitySpec::logarithmic(kLogK[bs][sec][i], 100.0)});
      }
    }
  }
  return s;
}

void pool_domains(Scenario& scenario) {
  DomainDef all;
  all.id = "all";
  bool same_sweep =
      !scenario.domains.empty() && scenario.domains[0].sweep.has_value();
  for (const DomainDef& d : scenario.domains) {
    all.total_rate += d.total_rate;
    same_sweep = same_sweep && d.sweep == scenario.domains[0].sweep;
  }
  if (same_sweep) all.sweep = scenario.domains[0].sweep;
  if (all.total_rate > 0) all.sweep.reset();
  scenario.domains = {all};
  for (SectorDef& c : scenario.sectors) c.domain_id = "all";
}

void set_total_rate(Scenario& scenario, double rate) {
  if (!(rate > 0) || !std::isfinite(rate)) {
    raise(Errc::invalid_parameter, "total rate must be positive and finite");
  }
  for (DomainDef& d : scenario.domains) {
    d.total_rate = rate;
    d.sweep.reset();
  }
}

}  // namespace upfair
