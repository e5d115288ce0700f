#include "upfair/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "upfair/error.hpp"

namespace upfair {
namespace {

void validate_config(const EngineConfig& cfg) {
  if (!(cfg.delta > 0) || !std::isfinite(cfg.delta)) {
    raise(Errc::invalid_parameter, "delta must be positive and finite");
  }
  if (cfg.max_rounds < 1) {
    raise(Errc::invalid_parameter, "max_rounds must be at least 1");
  }
  if (!(cfg.damping > 0) || cfg.damping > 1) {
    raise(Errc::invalid_parameter, "damping must lie in (0, 1]");
  }
  if (!(cfg.initial_bid > 0) || !std::isfinite(cfg.initial_bid)) {
    raise(Errc::invalid_parameter, "initial_bid must be positive and finite");
  }
}

void check_payload(const std::string& what, double v, bool strictly_positive) {
  if (!std::isfinite(v) || v < 0 || (strictly_positive && v == 0)) {
    raise(Errc::validation_error, what + " payload out of range");
  }
}

MmeDomain build_domain(const Scenario& sc, const DomainDef& dd) {
  MmeDomain dom;
  dom.id = dd.id;
  dom.total_rate = dd.total_rate;
  for (const SectorDef& cd : sc.sectors) {
    if (cd.domain_id != dd.id) continue;
    Sector s;
    s.id = cd.id;
    s.domain_id = dd.id;
    for (const UserDef& ud : sc.users) {
      if (ud.sector_id == cd.id) {
        s.users.push_back({ud.id, ud.sector_id, ud.utility});
      }
    }
    std::sort(s.users.begin(), s.users.end(),
              [](const User& x, const User& y) { return natural_less(x.id, y.id); });
    dom.sectors.push_back(std::move(s));
  }
  std::sort(dom.sectors.begin(), dom.sectors.end(),
            [](const Sector& x, const Sector& y) { return natural_less(x.id, y.id); });
  dom.prev_aggregates.assign(dom.sectors.size(), 0.0);
  return dom;
}

RoundTrace make_row(const MmeDomain& dom, int round, double move, bool converged) {
  RoundTrace row;
  row.domain_id = dom.id;
  row.round = round;
  row.max_aggregate_move = move;
  row.converged = converged;
  for (const Sector& s : dom.sectors) {
    row.sectors.push_back({s.id, s.aggregate_bid, s.rate_share, s.price});
    for (const User& u : s.users) {
      row.users.push_back({u.id, u.bid, u.rate});
    }
  }
  return row;
}

// Fresh shares and prices from the current aggregates, then every user
// settles at bid / price (the exit branch of both the UE and sector loops).
void settle_rates(MmeDomain& dom) {
  mme_reallocate(dom);
  for (Sector& s : dom.sectors) {
    if (s.aggregate_bid > 0) {
      sector_price(s);
    } else {
      s.price = 0.0;
    }
    for (User& u : s.users) {
      u.rate = s.price > 0 ? u.bid / s.price : 0.0;
    }
  }
}

void run_domain(MmeDomain dom, const EngineConfig& cfg, RunResult& out) {
  const size_t L = dom.sectors.size();
  if (L == 0) {
    raise(Errc::degenerate_domain, "domain " + dom.id + " has no sectors");
  }
  for (Sector& s : dom.sectors) {
    s.rate_share = dom.total_rate / static_cast<double>(L);
  }

  const size_t first_row = out.trace.size();
  double best_move = std::numeric_limits<double>::infinity();
  int best_round = 1;
  bool converged = false;
  int rounds = 0;

  for (int n = 1; n <= cfg.max_rounds; ++n) {
    rounds = n;
    for (Sector& s : dom.sectors) {
      for (User& u : s.users) {
        if (n == 1) {
          u.bid = cfg.initial_bid;
          u.rate = 0.0;
        } else {
          ue_step(u, s.price, cfg);
        }
      }
      sector_aggregate(s);
    }

    double move = 0.0;
    for (size_t i = 0; i < L; ++i) {
      move = std::max(move, std::fabs(dom.sectors[i].aggregate_bid -
                                      dom.prev_aggregates[i]));
    }
    converged = mme_converged(dom, cfg.delta);
    // Round 1 moves away from the all-zero bookkeeping state, so its
    // aggregate move says nothing about stability; skip it when a later
    // round exists to compare against.
    if (n >= 2 && move < best_move) {
      best_move = move;
      best_round = n;
    }

    if (converged) {
      settle_rates(dom);
    } else {
      mme_reallocate(dom);
      for (Sector& s : dom.sectors) {
        if (s.aggregate_bid > 0) {
          sector_price(s);
        } else {
          s.price = 0.0;
        }
      }
    }

    out.trace.push_back(make_row(dom, n, move, converged));
    for (size_t i = 0; i < L; ++i) {
      dom.prev_aggregates[i] = dom.sectors[i].aggregate_bid;
    }
    if (converged) break;
  }

  if (!converged) {
    // Adopt the round that moved least (earliest on ties) and settle there.
    const RoundTrace& best = out.trace[first_row + best_round - 1];
    size_t ui = 0;
    for (size_t i = 0; i < L; ++i) {
      Sector& s = dom.sectors[i];
      s.aggregate_bid = best.sectors[i].aggregate;
      for (User& u : s.users) {
        u.bid = best.users[ui++].bid;
      }
    }
    settle_rates(dom);
  }

  int adopted = converged ? rounds : best_round;
  double residual = out.trace[first_row + adopted - 1].max_aggregate_move;
  out.outcomes.push_back({dom.id, converged, rounds, adopted, residual});
  out.converged = out.converged && converged;
  out.domains.push_back(std::move(dom));
}

}  // namespace

void check_message(const Message& msg) {
  struct Visitor {
    void operator()(const BidMsg& m) const { check_payload("bid", m.bid, false); }
    void operator()(const AggregateMsg& m) const {
      check_payload("aggregate", m.aggregate, false);
    }
    void operator()(const SectorRateMsg& m) const {
      check_payload("rate share", m.rate_share, false);
    }
    void operator()(const PriceMsg& m) const {
      check_payload("price", m.price, true);
    }
    void operator()(const StopMsg&) const {}
  };
  std::visit(Visitor{}, msg);
}

double ue_step(User& user, double price, const EngineConfig& cfg) {
  double r = optimal_rate(user.utility, price, cfg.solver);
  user.rate = r;
  user.bid = cfg.damping * (price * r) + (1.0 - cfg.damping) * user.bid;
  return user.bid;
}

double sector_aggregate(Sector& sector) {
  double sum = 0.0;
  for (const User& u : sector.users) sum += u.bid;
  sector.aggregate_bid = sum;
  return sum;
}

double sector_price(Sector& sector) {
  if (!(sector.rate_share > 0) || !(sector.aggregate_bid > 0)) {
    raise(Errc::degenerate_sector,
          "sector " + sector.id + " cannot be priced (W=" +
              std::to_string(sector.aggregate_bid) +
              ", R=" + std::to_string(sector.rate_share) + ")");
  }
  sector.price = sector.aggregate_bid / sector.rate_share;
  return sector.price;
}

std::vector<double> mme_reallocate(MmeDomain& domain) {
  double sum = 0.0;
  for (const Sector& s : domain.sectors) sum += s.aggregate_bid;
  if (!(sum > 0)) {
    raise(Errc::degenerate_domain,
          "domain " + domain.id + " has no positive aggregate bid");
  }
  std::vector<double> shares;
  shares.reserve(domain.sectors.size());
  for (Sector& s : domain.sectors) {
    s.rate_share = s.aggregate_bid / sum * domain.total_rate;
    shares.push_back(s.rate_share);
  }
  return shares;
}

bool mme_converged(const MmeDomain& domain, double delta) {
  if (domain.prev_aggregates.size() != domain.sectors.size()) {
    raise(Errc::invalid_parameter, "prev_aggregates out of step with sectors");
  }
  for (size_t i = 0; i < domain.sectors.size(); ++i) {
    double move = std::fabs(domain.sectors[i].aggregate_bid -
                            domain.prev_aggregates[i]);
    if (!(move < delta)) return false;
  }
  return true;
}

RunResult run(const Scenario& scenario, const EngineConfig& cfg) {
  validate_config(cfg);
  validate(scenario);

  std::vector<DomainDef> defs = scenario.domains;
  std::sort(defs.begin(), defs.end(), [](const DomainDef& x, const DomainDef& y) {
    return natural_less(x.id, y.id);
  });

  RunResult out;
  out.converged = true;
  for (const DomainDef& dd : defs) {
    if (!(dd.total_rate > 0)) {
      raise(Errc::validation_error,
            "domain " + dd.id + ": total rate not fixed (set rate= or override)");
    }
    run_domain(build_domain(scenario, dd), cfg, out);
  }
  return out;
}

}  // namespace upfair
