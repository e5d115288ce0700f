#include "upfair.h"

#include <cmath>
#include <exception>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "upfair/error.hpp"
#include "upfair/oracle.hpp"
#include "upfair/protocol.hpp"
#include "upfair/results.hpp"
#include "upfair/scenario.hpp"

namespace {

thread_local std::string g_last_error;

upfair_status status_of(upfair::Errc code) {
  using upfair::Errc;
  switch (code) {
    case Errc::invalid_parameter:
    case Errc::domain_error:
    case Errc::invalid_price:
      return UPFAIR_ERR_INVALID_ARGUMENT;
    case Errc::parse_error:
      return UPFAIR_ERR_PARSE;
    case Errc::validation_error:
      return UPFAIR_ERR_VALIDATION;
    case Errc::solver_failure:
      return UPFAIR_ERR_SOLVER;
    case Errc::degenerate_sector:
    case Errc::degenerate_domain:
      return UPFAIR_ERR_DEGENERATE;
    case Errc::io_error:
      return UPFAIR_ERR_IO;
  }
  return UPFAIR_ERR_INTERNAL;
}

upfair_status fail(upfair_status st, const char* msg) {
  g_last_error = msg;
  return st;
}

template <class Fn>
upfair_status guarded(Fn&& fn) {
  try {
    upfair_status st = fn();
    if (st == UPFAIR_OK) g_last_error.clear();
    return st;
  } catch (const upfair::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return UPFAIR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return UPFAIR_ERR_INTERNAL;
  }
}

upfair::EngineConfig engine_config(const upfair_config* cfg) {
  upfair::EngineConfig ec;
  if (cfg != nullptr) {
    ec.delta = cfg->delta;
    ec.max_rounds = cfg->max_rounds;
    ec.damping = cfg->damping;
    ec.initial_bid = cfg->initial_bid;
    ec.solver.foc_tolerance = cfg->foc_tolerance;
    ec.solver.rate_cap_multiplier = cfg->rate_cap_multiplier;
    ec.solver.max_bracket_doublings = cfg->max_bracket_doublings;
  }
  return ec;
}

}  // namespace

struct upfair_scenario {
  upfair::Scenario sc;
};

struct upfair_result {
  std::vector<upfair::RunResult> runs;
  struct Row {
    const upfair::MmeDomain* dom;
    const upfair::Sector* sec;
    const upfair::User* user;
    const upfair::DomainOutcome* oc;
  };
  std::vector<Row> rows;
  bool converged = true;

  // Rows point into `runs`; call once runs stop moving.
  void index() {
    rows.clear();
    converged = true;
    for (const upfair::RunResult& run : runs) {
      converged = converged && run.converged;
      for (size_t d = 0; d < run.domains.size(); ++d) {
        const upfair::MmeDomain& dom = run.domains[d];
        const upfair::DomainOutcome& oc = run.outcomes[d];
        for (const upfair::Sector& s : dom.sectors) {
          for (const upfair::User& u : s.users) {
            rows.push_back({&dom, &s, &u, &oc});
          }
        }
      }
    }
  }
};

struct upfair_verify_result {
  struct Row {
    std::string user, domain;
    double distributed, centralized, gap;
  };
  std::vector<Row> rows;
  bool certified = true;
  bool converged = true;
  bool passed = false;
};

extern "C" {

const char* upfair_last_error(void) { return g_last_error.c_str(); }

void upfair_config_default(upfair_config* cfg) {
  if (cfg == nullptr) return;
  upfair::EngineConfig ec;
  cfg->delta = ec.delta;
  cfg->max_rounds = ec.max_rounds;
  cfg->damping = ec.damping;
  cfg->initial_bid = ec.initial_bid;
  cfg->foc_tolerance = ec.solver.foc_tolerance;
  cfg->rate_cap_multiplier = ec.solver.rate_cap_multiplier;
  cfg->max_bracket_doublings = ec.solver.max_bracket_doublings;
}

upfair_status upfair_scenario_load(const char* path, upfair_scenario** out) {
  if (path == nullptr || out == nullptr) {
    return fail(UPFAIR_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    auto* s = new upfair_scenario{upfair::load_scenario(path)};
    *out = s;
    return UPFAIR_OK;
  });
}

upfair_status upfair_scenario_table1(upfair_scenario** out) {
  if (out == nullptr) return fail(UPFAIR_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new upfair_scenario{upfair::builtin_table1()};
    return UPFAIR_OK;
  });
}

upfair_status upfair_scenario_pool_domains(upfair_scenario* scenario) {
  if (scenario == nullptr) return fail(UPFAIR_ERR_INVALID_ARGUMENT, "null scenario");
  return guarded([&] {
    upfair::pool_domains(scenario->sc);
    return UPFAIR_OK;
  });
}

upfair_status upfair_scenario_set_rate(upfair_scenario* scenario, double rate) {
  if (scenario == nullptr) return fail(UPFAIR_ERR_INVALID_ARGUMENT, "null scenario");
  return guarded([&] {
    upfair::set_total_rate(scenario->sc, rate);
    return UPFAIR_OK;
  });
}

upfair_status upfair_scenario_sweep_grid(const upfair_scenario* scenario,
                                         double* start, double* end,
                                         double* step) {
  if (scenario == nullptr || start == nullptr || end == nullptr || step == nullptr) {
    return fail(UPFAIR_ERR_INVALID_ARGUMENT, "null argument");
  }
  const auto& domains = scenario->sc.domains;
  if (domains.empty() || !domains[0].sweep.has_value()) {
    return fail(UPFAIR_ERR_VALIDATION, "scenario carries no sweep grid");
  }
  for (const auto& d : domains) {
    if (!(d.sweep == domains[0].sweep)) {
      return fail(UPFAIR_ERR_VALIDATION, "domains disagree on the sweep grid");
    }
  }
  *start = domains[0].sweep->start;
  *end = domains[0].sweep->end;
  *step = domains[0].sweep->step;
  return UPFAIR_OK;
}

const char* upfair_scenario_name(const upfair_scenario* scenario) {
  return scenario == nullptr ? nullptr : scenario->sc.name.c_str();
}

void upfair_scenario_free(upfair_scenario* scenario) { delete scenario; }

upfair_status upfair_run(const upfair_scenario* scenario,
                         const upfair_config* cfg, upfair_result** out) {
  if (scenario == nullptr || out == nullptr) {
    return fail(UPFAIR_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    auto res = std::make_unique<upfair_result>();
    res->runs.push_back(upfair::run(scenario->sc, engine_config(cfg)));
    res->index();
    *out = res.release();
    return UPFAIR_OK;
  });
}

upfair_status upfair_sweep(const upfair_scenario* scenario,
                           const upfair_config* cfg, double start, double end,
                           double step, upfair_result** out) {
  if (scenario == nullptr || out == nullptr) {
    return fail(UPFAIR_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  if (!(start > 0) || !(step > 0) || !(start <= end) || !std::isfinite(end)) {
    return fail(UPFAIR_ERR_INVALID_ARGUMENT,
                "sweep wants 0 < start <= end and step > 0");
  }
  return guarded([&] {
    auto res = std::make_unique<upfair_result>();
    const upfair::EngineConfig ec = engine_config(cfg);
    const long steps = static_cast<long>((end - start) / step + 1e-9);
    for (long i = 0; i <= steps; ++i) {
      upfair::Scenario point = scenario->sc;
      upfair::set_total_rate(point, start + static_cast<double>(i) * step);
      res->runs.push_back(upfair::run(point, ec));
    }
    res->index();
    *out = res.release();
    return UPFAIR_OK;
  });
}

size_t upfair_result_row_count(const upfair_result* result) {
  return result == nullptr ? 0 : result->rows.size();
}

upfair_status upfair_result_row(const upfair_result* result, size_t index,
                                upfair_row* out) {
  if (result == nullptr || out == nullptr) {
    return fail(UPFAIR_ERR_INVALID_ARGUMENT, "null argument");
  }
  if (index >= result->rows.size()) {
    return fail(UPFAIR_ERR_INVALID_ARGUMENT, "row index out of range");
  }
  const upfair_result::Row& r = result->rows[index];
  out->domain = r.dom->id.c_str();
  out->sector = r.sec->id.c_str();
  out->user = r.user->id.c_str();
  out->kind = r.user->utility.is_sigmoid() ? "sigmoid" : "log";
  out->total_rate = r.dom->total_rate;
  out->rate = r.user->rate;
  out->bid = r.user->bid;
  out->price = r.sec->price;
  out->rounds = r.oc->rounds;
  out->converged = r.oc->converged ? 1 : 0;
  return UPFAIR_OK;
}

int upfair_result_converged(const upfair_result* result) {
  return result != nullptr && result->converged ? 1 : 0;
}

upfair_status upfair_result_write_csv(const upfair_result* result,
                                      const char* scenario_name,
                                      const char* path) {
  if (result == nullptr || scenario_name == nullptr || path == nullptr) {
    return fail(UPFAIR_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    upfair::write_file(path, upfair::results_csv(scenario_name, result->runs));
    return UPFAIR_OK;
  });
}

upfair_status upfair_result_write_trace_csv(const upfair_result* result,
                                            const char* sector_path,
                                            const char* user_path) {
  if (result == nullptr) return fail(UPFAIR_ERR_INVALID_ARGUMENT, "null result");
  if (result->runs.size() != 1) {
    return fail(UPFAIR_ERR_INVALID_ARGUMENT,
                "trace output is defined for single-run results only");
  }
  return guarded([&] {
    if (sector_path != nullptr) {
      upfair::write_file(sector_path, upfair::sector_trace_csv(result->runs[0]));
    }
    if (user_path != nullptr) {
      upfair::write_file(user_path, upfair::user_trace_csv(result->runs[0]));
    }
    return UPFAIR_OK;
  });
}

void upfair_result_free(upfair_result* result) { delete result; }

upfair_status upfair_verify(const upfair_scenario* scenario,
                            const upfair_config* cfg, int trials,
                            double tolerance, upfair_verify_result** out) {
  if (scenario == nullptr || out == nullptr) {
    return fail(UPFAIR_ERR_INVALID_ARGUMENT, "null argument");
  }
  if (trials < 0) return fail(UPFAIR_ERR_INVALID_ARGUMENT, "negative trials");
  *out = nullptr;
  return guarded([&] {
    const upfair::EngineConfig ec = engine_config(cfg);
    upfair::RunResult run = upfair::run(scenario->sc, ec);

    auto res = std::make_unique<upfair_verify_result>();
    res->converged = run.converged;
    const double tol = tolerance > 0 ? tolerance : 0.0;
    bool within = true;

    for (const upfair::MmeDomain& dom : run.domains) {
      std::vector<upfair::UtilitySpec> users;
      std::vector<double> rates;
      std::vector<const upfair::User*> who;
      for (const upfair::Sector& s : dom.sectors) {
        for (const upfair::User& u : s.users) {
          users.push_back(u.utility);
          rates.push_back(u.rate);
          who.push_back(&u);
        }
      }
      if (users.empty()) continue;
      upfair::OracleSolution sol =
          upfair::centralized_allocate(users, dom.total_rate, ec.solver);
      for (size_t i = 0; i < users.size(); ++i) {
        double gap = std::fabs(rates[i] - sol.rates[i]);
        res->rows.push_back(
            {who[i]->id, dom.id, rates[i], sol.rates[i], gap});
        within = within && gap <= tol;
      }
      if (trials > 0) {
        // Certify the reference itself; the distributed rates are judged by
        // the tolerance comparison and sit delta-ish off the exact optimum.
        res->certified =
            res->certified &&
            upfair::certify(users, sol.rates, dom.total_rate, trials);
      }
    }
    res->passed = within && res->certified;
    *out = res.release();
    return UPFAIR_OK;
  });
}

size_t upfair_verify_row_count(const upfair_verify_result* result) {
  return result == nullptr ? 0 : result->rows.size();
}

upfair_status upfair_verify_get_row(const upfair_verify_result* result,
                                    size_t index, upfair_verify_row* out) {
  if (result == nullptr || out == nullptr) {
    return fail(UPFAIR_ERR_INVALID_ARGUMENT, "null argument");
  }
  if (index >= result->rows.size()) {
    return fail(UPFAIR_ERR_INVALID_ARGUMENT, "row index out of range");
  }
  const upfair_verify_result::Row& r = result->rows[index];
  out->user = r.user.c_str();
  out->domain = r.domain.c_str();
  out->distributed = r.distributed;
  out->centralized = r.centralized;
  out->gap = r.gap;
  return UPFAIR_OK;
}

int upfair_verify_passed(const upfair_verify_result* result) {
  return result != nullptr && result->passed ? 1 : 0;
}

int upfair_verify_certified(const upfair_verify_result* result) {
  return result != nullptr && result->certified ? 1 : 0;
}

int upfair_verify_converged(const upfair_verify_result* result) {
  return result != nullptr && result->converged ? 1 : 0;
}

void upfair_verify_free(upfair_verify_result* result) { delete result; }

}  // extern "C"
