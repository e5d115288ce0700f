#include "upfair/utility.hpp"

#include <cmath>
#include <string>

#include "upfair/error.hpp"

namespace upfair {
namespace {

void require_positive_finite(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    raise(Errc::invalid_parameter, std::string(name) + " must be finite and > 0");
  }
}

// 1 / (1 + e^{-x}) without overflow on either tail.
double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// ln(1 + e^{x}) without overflow for large x.
double log1p_exp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

}  // namespace

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_parameter: return "invalid_parameter";
    case Errc::domain_error: return "domain_error";
    case Errc::invalid_price: return "invalid_price";
    case Errc::solver_failure: return "solver_failure";
    case Errc::degenerate_sector: return "degenerate_sector";
    case Errc::degenerate_domain: return "degenerate_domain";
    case Errc::parse_error: return "parse_error";
    case Errc::validation_error: return "validation_error";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

std::pair<double, double> sigmoid_constants(double steepness, double inflection) {
  require_positive_finite(steepness, "sigmoid a");
  require_positive_finite(inflection, "sigmoid b");
  // c = (1+e^{ab})/e^{ab} = 1 + t and d = 1/(1+e^{ab}) = t/(1+t) with
  // t = e^{-ab}. Identical to the defining forms, stable for any a*b, and
  // degrades gracefully to c = 1, d = e^{-ab} once t underflows.
  double t = std::exp(-steepness * inflection);
  return {1.0 + t, t / (1.0 + t)};
}

UtilitySpec UtilitySpec::sigmoid(double steepness, double inflection) {
  auto [c, d] = sigmoid_constants(steepness, inflection);
  UtilitySpec u;
  u.kind_ = Kind::sigmoid;
  u.a_ = steepness;
  u.b_ = inflection;
  u.c_ = c;
  u.d_ = d;
  return u;
}

UtilitySpec UtilitySpec::logarithmic(double growth, double full_rate) {
  require_positive_finite(growth, "logarithmic k");
  require_positive_finite(full_rate, "logarithmic rmax");
  UtilitySpec u;
  u.kind_ = Kind::logarithmic;
  u.k_ = growth;
  u.rmax_ = full_rate;
  return u;
}

double UtilitySpec::reference_rate() const {
  return kind_ == Kind::sigmoid ? b_ : rmax_;
}

double UtilitySpec::value(double rate) const {
  if (!(rate >= 0.0)) raise(Errc::domain_error, "utility rate must be >= 0");
  if (kind_ == Kind::logarithmic) {
    return std::log1p(k_ * rate) / std::log1p(k_ * rmax_);
  }
  // c (S - d) rewritten as (1 - e^{-a r}) / (1 + e^{-a(r-b)}). The rewrite
  // makes U(0) = 0 exact and avoids the S - d cancellation at small rates.
  double num = -std::expm1(-a_ * rate);
  double den = 1.0 + std::exp(-a_ * (rate - b_));
  return num / den;
}

double UtilitySpec::log_value(double rate) const {
  if (!(rate > 0.0)) raise(Errc::domain_error, "log utility needs rate > 0");
  if (kind_ == Kind::logarithmic) {
    return std::log(std::log1p(k_ * rate)) - std::log(std::log1p(k_ * rmax_));
  }
  // ln(1 - e^{-ar}) - ln(1 + e^{-a(r-b)}), each term in its stable form.
  return std::log(-std::expm1(-a_ * rate)) - log1p_exp(a_ * (b_ - rate));
}

double UtilitySpec::log_slope(double rate) const {
  if (!(rate > 0.0)) raise(Errc::domain_error, "log slope needs rate > 0");
  if (kind_ == Kind::logarithmic) {
    double g = std::log1p(k_ * rate);
    return k_ / ((1.0 + k_ * rate) * g);
  }
  // a [ e^{-ar}/(1-e^{-ar}) + (1 - S) ]; equals a S (1-S)/(S-d) but keeps
  // full precision off the inflection where S saturates.
  return a_ * (1.0 / std::expm1(a_ * rate) + logistic(a_ * (b_ - rate)));
}

}  // namespace upfair
