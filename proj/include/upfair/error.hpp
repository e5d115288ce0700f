#ifndef UPFAIR_ERROR_HPP
#define UPFAIR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace upfair {

enum class Errc {
  invalid_parameter,  // bad model or config value
  domain_error,       // argument outside an operation's domain (e.g. negative rate)
  invalid_price,      // price must be finite and > 0
  solver_failure,     // bracket or residual could not be achieved
  degenerate_sector,  // sector with zero aggregate bid or zero share
  degenerate_domain,  // whole domain aggregates to zero
  parse_error,        // scenario text could not be read
  validation_error,   // scenario parsed but is semantically invalid
  io_error,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace upfair

#endif
