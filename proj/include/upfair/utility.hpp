#ifndef UPFAIR_UTILITY_HPP
#define UPFAIR_UTILITY_HPP

#include <utility>

namespace upfair {

// Normalized utility-of-rate models. Both families are strictly increasing
// with U(0) = 0, and log U is strictly concave, which is what the bidding
// protocol and the centralized solver rely on.
//
//   sigmoid:     U(r) = c * (1/(1 + e^{-a(r-b)}) - d)   range [0, 1)
//   logarithmic: U(r) = log(1 + k r) / log(1 + k rmax)  U(rmax) = 1
//
// c and d are derived from (a, b) so that U(0) = 0 and sup U = 1.
class UtilitySpec {
 public:
  enum class Kind { sigmoid, logarithmic };

  static UtilitySpec sigmoid(double steepness, double inflection);
  static UtilitySpec logarithmic(double growth, double full_rate);

  Kind kind() const { return kind_; }
  bool is_sigmoid() const { return kind_ == Kind::sigmoid; }

  double steepness() const { return a_; }    // a
  double inflection() const { return b_; }   // b
  double normalizer() const { return c_; }   // c, sigmoid only
  double offset() const { return d_; }       // d, sigmoid only
  double growth() const { return k_; }       // k
  double full_rate() const { return rmax_; } // rmax

  // Scale used by solvers to cap demand: b for sigmoid, rmax for logarithmic.
  double reference_rate() const;

  double value(double rate) const;      // U(r), rate >= 0
  double log_value(double rate) const;  // log U(r), rate > 0
  double log_slope(double rate) const;  // d/dr log U(r), rate > 0

  bool operator==(const UtilitySpec&) const = default;

 private:
  UtilitySpec() = default;

  Kind kind_ = Kind::sigmoid;
  double a_ = 0, b_ = 0, c_ = 0, d_ = 0;
  double k_ = 0, rmax_ = 0;
};

// (c, d) for the sigmoid family. Computed through e^{-ab}, which is exact in
// the same sense as the defining expressions but never overflows; for
// a*b > 700 this is the required asymptotic form c -> 1, d -> e^{-ab}.
std::pair<double, double> sigmoid_constants(double steepness, double inflection);

}  // namespace upfair

#endif
