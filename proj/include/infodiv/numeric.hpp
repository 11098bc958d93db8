#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace infodiv {

using Real = long double;
using Rational = mpq_class;

inline constexpr Real kE = 2.718281828459045235360287471352662498L;
inline constexpr Real kLog2E = 1.442695040888963407359924681001892137L;

// Raised when a construction fails one of its own certificates. The name
// identifies the check so callers can report it.
class VerificationError : public std::runtime_error {
 public:
  VerificationError(std::string check, const std::string& detail)
      : std::runtime_error(check + ": " + detail), check_(std::move(check)) {}
  const std::string& check() const noexcept { return check_; }

 private:
  std::string check_;
};

Real to_real(const Rational& q);

// Exact dyadic value of a finite long double.
Rational from_real(Real x);

// Accepts "a/b", integers and plain decimals ("0.25", "1e-3").
Rational parse_rational(const std::string& s);
std::string to_string(const Rational& q);

Real log2r(Real x);
Real binary_entropy(Real x);

// -x log2 x with the 0 log 0 = 0 convention.
inline Real plogp(Real x) { return x > 0 ? -x * log2r(x) : 0.0L; }

// Process-wide hook used by the command line to simulate a failing check.
void set_fault_injection(const std::string& check);
bool fault_injected(const std::string& check);

}  // namespace infodiv
