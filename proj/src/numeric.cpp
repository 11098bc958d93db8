#include "infodiv/numeric.hpp"

#include <cmath>
#include <mutex>

namespace infodiv {

namespace {

// Top 64 bits of |z| as a long double, with the binary exponent of the
// discarded part returned through shift.
Real mpz_to_real(const mpz_class& z, long& shift) {
  mpz_class a = abs(z);
  size_t bits = mpz_sizeinbase(a.get_mpz_t(), 2);
  shift = 0;
  if (bits > 64) {
    shift = static_cast<long>(bits - 64);
    a >>= shift;
  }
  return static_cast<Real>(mpz_get_ui(a.get_mpz_t()));
}

std::mutex g_fault_mutex;
std::string g_fault;

}  // namespace

Real to_real(const Rational& q) {
  if (sgn(q) == 0) return 0.0L;
  long sn = 0, sd = 0;
  Real n = mpz_to_real(q.get_num(), sn);
  Real d = mpz_to_real(q.get_den(), sd);
  Real v = std::ldexp(n / d, static_cast<int>(sn - sd));
  return sgn(q) < 0 ? -v : v;
}

Rational from_real(Real x) {
  if (!std::isfinite(x)) throw std::invalid_argument("from_real: non-finite value");
  if (x == 0) return Rational(0);
  int e = 0;
  Real m = std::frexp(std::fabs(x), &e);
  // m in [0.5, 1): 64 mantissa bits fit an unsigned long.
  auto mant = static_cast<unsigned long>(std::ldexp(m, 64));
  mpz_class num(mant);
  mpz_class den(1);
  int shift = e - 64;
  if (shift >= 0) num <<= shift; else den <<= -shift;
  Rational q(num, den);
  q.canonicalize();
  return x < 0 ? Rational(-q) : q;
}

Rational parse_rational(const std::string& raw) {
  std::string s;
  for (char c : raw) if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw std::invalid_argument("empty number");
  if (s.find('/') != std::string::npos) {
    Rational q;
    if (q.set_str(s, 10) != 0 || q.get_den() == 0) throw std::invalid_argument("bad rational: " + raw);
    q.canonicalize();
    return q;
  }
  bool neg = false;
  size_t i = 0;
  if (s[0] == '-' || s[0] == '+') { neg = s[0] == '-'; i = 1; }
  std::string digits;
  long exp10 = 0;
  bool seen_point = false, any = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c; any = true;
      if (seen_point) --exp10;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c == 'e' || c == 'E') {
      size_t used = 0;
      long e = std::stol(s.substr(i + 1), &used);
      if (used != s.size() - i - 1) throw std::invalid_argument("bad number: " + raw);
      exp10 += e;
      i = s.size();
      break;
    } else {
      throw std::invalid_argument("bad number: " + raw);
    }
  }
  if (!any) throw std::invalid_argument("bad number: " + raw);
  mpz_class num(digits, 10);
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  Rational q = exp10 >= 0 ? Rational(num * p10) : Rational(num, p10);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Real log2r(Real x) { return std::log2(x); }

Real binary_entropy(Real x) {
  if (x <= 0 || x >= 1) return 0.0L;
  return plogp(x) + plogp(1 - x);
}

void set_fault_injection(const std::string& check) {
  std::lock_guard<std::mutex> lock(g_fault_mutex);
  g_fault = check;
}

bool fault_injected(const std::string& check) {
  std::lock_guard<std::mutex> lock(g_fault_mutex);
  return !g_fault.empty() && g_fault == check;
}

}  // namespace infodiv
