#include "sqjcm/specfun.hpp"

#include <algorithm>
#include <mutex>
#include <vector>

namespace sqjcm::specfun {

namespace {

// ln2 split for exact Cody-Waite style reduction: ln2_hi carries the top
// 32 bits so exp2 * ln2_hi is exact for |exp2| < 2^20.
constexpr double kLn2Hi = 6.93147180369123816490e-01;  // high bits exact under small int multiples
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kLn2 = 0.6931471805599453094172321;
constexpr double kInvLn2 = 1.4426950408889634073599247;

// Bring (exp2, logm) into the canonical window logm in (-ln2, 0].
void normalize(std::int64_t& e2, double& lm) {
  if (lm > 0.0 || lm <= -kLn2) {
    double shift = std::floor(lm * kInvLn2);
    if (lm - shift * kLn2 > 0.0) shift += 1.0;  // land in (-ln2, 0]
    e2 += static_cast<std::int64_t>(shift);
    lm = (lm - shift * kLn2Hi) - shift * kLn2Lo;
    // one more nudge against rounding at the window edge
    if (lm > 0.0) { e2 += 1; lm -= kLn2; }
    if (lm <= -kLn2) { e2 -= 1; lm += kLn2; }
  }
}

}  // namespace

SignedLogValue SignedLogValue::from_real(double x) {
  if (x == 0.0) return zero();
  if (std::isnan(x)) throw std::invalid_argument("SignedLogValue: NaN input");
  SignedLogValue v;
  v.sign = std::signbit(x) ? -1 : 1;
  int e = 0;
  double m = std::frexp(std::abs(x), &e);  // m in [0.5, 1)
  v.exp2 = e;
  v.logm = std::log(m);                    // in [-ln2, 0)
  if (v.logm <= -kLn2) { v.exp2 -= 1; v.logm += kLn2; }
  return v;
}

SignedLogValue SignedLogValue::from_log(double log_magnitude, int sign) {
  if (sign == 0) return zero();
  SignedLogValue v;
  v.sign = sign > 0 ? 1 : -1;
  v.exp2 = 0;
  v.logm = log_magnitude;
  normalize(v.exp2, v.logm);
  return v;
}

double SignedLogValue::to_real() const {
  if (sign == 0) return 0.0;
  if (exp2 > 1100) return sign > 0 ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity();
  if (exp2 < -1140) return 0.0;
  return sign * std::ldexp(std::exp(logm), static_cast<int>(exp2));
}

double SignedLogValue::log_magnitude() const {
  if (sign == 0) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(exp2) * kLn2 + logm;
}

SignedLogValue SignedLogValue::operator*(const SignedLogValue& o) const {
  if (sign == 0 || o.sign == 0) return zero();
  SignedLogValue v;
  v.sign = sign * o.sign;
  v.exp2 = exp2 + o.exp2;
  v.logm = logm + o.logm;
  normalize(v.exp2, v.logm);
  return v;
}

SignedLogValue SignedLogValue::operator/(const SignedLogValue& o) const {
  if (o.sign == 0) throw std::domain_error("SignedLogValue: division by zero");
  if (sign == 0) return zero();
  SignedLogValue v;
  v.sign = sign * o.sign;
  v.exp2 = exp2 - o.exp2;
  v.logm = logm - o.logm;
  normalize(v.exp2, v.logm);
  return v;
}

SignedLogValue SignedLogValue::operator+(const SignedLogValue& o) const {
  if (sign == 0) return o;
  if (o.sign == 0) return *this;
  // log of |other/this|
  double dl = static_cast<double>(o.exp2 - exp2) * kLn2 + (o.logm - logm);
  const SignedLogValue &big = (dl > 0.0) ? o : *this;
  double adl = -std::abs(dl);
  if (adl < -745.0) return big;  // the smaller addend is below resolution
  double ratio = std::exp(adl);  // |small/big| in (0, 1]
  double f = (sign == o.sign) ? 1.0 + ratio : 1.0 - ratio;
  if (f == 0.0) return zero();
  SignedLogValue v;
  v.sign = big.sign;
  v.exp2 = big.exp2;
  v.logm = big.logm + std::log(f);
  normalize(v.exp2, v.logm);
  return v;
}

SignedLogValue SignedLogValue::pow_int(std::int64_t k) const {
  if (k == 0) return one();
  if (sign == 0) {
    if (k < 0) throw std::domain_error("SignedLogValue: 0 to a negative power");
    return zero();
  }
  SignedLogValue v;
  v.sign = (sign < 0 && (k & 1)) ? -1 : 1;
  v.exp2 = exp2 * k;
  v.logm = logm * static_cast<double>(k);
  normalize(v.exp2, v.logm);
  return v;
}

namespace {

// Cumulative compensated table of ln k; lgamma takes over past the table.
constexpr std::int64_t kLogFactTable = 1 << 16;

const std::vector<double>& log_fact_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogFactTable + 1);
    t[0] = 0.0;
    double sum = 0.0, carry = 0.0;
    for (std::int64_t k = 1; k <= kLogFactTable; ++k) {
      double x = std::log(static_cast<double>(k));
      double s = sum + x;
      carry += (std::abs(sum) >= std::abs(x)) ? (sum - s) + x : (x - s) + sum;
      sum = s;
      t[k] = sum + carry;
    }
    return t;
  }();
  return table;
}

}  // namespace

double log_factorial(std::int64_t n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  if (n <= kLogFactTable) return log_fact_table()[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double hyp_poly(int l, int n, double x2) {
  if (!(x2 > 0.0)) throw std::domain_error("hyp_poly: x2 must be > 0");
  if (l < 0 || n < 0) throw std::domain_error("hyp_poly: l and n must be >= 0");
  const int two_l = 2 * l;
  const int jmax = std::min(two_l, n);
  const SignedLogValue minus_inv_x2 = SignedLogValue::from_real(-1.0 / x2);
  const double lf2l = log_factorial(two_l);
  const double lfn = log_factorial(n);
  SignedLogValue acc = SignedLogValue::zero();
  for (int j = 0; j <= jmax; ++j) {
    double lg = (lf2l - log_factorial(two_l - j)) + (lfn - log_factorial(n - j)) -
                log_factorial(j);
    SignedLogValue term = SignedLogValue::from_log(lg, 1) * minus_inv_x2.pow_int(j);
    acc = acc + term;
  }
  return acc.to_real();
}

}  // namespace sqjcm::specfun
