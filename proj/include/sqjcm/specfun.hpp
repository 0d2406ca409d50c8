// Scalar numeric kernels: sign/log-split arithmetic, log-factorials,
// the terminating hypergeometric-type polynomial entering the squeezed
// coherent expansion coefficients, and compensated series summation.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace sqjcm::specfun {

/// A real number stored as sign * 2^exp2 * e^logm with logm in (-ln2, 0].
///
/// The power-of-two split keeps the representable range far beyond double
/// (products like x^n / sqrt(n!) at n ~ 10^4 stay finite) while the short
/// mantissa log preserves ~1e-15 relative accuracy through to_real().
struct SignedLogValue {
  int sign = 0;          // -1, 0, +1
  std::int64_t exp2 = 0;
  double logm = 0.0;     // log of mantissa, in (-ln2, 0]; meaningless when sign == 0

  static SignedLogValue zero() { return {}; }
  static SignedLogValue one() { return {1, 0, 0.0}; }
  static SignedLogValue from_real(double x);
  /// Build from a natural-log magnitude (e.g. accumulated log-factorials).
  static SignedLogValue from_log(double log_magnitude, int sign);

  double to_real() const;           // saturates to 0 / +-inf outside double range
  double log_magnitude() const;     // natural log of |value|; -inf for zero
  bool is_zero() const { return sign == 0; }

  SignedLogValue operator*(const SignedLogValue& o) const;
  SignedLogValue operator/(const SignedLogValue& o) const;
  SignedLogValue operator+(const SignedLogValue& o) const;
  SignedLogValue pow_int(std::int64_t k) const;
  SignedLogValue negate() const { return {-sign, exp2, logm}; }
};

/// ln(n!), relative error below 1e-14.
double log_factorial(std::int64_t n);

/// Terminating polynomial sum_{j=0}^{min(2l,n)}
///   [Gamma(2l+1) Gamma(n+1) / (Gamma(2l+1-j) Gamma(n+1-j))] (-1/x2)^j / j!.
/// Gamma ratios are assembled from log-factorial differences in signed-log
/// form; terms past j = min(2l, n) vanish and are never evaluated.
/// Throws std::domain_error for x2 <= 0.
double hyp_poly(int l, int n, double x2);

/// Outcome of a compensated series accumulation.
template <class T>
struct SeriesResult {
  T value{};
  int terms_used = 0;
  double tail_estimate = 0.0;
  bool converged = false;
};

struct SumOptions {
  double rel_tol = 1e-12;
  double abs_floor = 1e-300;   // below this, smallness is judged absolutely
  int max_terms = 20000;
  // Convergence is never declared before this many terms. Callers summing
  // banded sequences (leading terms structurally zero) must set it past the
  // band start, otherwise the consecutive-small-terms rule fires early.
  int min_terms = 1;
};

/// Thrown by callers when a compensated sum fails to converge and the result
/// must not be used silently.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int terms_used, double tail_estimate)
      : std::runtime_error(what), terms_used(terms_used), tail_estimate(tail_estimate) {}
  int terms_used;
  double tail_estimate;
};

namespace detail {
inline double mag(double x) { return std::abs(x); }
inline double mag(const std::complex<double>& x) { return std::abs(x); }

/// Neumaier-compensated accumulator (componentwise for complex).
template <class T>
struct Compensated {
  T sum{};
  T carry{};
  void add(double x, double& s, double& c) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  void add(const double& x) { add(x, sum, carry); }
  void add(const std::complex<double>& x) {
    auto* s = reinterpret_cast<double*>(&sum);
    auto* c = reinterpret_cast<double*>(&carry);
    add(x.real(), s[0], c[0]);
    add(x.imag(), s[1], c[1]);
  }
  T total() const { return sum + carry; }
};
}  // namespace detail

/// Accumulates term_at(0), term_at(1), ... with Neumaier compensation.
///
/// Convergence is declared once three consecutive terms each have magnitude
/// below max(rel_tol * |accumulated|, abs_floor); a single small term is not
/// trusted because alternating series can have transiently vanishing terms.
/// On max_terms exhaustion the partial value is returned with
/// converged = false; callers must surface that, never swallow it.
template <class T, class Gen>
SeriesResult<T> compensated_sum(Gen&& term_at, const SumOptions& opt = {}) {
  if (!(opt.rel_tol > 0.0) || opt.max_terms < 1)
    throw std::invalid_argument("compensated_sum: rel_tol must be > 0 and max_terms >= 1");
  detail::Compensated<T> acc;
  double last3[3] = {0.0, 0.0, 0.0};
  int small_streak = 0;
  SeriesResult<T> res;
  for (int k = 0; k < opt.max_terms; ++k) {
    T term = term_at(static_cast<std::size_t>(k));
    acc.add(term);
    res.terms_used = k + 1;
    double m = detail::mag(term);
    last3[k % 3] = m;
    double thresh = std::max(opt.rel_tol * detail::mag(acc.total()), opt.abs_floor);
    small_streak = (m < thresh) ? small_streak + 1 : 0;
    if (small_streak >= 3 && res.terms_used >= opt.min_terms) {
      res.value = acc.total();
      res.tail_estimate = std::max({last3[0], last3[1], last3[2]});
      res.converged =
          res.tail_estimate <= std::max(opt.rel_tol * detail::mag(res.value) * (1.0 + 4.0 * opt.rel_tol),
                                        opt.abs_floor);
      if (res.converged) return res;
      small_streak = 0;  // accumulator shrank under us; keep going
    }
  }
  res.value = acc.total();
  res.tail_estimate = std::max({last3[0], last3[1], last3[2]});
  res.converged = false;
  return res;
}

}  // namespace sqjcm::specfun
