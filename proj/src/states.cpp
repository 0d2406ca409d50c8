#include "sqjcm/states.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sqjcm::states {

using specfun::SignedLogValue;
using std::complex;

namespace detail {

std::complex<double> gamma_param_impl(double b, double chi, double r, double phi,
                                      Defect defect) {
  if (b < 0.0 || r < 0.0)
    throw std::invalid_argument("gamma_param: b and r must be >= 0");
  const complex<double> beta = std::polar(b, chi);
  double sh = std::sinh(r);
  if (defect == Defect::flip_sinh_sign) sh = -sh;
  return beta * std::cosh(r) + std::conj(beta) * std::polar(1.0, phi) * sh;
}

namespace {

// Log-space closed form for the edge elements <n|D(s)|0> and <0|D(s)|m>
// (the pieces that overflow or underflow when assembled naively).
double edge_element(double base, int k, double x2) {
  if (k == 0) return std::exp(-0.5 * x2);
  if (base == 0.0) return 0.0;
  SignedLogValue v = SignedLogValue::from_real(base).pow_int(k) *
                     SignedLogValue::from_log(-0.5 * x2 - 0.5 * specfun::log_factorial(k), 1);
  return v.to_real();
}

// Streaming rows of <n|D(s)|m> for signed real s: row n is produced from rows
// n-1 and n-2 by the along-diagonal three-term recurrence. Recursing along
// diagonals tracks the dominant solution, so the sweep stays accurate from the
// underflowed tails through the oscillatory band.
class DisplacedRowStream {
 public:
  DisplacedRowStream(double s, int m_cols)
      : s_(s), x2_(s * s), m_cols_(m_cols), prev2_(m_cols + 1), prev_(m_cols + 1),
        curr_(m_cols + 1) {
    for (int m = 0; m <= m_cols_; ++m) curr_[m] = edge_element(-s_, m, x2_);
    curr_[0] = edge_element(s_, 0, x2_);
    n_ = 0;
  }

  int row_index() const { return n_; }

  const std::vector<double>& advance() {
    std::swap(prev2_, prev_);
    std::swap(prev_, curr_);
    ++n_;
    const double n = n_;
    curr_[0] = edge_element(s_, n_, x2_);
    if (n_ == 1) {
      for (int m = 1; m <= m_cols_; ++m)
        curr_[m] = std::sqrt(static_cast<double>(m)) * prev_[m - 1] + s_ * prev_[m];
    } else {
      if (m_cols_ >= 1) curr_[1] = std::sqrt(n) * prev_[0] - s_ * curr_[0];
      for (int m = 2; m <= m_cols_; ++m)
        curr_[m] = ((m + n - 1.0 - x2_) * prev_[m - 1] -
                    std::sqrt((m - 1.0) * (n - 1.0)) * prev2_[m - 2]) /
                   std::sqrt(static_cast<double>(m) * n);
    }
    return curr_;
  }

  const std::vector<double>& row() const { return curr_; }

 private:
  double s_, x2_;
  int m_cols_, n_ = 0;
  std::vector<double> prev2_, prev_, curr_;
};

constexpr double kDegenerateDelta = 1e-8;
constexpr int kColumnLimit = 100000;

// sqrt((2l)!)/(2^l l!), the squeezed-vacuum weight profile; decays ~ l^{-1/4}.
std::vector<double> vacuum_weights(int l_max) {
  std::vector<double> g(l_max + 1);
  g[0] = 1.0;
  for (int l = 0; l < l_max; ++l)
    g[l + 1] = g[l] * std::sqrt((2.0 * l + 1.0) / (2.0 * l + 2.0));
  return g;
}

struct SeriesPlan {
  int m_cols;   // displacement-table columns (series runs over even columns)
  int l_max;    // columns / 2
};

// Column budget: the series is cut either by tanh^l decay or by the edge of
// the displacement band at the largest row in play.
SeriesPlan plan_series(double s_abs, double t, int n_rows_max) {
  if (t <= 0.0) return {2, 1};
  int l_tanh = static_cast<int>(std::ceil(std::log(1e-30) / std::log(t))) + 16;
  double band = 0.5 * std::pow(std::sqrt(2.0 * n_rows_max + 1.0) + std::sqrt(2.0) * s_abs, 2.0);
  int m = std::min(2 * l_tanh + 2, static_cast<int>(band) + 80);
  if (m > kColumnLimit)
    throw SeriesError(
        "coefficient series: squeeze regime needs " + std::to_string(m) +
            " basis columns (limit " + std::to_string(kColumnLimit) +
            "); evaluation is practical only for moderate squeeze magnitudes",
        0, 0.0);
  return {m, m / 2};
}

// First series index that can touch the displacement band of row n; the
// summation must not declare convergence before reaching it.
int band_start(int n, double s_abs) {
  double root = std::sqrt(2.0 * n + 1.0) - std::sqrt(2.0) * s_abs;
  if (root <= 0.0) return 0;
  int l = static_cast<int>((root * root - 1.0) / 4.0) - 8;
  return std::max(l, 0);
}

struct AlignedContext {
  double delta;   // b e^r - a, signed
  double t;       // tanh r
  double sqrt_sech;
  double chi;
  bool drop_chi;
  SeriesPlan plan;
  std::vector<double> weights;  // g_l t^l

  AlignedContext(const ModelParams& p, int n_rows_max, Defect defect)
      : delta(p.b * std::exp(p.r) - p.a),
        t(std::tanh(p.r)),
        sqrt_sech(std::sqrt(1.0 / std::cosh(p.r))),
        chi(p.chi),
        drop_chi(defect == Defect::drop_chi_phase),
        plan(plan_series(std::abs(delta), t, n_rows_max)) {
    weights = vacuum_weights(plan.l_max);
    double tl = 1.0;
    for (int l = 0; l <= plan.l_max; ++l, tl *= t) weights[l] *= tl;
  }

  bool degenerate() const { return std::abs(delta) < kDegenerateDelta; }

  complex<double> coefficient(int n, const std::vector<double>& row,
                              const BuildOptions& opt) const {
    specfun::SumOptions so;
    so.rel_tol = opt.rel_tol;
    so.max_terms = plan.l_max + 4;  // room for the trailing-zero certification
    so.min_terms = std::min(band_start(n, std::abs(delta)) + 3, plan.l_max + 1);
    auto res = specfun::compensated_sum<double>(
        [&](std::size_t l) {
          return l <= static_cast<std::size_t>(plan.l_max) ? weights[l] * row[2 * l] : 0.0;
        },
        so);
    if (!res.converged)
      throw SeriesError("coefficient series did not converge at n = " + std::to_string(n),
                        res.terms_used, res.tail_estimate);
    complex<double> phase = drop_chi ? complex<double>(1.0, 0.0)
                                     : std::polar(1.0, chi * n);
    return sqrt_sech * res.value * phase;
  }

  complex<double> degenerate_coefficient(int n) const {
    if (n % 2 != 0) return {0.0, 0.0};
    int l = n / 2;
    double g = 1.0;
    for (int k = 0; k < l; ++k) g *= std::sqrt((2.0 * k + 1.0) / (2.0 * k + 2.0));
    complex<double> phase = drop_chi ? complex<double>(1.0, 0.0)
                                     : std::polar(1.0, chi * n);
    return sqrt_sech * g * std::pow(t, l) * phase;
  }
};

struct GeneralContext {
  complex<double> delta;      // gamma - alpha
  double s_abs;
  double t;
  double sqrt_sech;
  complex<double> pre_phase;  // e^{-i Im(alpha conj(gamma))}
  double psi = 0.0;           // arg(delta)
  complex<double> rho;        // t e^{i(phi - 2 arg(delta))}
  double phi;
  SeriesPlan plan;
  std::vector<complex<double>> weights;  // g_l rho^l

  GeneralContext(const ModelParams& p, int n_rows_max, Defect defect)
      : t(std::tanh(p.r)), sqrt_sech(std::sqrt(1.0 / std::cosh(p.r))), phi(p.phi),
        plan{2, 1} {
    const complex<double> alpha = p.alpha();
    const complex<double> gamma = gamma_param_impl(p.b, p.chi, p.r, p.phi, defect);
    delta = gamma - alpha;
    s_abs = std::abs(delta);
    pre_phase = std::polar(1.0, -std::imag(alpha * std::conj(gamma)));
    psi = (s_abs > 0.0) ? std::arg(delta) : 0.0;
    rho = std::polar(t, p.phi - 2.0 * psi);
    plan = plan_series(s_abs, t, n_rows_max);
    auto g = vacuum_weights(plan.l_max);
    weights.resize(plan.l_max + 1);
    complex<double> rl = 1.0;
    for (int l = 0; l <= plan.l_max; ++l, rl *= rho) weights[l] = g[l] * rl;
  }

  bool degenerate() const { return s_abs < kDegenerateDelta; }

  complex<double> coefficient(int n, const std::vector<double>& row,
                              const BuildOptions& opt) const {
    specfun::SumOptions so;
    so.rel_tol = opt.rel_tol;
    so.max_terms = plan.l_max + 4;
    so.min_terms = std::min(band_start(n, s_abs) + 3, plan.l_max + 1);
    auto res = specfun::compensated_sum<complex<double>>(
        [&](std::size_t l) {
          return l <= static_cast<std::size_t>(plan.l_max) ? weights[l] * row[2 * l]
                                                           : complex<double>{0.0, 0.0};
        },
        so);
    if (!res.converged)
      throw SeriesError("coefficient series did not converge at n = " + std::to_string(n),
                        res.terms_used, res.tail_estimate);
    return pre_phase * sqrt_sech * std::polar(1.0, psi * n) * res.value;
  }

  complex<double> degenerate_coefficient(int n) const {
    if (n % 2 != 0) return {0.0, 0.0};
    int l = n / 2;
    double g = 1.0;
    for (int k = 0; k < l; ++k) g *= std::sqrt((2.0 * k + 1.0) / (2.0 * k + 2.0));
    return pre_phase * sqrt_sech * g * std::pow(std::polar(t, phi), l);
  }
};

template <class Context>
complex<double> single_coefficient(const Context& ctx, double table_s, int n,
                                   const BuildOptions& opt) {
  if (ctx.degenerate()) return ctx.degenerate_coefficient(n);
  DisplacedRowStream stream(table_s, ctx.plan.m_cols);
  while (stream.row_index() < n) stream.advance();
  return ctx.coefficient(n, stream.row(), opt);
}

template <class Context>
AmplitudeSeries assemble_series(const Context& ctx, double table_s,
                                AmplitudeSeries::Source source, double tail_target,
                                const BuildOptions& opt) {
  AmplitudeSeries out;
  out.source = source;
  double mass = 0.0, carry = 0.0;
  auto accumulate = [&](const complex<double>& bn) {
    out.coefficients.push_back(bn);
    double x = std::norm(bn);
    double t2 = mass + x;
    carry += (std::abs(mass) >= std::abs(x)) ? (mass - t2) + x : (x - t2) + mass;
    mass = t2;
    return mass + carry;
  };

  if (ctx.degenerate()) {
    for (int n = 0; n <= opt.n_cap; ++n) {
      double m = accumulate(ctx.degenerate_coefficient(n));
      if (1.0 - m < tail_target) {
        out.n_max = n;
        out.tail_mass = std::max(0.0, 1.0 - m);
        return out;
      }
    }
  } else {
    DisplacedRowStream stream(table_s, ctx.plan.m_cols);
    for (int n = 0; n <= opt.n_cap; ++n) {
      if (n > 0) stream.advance();
      double m = accumulate(ctx.coefficient(n, stream.row(), opt));
      if (1.0 - m < tail_target) {
        out.n_max = n;
        out.tail_mass = std::max(0.0, 1.0 - m);
        return out;
      }
    }
  }
  throw SeriesError("build_series: mass target " + std::to_string(tail_target) +
                        " not reached within n_cap = " + std::to_string(opt.n_cap),
                    opt.n_cap, 0.0, mass + carry);
}

}  // namespace

std::complex<double> bn_aligned_impl(const ModelParams& params, int n,
                                     const BuildOptions& opt, Defect defect) {
  params.validate();
  if (n < 0) throw std::invalid_argument("bn_aligned: n must be >= 0");
  if (!params.phase_aligned())
    throw std::invalid_argument("bn_aligned: parameters are not phase-aligned; use bn_general");
  AlignedContext ctx(params, n, defect);
  return single_coefficient(ctx, ctx.delta, n, opt);
}

AmplitudeSeries build_series_impl(const ModelParams& params, double tail_target,
                                  const BuildOptions& opt, Defect defect) {
  params.validate();
  if (!(tail_target > 0.0) || tail_target > 1e-3)
    throw std::invalid_argument("build_series: tail_target must lie in (0, 1e-3]");
  if (params.phase_aligned()) {
    AlignedContext ctx(params, opt.n_cap, defect);
    return assemble_series(ctx, ctx.delta, AmplitudeSeries::Source::analytic_aligned,
                           tail_target, opt);
  }
  GeneralContext ctx(params, opt.n_cap, defect);
  return assemble_series(ctx, ctx.s_abs, AmplitudeSeries::Source::analytic_general,
                         tail_target, opt);
}

}  // namespace detail

std::complex<double> gamma_param(double b, double chi, double r, double phi) {
  return detail::gamma_param_impl(b, chi, r, phi, detail::Defect::none);
}

std::complex<double> bn_aligned(const ModelParams& params, int n, const BuildOptions& opt) {
  return detail::bn_aligned_impl(params, n, opt, detail::Defect::none);
}

std::complex<double> bn_general(const ModelParams& params, int n, const BuildOptions& opt) {
  params.validate();
  if (n < 0) throw std::invalid_argument("bn_general: n must be >= 0");
  detail::GeneralContext ctx(params, n, detail::Defect::none);
  return detail::single_coefficient(ctx, ctx.s_abs, n, opt);
}

AmplitudeSeries build_series(const ModelParams& params, double tail_target,
                             const BuildOptions& opt) {
  return detail::build_series_impl(params, tail_target, opt, detail::Defect::none);
}

}  // namespace sqjcm::states
