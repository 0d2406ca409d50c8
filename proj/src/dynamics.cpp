#include "sqjcm/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "sqjcm/specfun.hpp"
#include "sqjcm/states.hpp"

namespace sqjcm::dynamics {

using std::complex;
using cx = complex<double>;

double JointState::norm2() const {
  double s = 0.0;
  for (const auto& z : c1) s += std::norm(z);
  for (const auto& z : c2) s += std::norm(z);
  return s;
}

double JointState::excitation_number() const {
  double s = 0.0;
  for (std::size_t n = 0; n < c1.size(); ++n) s += n * std::norm(c1[n]);
  for (std::size_t m = 0; m < c2.size(); ++m) s += (m + 1.0) * std::norm(c2[m]);
  return s;
}

double rabi_freq(int n, double lambda, double delta) {
  if (n < 0) throw std::invalid_argument("rabi_freq: n must be >= 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("rabi_freq: lambda must be > 0");
  return std::hypot(delta, 2.0 * lambda * std::sqrt(static_cast<double>(n)));
}

JointState amplitudes_analytic(const AmplitudeSeries& series, double lambda,
                               double delta, double t) {
  const int nmax = series.n_max;
  JointState st;
  st.basis = JointState::Basis::transformed;
  st.c1.resize(nmax + 1);
  st.c2.assign(std::max(nmax, 0), cx{0.0, 0.0});
  // unpaired ground sector: pure phase
  st.c1[0] = series.coefficients[0] * std::polar(1.0, 0.5 * delta * t);
  for (int n = 1; n <= nmax; ++n) {
    const double om = rabi_freq(n, lambda, delta);
    const double half = 0.5 * om * t;
    const cx bn = series.coefficients[n];
    st.c1[n] = bn * cx{std::cos(half), (delta / om) * std::sin(half)};
    st.c2[n - 1] = -bn * (2.0 * lambda * std::sqrt(static_cast<double>(n)) / om) *
                   std::sin(half);
  }
  return st;
}

namespace {

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("time grid is empty");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw std::invalid_argument("time grid must be strictly increasing");
  if (grid.front() < 0.0) throw std::invalid_argument("time grid must be nonnegative");
}

}  // namespace

TimeSeries ground_prob(const AmplitudeSeries& series, double lambda,
                       const std::vector<double>& grid) {
  check_grid(grid);
  TimeSeries ts;
  ts.times = grid;
  ts.values.reserve(grid.size());
  std::vector<double> w(series.n_max + 1), freq(series.n_max + 1);
  for (int n = 0; n <= series.n_max; ++n) {
    w[n] = std::norm(series.coefficients[n]);
    freq[n] = 2.0 * std::sqrt(static_cast<double>(n));  // per unit lambda*t
  }
  (void)lambda;  // curves are reported against lambda*t
  for (double tau : grid) {
    double s = 0.0, c = 0.0;
    for (int n = 0; n <= series.n_max; ++n) {
      double x = 0.5 * w[n] * (1.0 + std::cos(freq[n] * tau));
      double t2 = s + x;
      c += (std::abs(s) >= std::abs(x)) ? (s - t2) + x : (x - t2) + s;
      s = t2;
    }
    ts.values.push_back(s + c);
  }
  return ts;
}

TimeSeries ground_prob_detuned(const AmplitudeSeries& series, double lambda,
                               double delta, const std::vector<double>& grid) {
  check_grid(grid);
  TimeSeries ts;
  ts.times = grid;
  ts.values.reserve(grid.size());
  for (double tau : grid) {
    JointState st = amplitudes_analytic(series, lambda, delta, tau / lambda);
    double s = 0.0;
    for (const auto& z : st.c1) s += std::norm(z);
    ts.values.push_back(s);
  }
  return ts;
}

TimeSeries ground_prob_jcm(double b, double lambda,
                           const std::vector<double>& grid) {
  if (b < 0.0) throw std::invalid_argument("ground_prob_jcm: b must be >= 0");
  check_grid(grid);
  (void)lambda;
  // Poisson weights with adaptive truncation to 1e-12 tail mass
  std::vector<double> w;
  double wn = std::exp(-b * b);
  double acc = wn;
  w.push_back(wn);
  for (int n = 1; acc < 1.0 - 1e-12 && n < 100000; ++n) {
    wn *= b * b / n;
    w.push_back(wn);
    acc += wn;
  }
  TimeSeries ts;
  ts.times = grid;
  ts.values.reserve(grid.size());
  for (double tau : grid) {
    double s = 0.0, c = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
      double x = 0.5 * w[n] * (1.0 + std::cos(2.0 * std::sqrt(static_cast<double>(n)) * tau));
      double t2 = s + x;
      c += (std::abs(s) >= std::abs(x)) ? (s - t2) + x : (x - t2) + s;
      s = t2;
    }
    ts.values.push_back(s + c);
  }
  return ts;
}

namespace {

// Banded action of the interaction Hamiltonian in units of lambda, atom
// block-major over a bare-mode Fock space of dimension nfock.
struct BandedHamiltonian {
  int nfock = 0;
  double delta_half = 0.0;  // delta / (2 lambda)
  cx g_atom{0.0, 0.0};      // i alpha (atom exchange term)
  double g_jc = 1.0;        // cosh r   (co-rotating coupling)
  cx g_cr{0.0, 0.0};        // e^{i phi} sinh r (counter-rotating coupling)

  static BandedHamiltonian expanded(const ModelParams& p, int nfock) {
    BandedHamiltonian h;
    h.nfock = nfock;
    h.delta_half = 0.5 * p.delta / p.lambda;
    h.g_atom = p.alpha();
    h.g_jc = std::cosh(p.r);
    h.g_cr = std::polar(1.0, p.phi) * std::sinh(p.r);
    return h;
  }
  static BandedHamiltonian ultrastrong(const ModelParams& p, int nfock) {
    BandedHamiltonian h;
    h.nfock = nfock;
    h.delta_half = 0.5 * p.delta / p.lambda;
    h.g_atom = 0.0;
    h.g_jc = 0.5 * std::exp(p.r);
    h.g_cr = -h.g_jc;  // e^{i pi} sinh -> -e^r/2
    return h;
  }

  // out = (H / lambda) in ; layout [ground(0..N), excited(0..N)]
  void apply(const Vector& in, Vector& out) const {
    const int n = nfock;
    const cx i{0.0, 1.0};
    for (int k = 0; k < n; ++k) {
      cx acc = -delta_half * in[k] - i * std::conj(g_atom) * in[n + k];
      if (k > 0) acc += i * g_jc * std::sqrt(static_cast<double>(k)) * in[n + k - 1];
      if (k + 1 < n) acc += i * std::conj(g_cr) * std::sqrt(k + 1.0) * in[n + k + 1];
      out[k] = acc;
    }
    for (int k = 0; k < n; ++k) {
      cx acc = delta_half * in[n + k] + i * g_atom * in[k];
      if (k + 1 < n) acc -= i * g_jc * std::sqrt(k + 1.0) * in[k + 1];
      if (k > 0) acc -= i * g_cr * std::sqrt(static_cast<double>(k)) * in[k - 1];
      out[n + k] = acc;
    }
  }

  double spectral_bound() const {
    return std::abs(delta_half) + std::abs(g_atom) +
           2.0 * (g_jc + std::abs(g_cr)) * std::sqrt(static_cast<double>(nfock));
  }
};

Matrix assemble_dense(const BandedHamiltonian& h) {
  const int n = h.nfock;
  Matrix m = Matrix::Zero(2 * n, 2 * n);
  Vector e = Vector::Zero(2 * n), col(2 * n);
  for (int j = 0; j < 2 * n; ++j) {
    e.setZero();
    e[j] = 1.0;
    h.apply(e, col);
    m.col(j) = col;
  }
  return m;
}

// Coherent-state amplitudes of D(beta)|0> in log space.
Vector coherent_column(cx beta, int n) {
  Vector v = Vector::Zero(n);
  const double b = std::abs(beta);
  if (b == 0.0) {
    v[0] = 1.0;
    return v;
  }
  const double chi = std::arg(beta);
  for (int k = 0; k < n; ++k) {
    double lg = k * std::log(b) - 0.5 * b * b - 0.5 * specfun::log_factorial(k);
    if (lg > -745.0) v[k] = std::polar(std::exp(lg), chi * k);
  }
  return v;
}

struct Rk4Workspace {
  Vector k1, k2, k3, k4, tmp;
  void resize(int n) { k1.resize(n); k2.resize(n); k3.resize(n); k4.resize(n); tmp.resize(n); }
};

// One RK4 step of dpsi/dtau = -i H psi (H in lambda units, tau = lambda t).
void rk4_step(const BandedHamiltonian& h, Vector& psi, double dt, Rk4Workspace& w) {
  const cx mi{0.0, -1.0};
  h.apply(psi, w.k1);
  w.k1 *= mi;
  w.tmp = psi + 0.5 * dt * w.k1;
  h.apply(w.tmp, w.k2);
  w.k2 *= mi;
  w.tmp = psi + 0.5 * dt * w.k2;
  h.apply(w.tmp, w.k3);
  w.k3 *= mi;
  w.tmp = psi + dt * w.k3;
  h.apply(w.tmp, w.k4);
  w.k4 *= mi;
  psi += (dt / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);
}

int initial_dimension(const ModelParams& p, const TruncationSpec& spec, int cap,
                      bool ultrastrong, double t_end) {
  double ext;
  if (ultrastrong) {
    // runaway conditional displacement: extent grows linearly in time
    double drift = p.b + 0.5 * std::exp(p.r) * t_end;
    ext = fock::displaced_support(0, drift);
  } else {
    // transformed-mode support, stretched by the squeeze into the bare basis
    double dmag = std::abs(states::gamma_param(p.b, p.chi, p.r, p.phi) - p.alpha());
    double sigma = dmag * std::exp(p.r) + 0.5 * std::sinh(2.0 * p.r) + 1.0;
    double nb = dmag * dmag + std::sinh(p.r) * std::sinh(p.r) + 8.0 * sigma + 16.0;
    double shift = std::abs(p.alpha() * std::cosh(p.r) -
                            std::conj(p.alpha()) * std::polar(1.0, p.phi) * std::sinh(p.r));
    int na = fock::squeezed_support(static_cast<int>(nb), p.r);
    ext = fock::displaced_support(na, shift);
  }
  int n = spec.retained;
  while (n < ext && n < cap) n *= 2;
  return std::min(n, cap);
}

}  // namespace

Matrix hamiltonian_matrix(const ModelParams& params, const TruncationSpec& spec) {
  params.validate();
  spec.validate();
  Matrix m = assemble_dense(BandedHamiltonian::expanded(params, spec.retained));
  return m * params.lambda;  // back to physical units (hbar = 1)
}

Matrix hamiltonian_ultrastrong(const ModelParams& params, const TruncationSpec& spec) {
  params.validate();
  spec.validate();
  Matrix m = assemble_dense(BandedHamiltonian::ultrastrong(params, spec.retained));
  return m * params.lambda;
}

TimeSeries evolve(const ModelParams& params, const TruncationSpec& spec,
                  const std::vector<double>& grid, const EvolveOptions& opt) {
  params.validate();
  spec.validate();
  check_grid(grid);
  if (!(opt.dt > 0.0)) throw std::invalid_argument("evolve: dt must be > 0");

  int nfock = initial_dimension(params, spec, opt.retained_cap, opt.ultrastrong,
                                grid.back());
  int escalations = 0;

  for (;;) {
    BandedHamiltonian h = opt.ultrastrong
                              ? BandedHamiltonian::ultrastrong(params, nfock)
                              : BandedHamiltonian::expanded(params, nfock);
    if (h.spectral_bound() * opt.dt > 2.5)
      throw std::invalid_argument(
          "evolve: step too large for stable fixed-step integration at dimension " +
          std::to_string(nfock));
    Vector psi = Vector::Zero(2 * nfock);
    psi.head(nfock) = coherent_column(params.beta(), nfock);
    Rk4Workspace w;
    w.resize(2 * nfock);

    TimeSeries ts;
    ts.times = grid;
    ts.params = params;
    ts.retained_used = nfock;
    ts.escalations = escalations;
    ts.values.reserve(grid.size());

    const int edge_from = nfock - nfock / 10;
    double tau = 0.0;
    bool breached = false;
    for (double target : grid) {
      while (tau + opt.dt <= target + 1e-12) {
        rk4_step(h, psi, opt.dt, w);
        tau += opt.dt;
      }
      if (target - tau > 1e-12) {
        rk4_step(h, psi, target - tau, w);
        tau = target;
      }
      double p = psi.head(nfock).squaredNorm();
      ts.values.push_back(p);
      double drift = std::abs(psi.squaredNorm() - 1.0) / (1.0 + tau);
      ts.norm_drift = std::max(ts.norm_drift, drift);
      double edge = psi.segment(edge_from, nfock - edge_from).squaredNorm() +
                    psi.segment(nfock + edge_from, nfock - edge_from).squaredNorm();
      ts.edge_population = std::max(ts.edge_population, edge);
      if (edge > opt.edge_tol) { breached = true; break; }
      if (drift > opt.norm_tol)
        throw std::runtime_error("evolve: norm drift " + std::to_string(drift) +
                                 " exceeded tolerance at lambda t = " + std::to_string(tau));
    }
    if (!breached) return ts;
    if (nfock >= opt.retained_cap)
      throw fock::TruncationError(
          "evolve: state reached the Fock ceiling at the escalation cap (dimension " +
              std::to_string(nfock) + ", edge population " +
              std::to_string(ts.edge_population) + ")",
          ts.edge_population);
    nfock = std::min(2 * nfock, opt.retained_cap);
    ++escalations;
  }
}

double nonrwa_residual(const ModelParams& params, const TruncationSpec& spec,
                       const std::vector<double>& sample_times, double dt_inner) {
  params.validate();
  spec.validate();
  check_grid(sample_times);
  if (!(dt_inner > 0.0)) throw std::invalid_argument("nonrwa_residual: dt_inner must be > 0");

  // The recursion holds for the strong-squeeze limit form at resonance.
  ModelParams p = params;
  p.delta = 0.0;
  p.a = 0.0;

  int nfock = initial_dimension(p, spec, spec.retained, true, sample_times.back() + dt_inner);
  nfock = std::max(nfock, spec.retained);
  BandedHamiltonian h = BandedHamiltonian::ultrastrong(p, nfock);
  const double g = 0.5 * std::exp(p.r);  // coupling of the limit form, in lambda units

  Vector psi = Vector::Zero(2 * nfock);
  psi.head(nfock) = coherent_column(p.beta(), nfock);
  Rk4Workspace w;
  w.resize(2 * nfock);

  const int ncheck = static_cast<int>(0.8 * nfock);
  double tau = 0.0;
  double max_resid = 0.0;
  Vector prev, mid;
  for (double target : sample_times) {
    // land on target - dt_inner, then record three consecutive steps
    double pre = target - dt_inner;
    if (pre < tau - 1e-15) throw std::invalid_argument("nonrwa_residual: samples too close");
    while (tau + dt_inner <= pre + 1e-12) {
      rk4_step(h, psi, dt_inner, w);
      tau += dt_inner;
    }
    if (pre - tau > 1e-12) {
      rk4_step(h, psi, pre - tau, w);
      tau = pre;
    }
    prev = psi;
    rk4_step(h, psi, dt_inner, w);
    mid = psi;
    rk4_step(h, psi, dt_inner, w);
    tau = target + dt_inner;
    // centered second difference vs the three-term recursion, both sectors
    const double h2 = dt_inner * dt_inner;
    for (int sector = 0; sector < 2; ++sector) {
      const int off = sector * nfock;
      for (int n = 0; n < ncheck; ++n) {
        cx second = (psi[off + n] - 2.0 * mid[off + n] + prev[off + n]) / h2;
        cx rhs = -(g * g) * (2.0 * n + 1.0) * mid[off + n];
        if (n + 2 < nfock)
          rhs += (g * g) * std::sqrt((n + 1.0) * (n + 2.0)) * mid[off + n + 2];
        if (n >= 2)
          rhs += (g * g) * std::sqrt(n * (n - 1.0)) * mid[off + n - 2];
        max_resid = std::max(max_resid, std::abs(second - rhs));
      }
    }
  }
  return max_resid;
}

double longtime_average(const TimeSeries& series, double t_lo, double t_hi) {
  if (series.times.size() < 2) throw std::invalid_argument("longtime_average: series too short");
  if (t_lo < series.times.front() - 1e-12 || t_hi > series.times.back() + 1e-12 ||
      !(t_lo < t_hi))
    throw std::invalid_argument("longtime_average: window outside the series range");
  if (t_hi - t_lo < 10.0)
    throw std::invalid_argument(
        "longtime_average: window too short, must cover at least ten collapse times");
  double area = 0.0, span = 0.0;
  for (std::size_t i = 0; i + 1 < series.times.size(); ++i) {
    double a = std::max(series.times[i], t_lo);
    double b = std::min(series.times[i + 1], t_hi);
    if (b <= a) continue;
    double dt = series.times[i + 1] - series.times[i];
    auto at = [&](double t) {
      double u = (t - series.times[i]) / dt;
      return (1.0 - u) * series.values[i] + u * series.values[i + 1];
    };
    area += 0.5 * (at(a) + at(b)) * (b - a);
    span += b - a;
  }
  return area / span;
}

}  // namespace sqjcm::dynamics
