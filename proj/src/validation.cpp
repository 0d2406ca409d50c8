#include "sqjcm/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <sstream>

#include "sqjcm/dynamics.hpp"
#include "sqjcm/fock_oracle.hpp"
#include "sqjcm/states.hpp"

namespace sqjcm::validation {

using fock::Complex;
using fock::Matrix;
using fock::TruncationSpec;
using fock::Vector;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

ModelParams aligned_params(double a, double b, double r, double chi = 0.0) {
  ModelParams p;
  p.a = a;
  p.b = b;
  p.r = r;
  p.chi = chi;
  p.theta = chi;
  p.phi = 2.0 * chi;
  return p.reduced();
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

class Runner {
 public:
  explicit Runner(const Options& opt) : opt_(opt) {}

  Report take() { return std::move(report_); }

  void check(const std::string& name, double tolerance,
             const std::function<double(std::string&)>& metric) {
    if (!selected(name)) return;
    CheckResult r;
    r.name = name;
    r.tolerance = tolerance;
    auto t0 = std::chrono::steady_clock::now();
    try {
      r.residual = metric(r.note);
      r.pass = r.residual <= tolerance;
    } catch (const std::exception& e) {
      r.pass = false;
      r.residual = std::numeric_limits<double>::infinity();
      r.note = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report_.checks.push_back(std::move(r));
  }

  // interval check: value must land in [lo, hi]; residual is the distance to the
  // interval (0 inside)
  void check_window(const std::string& name, double lo, double hi,
                    const std::function<double(std::string&)>& value_of) {
    check(name, 0.0, [&](std::string& note) {
      double v = value_of(note);
      note += (note.empty() ? "" : "; ") + std::string("value = ") + fmt(v) +
              " in [" + fmt(lo) + ", " + fmt(hi) + "]";
      if (v < lo) return lo - v;
      if (v > hi) return v - hi;
      return 0.0;
    });
  }

  const Matrix& displacement(Complex alpha, int dim) {
    return cached("D", alpha, dim, [&] { return fock::displacement_full(alpha, dim); });
  }
  const Matrix& squeeze(Complex zeta, int dim) {
    return cached("S", zeta, dim, [&] { return fock::squeeze_full(zeta, dim); });
  }

 private:
  bool selected(const std::string& name) const {
    if (opt_.filter.empty()) return true;
    for (const auto& f : opt_.filter)
      if (name.find(f) != std::string::npos) return true;
    return false;
  }

  template <class Make>
  const Matrix& cached(const char* kind, Complex par, int dim, Make&& make) {
    std::ostringstream key;
    key << kind << ':' << dim << ':' << par.real() << ':' << par.imag();
    auto it = cache_.find(key.str());
    if (it == cache_.end()) it = cache_.emplace(key.str(), make()).first;
    return it->second;
  }

  Options opt_;
  Report report_;
  std::map<std::string, Matrix> cache_;
};

constexpr int kEdgeBand = 32;
constexpr double kEdgeTol = 1e-10;

// Columns are usable while they keep the buffer edge band clean: an
// edge-touching column reflects off the truncation wall and is corrupted
// everywhere, so it must not enter any comparison.
int edge_clean_prefix(const Matrix& m) {
  int n = 0;
  while (n < m.cols() && m.col(n).tail(kEdgeBand).norm() <= kEdgeTol) ++n;
  return n;
}

// Residual of X == Y over columns whose buffer edge band stays clean on both
// sides. Both arguments are leading column blocks at buffer dimension.
// Returns the max entry difference over retained rows; fails loudly if too
// few columns qualify (a vacuous identity check must not pass).
double confined_column_residual(const Matrix& x, const Matrix& y, int retained,
                                int min_cols, std::string& note) {
  const int ncols = static_cast<int>(std::min(x.cols(), y.cols()));
  double resid = 0.0;
  int included = 0, misses = 0;
  for (int n = 0; n < ncols && misses < 8; ++n) {
    if (x.col(n).tail(kEdgeBand).norm() > kEdgeTol ||
        y.col(n).tail(kEdgeBand).norm() > kEdgeTol) {
      ++misses;
      continue;
    }
    misses = 0;
    ++included;
    resid = std::max(resid, (x.col(n) - y.col(n)).head(retained).cwiseAbs().maxCoeff());
  }
  if (included < min_cols)
    throw std::runtime_error("identity check region too small: " +
                             std::to_string(included) + " confined columns");
  note = std::to_string(included) + " confined columns";
  return resid;
}

struct CoeffSet {
  const char* tag;
  double a, b, r, chi;
  int retained;
};

constexpr CoeffSet kCoeffSets[] = {
    {"a10_b2_r0.1", 10, 2, 0.1, 0.0, 512},
    {"a0_b5_r0.9", 0, 5, 0.9, 0.0, 512},
    {"a15_b5_r0", 15, 5, 0.0, 0.0, 512},
    {"a0_b1_r2.3", 0, 1, 2.3, 0.0, 1024},
    {"phased_a10_b2_r0.1", 10, 2, 0.1, 0.7, 512},
};

constexpr CoeffSet kQuickCoeffSets[] = {
    {"a0_b2_r0", 0, 2, 0.0, 0.0, 128},
    {"a15_b5_r0", 15, 5, 0.0, 0.0, 256},
    {"phased_a3_b2_r0", 3, 2, 0.0, 0.9, 128},
};

void coefficient_checks(Runner& run, const Options& opt) {
  const auto sets = opt.quick ? std::vector<CoeffSet>(std::begin(kQuickCoeffSets),
                                                      std::end(kQuickCoeffSets))
                              : std::vector<CoeffSet>(std::begin(kCoeffSets),
                                                      std::end(kCoeffSets));
  states::detail::Defect defect = states::detail::Defect::none;
  if (opt.defects.drop_chi_phase) defect = states::detail::Defect::drop_chi_phase;

  for (const auto& s : sets) {
    ModelParams p = aligned_params(s.a, s.b, s.r, s.chi);
    run.check(std::string("bn_oracle_") + s.tag, 1e-7, [&](std::string& note) {
      auto series = states::detail::build_series_impl(p, 1e-8, {}, defect);
      auto oracle = fock::bn_numeric(p.alpha(), p.zeta(), p.beta(),
                                     TruncationSpec{s.retained, s.retained + 128});
      int ncmp = std::min(series.n_max, oracle.n_max);
      double worst = 0.0;
      for (int n = 0; n <= ncmp; ++n)
        worst = std::max(worst,
                         std::abs(series.coefficients[n] - oracle.coefficients[n]));
      note = "n <= " + std::to_string(ncmp);
      return worst;
    });
    run.check(std::string("normalization_") + s.tag, 1e-6, [&](std::string& note) {
      auto series = states::detail::build_series_impl(p, 1e-8, {}, defect);
      double mass = series.mass();
      note = "mass = " + fmt(mass) + ", tail = " + fmt(series.tail_mass);
      double overshoot = std::max(0.0, mass - (1.0 + 1e-9)) * 1e3;
      return std::abs(mass + series.tail_mass - 1.0) + overshoot;
    });
  }
  if (!opt.quick) {
    ModelParams baseline = aligned_params(0, 2, 0);
    run.check("normalization_a0_b2_r0", 1e-6, [&](std::string& note) {
      auto series = states::build_series(baseline, 1e-8);
      note = "mass = " + fmt(series.mass());
      return std::abs(series.mass() + series.tail_mass - 1.0);
    });
    run.check("aligned_general_consistency", 1e-12, [&](std::string& note) {
      ModelParams p = aligned_params(0, 5, 0.9, 0.4);
      double worst = 0.0;
      for (int n = 0; n <= 380; n += 19)
        worst = std::max(worst, std::abs(states::bn_general(p, n) - states::bn_aligned(p, n)));
      note = "a0_b5_r0.9, chi = 0.4";
      return worst;
    });
  }
}

void identity_checks(Runner& run, const Options& opt) {
  states::detail::Defect gdefect = opt.defects.flip_sinh_sign
                                       ? states::detail::Defect::flip_sinh_sign
                                       : states::detail::Defect::none;
  // buffer deep enough that the worst grid point (|gamma| = 5e) keeps the
  // edge band below 1e-10 even through the squeeze-stretched tails
  const int dim = opt.quick ? 320 : 768;
  const int retained = opt.quick ? 224 : 512;
  const std::vector<double> phases = {0.0, M_PI / 2.0, M_PI};

  run.check("identity_reorder_squeeze_displace", 1e-8, [&](std::string& note) {
    std::vector<double> bs = opt.quick ? std::vector<double>{2.0} : std::vector<double>{2.0, 5.0};
    std::vector<double> rs = opt.quick ? std::vector<double>{0.3} : std::vector<double>{0.5, 1.0};
    double worst = 0.0;
    int points = 0;
    for (double b : bs)
      for (double r : rs)
        for (double chi : phases)
          for (double phi : phases) {
            Complex beta = std::polar(b, chi);
            Complex zeta = std::polar(r, phi);
            Complex gamma = states::detail::gamma_param_impl(b, chi, r, phi, gdefect);
            // intermediates must be edge-clean too: a displacement could
            // otherwise shift squeeze-corrupted columns back inside
            int probe = std::min({dim, 160, edge_clean_prefix(run.squeeze(-zeta, dim)),
                                  edge_clean_prefix(run.displacement(beta, dim))});
            probe = std::max(probe, 1);
            Matrix lhs = run.squeeze(-zeta, dim) * run.displacement(beta, dim).leftCols(probe);
            Matrix rhs = run.displacement(gamma, dim) * run.squeeze(-zeta, dim).leftCols(probe);
            std::string colnote;
            // at the harshest corner (b = 5, r = 1, |gamma| = 5e) only the
            // lowest couple of columns stay buffer-confined; they still
            // compare the full squeezed-coherent column structure
            worst = std::max(worst,
                             confined_column_residual(lhs, rhs, retained, 2, colnote));
            ++points;
          }
    note = std::to_string(points) + " grid points";
    return worst;
  });

  run.check("identity_compose_displacements", 1e-8, [&](std::string& note) {
    std::vector<Complex> alphas = {std::polar(2.0, 0.0), std::polar(5.0, M_PI / 2.0),
                                   std::polar(3.0, M_PI)};
    std::vector<Complex> gammas = {std::polar(1.5, 0.0), std::polar(4.0, M_PI / 2.0),
                                   std::polar(5.0, M_PI)};
    if (opt.quick) {
      alphas.resize(2);
      gammas.resize(2);
    }
    double worst = 0.0;
    for (Complex alpha : alphas)
      for (Complex gamma : gammas) {
        Complex scalar =
            std::exp(-0.5 * (alpha * std::conj(gamma) - gamma * std::conj(alpha)));
        int probe = std::min({dim, 288, edge_clean_prefix(run.displacement(gamma, dim))});
        probe = std::max(probe, 1);
        Matrix lhs =
            run.displacement(-alpha, dim) * run.displacement(gamma, dim).leftCols(probe);
        Matrix rhs = scalar * run.displacement(gamma - alpha, dim).leftCols(probe);
        std::string colnote;
        worst = std::max(worst, confined_column_residual(lhs, rhs, retained, 8, colnote));
      }
    note = "phases checked unit-modulus separately";
    return worst;
  });

  run.check("identity_compose_scalar_unit_modulus", 1e-14, [&](std::string&) {
    double worst = 0.0;
    for (double ma : {0.5, 2.0, 5.0})
      for (double mg : {1.0, 3.5, 5.0})
        for (double ph : {0.3, 1.7, 4.0}) {
          Complex alpha = std::polar(ma, ph);
          Complex gamma = std::polar(mg, 2.0 * ph + 0.4);
          Complex scalar =
              std::exp(-0.5 * (alpha * std::conj(gamma) - gamma * std::conj(alpha)));
          worst = std::max(worst, std::abs(std::abs(scalar) - 1.0));
        }
    return worst;
  });

  fock::detail::Defect bdefect = opt.defects.flip_sinh_sign
                                     ? fock::detail::Defect::flip_sinh_sign
                                     : fock::detail::Defect::none;

  run.check("ladder_residual", 1e-8, [&](std::string& note) {
    struct Pt {
      Complex alpha, zeta;
    };
    std::vector<Pt> pts = {{Complex{1.5, 0.0}, std::polar(0.6, 1.1)},
                           {Complex{0.8, 2.1}, std::polar(1.0, 0.0)},
                           {Complex{3.0, 0.0}, std::polar(0.3, 2.4)}};
    if (opt.quick) pts = {{Complex{1.2, 0.5}, std::polar(0.4, 0.7)}};
    const int nb = opt.quick ? 256 : 448;
    const int keep = opt.quick ? 128 : 224;
    double worst = 0.0;
    for (const auto& pt : pts) {
      const Matrix& d = run.displacement(pt.alpha, nb);
      const Matrix& s = run.squeeze(pt.zeta, nb);
      auto [bop, bdop] = fock::detail::bogoliubov_ops_impl(
          pt.alpha, pt.zeta, TruncationSpec{keep, nb}, bdefect);
      std::vector<Vector> vs;
      for (int n = 0; n <= 21; ++n) vs.push_back(s * d.col(n));
      worst = std::max(worst, (bop * vs[0]).head(keep).norm());  // vacuum condition
      for (int n = 1; n <= 20; ++n) {
        worst = std::max(
            worst,
            (bop * vs[n] - std::sqrt(static_cast<double>(n)) * vs[n - 1]).head(keep).norm());
        worst = std::max(
            worst, (bdop * vs[n] - std::sqrt(n + 1.0) * vs[n + 1]).head(keep).norm());
      }
    }
    note = "n <= 20, " + std::to_string(pts.size()) + " parameter points";
    return worst;
  });

  run.check("commutator_interior", 1e-8, [&](std::string& note) {
    const int nb = 512;
    auto [bop, bdop] = fock::detail::bogoliubov_ops_impl(
        Complex{1.0, 0.5}, std::polar(0.8, 0.9), TruncationSpec{448, nb}, bdefect);
    Matrix comm = bop * bdop - bdop * bop;
    const int skip = std::max(32, nb / 8);
    const int m = nb - skip;
    note = "interior " + std::to_string(m) + " of " + std::to_string(nb);
    return (comm.topLeftCorner(m, m) - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
  });

  run.check("bogoliubov_inverse", 1e-10, [&](std::string&) {
    Complex alpha{1.0, 0.5};
    Complex zeta = std::polar(0.7, 0.8);
    TruncationSpec spec{96, 192};
    auto [bop, bdop] = fock::detail::bogoliubov_ops_impl(alpha, zeta, spec, bdefect);
    auto [a, ad] = fock::ladder_ops(spec);
    double r = std::abs(zeta), phi = std::arg(zeta);
    Matrix rec = std::cosh(r) * bop - std::polar(std::sinh(r), phi) * bdop;
    rec.diagonal().array() +=
        alpha * std::cosh(r) - std::conj(alpha) * std::polar(std::sinh(r), phi);
    return (rec - a).cwiseAbs().maxCoeff();
  });

  if (!opt.quick) {
    run.check("conjugation_form", 1e-9, [&](std::string& note) {
      Complex alpha{1.0, 0.5};
      Complex zeta = std::polar(0.25, 0.8);
      const int nb = 320, keep = 48;
      const Matrix& d = run.displacement(alpha, nb);
      const Matrix& s = run.squeeze(zeta, nb);
      auto [a, ad] = fock::ladder_ops(TruncationSpec{keep, nb});
      Matrix conj_form = s * d * a * d.adjoint() * s.adjoint();
      auto [bop, bdop] =
          fock::detail::bogoliubov_ops_impl(alpha, zeta, TruncationSpec{keep, nb}, bdefect);
      note = "interior block " + std::to_string(keep);
      return (conj_form - bop).topLeftCorner(keep, keep).cwiseAbs().maxCoeff();
    });
  }
}

void dynamics_checks(Runner& run, const Options& opt) {
  if (!opt.quick) {
    struct RouteSet {
      const char* tag;
      double a, b, r;
    } route_sets[] = {{"a10_b2_r0.1", 10, 2, 0.1}, {"a0_b5_r0.9", 0, 5, 0.9}};
    for (const auto& s : route_sets) {
      run.check(std::string("route_equivalence_") + s.tag, 1e-5, [&](std::string& note) {
        ModelParams p = aligned_params(s.a, s.b, s.r);
        auto grid = linspace(0.0, 30.0, 3001);
        auto series = states::build_series(p, 1e-8);
        auto analytic = dynamics::ground_prob(series, p.lambda, grid);
        auto direct = dynamics::evolve(p, TruncationSpec{512, 640}, grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
          worst = std::max(worst, std::abs(analytic.values[i] - direct.values[i]));
        note = "dimension " + std::to_string(direct.retained_used) + ", norm drift " +
               fmt(direct.norm_drift);
        return worst;
      });
    }
  }

  run.check("route_equivalence_jcm_b2", 1e-6, [&](std::string& note) {
    ModelParams p = aligned_params(0, 2, 0);
    auto grid = linspace(0.0, 30.0, 3001);
    auto direct = dynamics::evolve(p, TruncationSpec{128, 192}, grid);
    auto reference = dynamics::ground_prob_jcm(2.0, 1.0, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      worst = std::max(worst, std::abs(direct.values[i] - reference.values[i]));
    note = "coherent baseline, dimension " + std::to_string(direct.retained_used);
    return worst;
  });

  run.check("recursion_residual", 1e-4, [&](std::string& note) {
    ModelParams p = aligned_params(0, 1, std::log(2.0));
    p.phi = M_PI;
    p.theta = M_PI / 2.0;
    p.chi = M_PI / 2.0;
    double res = dynamics::nonrwa_residual(p, TruncationSpec{192, 256},
                                           {0.5, 1.0, 1.5, 2.0}, 1e-3);
    note = "inner step 1e-3";
    return res;
  });

  if (!opt.quick) {
    run.check_window("recursion_order", 3.5, 4.5, [&](std::string& note) {
      ModelParams p = aligned_params(0, 1, std::log(2.0));
      p.phi = M_PI;
      p.theta = M_PI / 2.0;
      p.chi = M_PI / 2.0;
      TruncationSpec spec{192, 256};
      std::vector<double> samples{0.5, 1.0, 1.5, 2.0};
      double r1 = dynamics::nonrwa_residual(p, spec, samples, 1e-3);
      double r2 = dynamics::nonrwa_residual(p, spec, samples, 5e-4);
      note = "residuals " + fmt(r1) + " -> " + fmt(r2);
      return r1 / r2;
    });
  }

  for (double b : opt.quick ? std::vector<double>{2.0} : std::vector<double>{2.0, 5.0}) {
    std::string tag = b == 2.0 ? "b2" : "b5";
    run.check_window("revival_peak_" + tag, 2.0 * M_PI * b - 2.0, 2.0 * M_PI * b + 2.0,
                     [&](std::string& note) {
                       auto grid = linspace(0.0, 3.2 * M_PI * b, 8001);
                       auto ts = dynamics::ground_prob_jcm(b, 1.0, grid);
                       double best = -1.0, best_t = 0.0;
                       for (std::size_t i = 0; i < grid.size(); ++i)
                         if (grid[i] > M_PI * b && ts.values[i] > best) {
                           best = ts.values[i];
                           best_t = grid[i];
                         }
                       note = "peak height " + fmt(best);
                       return best_t;
                     });
  }

  if (!opt.quick) {
    run.check_window("collapse_mean_b5", 0.45, 0.55, [&](std::string& note) {
      auto grid = linspace(0.0, 16.0, 4001);
      auto ts = dynamics::ground_prob_jcm(5.0, 1.0, grid);
      // mean over the quiet window between collapse and first revival
      double area = 0.0;
      int count = 0;
      for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] >= 5.0 && grid[i] <= 8.0) {
          area += ts.values[i];
          ++count;
        }
      note = "window [5, 8]";
      return area / count;
    });

    run.check_window("longtime_conjecture_series", 0.45, 0.55, [&](std::string& note) {
      ModelParams p = aligned_params(0, 1, 2.3);
      auto series = states::build_series(p, 1e-8);
      auto grid = linspace(0.0, 200.0, 8001);
      auto ts = dynamics::ground_prob(series, 1.0, grid);
      double mean = dynamics::longtime_average(ts, 50.0, 200.0);
      note = "conjecture check (the long-time limit is a stated belief, not a theorem); "
             "exact-solution route";
      return mean;
    });

    run.check("ultrastrong_collapse", 1e-3, [&](std::string& note) {
      ModelParams p = aligned_params(0, 1, 2.3);
      p.phi = M_PI;
      p.theta = M_PI / 2.0;
      p.chi = M_PI / 2.0;
      dynamics::EvolveOptions eopt;
      eopt.ultrastrong = true;
      auto grid = linspace(0.0, 6.0, 601);
      auto ts = dynamics::evolve(p, TruncationSpec{512, 640}, grid, eopt);
      double worst = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] >= 3.0) worst = std::max(worst, std::abs(ts.values[i] - 0.5));
      note = "strong-squeeze limit integration, collapse onto 1/2 by lambda t = 3 "
             "(dimension " + std::to_string(ts.retained_used) + ")";
      return worst;
    });
  }
}

}  // namespace

Report run_validation(const Options& opt) {
  Runner run(opt);
  coefficient_checks(run, opt);
  identity_checks(run, opt);
  dynamics_checks(run, opt);
  return run.take();
}

}  // namespace sqjcm::validation
