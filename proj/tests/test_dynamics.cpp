#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "sqjcm/dynamics.hpp"
#include "sqjcm/states.hpp"

using namespace sqjcm;
using namespace sqjcm::dynamics;
using cx = std::complex<double>;

namespace {

ModelParams aligned_params(double a, double b, double r) {
  ModelParams p;
  p.a = a;
  p.b = b;
  p.r = r;
  return p;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

AmplitudeSeries single_mode_series(int n) {
  AmplitudeSeries s;
  s.n_max = n;
  s.coefficients.assign(n + 1, cx{0.0, 0.0});
  s.coefficients[n] = 1.0;
  s.tail_mass = 0.0;
  return s;
}

}  // namespace

TEST_CASE("rabi_freq") {
  CHECK(rabi_freq(0, 1.0, -3.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(rabi_freq(4, 1.0, 0.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(rabi_freq(4, 1.0, 3.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK_THROWS_AS(rabi_freq(-1, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rabi_freq(1, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("amplitudes_analytic initial condition and complete transfer") {
  auto series = states::build_series(aligned_params(0, 2, 0), 1e-10);
  auto st0 = amplitudes_analytic(series, 1.0, 0.0, 0.0);
  for (int n = 0; n <= series.n_max; ++n)
    CHECK(std::abs(st0.c1[n] - series.coefficients[n]) < 1e-15);
  for (const auto& z : st0.c2) CHECK(std::abs(z) == 0.0);

  // single-mode pi pulse: at resonance sin(lambda sqrt(1) t) = 1 empties c1
  auto one = single_mode_series(1);
  auto st = amplitudes_analytic(one, 1.0, 0.0, M_PI / 2.0);
  CHECK(std::abs(std::abs(st.c2[0]) - 1.0) < 1e-14);
  CHECK(std::abs(st.c1[1]) < 1e-14);
}

TEST_CASE("analytic evolution conserves norm and excitation number") {
  auto series = states::build_series(aligned_params(10, 2, 0.1), 1e-9);
  auto st0 = amplitudes_analytic(series, 1.0, 0.0, 0.0);
  double n0 = st0.excitation_number();
  for (double t : {1.0, 5.0, 17.3}) {
    auto st = amplitudes_analytic(series, 1.0, 0.0, t);
    CHECK(std::abs(st.norm2() - 1.0) < 1e-9);
    CHECK(std::abs(st.excitation_number() - n0) < 1e-8);
  }
}

TEST_CASE("detuned single-mode population matches the two-level formula and direct integration") {
  auto one = single_mode_series(1);
  const double delta = 0.7, lambda = 1.0;
  const double om = rabi_freq(1, lambda, delta);
  for (double t : {0.3, 1.1, 2.9, 7.7}) {
    auto st = amplitudes_analytic(one, lambda, delta, t);
    double p = 0.0;
    for (const auto& z : st.c1) p += std::norm(z);
    double expect = std::pow(std::cos(0.5 * om * t), 2) +
                    std::pow(delta / om * std::sin(0.5 * om * t), 2);
    CHECK(std::abs(p - expect) < 1e-14);
  }
  // direct 2x2 integration of the doublet equations
  cx c1{1.0, 0.0}, c2{0.0, 0.0};
  const double dt = 1e-4, t_end = 2.9;
  auto rhs = [&](cx a, cx b, cx& da, cx& db) {
    da = cx(0, 0.5 * delta) * a + lambda * b;
    db = cx(0, -0.5 * delta) * b - lambda * a;
  };
  int steps = static_cast<int>(t_end / dt + 0.5);
  for (int i = 0; i < steps; ++i) {
    cx k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
    rhs(c1, c2, k1a, k1b);
    rhs(c1 + 0.5 * dt * k1a, c2 + 0.5 * dt * k1b, k2a, k2b);
    rhs(c1 + 0.5 * dt * k2a, c2 + 0.5 * dt * k2b, k3a, k3b);
    rhs(c1 + dt * k3a, c2 + dt * k3b, k4a, k4b);
    c1 += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    c2 += dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
  }
  auto st = amplitudes_analytic(one, lambda, delta, t_end);
  CHECK(std::abs(st.c1[1] - c1) < 1e-10);
  CHECK(std::abs(st.c2[0] - c2) < 1e-10);
}

TEST_CASE("detuned curve respects the coupling units") {
  // lambda != 1: the grid stays in lambda*t, so the curve must match the
  // single-doublet formula with Omega t / 2 = sqrt((delta/lambda)^2 + 4) tau / 2
  auto one = single_mode_series(1);
  const double lambda = 2.0, delta = 1.4;
  std::vector<double> grid = linspace(0, 6, 61);
  auto ts = ground_prob_detuned(one, lambda, delta, grid);
  const double om_red = std::sqrt(std::pow(delta / lambda, 2) + 4.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double half = 0.5 * om_red * grid[i];
    double expect = std::pow(std::cos(half), 2) +
                    std::pow((delta / lambda) / om_red * std::sin(half), 2);
    CHECK(std::abs(ts.values[i] - expect) < 1e-13);
  }
}

TEST_CASE("ground_prob at t = 0 and for the vacuum field") {
  auto series = states::build_series(aligned_params(0, 2, 0), 1e-8);
  auto ts = ground_prob(series, 1.0, linspace(0, 10, 101));
  CHECK(std::abs(ts.values.front() - 1.0) <= series.tail_mass + 1e-12);
  for (double v : ts.values) {
    CHECK(v >= -1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }

  auto vac = states::build_series(aligned_params(0, 0, 0), 1e-10);
  auto flat = ground_prob(vac, 1.0, linspace(0, 20, 41));
  for (double v : flat.values) CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("ground_prob_jcm basics and revival placement") {
  auto flat = ground_prob_jcm(0.0, 1.0, linspace(0, 10, 21));
  for (double v : flat.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

  auto grid = linspace(0, 30, 6001);
  auto ts = ground_prob_jcm(2.0, 1.0, grid);
  CHECK(std::abs(ts.values.front() - 1.0) < 1e-10);
  // first revival: maximum over [pi b, 3 pi b]
  double best_t = 0, best = -1;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] > M_PI * 2.0 && grid[i] < 3 * M_PI * 2.0 && ts.values[i] > best) {
      best = ts.values[i];
      best_t = grid[i];
    }
  CHECK(best_t > 2 * M_PI * 2.0 - 2.0);
  CHECK(best_t < 2 * M_PI * 2.0 + 2.0);
}

TEST_CASE("hamiltonian_matrix is hermitian with the plain-model block structure") {
  ModelParams p = aligned_params(1.0, 2.0, 0.4);
  p.theta = 0.3;
  p.chi = 0.3;
  p.phi = 0.6;
  p.delta = 0.8;
  TruncationSpec spec{24, 48};
  Matrix h = hamiltonian_matrix(p, spec);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

  // r = 0, a = 0: couplings only within the (ground n) <-> (excited n-1) doublets
  Matrix h0 = hamiltonian_matrix(aligned_params(0, 2, 0), spec);
  const int nf = 24;
  for (int i = 0; i < 2 * nf; ++i)
    for (int j = 0; j < 2 * nf; ++j) {
      if (std::abs(h0(i, j)) == 0.0) continue;
      bool diag = (i == j);
      bool doublet = (i >= nf && j < nf && j == (i - nf) + 1) ||
                     (j >= nf && i < nf && i == (j - nf) + 1);
      CHECK((diag || doublet));
    }
}

TEST_CASE("strong-squeeze limit form approximates the expanded Hamiltonian at large r") {
  ModelParams p = aligned_params(0, 1, 3.0);
  p.phi = M_PI;
  p.theta = M_PI / 2.0;
  p.chi = M_PI / 2.0;
  TruncationSpec spec{16, 32};
  Matrix full = hamiltonian_matrix(p, spec);
  Matrix limit = hamiltonian_ultrastrong(p, spec);
  double worst = 0.0;
  for (int i = 0; i < full.rows(); ++i)
    for (int j = 0; j < full.cols(); ++j)
      if (std::abs(limit(i, j)) > 1e-14)
        worst = std::max(worst,
                         std::abs(full(i, j) - limit(i, j)) / std::abs(limit(i, j)));
  CHECK(worst < 1e-2);
  CHECK(worst > 1e-4);  // the difference is real, order e^{-2r}
}

TEST_CASE("evolve starts at P = 1 and reproduces the plain-model curve at r = 0") {
  ModelParams p = aligned_params(0, 2, 0);
  TruncationSpec spec{64, 128};
  auto grid = linspace(0, 30, 301);
  auto direct = evolve(p, spec, grid);
  CHECK(std::abs(direct.values.front() - 1.0) < 1e-9);
  auto reference = ground_prob_jcm(2.0, 1.0, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(direct.values[i] - reference.values[i]));
  CHECK(worst < 1e-6);
  CHECK(direct.norm_drift < 1e-9);
}

TEST_CASE("evolve matches the transformed-basis route off the plain model") {
  ModelParams p = aligned_params(10, 2, 0.1);
  auto series = states::build_series(p, 1e-9);
  auto grid = linspace(0, 10, 201);
  auto analytic = ground_prob(series, 1.0, grid);
  auto direct = evolve(p, TruncationSpec{256, 320}, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(direct.values[i] - analytic.values[i]));
  CHECK(worst < 1e-5);
}

TEST_CASE("evolve reports a hard truncation breach at the cap") {
  ModelParams p = aligned_params(0, 5, 0.9);
  EvolveOptions opt;
  opt.retained_cap = 64;  // far below what this state needs
  CHECK_THROWS_AS(evolve(p, TruncationSpec{64, 128}, linspace(0, 12, 25), opt),
                  fock::TruncationError);
}

TEST_CASE("counter-rotating recursion residual is finite-difference limited") {
  ModelParams p = aligned_params(0, 1, std::log(2.0));
  p.phi = M_PI;
  p.theta = M_PI / 2.0;
  p.chi = M_PI / 2.0;
  TruncationSpec spec{160, 224};
  std::vector<double> samples{0.5, 1.0, 1.5};
  double res1 = nonrwa_residual(p, spec, samples, 1e-3);
  CHECK(res1 < 1e-4);
  double res2 = nonrwa_residual(p, spec, samples, 5e-4);
  double ratio = res1 / res2;
  CHECK(ratio > 2.5);
  CHECK(ratio < 6.0);
}

TEST_CASE("longtime_average") {
  TimeSeries flat;
  flat.times = linspace(0, 100, 1001);
  flat.values.assign(1001, 1.0);
  CHECK(longtime_average(flat, 10, 90) == doctest::Approx(1.0).epsilon(1e-14));

  TimeSeries cosine;
  cosine.times = linspace(0, 200, 20001);
  cosine.values.resize(cosine.times.size());
  const double om = 2.0;
  for (std::size_t i = 0; i < cosine.times.size(); ++i)
    cosine.values[i] = 0.5 * (1.0 + std::cos(om * cosine.times[i]));
  double mean = longtime_average(cosine, 20, 180);
  CHECK(std::abs(mean - 0.5) < 1.0 / (om * 160.0) + 1e-3);

  CHECK_THROWS_AS(longtime_average(flat, 10, 15), std::invalid_argument);
  CHECK_THROWS_AS(longtime_average(flat, -5, 90), std::invalid_argument);
}
