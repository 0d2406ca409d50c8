#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "sqjcm/fock_oracle.hpp"
#include "sqjcm/specfun.hpp"
#include "sqjcm/states.hpp"

using namespace sqjcm;
using states::bn_aligned;
using states::bn_general;
using states::build_series;
using states::gamma_param;
using cx = std::complex<double>;

namespace {

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

// displaced Poisson amplitude (b e^r - a)^n e^{-(.)^2/2} / sqrt(n!) in logs
double displaced_poisson(double d, int n) {
  if (d == 0.0) return n == 0 ? 1.0 : 0.0;
  double lg = n * std::log(std::abs(d)) - 0.5 * d * d - 0.5 * specfun::log_factorial(n);
  double s = (d < 0 && (n & 1)) ? -1.0 : 1.0;
  return lg < -745.0 ? 0.0 : s * std::exp(lg);
}

}  // namespace

TEST_CASE("gamma_param closed form") {
  CHECK(std::abs(gamma_param(2, 0, 0, 0) - cx(2, 0)) < 1e-15);
  CHECK(std::abs(gamma_param(2, 0, 0.1, 0) - cx(2 * std::exp(0.1), 0)) < 1e-14);
  // beta = i, phi = pi: gamma = i cosh + (-i)(-1) sinh = i e^r
  cx g = gamma_param(1, M_PI / 2, 0.5, M_PI);
  CHECK(std::abs(g - cx(0, std::exp(0.5))) < 1e-14);
  CHECK_THROWS_AS(gamma_param(-1, 0, 0, 0), std::invalid_argument);
}

TEST_CASE("bn_aligned reduces to Poisson amplitudes at r = 0") {
  auto p = aligned_params(0, 2, 0);
  CHECK(std::abs(std::norm(bn_aligned(p, 1)) - 4.0 * std::exp(-4.0)) < 1e-15);
  for (int n = 0; n <= 30; ++n)
    CHECK(std::abs(bn_aligned(p, n) - cx(displaced_poisson(2.0, n), 0)) < 1e-14);
}

TEST_CASE("bn_aligned displaced Poisson with negative effective displacement") {
  auto p = aligned_params(15, 5, 0);
  for (int n : {0, 1, 7, 50, 100, 160})
    CHECK(std::abs(bn_aligned(p, n) - cx(displaced_poisson(-10.0, n), 0)) < 1e-12);
}

TEST_CASE("bn_aligned with matched displacement leaves the vacuum") {
  auto p = aligned_params(2, 2, 0);
  CHECK(std::abs(std::abs(bn_aligned(p, 0)) - 1.0) < 1e-14);
  for (int n = 1; n <= 6; ++n) CHECK(std::abs(bn_aligned(p, n)) == 0.0);
}

TEST_CASE("bn_aligned magnitudes do not depend on the common phase") {
  auto base = aligned_params(0, 2, 0.3, 0.0);
  for (double chi : {1.0, 2.0}) {
    auto p = aligned_params(0, 2, 0.3, chi);
    for (int n = 0; n <= 40; n += 5)
      CHECK(std::abs(std::abs(bn_aligned(p, n)) - std::abs(bn_aligned(base, n))) < 1e-14);
  }
}

TEST_CASE("bn_aligned rejects non-aligned phases and bad input") {
  ModelParams p;
  p.b = 2;
  p.phi = 0.4;  // phi != 2 chi
  CHECK_THROWS_AS(bn_aligned(p, 0), std::invalid_argument);
  CHECK_THROWS_AS(bn_aligned(aligned_params(0, 2, 0), -1), std::invalid_argument);
}

TEST_CASE("bn_general equals bn_aligned under aligned phases") {
  auto p = aligned_params(0, 5, 0.9);
  for (int n = 0; n <= 400; n += 13)
    CHECK(std::abs(bn_general(p, n) - bn_aligned(p, n)) < 1e-12);
  auto q = aligned_params(10, 2, 0.1, 0.6);
  for (int n = 0; n <= 120; n += 7)
    CHECK(std::abs(bn_general(q, n) - bn_aligned(q, n)) < 1e-12);
}

TEST_CASE("squeezed vacuum: only even coefficients survive") {
  ModelParams p;
  p.b = 0;
  p.r = 0.9;
  for (int n = 1; n <= 15; n += 2) CHECK(std::abs(bn_general(p, n)) == 0.0);
  // cross-check the even ladder against the operator-chain oracle
  auto oracle = fock::bn_numeric(0.0, 0.9, 0.0, fock::TruncationSpec{64, 160});
  for (int n = 0; n <= 30; ++n)
    CHECK(std::abs(bn_general(p, n) - oracle.coefficients[n]) < 1e-10);
}

TEST_CASE("bn_general with arbitrary phases matches the operator-chain oracle") {
  ModelParams p;
  p.a = 1.5;
  p.theta = 0.7;
  p.r = 0.4;
  p.phi = 0.9;
  p.b = 1.2;
  p.chi = 0.3;
  REQUIRE_FALSE(p.phase_aligned());
  auto oracle =
      fock::bn_numeric(p.alpha(), p.zeta(), p.beta(), fock::TruncationSpec{64, 192});
  for (int n = 0; n <= 63; ++n)
    CHECK(std::abs(bn_general(p, n) - oracle.coefficients[n]) < 1e-9);
}

TEST_CASE("bn_general degenerate branch joins the series branch continuously") {
  // b e^r = a on the nose vs just off it
  double r = 0.3, b = 2.0;
  double a_exact = b * std::exp(r);
  auto p_on = aligned_params(a_exact, b, r);
  auto p_off = aligned_params(a_exact - 5e-8, b, r);
  for (int n = 0; n <= 10; ++n)
    CHECK(std::abs(bn_general(p_on, n) - bn_general(p_off, n)) < 1e-6);
  for (int n = 1; n <= 9; n += 2) CHECK(std::abs(bn_general(p_on, n)) == 0.0);
}

TEST_CASE("build_series: coherent baseline") {
  auto s = build_series(aligned_params(0, 2, 0), 1e-8);
  CHECK(std::abs(s.mass() + s.tail_mass - 1.0) < 1e-9);
  CHECK(s.mass() > 1.0 - 1e-8);
  CHECK(s.mass() < 1.0 + 1e-9);
  CHECK(s.n_max >= 20);
  CHECK(s.n_max <= 45);
  CHECK(s.source == AmplitudeSeries::Source::analytic_aligned);
}

TEST_CASE("build_series: squeezed set reaches its mass target") {
  auto s = build_series(aligned_params(0, 5, 0.9), 1e-6);
  CHECK(s.mass() > 1.0 - 1e-6);
  CHECK(s.mass() < 1.0 + 1e-9);
  CHECK(std::abs(s.mass() + s.tail_mass - 1.0) < 1e-6);
}

TEST_CASE("build_series: displaced set has the expected mean photon number") {
  auto s = build_series(aligned_params(15, 5, 0), 1e-8);
  double mean = 0.0;
  for (int n = 0; n <= s.n_max; ++n) mean += n * std::norm(s.coefficients[n]);
  CHECK(std::abs(mean - 100.0) < 0.5);
}

TEST_CASE("build_series failure modes are structured") {
  states::BuildOptions opt;
  opt.n_cap = 100;
  CHECK_THROWS_AS(build_series(aligned_params(0, 1, 2.3), 1e-8, opt), states::SeriesError);
  try {
    build_series(aligned_params(0, 1, 2.3), 1e-8, opt);
  } catch (const states::SeriesError& e) {
    CHECK(e.achieved_mass > 0.0);
    CHECK(e.achieved_mass < 1.0);
  }
  CHECK_THROWS_AS(build_series(aligned_params(0, 2, 0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_series(aligned_params(0, 2, 0), 2e-3), std::invalid_argument);
}

TEST_CASE("extreme squeeze regimes are rejected, not mangled") {
  CHECK_THROWS_AS(bn_aligned(aligned_params(0, 2, 7.0), 10), states::SeriesError);
}

TEST_CASE("general-phase series construction") {
  ModelParams p;
  p.a = 0.5;
  p.theta = 0.2;
  p.r = 0.35;
  p.phi = 1.1;
  p.b = 1.5;
  p.chi = 0.8;
  auto s = build_series(p, 1e-7);
  CHECK(s.source == AmplitudeSeries::Source::analytic_general);
  CHECK(s.mass() > 1.0 - 1e-7);
  CHECK(s.mass() < 1.0 + 1e-9);
}
