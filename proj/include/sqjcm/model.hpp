// Physical parameter set and expansion-coefficient containers shared by the
// analytic, oracle and dynamics routes.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqjcm {

inline constexpr double kTwoPi = 6.283185307179586476925287;

/// Reduce an angle to [0, 2*pi).
inline double reduce_phase(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  if (y == kTwoPi) y = 0.0;
  return y;
}

/// All physical inputs of the model. Magnitudes are nonnegative, phases are
/// stored reduced to [0, 2*pi); hbar = 1 and time is reported as lambda*t,
/// so only delta/lambda matters dynamically.
struct ModelParams {
  double a = 0.0;       // |alpha|, displacement magnitude of the transformed mode
  double theta = 0.0;   // phase of alpha
  double r = 0.0;       // squeeze magnitude
  double phi = 0.0;     // squeeze phase
  double b = 0.0;       // |beta|, initial coherent amplitude
  double chi = 0.0;     // phase of beta
  double lambda = 1.0;  // atom-field coupling
  double delta = 0.0;   // detuning

  std::complex<double> alpha() const { return std::polar(a, theta); }
  std::complex<double> zeta() const { return std::polar(r, phi); }
  std::complex<double> beta() const { return std::polar(b, chi); }

  void validate() const {
    if (a < 0.0 || b < 0.0 || r < 0.0)
      throw std::invalid_argument("ModelParams: magnitudes a, b, r must be >= 0");
    if (!(lambda > 0.0))
      throw std::invalid_argument("ModelParams: lambda must be > 0");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(r) ||
        !std::isfinite(theta) || !std::isfinite(phi) || !std::isfinite(chi) ||
        !std::isfinite(lambda) || !std::isfinite(delta))
      throw std::invalid_argument("ModelParams: non-finite field");
  }

  ModelParams reduced() const {
    ModelParams p = *this;
    p.theta = reduce_phase(theta);
    p.phi = reduce_phase(phi);
    p.chi = reduce_phase(chi);
    return p;
  }

  /// phi = 2*theta = 2*chi (mod 2*pi), the regime with the single-phase
  /// closed form for the coefficients.
  bool phase_aligned(double tol = 1e-12) const {
    auto circ = [](double x, double y) {
      double d = std::abs(reduce_phase(x) - reduce_phase(y));
      return std::min(d, kTwoPi - d);
    };
    return circ(phi, 2.0 * theta) <= tol && circ(phi, 2.0 * chi) <= tol;
  }
};

/// Expansion coefficients b_n of the initial field over the n-photon squeezed
/// coherent basis, with truncation bookkeeping.
struct AmplitudeSeries {
  enum class Source { analytic_aligned, analytic_general, oracle };

  int n_max = -1;
  std::vector<std::complex<double>> coefficients;  // b_0 .. b_{n_max}
  double tail_mass = 0.0;                          // estimated sum_{n>n_max} |b_n|^2
  Source source = Source::analytic_aligned;

  double mass() const {
    double s = 0.0, c = 0.0;
    for (const auto& z : coefficients) {
      double x = std::norm(z);
      double t = s + x;
      c += (std::abs(s) >= std::abs(x)) ? (s - t) + x : (x - t) + s;
      s = t;
    }
    return s + c;
  }
};

}  // namespace sqjcm
