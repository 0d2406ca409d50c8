// Closed-form expansion coefficients of a coherent field over the n-photon
// squeezed coherent basis, with adaptive truncation and normalization control.

#pragma once

#include <complex>
#include <stdexcept>

#include "sqjcm/model.hpp"
#include "sqjcm/specfun.hpp"

namespace sqjcm::states {

/// gamma = beta cosh(r) + conj(beta) e^{i phi} sinh(r), the displacement that
/// results from commuting the inverse squeeze past the initial displacement.
std::complex<double> gamma_param(double b, double chi, double r, double phi);

/// Thrown when the coefficient series fails to converge or the adaptive
/// truncation cannot reach its mass target.
class SeriesError : public std::runtime_error {
 public:
  SeriesError(const std::string& what, int terms_used, double tail_estimate,
              double achieved_mass = -1.0)
      : std::runtime_error(what),
        terms_used(terms_used),
        tail_estimate(tail_estimate),
        achieved_mass(achieved_mass) {}
  int terms_used;
  double tail_estimate;
  double achieved_mass;  // only for build failures, else -1
};

struct BuildOptions {
  double rel_tol = 1e-12;  // per-coefficient series tolerance
  int n_cap = 4096;        // adaptive truncation hard cap
};

/// Single coefficient in the phase-aligned regime (phi = 2 theta = 2 chi).
/// Rejects non-aligned parameters; use bn_general there.
std::complex<double> bn_aligned(const ModelParams& params, int n,
                                const BuildOptions& opt = {});

/// Single coefficient for arbitrary phases. Near-degenerate |gamma - alpha|
/// is routed to the exact squeezed-vacuum limit (even n only).
std::complex<double> bn_general(const ModelParams& params, int n,
                                const BuildOptions& opt = {});

/// Full coefficient vector, truncated adaptively so the missing mass is below
/// tail_target. Throws SeriesError when the cap is hit first.
AmplitudeSeries build_series(const ModelParams& params, double tail_target,
                             const BuildOptions& opt = {});

namespace detail {

/// Fault injection for the validation suite's mutation-sensitivity checks.
/// Production entry points always pass Defect::none.
enum class Defect { none, flip_sinh_sign, drop_chi_phase };

std::complex<double> gamma_param_impl(double b, double chi, double r, double phi,
                                      Defect defect);
std::complex<double> bn_aligned_impl(const ModelParams& params, int n,
                                     const BuildOptions& opt, Defect defect);
AmplitudeSeries build_series_impl(const ModelParams& params, double tail_target,
                                  const BuildOptions& opt, Defect defect);

}  // namespace detail

}  // namespace sqjcm::states
