// Independent ground truth on a truncated Fock space: dense ladder,
// displacement, squeeze and Bogoliubov operator matrices, n-photon squeezed
// coherent states, and the expansion coefficients computed directly from the
// operator chain. Everything here goes through matrix exponentials of the
// truncated generators; nothing is shared with the closed-form route in
// states, which is the point.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <utility>

#include "sqjcm/model.hpp"

namespace sqjcm::fock {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Exponentials are evaluated at `buffer` dimension; results are reported on
/// the top-left `retained` block so truncation artifacts stay outside it.
struct TruncationSpec {
  int retained = 512;
  int buffer = 640;

  void validate() const {
    if (retained < 1) throw std::invalid_argument("TruncationSpec: retained must be >= 1");
    if (buffer < retained + 1)
      throw std::invalid_argument("TruncationSpec: buffer must exceed retained");
  }
  static TruncationSpec with_margin(int retained) {
    return {retained, retained + std::max(64, retained / 8)};
  }
};

class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double measured)
      : std::runtime_error(what), measured(measured) {}
  double measured;
};

/// Retained block of a truncated unitary plus its certification record:
/// columns/rows are certified while their retained-block norm stays within
/// `tol` of 1 (high columns of any truncated displacement/squeeze leak past
/// the buffer and cannot be certified at finite dimension).
struct UnitaryOperator {
  Matrix block;              // retained x retained
  int certified = 0;         // leading rows/columns certified
  double max_deviation = 0;  // worst norm deviation inside the certified span
  int buffer = 0;

  int dim() const { return static_cast<int>(block.rows()); }
};

/// Annihilation / creation pair at buffer dimension: a[n-1][n] = sqrt(n).
std::pair<Matrix, Matrix> ladder_ops(const TruncationSpec& spec);

/// exp(alpha a+ - conj(alpha) a) at the given dimension, computed from the
/// spectral decomposition of the phase-reduced tridiagonal generator.
Matrix displacement_full(Complex alpha, int dim);

/// exp(-(zeta/2) a+^2 + (conj(zeta)/2) a^2) at the given dimension via the
/// parity-split spectral decomposition; exactly parity-preserving.
Matrix squeeze_full(Complex zeta, int dim);

/// Reference scaling-and-squaring Pade exponential (cross-check engine).
Matrix expm_reference(const Matrix& a);

/// Certified retained blocks. Throw TruncationError if not even the vacuum
/// column survives truncation.
UnitaryOperator displacement(Complex alpha, const TruncationSpec& spec);
UnitaryOperator squeeze(Complex zeta, const TruncationSpec& spec);

/// Transformed-mode ladder pair at buffer dimension, from the closed-form
/// linear combination cosh(r) a + e^{i phi} sinh(r) a+ - alpha (no
/// exponential truncation error).
std::pair<Matrix, Matrix> bogoliubov_ops(Complex alpha, Complex zeta,
                                         const TruncationSpec& spec);

/// |zeta, alpha, n>: the squeeze-then-displace image of Fock |n>, truncated
/// to retained dimension. Throws TruncationError on norm deficit > tol.
Vector basis_state(Complex alpha, Complex zeta, int n, const TruncationSpec& spec,
                   double norm_tol = 1e-8);

/// Same, from prebuilt buffer-dimension operators (validation-suite path).
Vector basis_state_from(const Matrix& squeeze_full_op, const Matrix& displacement_full_op,
                        int n, int retained, double norm_tol = 1e-8);

/// exp(generator) * v for the banded displacement / squeeze generators via
/// scaled truncated-Taylor application; dimension taken from v.
Vector apply_displacement(Complex alpha, const Vector& v);
Vector apply_squeeze(Complex zeta, const Vector& v);

/// Expansion coefficients from the operator chain <n|D(-alpha)S(-zeta)D(beta)|0>,
/// evaluated as exponential-times-vector products on an automatically enlarged
/// buffer (grown until the norm and edge-population checks pass).
AmplitudeSeries bn_numeric(Complex alpha, Complex zeta, Complex beta,
                           const TruncationSpec& spec);

/// Support estimates used for buffer sizing (classical band plus edge margin).
int displaced_support(int n, double abs_alpha);
int squeezed_support(int n, double r);

namespace detail {
enum class Defect { none, flip_sinh_sign };
std::pair<Matrix, Matrix> bogoliubov_ops_impl(Complex alpha, Complex zeta,
                                              const TruncationSpec& spec, Defect defect);
}  // namespace detail

}  // namespace sqjcm::fock
