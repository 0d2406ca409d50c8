#include "sqjcm/fock_oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace sqjcm::fock {

namespace {

constexpr Complex kI{0.0, 1.0};

// exp(-iK) from a real symmetric tridiagonal K = V diag(lam) V^T, returned as
// the complex matrix V e^{-i lam} V^T.
Matrix tridiag_phase_exp(const Eigen::VectorXd& diag, const Eigen::VectorXd& subdiag) {
  const int n = static_cast<int>(diag.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, subdiag, Eigen::ComputeEigenvectors);
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::ArrayXd lam = es.eigenvalues().array();
  Eigen::MatrixXd re = v * lam.cos().matrix().asDiagonal() * v.transpose();
  Eigen::MatrixXd im = v * (-lam.sin()).matrix().asDiagonal() * v.transpose();
  Matrix out(n, n);
  out.real() = re;
  out.imag() = im;
  return out;
}

}  // namespace

std::pair<Matrix, Matrix> ladder_ops(const TruncationSpec& spec) {
  spec.validate();
  const int n = spec.buffer;
  Matrix a = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return {a, a.adjoint()};
}

Matrix displacement_full(Complex alpha, int dim) {
  if (dim < 1) throw std::invalid_argument("displacement_full: dim must be >= 1");
  const double s = std::abs(alpha);
  if (s == 0.0) return Matrix::Identity(dim, dim);
  const double theta = std::arg(alpha);
  // s (a+ - a) is unitarily equivalent to -i K with K the real symmetric
  // tridiagonal below, via the phase gauge diag(i^n); the alpha phase is a
  // number-operator rotation on top.
  Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd sub(dim - 1);
  for (int k = 0; k + 1 < dim; ++k) sub[k] = s * std::sqrt(k + 1.0);
  Matrix core = tridiag_phase_exp(d, sub);
  Matrix out(dim, dim);
  for (int m = 0; m < dim; ++m) {
    Complex pm = std::polar(1.0, (theta + M_PI / 2.0) * m);
    for (int n = 0; n < dim; ++n) {
      Complex pn = std::polar(1.0, -(theta + M_PI / 2.0) * n);
      out(m, n) = pm * core(m, n) * pn;
    }
  }
  return out;
}

Matrix squeeze_full(Complex zeta, int dim) {
  if (dim < 1) throw std::invalid_argument("squeeze_full: dim must be >= 1");
  const double r = std::abs(zeta);
  if (r == 0.0) return Matrix::Identity(dim, dim);
  const double phi = std::arg(zeta);
  // Parity-split: the quadratic generator couples n and n+2 only, and each
  // parity chain is again tridiagonal after the gauge diag(e^{-i pi n / 4}).
  const int even = (dim + 1) / 2, odd = dim / 2;
  Matrix ce, co;
  {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(even);
    Eigen::VectorXd sub(std::max(even - 1, 0));
    for (int i = 0; i + 1 < even; ++i)
      sub[i] = 0.5 * r * std::sqrt((2.0 * i + 1.0) * (2.0 * i + 2.0));
    ce = tridiag_phase_exp(d, sub);
  }
  {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(odd);
    Eigen::VectorXd sub(std::max(odd - 1, 0));
    for (int i = 0; i + 1 < odd; ++i)
      sub[i] = 0.5 * r * std::sqrt((2.0 * i + 2.0) * (2.0 * i + 3.0));
    co = tridiag_phase_exp(d, sub);
  }
  Matrix out = Matrix::Zero(dim, dim);
  auto phase = [&](int n) { return std::polar(1.0, (phi / 2.0 - M_PI / 4.0) * n); };
  for (int m = 0; m < dim; m += 2)
    for (int n = 0; n < dim; n += 2)
      out(m, n) = phase(m) * ce(m / 2, n / 2) * std::conj(phase(n));
  for (int m = 1; m < dim; m += 2)
    for (int n = 1; n < dim; n += 2)
      out(m, n) = phase(m) * co(m / 2, n / 2) * std::conj(phase(n));
  return out;
}

Matrix expm_reference(const Matrix& a) { return a.exp(); }

namespace {

UnitaryOperator certify(const Matrix& full, const TruncationSpec& spec) {
  const int nr = spec.retained;
  UnitaryOperator op;
  op.block = full.topLeftCorner(nr, nr);
  op.buffer = static_cast<int>(full.rows());
  constexpr double kTol = 1e-10;
  int cert = nr;
  double worst = 0.0;
  for (int k = 0; k < nr; ++k) {
    double dc = std::abs(op.block.col(k).norm() - 1.0);
    double dr = std::abs(op.block.row(k).norm() - 1.0);
    double dev = std::max(dc, dr);
    if (dev > kTol) { cert = k; break; }
    worst = std::max(worst, dev);
  }
  op.certified = cert;
  op.max_deviation = worst;
  if (cert == 0)
    throw TruncationError(
        "operator truncation: not even the leading column survives the retained block",
        std::max(std::abs(op.block.col(0).norm() - 1.0), std::abs(op.block.row(0).norm() - 1.0)));
  return op;
}

}  // namespace

UnitaryOperator displacement(Complex alpha, const TruncationSpec& spec) {
  spec.validate();
  return certify(displacement_full(alpha, spec.buffer), spec);
}

UnitaryOperator squeeze(Complex zeta, const TruncationSpec& spec) {
  spec.validate();
  return certify(squeeze_full(zeta, spec.buffer), spec);
}

namespace detail {

std::pair<Matrix, Matrix> bogoliubov_ops_impl(Complex alpha, Complex zeta,
                                              const TruncationSpec& spec, Defect defect) {
  spec.validate();
  const int n = spec.buffer;
  const double r = std::abs(zeta);
  const double phi = std::arg(zeta);
  double sh = std::sinh(r);
  if (defect == Defect::flip_sinh_sign) sh = -sh;
  const double ch = std::cosh(r);
  const Complex mix = std::polar(1.0, phi) * sh;
  Matrix b = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    b(k - 1, k) = ch * std::sqrt(static_cast<double>(k));   // cosh(r) a
    b(k, k - 1) = mix * std::sqrt(static_cast<double>(k));  // e^{i phi} sinh(r) a+
  }
  b.diagonal().array() -= alpha;
  return {b, b.adjoint().eval()};
}

}  // namespace detail

std::pair<Matrix, Matrix> bogoliubov_ops(Complex alpha, Complex zeta,
                                         const TruncationSpec& spec) {
  return detail::bogoliubov_ops_impl(alpha, zeta, spec, detail::Defect::none);
}

Vector basis_state_from(const Matrix& s_full, const Matrix& d_full, int n, int retained,
                        double norm_tol) {
  if (n < 0 || n >= d_full.cols())
    throw std::invalid_argument("basis_state: n outside the buffer dimension");
  Vector v = s_full * d_full.col(n);
  Vector out = v.head(retained);
  double deficit = std::abs(out.norm() - 1.0);
  if (deficit > norm_tol)
    throw TruncationError("basis_state: retained-block norm deficit " +
                              std::to_string(deficit) + " for n = " + std::to_string(n),
                          deficit);
  return out;
}

Vector basis_state(Complex alpha, Complex zeta, int n, const TruncationSpec& spec,
                   double norm_tol) {
  spec.validate();
  Matrix d = displacement_full(alpha, spec.buffer);
  Matrix s = squeeze_full(zeta, spec.buffer);
  return basis_state_from(s, d, n, spec.retained, norm_tol);
}

namespace {

// exp(G) v by scaled truncated Taylor, G supplied as an apply closure with a
// one-norm bound. Substeps keep ||G||/s near theta so each Taylor series is
// short and, for our skew-Hermitian generators, free of intermediate growth.
template <class Apply>
Vector expmv(const Apply& apply_g, double norm1, Vector v) {
  if (norm1 == 0.0) return v;
  constexpr double kTheta = 4.0;
  const int substeps = std::max(1, static_cast<int>(std::ceil(norm1 / kTheta)));
  const double inv = 1.0 / substeps;
  Vector term(v.size()), next(v.size());
  for (int s = 0; s < substeps; ++s) {
    term = v;
    double vref = v.norm();
    for (int j = 1; j <= 64; ++j) {
      apply_g(term, next);
      term = next * (inv / j);
      v += term;
      if (term.norm() <= 1e-17 * vref) break;
    }
  }
  return v;
}

}  // namespace

Vector apply_displacement(Complex alpha, const Vector& v) {
  const int n = static_cast<int>(v.size());
  if (std::abs(alpha) == 0.0) return v;
  const Complex ac = std::conj(alpha);
  auto gen = [&](const Vector& in, Vector& out) {
    for (int k = 0; k < n; ++k) {
      Complex acc = 0.0;
      if (k > 0) acc += alpha * std::sqrt(static_cast<double>(k)) * in[k - 1];
      if (k + 1 < n) acc -= ac * std::sqrt(k + 1.0) * in[k + 1];
      out[k] = acc;
    }
  };
  double norm1 = std::abs(alpha) * (std::sqrt(static_cast<double>(n)) +
                                    std::sqrt(static_cast<double>(n - 1)));
  return expmv(gen, norm1, v);
}

Vector apply_squeeze(Complex zeta, const Vector& v) {
  const int n = static_cast<int>(v.size());
  const double r = std::abs(zeta);
  if (r == 0.0) return v;
  const Complex h = 0.5 * zeta;
  const Complex hc = 0.5 * std::conj(zeta);
  auto gen = [&](const Vector& in, Vector& out) {
    for (int k = 0; k < n; ++k) {
      Complex acc = 0.0;
      if (k >= 2) acc -= h * std::sqrt(static_cast<double>(k) * (k - 1.0)) * in[k - 2];
      if (k + 2 < n) acc += hc * std::sqrt((k + 1.0) * (k + 2.0)) * in[k + 2];
      out[k] = acc;
    }
  };
  double norm1 = r * static_cast<double>(n);
  return expmv(gen, norm1, v);
}

int displaced_support(int n, double abs_alpha) {
  double base = 0.5 * std::pow(std::sqrt(2.0 * n + 1.0) + std::sqrt(2.0) * abs_alpha, 2.0);
  return static_cast<int>(std::ceil(base + 7.0 * std::cbrt(base + 1.0) + 10.0));
}

int squeezed_support(int n, double r) {
  double base = 0.5 * (2.0 * n + 1.0) * std::exp(2.0 * r);
  return static_cast<int>(std::ceil(base + 7.0 * std::cbrt(base + 1.0) + 10.0));
}

AmplitudeSeries bn_numeric(Complex alpha, Complex zeta, Complex beta,
                           const TruncationSpec& spec) {
  spec.validate();
  const double r = std::abs(zeta);
  int est = displaced_support(
      squeezed_support(displaced_support(0, std::abs(beta)), r), std::abs(alpha));
  int dim = std::max(spec.buffer, est + est / 4 + 64);

  for (int attempt = 0; attempt < 6; ++attempt) {
    Vector v = Vector::Zero(dim);
    v[0] = 1.0;
    v = apply_displacement(beta, v);
    v = apply_squeeze(-zeta, v);
    v = apply_displacement(-alpha, v);

    double norm_dev = std::abs(v.norm() - 1.0);
    double edge = v.tail(dim / 10).squaredNorm();
    if (norm_dev < 1e-10 && edge < 1e-14) {
      AmplitudeSeries out;
      out.source = AmplitudeSeries::Source::oracle;
      out.n_max = spec.retained - 1;
      out.coefficients.assign(v.data(), v.data() + spec.retained);
      out.tail_mass = std::max(0.0, 1.0 - out.mass());
      return out;
    }
    dim *= 2;
  }
  throw TruncationError("bn_numeric: buffer growth failed to confine the operator chain",
                        0.0);
}

}  // namespace fock
