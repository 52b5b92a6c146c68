#include "gpcert/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

namespace gpcert {

namespace {

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(std::abs(m(i, j)))) return false;
  return true;
}

// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal d and
// off-diagonal e, by Sturm-count bisection inside the Gershgorin interval.
double largest_tridiagonal_eigenvalue(const RealVector& d, const RealVector& e) {
  const Eigen::Index n = d.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double pivmin = std::numeric_limits<double>::min();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
    if (i + 1 < n) pivmin = std::max(pivmin, e[i] * e[i] * std::numeric_limits<double>::min());
  }
  // Number of eigenvalues greater than x.
  auto count_above = [&](double x) {
    int count = 0;
    double q = d[0] - x;
    if (q > 0.0) ++count;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (std::abs(q) < pivmin) q = -pivmin;
      q = d[i] - x - e[i - 1] * e[i - 1] / q;
      if (q > 0.0) ++count;
    }
    return count;
  };
  for (int it = 0; it < 256; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) break;
    if (count_above(mid) > 0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

// Largest singular value via the largest eigenvalue of the smaller Gram
// matrix. The top eigenvalue of a Hermitian matrix is computed to relative
// accuracy O(n eps), so the square root is as accurate as an SVD would be.
template <typename Mat>
double spectral_norm_impl(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (!all_finite(m)) throw Error(ErrorKind::NonFinite, "spectral_norm of non-finite matrix");
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const Mat ms = m / scale;
  Mat gram;
  if (ms.rows() >= ms.cols())
    gram.noalias() = ms.adjoint() * ms;
  else
    gram.noalias() = ms * ms.adjoint();
  if (gram.rows() == 1) return scale * std::sqrt(std::abs(gram(0, 0)));
  const Eigen::Tridiagonalization<Mat> tri(gram);
  return scale * std::sqrt(std::max(0.0, largest_tridiagonal_eigenvalue(tri.diagonal(), tri.subDiagonal())));
}

template <typename Mat>
Mat expm_impl(const Mat& a, double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw Error(ErrorKind::InvalidArgument, "expm requires finite t >= 0");
  if (t == 0.0) return Mat::Identity(a.rows(), a.cols());
  const SubnormalFlush flush;
  const Mat ta = a * t;
  if (!all_finite(ta)) throw Error(ErrorKind::Overflow, "t*A is not representable");
  // Scale to unit 1-norm, exponentiate, then square back. Squaring stops
  // early once the Frobenius norm drops below 1e-154: every further square
  // is below the smallest normal double, so the result is zero.
  const double norm1 = ta.cwiseAbs().colwise().sum().maxCoeff();
  const int squarings = norm1 > 1.0 ? static_cast<int>(std::ceil(std::log2(norm1))) : 0;
  Mat result = (ta * std::ldexp(1.0, -squarings)).exp();
  Mat next(result.rows(), result.cols());
  for (int k = 0; k < squarings; ++k) {
    const double fro = result.norm();
    if (fro < 1e-154) return Mat::Zero(a.rows(), a.cols());
    if (!(fro < 1e300)) break;
    next.noalias() = result * result;
    result.swap(next);
  }
  if (!all_finite(result) || !(result.norm() < 1e300))
    throw Error(ErrorKind::Overflow, "matrix exponential overflowed");
  return result;
}

}  // namespace

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!all_finite(m)) throw Error(ErrorKind::NonFinite, std::string(what) + " has non-finite entries");
}

Generator::Generator(ComplexMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols())
    throw Error(ErrorKind::NotSquare, "generator must be square");
  if (entries_.rows() < 1) throw Error(ErrorKind::InvalidArgument, "generator must have dim >= 1");
  require_finite(entries_, "generator");
  if (entries_.imag().isZero(0.0)) real_ = entries_.real();
  init();
}

Generator::Generator(const RealMatrix& entries) : Generator(ComplexMatrix(entries.cast<Complex>())) {}

void Generator::init() {
  if (real_) {
    norm2_ = spectral_norm(*real_);
    spectrum_ = eigenvalues(*real_);
  } else {
    norm2_ = spectral_norm(entries_);
    spectrum_ = eigenvalues(entries_);
  }
  abscissa_ = -std::numeric_limits<double>::infinity();
  for (const Complex& l : spectrum_) abscissa_ = std::max(abscissa_, l.real());
  log_norm_ = gpcert::log_norm(*this);
}

double Generator::spectrum_distance(Complex z) const {
  double d = std::numeric_limits<double>::infinity();
  for (const Complex& l : spectrum_) d = std::min(d, std::abs(z - l));
  return d;
}

double spectral_norm(const ComplexMatrix& m) { return spectral_norm_impl(m); }
double spectral_norm(const RealMatrix& m) { return spectral_norm_impl(m); }

ComplexMatrix expm(const Generator& a, double t) {
  if (a.is_real()) return expm_impl(a.real_entries(), t).cast<Complex>();
  return expm_impl(a.entries(), t);
}

RealMatrix expm_real(const Generator& a, double t) {
  if (!a.is_real()) throw Error(ErrorKind::InvalidArgument, "expm_real on a complex generator");
  return expm_impl(a.real_entries(), t);
}

ComplexMatrix resolvent(const Generator& a, Complex lambda) {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw Error(ErrorKind::NonFinite, "resolvent at non-finite lambda");
  const double sing_tol = 1e-12 * (1.0 + std::abs(lambda) + a.norm2());
  if (a.spectrum_distance(lambda) <= sing_tol)
    throw Error(ErrorKind::SpectrumHit, "lambda lies on the spectrum");
  const Eigen::Index n = a.dim();
  ComplexMatrix shifted = -a.entries();
  shifted.diagonal().array() += lambda;
  Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
  if (lu.rcond() < 1.0 / kCondMax)
    throw Error(ErrorKind::SpectrumHit, "lambda I - A is numerically singular");
  ComplexMatrix x = lu.solve(ComplexMatrix::Identity(n, n));
  if (!all_finite(x)) throw Error(ErrorKind::SpectrumHit, "resolvent solve produced non-finite values");
  return x;
}

ComplexMatrix adjoint(const ComplexMatrix& m) { return m.adjoint(); }

double log_norm(const Generator& a) {
  if (a.is_real()) {
    const RealMatrix& r = a.real_entries();
    const RealMatrix sym = 0.5 * (r + r.transpose());
    if (sym.rows() == 1) return sym(0, 0);
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
  }
  const ComplexMatrix& m = a.entries();
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  if (herm.rows() == 1) return herm(0, 0).real();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

std::vector<Complex> eigenvalues(const ComplexMatrix& m) {
  if (m.rows() == 1) return {m(0, 0)};
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::EigSolveFailure, "complex eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<Complex> eigenvalues(const RealMatrix& m) {
  if (m.rows() == 1) return {Complex(m(0, 0), 0.0)};
  Eigen::EigenSolver<RealMatrix> solver(m, false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::EigSolveFailure, "real eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

SchurResolvent::SchurResolvent(const Generator& a) {
  const Eigen::Index n = a.dim();
  tiny_ = 1e-300 + std::numeric_limits<double>::epsilon() * 1e-4 * (1.0 + a.norm2());
  if (n == 1) {
    t_ = RowMajor(a.entries());
    u_ = ComplexMatrix::Identity(1, 1);
    return;
  }
  Eigen::ComplexSchur<ComplexMatrix> schur(a.entries());
  if (schur.info() != Eigen::Success)
    throw Error(ErrorKind::EigSolveFailure, "complex Schur reduction did not converge");
  t_ = RowMajor(schur.matrixT().triangularView<Eigen::Upper>());
  u_ = schur.matrixU();
}

ComplexMatrix SchurResolvent::to_schur_basis(const ComplexMatrix& b) const { return u_.adjoint() * b; }

ComplexMatrix SchurResolvent::from_schur_basis(const ComplexMatrix& y) const { return u_ * y; }

void SchurResolvent::solve_in_place(Complex z, ComplexMatrix& rhs) const {
  RowMajor y = rhs;
  back_substitute(z, y);
  rhs = y;
}

void SchurResolvent::back_substitute(Complex z, RowMajor& y) const {
  const Eigen::Index n = t_.rows();
  // Back substitution on zI - T without forming it:
  // y_i = (b_i + sum_{j > i} T_ij y_j) / (z - T_ii).
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    const Complex pivot = z - t_(i, i);
    if (std::abs(pivot) <= tiny_) throw Error(ErrorKind::SpectrumHit, "shift coincides with an eigenvalue");
    const Eigen::Index m = n - i - 1;
    if (m > 0) y.row(i).noalias() += t_.row(i).tail(m) * y.bottomRows(m);
    y.row(i) /= pivot;
  }
}

RealVector SchurResolvent::column_norms(Complex z, const ComplexMatrix& rhs_s) const {
  RowMajor y = rhs_s;
  back_substitute(z, y);
  return y.colwise().norm().transpose();
}

}  // namespace gpcert
