#pragma once

// Dense complex linear algebra on C^n with the Euclidean norm: the operator
// norm of every matrix below is its spectral norm.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

#include "gpcert/errors.hpp"

namespace gpcert {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Threshold on the LU reciprocal condition estimate below which a shifted
/// matrix is declared singular.
inline constexpr double kCondMax = 1e14;

/// Flushes subnormal results and operands to zero on the current thread
/// while alive. Products of decaying exponentials otherwise spend most of
/// their time in subnormal arithmetic. No effect on targets without SSE.
class SubnormalFlush {
 public:
#if defined(__SSE2__)
  SubnormalFlush() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
  ~SubnormalFlush() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#else
  SubnormalFlush() = default;
#endif
 public:
  SubnormalFlush(const SubnormalFlush&) = delete;
  SubnormalFlush& operator=(const SubnormalFlush&) = delete;
};

/// Throws NonFinite if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, const char* what = "matrix");

/// Square complex matrix standing in for a semigroup generator. Norm and
/// spectrum are computed once on construction; the object is immutable.
class Generator {
 public:
  explicit Generator(ComplexMatrix entries);
  explicit Generator(const RealMatrix& entries);

  Eigen::Index dim() const noexcept { return entries_.rows(); }
  const ComplexMatrix& entries() const noexcept { return entries_; }

  /// True when every imaginary part is exactly zero; real fast paths are
  /// used for the exponential and eigenvalue problems in that case.
  bool is_real() const noexcept { return real_.has_value(); }
  const RealMatrix& real_entries() const { return *real_; }

  /// Largest singular value of the entries.
  double norm2() const noexcept { return norm2_; }
  /// Eigenvalues with multiplicity, in solver order.
  const std::vector<Complex>& spectrum() const noexcept { return spectrum_; }
  double spectral_abscissa() const noexcept { return abscissa_; }
  double log_norm() const noexcept { return log_norm_; }

  /// Distance from z to the nearest eigenvalue.
  double spectrum_distance(Complex z) const;

 private:
  void init();

  ComplexMatrix entries_;
  std::optional<RealMatrix> real_;
  double norm2_ = 0.0;
  double abscissa_ = 0.0;
  double log_norm_ = 0.0;
  std::vector<Complex> spectrum_;
};

double spectral_norm(const ComplexMatrix& m);
double spectral_norm(const RealMatrix& m);

/// e^{tA}. Scaling and squaring with a Pade approximant.
ComplexMatrix expm(const Generator& a, double t);
/// Real-arithmetic exponential for real generators; throws if a is complex.
RealMatrix expm_real(const Generator& a, double t);

/// (lambda I - A)^{-1} by a pivoted dense solve.
ComplexMatrix resolvent(const Generator& a, Complex lambda);

ComplexMatrix adjoint(const ComplexMatrix& m);

/// Largest eigenvalue of (A + A^*)/2.
double log_norm(const Generator& a);

std::vector<Complex> eigenvalues(const ComplexMatrix& m);
std::vector<Complex> eigenvalues(const RealMatrix& m);

/// Repeated resolvent applications (zI - A)^{-1} B for many shifts z. A is
/// reduced once to complex Schur form A = U T U^*, after which each shift
/// costs one triangular back substitution per right-hand side.
class SchurResolvent {
 public:
  explicit SchurResolvent(const Generator& a);

  /// U^* B; column norms are preserved, so norms of (zI - T)^{-1} U^* B equal
  /// those of (zI - A)^{-1} B.
  ComplexMatrix to_schur_basis(const ComplexMatrix& b) const;
  ComplexMatrix from_schur_basis(const ComplexMatrix& y) const;

  /// Solves (zI - T) Y = rhs in place. Throws SpectrumHit when z coincides
  /// with an eigenvalue to working precision.
  void solve_in_place(Complex z, ComplexMatrix& rhs) const;

  /// Euclidean norms of the columns of (zI - A)^{-1} B, where rhs_s = U^* B.
  RealVector column_norms(Complex z, const ComplexMatrix& rhs_s) const;

  Eigen::Index dim() const noexcept { return t_.rows(); }

 private:
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  void back_substitute(Complex z, RowMajor& y) const;

  RowMajor t_;
  ComplexMatrix u_;
  double tiny_ = 0.0;
};

}  // namespace gpcert
