#pragma once

// Reference computations for the tests. Each one takes a different route
// from the library code it checks: Taylor series in extended precision for
// the exponential, one-sided Jacobi SVD for norms, a Kronecker-form Lyapunov
// solve for time energies.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gpcert/matrix_core.hpp"

namespace oracle {

using gpcert::Complex;
using gpcert::ComplexMatrix;
using gpcert::ComplexVector;

using LComplex = std::complex<long double>;
using LMatrix = Eigen::Matrix<LComplex, Eigen::Dynamic, Eigen::Dynamic>;

inline double sigma_max(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

inline double sigma_min(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

/// e^{tA} by scaling, a 40-term Taylor series in long double and squaring.
inline ComplexMatrix expm(const ComplexMatrix& a, double t) {
  const Eigen::Index n = a.rows();
  LMatrix x = (a * t).cast<LComplex>();
  long double norm = 0.0L;
  for (Eigen::Index j = 0; j < n; ++j) {
    long double col = 0.0L;
    for (Eigen::Index i = 0; i < n; ++i) col += std::abs(x(i, j));
    norm = std::max(norm, col);
  }
  int squarings = 0;
  while (norm > 0.25L) {
    norm /= 2.0L;
    ++squarings;
  }
  x /= std::ldexp(1.0L, squarings);
  LMatrix term = LMatrix::Identity(n, n);
  LMatrix sum = LMatrix::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = (term * x) / static_cast<long double>(k);
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return sum.cast<Complex>();
}

inline double semigroup_norm(const ComplexMatrix& a, double t) { return sigma_max(expm(a, t)); }

/// ||(is - A)^{-1}|| as the reciprocal of the smallest singular value.
inline double resolvent_norm(const ComplexMatrix& a, double s) {
  const Eigen::Index n = a.rows();
  return 1.0 / sigma_min(Complex(0.0, s) * ComplexMatrix::Identity(n, n) - a);
}

/// Largest eigenvalue of (A + A^*)/2 from a Hermitian eigensolver.
inline double log_norm(const ComplexMatrix& a) {
  const ComplexMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// int_0^inf ||e^{-alpha t} e^{tA} x||^2 dt = x^* X x where
/// (A - alpha)^* X + X (A - alpha) = -I, solved in Kronecker form.
inline double time_energy(const ComplexMatrix& a, double alpha, const ComplexVector& x) {
  const Eigen::Index n = a.rows();
  const ComplexMatrix b = a - alpha * ComplexMatrix::Identity(n, n);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  ComplexMatrix big = ComplexMatrix::Zero(n * n, n * n);
  // vec(B^* X) = (I kron B^*) vec X,  vec(X B) = (B^T kron I) vec X.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      big.block(i * n, j * n, n, n) += id(i, j) * b.adjoint();
      big.block(i * n, j * n, n, n) += b(j, i) * id;
    }
  ComplexVector rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) rhs(j * n + i) = i == j ? -1.0 : 0.0;
  const ComplexVector v = big.fullPivLu().solve(rhs);
  ComplexMatrix xmat(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) xmat(i, j) = v(j * n + i);
  return (x.adjoint() * xmat * x)(0).real();
}

/// Dense-grid maximum of the resolvent norm on [-S, S] followed by a
/// golden-section refinement around the best cell.
inline std::pair<double, double> resolvent_sup(const ComplexMatrix& a, std::size_t points, double S) {
  double best = -1.0;
  double best_s = 0.0;
  const double h = 2.0 * S / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    const double s = -S + h * static_cast<double>(k);
    const double v = resolvent_norm(a, s);
    if (v > best) {
      best = v;
      best_s = s;
    }
  }
  double lo = best_s - h;
  double hi = best_s + h;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(best_s)); ++it) {
    const double m1 = hi - g * (hi - lo);
    const double m2 = lo + g * (hi - lo);
    if (resolvent_norm(a, m1) >= resolvent_norm(a, m2))
      hi = m2;
    else
      lo = m1;
  }
  const double s = 0.5 * (lo + hi);
  const double v = resolvent_norm(a, s);
  return v > best ? std::pair{v, s} : std::pair{best, best_s};
}

/// Seeded random matrices for the statistical tests.
class MatrixFactory {
 public:
  explicit MatrixFactory(std::uint64_t seed) : rng_(seed) {}

  int dim(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  ComplexMatrix gaussian(int n, bool real) {
    std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
    ComplexMatrix m(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) m(i, j) = real ? Complex(g(rng_), 0.0) : Complex(g(rng_), g(rng_));
    return m;
  }

  /// Gaussian matrix shifted so that its spectral abscissa equals `abscissa`.
  ComplexMatrix with_abscissa(int n, double abscissa, bool real) {
    ComplexMatrix m = gaussian(n, real);
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
    const double current = es.eigenvalues().real().maxCoeff();
    m -= (current - abscissa) * ComplexMatrix::Identity(n, n);
    return m;
  }

  ComplexMatrix skew_hermitian(int n) {
    const ComplexMatrix m = gaussian(n, false);
    return 0.5 * (m - m.adjoint());
  }

  ComplexVector unit_vector(int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(rng_), g(rng_));
    return v / v.norm();
  }

 private:
  std::mt19937_64 rng_;
};

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace oracle
