#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gpcert/matrix_core.hpp"
#include "oracles.hpp"

using namespace gpcert;

namespace {

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

RealMatrix mat2(double a, double b, double c, double d) {
  RealMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("spectral_norm closed forms") {
  CHECK(spectral_norm(ComplexMatrix(ComplexMatrix::Identity(3, 3))) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(spectral_norm(mat2(0, 1, 0, 0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(spectral_norm(mat2(1, 1, 0, 1)) == doctest::Approx(kGolden).epsilon(1e-12));
  CHECK(spectral_norm(ComplexMatrix(ComplexMatrix::Zero(2, 2))) == 0.0);
}

TEST_CASE("spectral_norm agrees with the Jacobi SVD on random matrices") {
  oracle::MatrixFactory f(11);
  for (int k = 0; k < 40; ++k) {
    const int n = f.dim(1, 30);
    const ComplexMatrix m = f.gaussian(n, k % 2 == 0) * f.uniform(0.01, 100.0);
    CHECK(oracle::rel_diff(spectral_norm(m), oracle::sigma_max(m)) <= 1e-12);
    if (k % 2 == 0)
      CHECK(oracle::rel_diff(spectral_norm(RealMatrix(m.real())), oracle::sigma_max(m)) <= 1e-12);
  }
}

TEST_CASE("spectral_norm rejects non-finite input") {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 1) = Complex(NAN, 0.0);
  CHECK_THROWS_AS(spectral_norm(m), Error);
}

TEST_CASE("Generator caches norm and spectrum") {
  oracle::MatrixFactory f(12);
  for (int k = 0; k < 20; ++k) {
    const int n = f.dim(1, 20);
    const Generator g(f.gaussian(n, k % 3 == 0));
    CHECK(g.dim() == n);
    CHECK(g.spectrum().size() == static_cast<std::size_t>(n));
    CHECK(oracle::rel_diff(g.norm2(), oracle::sigma_max(g.entries())) <= 1e-10);
    double abscissa = -INFINITY;
    for (const Complex& l : g.spectrum()) abscissa = std::max(abscissa, l.real());
    CHECK(g.spectral_abscissa() == abscissa);
    CHECK(g.is_real() == (k % 3 == 0));
  }
}

TEST_CASE("Generator rejects bad entries") {
  CHECK_THROWS_AS(Generator(ComplexMatrix(2, 3)), Error);
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(1, 1) = Complex(INFINITY, 0.0);
  try {
    Generator g(m);
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFinite);
  }
  try {
    Generator g(ComplexMatrix(2, 3));
    FAIL("expected NotSquare");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotSquare);
  }
}

TEST_CASE("expm examples") {
  const Generator nil(mat2(0, 1, 0, 0));
  const ComplexMatrix e = expm(nil, 1.0);
  CHECK(std::abs(e(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(e(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(e(1, 0)) < 1e-15);
  CHECK(std::abs(e(1, 1) - 1.0) < 1e-15);

  oracle::MatrixFactory f(13);
  const Generator any(f.gaussian(5, false));
  CHECK((expm(any, 0.0) - ComplexMatrix::Identity(5, 5)).norm() == 0.0);

  const Generator scalar(RealMatrix(RealMatrix::Constant(1, 1, -1.0)));
  CHECK(expm(scalar, 2.0)(0, 0).real() == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(expm(scalar, 2.0)(0, 0).imag() == 0.0);
  CHECK(expm_real(scalar, 2.0)(0, 0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("expm matches the extended-precision Taylor oracle") {
  oracle::MatrixFactory f(14);
  for (int k = 0; k < 30; ++k) {
    const int n = f.dim(1, 12);
    const bool real = k % 2 == 0;
    const ComplexMatrix a = f.with_abscissa(n, f.uniform(-2.0, 0.5), real) * f.uniform(0.2, 5.0);
    const Generator g(a);
    for (double t : {0.01, 0.5, 3.0}) {
      const ComplexMatrix ref = oracle::expm(a, t);
      const double err = spectral_norm(ComplexMatrix(expm(g, t) - ref));
      CHECK(err <= 1e-11 * (1.0 + spectral_norm(ref)));
      if (real) {
        const double err_real = spectral_norm(ComplexMatrix(expm_real(g, t).cast<Complex>() - ref));
        CHECK(err_real <= 1e-11 * (1.0 + spectral_norm(ref)));
      }
    }
  }
}

TEST_CASE("expm argument checks") {
  const Generator g(RealMatrix(RealMatrix::Constant(1, 1, -1.0)));
  CHECK_THROWS_AS(expm(g, -1.0), Error);
  CHECK_THROWS_AS(expm(g, NAN), Error);
  const Generator big(RealMatrix(RealMatrix::Constant(1, 1, 1.0)));
  CHECK_THROWS_AS(expm(big, 1e4), Error);
  ComplexMatrix c(1, 1);
  c(0, 0) = Complex(0.0, 1.0);
  CHECK_THROWS_AS(expm_real(Generator(c), 1.0), Error);
}

TEST_CASE("resolvent examples") {
  const Generator scalar(RealMatrix(RealMatrix::Constant(1, 1, -1.0)));
  for (double s : {0.0, 1.0, -3.5}) {
    const Complex expected = 1.0 / Complex(1.0, s);
    CHECK(std::abs(resolvent(scalar, Complex(0.0, s))(0, 0) - expected) < 1e-15);
  }
  RealMatrix d = RealMatrix::Zero(2, 2);
  d.diagonal() << -1, -2;
  const ComplexMatrix rd = resolvent(Generator(d), 0.0);
  CHECK(std::abs(rd(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(rd(1, 1) - 0.5) < 1e-15);
  CHECK(std::abs(rd(0, 1)) < 1e-15);

  // (0 - [[-1, 1], [0, -1]])^{-1} = [[1, 1], [0, 1]].
  const ComplexMatrix rj = resolvent(Generator(mat2(-1, 1, 0, -1)), 0.0);
  CHECK(std::abs(rj(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(rj(0, 1) - 1.0) < 1e-14);
  CHECK(std::abs(rj(1, 0)) < 1e-14);
  CHECK(std::abs(rj(1, 1) - 1.0) < 1e-14);
}

TEST_CASE("resolvent on the spectrum is a SpectrumHit") {
  RealMatrix d = RealMatrix::Zero(2, 2);
  d.diagonal() << -1, -2;
  try {
    resolvent(Generator(d), -2.0);
    FAIL("expected SpectrumHit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SpectrumHit);
  }
}

TEST_CASE("adjoint examples") {
  ComplexMatrix i1(1, 1);
  i1(0, 0) = Complex(0.0, 1.0);
  CHECK(adjoint(i1)(0, 0) == Complex(0.0, -1.0));
  CHECK(adjoint(ComplexMatrix::Identity(3, 3)) == ComplexMatrix::Identity(3, 3));
  const ComplexMatrix m = mat2(1, 2, 3, 4).cast<Complex>();
  CHECK(adjoint(m) == mat2(1, 3, 2, 4).cast<Complex>());
}

TEST_CASE("log_norm examples") {
  CHECK(log_norm(Generator(RealMatrix(RealMatrix::Constant(1, 1, -1.0)))) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(log_norm(Generator(mat2(0, 1, -1, 0)))) < 1e-14);
  CHECK(log_norm(Generator(mat2(-1, 10, 0, -1))) == doctest::Approx(4.0).epsilon(1e-13));
  oracle::MatrixFactory f(15);
  for (int k = 0; k < 10; ++k) {
    const ComplexMatrix a = f.gaussian(f.dim(1, 15), k % 2 == 0);
    const Generator g(a);
    CHECK(std::abs(log_norm(g) - oracle::log_norm(a)) <= 1e-12 * (1.0 + g.norm2()));
    CHECK(g.log_norm() == log_norm(g));
  }
}

TEST_CASE("SchurResolvent agrees with the dense resolvent") {
  oracle::MatrixFactory f(16);
  for (int k = 0; k < 12; ++k) {
    const int n = f.dim(1, 16);
    const Generator g(f.with_abscissa(n, -0.3, k % 2 == 0));
    const SchurResolvent sr(g);
    const ComplexMatrix b = f.gaussian(n, false).leftCols(std::min(n, 3));
    const ComplexMatrix bs = sr.to_schur_basis(b);
    for (double s : {-2.0, 0.0, 0.7}) {
      const Complex z(0.1, s);
      const ComplexMatrix ref = resolvent(g, z) * b;
      ComplexMatrix y = bs;
      sr.solve_in_place(z, y);
      CHECK((sr.from_schur_basis(y) - ref).norm() <= 1e-11 * (1.0 + ref.norm()));
      const RealVector norms = sr.column_norms(z, bs);
      for (Eigen::Index j = 0; j < b.cols(); ++j)
        CHECK(norms(j) == doctest::Approx(ref.col(j).norm()).epsilon(1e-11));
    }
  }
}

TEST_CASE("SchurResolvent rejects shifts on the spectrum") {
  ComplexMatrix t(3, 3);
  t << Complex(-1, 2), 4, 1, 0, -0.5, Complex(0, 3), 0, 0, Complex(-2, -1);
  const SchurResolvent sr{Generator(t)};
  ComplexMatrix y = ComplexMatrix::Identity(3, 3);
  for (Eigen::Index i = 0; i < 3; ++i) CHECK_THROWS_AS(sr.solve_in_place(t(i, i), y), Error);
  CHECK_NOTHROW(sr.solve_in_place(Complex(-0.5, 1e-6), y));
}

TEST_CASE("property: semigroup law") {
  oracle::MatrixFactory f(17);
  for (int k = 0; k < 25; ++k) {
    const int n = f.dim(1, 20);
    const Generator g(f.with_abscissa(n, f.uniform(-1.0, -0.01), k % 2 == 0));
    const double t = f.uniform(0.0, 5.0);
    const double s = f.uniform(0.0, 5.0);
    const ComplexMatrix ts = expm(g, t + s);
    const double err = spectral_norm(ComplexMatrix(ts - expm(g, t) * expm(g, s)));
    CHECK(err <= 1e-9 * (1.0 + spectral_norm(ts)));
  }
}

TEST_CASE("property: resolvent identity") {
  oracle::MatrixFactory f(18);
  for (int k = 0; k < 25; ++k) {
    const int n = f.dim(1, 15);
    const Generator g(f.with_abscissa(n, -0.2, k % 2 == 0));
    const Complex lambda(f.uniform(0.0, 2.0), f.uniform(-3.0, 3.0));
    const Complex mu(f.uniform(0.0, 2.0), f.uniform(-3.0, 3.0));
    const ComplexMatrix rl = resolvent(g, lambda);
    const ComplexMatrix rm = resolvent(g, mu);
    const double err = spectral_norm(ComplexMatrix(rl - rm - (mu - lambda) * rl * rm));
    CHECK(err <= 1e-9 * spectral_norm(rl) * spectral_norm(rm) * (1.0 + std::abs(mu - lambda)));
  }
}

TEST_CASE("property: adjoint is an isometric involution") {
  oracle::MatrixFactory f(19);
  for (int k = 0; k < 25; ++k) {
    const ComplexMatrix m = f.gaussian(f.dim(1, 25), k % 2 == 0);
    CHECK(adjoint(adjoint(m)) == m);
    CHECK(oracle::rel_diff(spectral_norm(adjoint(m)), spectral_norm(m)) <= 1e-12);
  }
}

TEST_CASE("property: log-norm bounds short-time growth") {
  oracle::MatrixFactory f(20);
  for (int k = 0; k < 20; ++k) {
    const Generator g(ComplexMatrix(f.gaussian(f.dim(1, 15), k % 2 == 0) * f.uniform(0.5, 4.0)));
    const double mu = log_norm(g);
    for (int j = 0; j <= 10; ++j) {
      const double h = 0.1 * j;
      CHECK(spectral_norm(expm(g, h)) <= std::exp(h * mu) * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("SubnormalFlush restores the floating-point state") {
  volatile double tiny = 1e-310;
  {
    const SubnormalFlush flush;
    volatile double scaled = tiny * 0.5;
#if defined(__SSE2__)
    CHECK(scaled == 0.0);
#else
    CHECK(scaled >= 0.0);
#endif
  }
  volatile double scaled = tiny * 0.5;
  CHECK(scaled > 0.0);
}
