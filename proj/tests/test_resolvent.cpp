#include <doctest.h>

#include <cmath>

#include "gpcert/resolvent_analysis.hpp"
#include "oracles.hpp"

using namespace gpcert;

namespace {

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

Generator mat2(double a, double b, double c, double d) {
  RealMatrix m(2, 2);
  m << a, b, c, d;
  return Generator(m);
}

Generator diag(std::initializer_list<double> values) {
  RealMatrix m = RealMatrix::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) m(i, i) = v, ++i;
  return Generator(m);
}

}  // namespace

TEST_CASE("axis_spectrum_check examples") {
  CHECK_FALSE(axis_spectrum_check(mat2(0, 1, -1, 0)));
  CHECK(axis_spectrum_check(diag({-1, -2})));
  CHECK_FALSE(axis_spectrum_check(diag({-1e-15, -1}), 1e-12));
  CHECK(axis_spectrum_check(diag({-1e-9, -1}), 1e-12));
  CHECK(default_imag_tol(diag({-1, -2})) == doctest::Approx(1e-10 * 3.0));
}

TEST_CASE("resolvent_norm_at examples") {
  const Generator scalar = diag({-1});
  CHECK(resolvent_norm_at(scalar, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(resolvent_norm_at(scalar, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(resolvent_norm_at(mat2(-1, 1, 0, -1), 0.0) == doctest::Approx(kGolden).epsilon(1e-12));
}

TEST_CASE("resolvent_norm_at agrees with the SVD oracle") {
  oracle::MatrixFactory f(31);
  for (int k = 0; k < 20; ++k) {
    const int n = f.dim(1, 12);
    const ComplexMatrix a = f.with_abscissa(n, -0.1, k % 2 == 0);
    const Generator g(a);
    for (double s : {-3.0, -0.4, 0.0, 1.3}) {
      CHECK(oracle::rel_diff(resolvent_norm_at(g, s), oracle::resolvent_norm(a, s)) <= 1e-11);
    }
  }
}

TEST_CASE("Hamiltonian level test for the scalar case") {
  // ||R(is)|| = 1/sqrt(1 + s^2) = 1/2 exactly at s = +-sqrt(3).
  const auto s = hamiltonian_axis_frequencies(diag({-1}), 0.5);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-10));
  CHECK(s[1] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
  CHECK(hamiltonian_axis_frequencies(diag({-1}), 1.5).empty());
  CHECK_THROWS_AS(hamiltonian_axis_frequencies(diag({-1}), 0.0), Error);
}

TEST_CASE("Hamiltonian crossings are level points of the resolvent norm") {
  oracle::MatrixFactory f(32);
  for (int k = 0; k < 10; ++k) {
    const int n = f.dim(2, 8);
    const ComplexMatrix a = f.with_abscissa(n, -0.2, k % 2 == 0);
    const Generator g(a);
    const double gamma = 0.5 * *sup_resolvent_levelset(g).C;
    for (double s : hamiltonian_axis_frequencies(g, gamma))
      CHECK(oracle::rel_diff(oracle::resolvent_norm(a, s), gamma) <= 1e-7);
  }
}

TEST_CASE("sup_resolvent_levelset examples") {
  const ResolventBound scalar = sup_resolvent_levelset(diag({-1}));
  REQUIRE(scalar.axis_clear);
  CHECK(*scalar.C == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*scalar.s_star == 0.0);
  CHECK(scalar.method == ResolventMethod::LevelSet);
  CHECK(scalar.tail_bound_valid);

  const ResolventBound d = sup_resolvent_levelset(diag({-1, -2}));
  CHECK(*d.C == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*d.s_star == 0.0);

  const Generator jordan = mat2(-1, 1, 0, -1);
  const ResolventBound lj = sup_resolvent_levelset(jordan);
  const ResolventBound gj = sup_resolvent_grid(jordan, 1000000);
  CHECK(oracle::rel_diff(*lj.C, *gj.C) <= 1e-8);
  CHECK(*lj.C == doctest::Approx(kGolden).epsilon(1e-9));
}

TEST_CASE("sup_resolvent_grid examples") {
  const ResolventBound scalar = sup_resolvent_grid(diag({-1}), 1001);
  CHECK(*scalar.C == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(*scalar.s_star == 0.0);
  CHECK(scalar.tail_bound_valid);
  CHECK(scalar.method == ResolventMethod::GridOracle);

  CHECK(*sup_resolvent_grid(diag({-3}), 101).C == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const Generator nn = mat2(-0.1, 5, 0, -0.2);
  CHECK(oracle::rel_diff(*sup_resolvent_grid(nn, 100001).C, *sup_resolvent_levelset(nn).C) <= 1e-6);
  CHECK_THROWS_AS(sup_resolvent_grid(nn, 0), Error);
}

TEST_CASE("axis spectrum leaves C and s_star empty") {
  const Generator rot = mat2(0, 1, -1, 0);
  for (const ResolventBound& r : {sup_resolvent_levelset(rot), sup_resolvent_grid(rot, 11)}) {
    CHECK_FALSE(r.axis_clear);
    CHECK_FALSE(r.C.has_value());
    CHECK_FALSE(r.s_star.has_value());
  }
}

TEST_CASE("property: level-set invariants on random matrices") {
  oracle::MatrixFactory f(33);
  for (int k = 0; k < 30; ++k) {
    const int n = f.dim(1, 10);
    const ComplexMatrix a = f.with_abscissa(n, -f.uniform(0.05, 1.0), k % 2 == 0);
    const Generator g(a);
    const ResolventBound r = sup_resolvent_levelset(g, 1e-8);
    REQUIRE(r.axis_clear);
    const double C = *r.C;

    double dist = INFINITY;
    for (const Complex& l : g.spectrum()) dist = std::min(dist, std::abs(l.real()));
    CHECK(C >= 1.0 / dist - 1e-8);

    const double at_star = resolvent_norm_at(g, *r.s_star);
    CHECK(C >= at_star - 1e-8);
    CHECK(C <= at_star * (1.0 + 1e-6));

    for (const auto& [s, v] : r.probed) CHECK(C >= resolvent_norm_at(g, s) - 1e-9);

    // Independent brute force: SVD on a dense grid plus golden section.
    const auto [ref, ref_s] = oracle::resolvent_sup(a, 4001, g.norm2() + 1.0 / C + 1.0);
    CHECK(oracle::rel_diff(C, ref) <= 1e-6);
    (void)ref_s;
  }
}

TEST_CASE("property: normal matrices have C = max 1/|Re lambda|") {
  oracle::MatrixFactory f(34);
  for (int k = 0; k < 20; ++k) {
    const int n = f.dim(1, 8);
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    double expected = 0.0;
    for (int i = 0; i < n; ++i) {
      d(i, i) = Complex(-f.uniform(0.05, 3.0), f.uniform(-5.0, 5.0));
      expected = std::max(expected, 1.0 / -d(i, i).real());
    }
    const ResolventBound r = sup_resolvent_levelset(Generator(d));
    CHECK(oracle::rel_diff(*r.C, expected) <= 1e-8);
  }
}

TEST_CASE("property: scaling covariance C(A/beta) = beta C(A)") {
  oracle::MatrixFactory f(35);
  for (int k = 0; k < 15; ++k) {
    const int n = f.dim(1, 8);
    const ComplexMatrix a = f.with_abscissa(n, -f.uniform(0.1, 1.0), k % 2 == 0);
    const double beta = f.uniform(0.1, 10.0);
    const double c1 = *sup_resolvent_levelset(Generator(a), 1e-10).C;
    const double c2 = *sup_resolvent_levelset(Generator(ComplexMatrix(a / beta)), 1e-10).C;
    CHECK(oracle::rel_diff(c2, beta * c1) <= 1e-8);
  }
}

TEST_CASE("s_star prefers the smallest |s| among maximizers") {
  // Both eigenvalues sit at distance 1 from the axis; the maximizers are
  // s = 0 and s = 5.
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = Complex(-1.0, 5.0);
  d(1, 1) = Complex(-1.0, 0.0);
  const ResolventBound r = sup_resolvent_levelset(Generator(d));
  CHECK(*r.C == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(*r.s_star) < 1e-6);
}

TEST_CASE("level set needs far fewer evaluations than the grid") {
  const Generator nn = mat2(-0.1, 5, 0, -0.2);
  const ResolventBound l = sup_resolvent_levelset(nn);
  const ResolventBound g = sup_resolvent_grid(nn, 100000);
  CHECK(l.evaluations * 10 <= g.evaluations);
  CHECK(l.evaluations == l.probed.size());
}
