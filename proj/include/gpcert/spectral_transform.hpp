#pragma once

// Time-domain and frequency-domain energies of the rescaled semigroup
// T_a(t) = e^{-a t} e^{tA}:
//
//   time:  int_0^inf ||T_a(t) x||^2 dt
//   freq:  (1/2pi) int_R ||R(a + is) x||^2 ds
//
// which agree by Plancherel because s -> R(a + is)x is the Fourier transform
// of t -> T_a(t)x extended by zero to t < 0. The two are computed by
// unrelated routes so that their agreement is a genuine check.

#include <optional>
#include <vector>

#include "gpcert/inequality.hpp"
#include "gpcert/matrix_core.hpp"
#include "gpcert/semigroup_analysis.hpp"

namespace gpcert {

struct EnergyValue {
  double value = 0.0;
  /// Upper bound on the mass outside the integrated range.
  double tail_bound = 0.0;
};

struct EnergyPair {
  double time_energy = 0.0;
  double freq_energy = 0.0;
  double rel_err = 0.0;
  double time_tail_bound = 0.0;
  double freq_tail_bound = 0.0;
  bool passed = false;
};

/// Decay data used for tail bounds: ||T(t)|| <= K and ||T(T0)|| = q < 1.
struct DecayData {
  double K = 1.0;
  double horizon = 1.0;
  double horizon_norm = 0.0;

  static DecayData from(const SemigroupBound& b) { return {b.K_lower, b.horizon, b.horizon_norm}; }
};

/// Time energies of every column of `probes`.
///
/// [0, T] is covered by panels of width w on which the Gramian
/// G(w) = int_0^w T_a(t)^* T_a(t) dt is integrated exactly through the
/// block exponential of [[-B^*, I], [0, B]], B = A - aI. The composite sum
/// is built by doubling, G(2T) = G(T) + T_a(T)^* G(T) T_a(T), until the tail
/// past T is certifiably below tol * value for each probe. Tail bounds, the
/// smallest valid one being used, for y = T_a(T) x:
///   ||y||^2 / (2 (a - mu))            when mu = log_norm(A) < a,
///   K^2 T0 ||y||^2 / (1 - q^2)        from the semigroup property,
///   K^2 ||y||^2 / (2 a)               when a > 0.
/// When no decay data is passed and mu >= a, it is computed from
/// sup_semigroup_norm. Throws QuadratureFailure if no bound decays.
std::vector<EnergyValue> time_energies(const Generator& a, double alpha, const ComplexMatrix& probes, double tol,
                                       const std::optional<DecayData>& decay = std::nullopt);
EnergyValue time_energy(const Generator& a, double alpha, const ComplexVector& x, double tol,
                        const std::optional<DecayData>& decay = std::nullopt);

/// Frequency energies of every column of `probes` by adaptive Gauss-Kronrod
/// quadrature over the whole line, mapped to a finite interval by
/// s = sigma tan(theta). Initial panels are split at the imaginary parts of
/// the eigenvalues and one peak width to either side. For real A and real
/// probes the integrand is even in s and only s >= 0 is integrated.
std::vector<EnergyValue> freq_energies(const Generator& a, double alpha, const ComplexMatrix& probes, double tol,
                                       const SchurResolvent* solver = nullptr);
EnergyValue freq_energy(const Generator& a, double alpha, const ComplexVector& x, double tol);

/// Both energies; passes when rel_err <= 10 tol.
EnergyPair plancherel_check(const Generator& a, double alpha, const ComplexVector& x, double tol);

/// R(lambda) x computed as the Laplace transform int_0^inf e^{-lambda t} T(t) x dt
/// by adaptive quadrature in t, mapped to a finite interval by
/// t = sigma u / (1 - u). Requires Re lambda > spectral abscissa. The absolute
/// error target tol ||x|| / (|lambda| + ||A||) is below tol ||R(lambda) x||.
ComplexVector resolvent_via_laplace(const Generator& a, Complex lambda, const ComplexVector& x, double tol);

/// Relative tolerance of the Plancherel equality records.
inline constexpr double kPlancherelTol = 1e-6;

/// The three links of the integral chain for one probe:
///   (1/2pi) int ||R(a+is)x||^2 <= 4 (1/2pi) int ||R(w+is)x||^2
///   (1/2pi) int ||R(w+is)x||^2  = int ||T_w x||^2
///   4 int ||T_w x||^2 <= c^2 ||x||^2,   c^2 = 2 K^2 C
/// with w = omega = 1/C.
std::vector<InequalityRecord> factor_two_chain(const Generator& a, double alpha, double omega, const ComplexVector& x,
                                               double tol, double K, double check_tol = kDefaultCheckTol);

}  // namespace gpcert
