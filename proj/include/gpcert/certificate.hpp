#pragma once

// Stability certificate for e^{tA}: hypotheses (clear imaginary axis,
// bounded resolvent on it, bounded semigroup), the derived constants
//
//   C = sup_s ||R(is)||,  omega = 1/C,  K = sup_t ||T(t)||,  c = K sqrt(2C),
//
// and numerical verification of every inequality that leads from those
// constants to the decay envelopes
//
//   ||T(t)|| <= K c t^{-1/2},   ||T(t)|| <= c^2 t^{-1},   ||T(t)|| <= 2K e^{-omega' t}.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpcert/inequality.hpp"
#include "gpcert/matrix_core.hpp"
#include "gpcert/semigroup_analysis.hpp"
#include "gpcert/verdict.hpp"

namespace gpcert {

struct CertifyConfig {
  double check_tol = kDefaultCheckTol;
  /// Relative width of the final level-set bracket for C.
  double resolvent_rel_tol = 1e-9;
  /// Relative accuracy of time and frequency energies.
  double energy_tol = 1e-8;
  /// Rescaling parameters are these fractions of omega ...
  std::vector<double> alpha_fractions{0.125, 0.25, 0.5, 0.9};
  /// ... plus this one standing in for the limit alpha -> 0+.
  double alpha_surrogate = 1e-8;
  /// Pseudo-random unit probes added to the canonical basis.
  std::size_t random_probes = 8;
  std::uint64_t seed = 20240917;
  /// Probes whose frequency energies are integrated (the random probes
  /// first, then evenly spaced basis vectors).
  std::size_t quadrature_probes = 8;
  /// Sample times for the domination check of the extracted exponential.
  std::size_t exp_pair_samples = 256;
  /// Spacing of the sup-norm sampling; default horizon / 1024.
  std::optional<double> sample_spacing;
  /// Largest dimension for which R(is) x is also recomputed as a Laplace
  /// integral of the trajectory (one matrix exponential per node).
  std::size_t laplace_max_dim = 16;
};

/// Bound constant * t^exponent.
struct PowerEnvelope {
  double constant = 0.0;
  double exponent = 0.0;
};

/// ||T(t)|| <= M e^{-omega t}, derived from ||T(t_star)|| <= 1/2.
struct ExpPair {
  double M = 0.0;
  double omega = 0.0;
  double t_star = 0.0;
};

struct GpCertificate {
  Verdict verdict = Verdict::VerificationFailed;
  /// Human-readable reason for non-stable verdicts.
  std::string diagnostic;
  Eigen::Index dim = 0;
  double spectral_abscissa = 0.0;
  std::optional<double> C;
  std::optional<double> s_star;
  std::optional<double> K;
  /// Sampled K padded by the log-norm growth allowed between samples.
  std::optional<double> K_upper;
  std::optional<double> omega;
  std::optional<double> c;
  std::optional<PowerEnvelope> envelope_half;
  std::optional<PowerEnvelope> envelope_one;
  std::optional<ExpPair> exp_pair;
  /// Envelope fitted to the sampled trajectory, input of the necessity check.
  std::optional<ExpEnvelope> fitted_envelope;
  std::vector<InequalityRecord> checks;

  bool all_passed() const;
};

/// Wall-clock milliseconds per pipeline stage, in execution order.
struct StageTimings {
  std::vector<std::pair<std::string, double>> ms;
};

/// Full pipeline. Verdicts:
///   HypothesisViolatedAxisSpectrum        an eigenvalue on the imaginary axis
///   HypothesisViolatedUnboundedResolvent  the level-set search for C diverges
///   NotBounded                            sampled ||T(t)|| exceeds 1e6
///   ExponentiallyStable                   every check passed
///   VerificationFailed                    some check failed
/// Other errors propagate.
GpCertificate certify(const Generator& a, const CertifyConfig& cfg = {}, StageTimings* timings = nullptr);

/// Canonical basis of C^n followed by `random` unit vectors drawn from a
/// seeded Gaussian; real vectors when `real` is set.
ComplexMatrix probe_vectors(Eigen::Index n, std::size_t random, std::uint64_t seed, bool real);

/// ||T_a(t) x||^2 <= (K^2 / t) int_0^inf ||T_a(tau) x||^2 dtau, one record per
/// probe column.
std::vector<InequalityRecord> check_rescaled_mean(const Generator& a, double alpha, double t,
                                                  const ComplexMatrix& probes, double K, double energy_tol = 1e-10,
                                                  double check_tol = kDefaultCheckTol);
/// As above with K from sup_semigroup_norm.
std::vector<InequalityRecord> check_rescaled_mean(const Generator& a, double alpha, double t,
                                                  const ComplexMatrix& probes);

/// For every alpha in (0, omega), omega = 1/C, and every s:
///   "resolvent_shift_norm"    ||R(alpha + is)|| <= 1 / (omega - alpha)
///   "resolvent_shift_vector"  ||R(alpha + is) x|| <= 2 ||R(omega + is) x||, per probe
std::vector<InequalityRecord> check_resolvent_shift_bounds(const Generator& a, double C,
                                                           const std::vector<double>& alphas,
                                                           const std::vector<double>& s_list,
                                                           const ComplexMatrix& probes,
                                                           double check_tol = kDefaultCheckTol);

/// "envelope_half": ||T(t)|| <= K c t^{-1/2} at each t.
std::vector<InequalityRecord> envelope_half(const Generator& a, double K, double C, const std::vector<double>& t_list,
                                            double check_tol = kDefaultCheckTol);

/// "envelope_one": ||T(t)|| <= c^2 / t at each t, and for each pair of probe
/// columns "envelope_one_pair": |<T(t) x, y>| <= (c^2 / t) ||x|| ||y||, with
/// the inner product formed as <T(t/2) x, T(t/2)^* y> from the adjoint
/// trajectory.
std::vector<InequalityRecord> envelope_one(const Generator& a, double c, const std::vector<double>& t_list,
                                           const ComplexMatrix& pair_probes = {},
                                           double check_tol = kDefaultCheckTol);

/// "datko": int_0^inf ||T_a(tau) x||^2 dtau <= c^2 ||x||^2.
InequalityRecord datko_integral(const Generator& a, double alpha, const ComplexVector& x, double c,
                                double energy_tol = 1e-10, double check_tol = kDefaultCheckTol);

/// "necessity": C <= M / omega for the envelope ||T(t)|| <= M e^{-omega t}.
InequalityRecord necessity_check(double C, const ExpEnvelope& env, double check_tol = kDefaultCheckTol);
/// As above with C from the level-set method.
InequalityRecord necessity_check(const Generator& a, const ExpEnvelope& env, double check_tol = kDefaultCheckTol);

/// t_star = (2Kc)^2, M' = 2K, omega' = ln 2 / t_star.
ExpPair extract_exponential(double K, double c);

}  // namespace gpcert
