#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gpcert/matrix_core.hpp"

namespace gpcert {

/// Sampled norms of t -> e^{tA}. vec_norms[p][k] is ||T(times[k]) x_p||.
struct TrajectorySample {
  std::vector<double> times;
  std::vector<double> op_norms;
  std::vector<std::vector<double>> vec_norms;
};

/// K = sup_{t >= 0} ||T(t)||, bracketed by sampling [0, horizon].
struct SemigroupBound {
  double K_lower = 1.0;
  double K_upper = 1.0;
  double t_star_K = 0.0;
  /// T0 with ||T(T0)|| < 1.
  double horizon = 0.0;
  /// ||T(T0)||.
  double horizon_norm = 0.0;
  /// Sample spacing h.
  double spacing = 0.0;
  TrajectorySample samples;
};

/// ||T(t)|| <= M e^{-omega t}.
struct ExpEnvelope {
  double M = 1.0;
  double omega = 0.0;
};

/// Norms on the uniform grid t_k = k * horizon / (n - 1), k = 0..n-1,
/// advanced by repeated multiplication with e^{hA}.
TrajectorySample sample_trajectory(const Generator& a, double horizon, std::size_t n,
                                   const std::vector<ComplexVector>& probes = {});

/// Smallest power-of-two time T0 >= 1 with ||T(T0)|| < 1. Throws
/// NoHorizonError when the norm exceeds 1e6 or T0 would pass 2^16.
double find_horizon(const Generator& a);

/// Samples [0, T0] with spacing h (default T0 / 1024). Past T0 the norm
/// cannot exceed the sampled supremum because ||T(kT0 + r)|| <=
/// ||T(T0)||^k ||T(r)||. K_lower is the largest norm seen after resampling
/// the highest peaks more finely. K_upper multiplies the uniform-grid maximum
/// by a bound on sup_{0 <= r <= h} ||T(r)||, obtained by sampling [0, h] on
/// successively finer grids until the log-norm bound e^{r mu} is negligible,
/// or by e^{h mu} directly when that is smaller.
SemigroupBound sup_semigroup_norm(const Generator& a, std::optional<double> h = std::nullopt);

/// Envelope with half the observed average decay rate; dominates every
/// sample. Throws NotDecaying unless the last sampled norm is below one.
ExpEnvelope fit_envelope(const TrajectorySample& ts);

}  // namespace gpcert
