#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "gpcert/matrix_core.hpp"

namespace gpcert {

enum class ResolventMethod { LevelSet, GridOracle };

constexpr std::string_view to_string(ResolventMethod m) {
  return m == ResolventMethod::LevelSet ? "LevelSet" : "GridOracle";
}

/// sup over the imaginary axis of the resolvent norm, C = sup_s ||R(is, A)||.
struct ResolventBound {
  bool axis_clear = false;
  std::optional<double> C;
  std::optional<double> s_star;
  ResolventMethod method = ResolventMethod::LevelSet;
  double search_radius = 0.0;
  bool tail_bound_valid = false;
  /// Number of resolvent-norm evaluations performed.
  std::size_t evaluations = 0;
  /// Every probed (s, ||R(is)||) pair, in evaluation order.
  std::vector<std::pair<double, double>> probed;
};

/// Default spectrum-on-axis tolerance, 1e-10 (1 + ||A||).
double default_imag_tol(const Generator& a);

/// True iff no eigenvalue has |Re lambda| <= imag_tol.
bool axis_spectrum_check(const Generator& a, double imag_tol);
inline bool axis_spectrum_check(const Generator& a) { return axis_spectrum_check(a, default_imag_tol(a)); }

/// ||R(is, A)||_2.
double resolvent_norm_at(const Generator& a, double s);

/// Frequencies s such that is is (numerically) an eigenvalue of the
/// Hamiltonian [[A, -I/gamma], [I/gamma, -A^*]]. These are exactly the s
/// at which 1/gamma is a singular value of is - A, so ||R(is)|| >= gamma
/// holds on some s iff the returned list is nonempty. Sorted ascending.
std::vector<double> hamiltonian_axis_frequencies(const Generator& a, double gamma);

/// Level-set computation of C. Starting from the best value on a coarse set
/// of frequencies, the level gamma is raised to the largest resolvent norm
/// found at midpoints between consecutive crossing frequencies of the
/// Hamiltonian at level gamma (1 + rel_tol); it stops when that level is no
/// longer crossed, so C lies in [gamma, gamma (1 + rel_tol)].
ResolventBound sup_resolvent_levelset(const Generator& a, double rel_tol = 1e-8);

/// Brute-force oracle: evaluates the resolvent norm on n_points equispaced
/// frequencies in [-S, S], S = 10 (||A|| + 1), then polishes the best cell by
/// golden-section search. The Neumann bound ||R(is)|| <= 1 / (|s| - ||A||)
/// certifies the tail beyond S when it falls below the grid maximum.
ResolventBound sup_resolvent_grid(const Generator& a, std::size_t n_points);

}  // namespace gpcert
