#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include <Eigen/Dense>

namespace gpcert {

/// Result of a vector-valued adaptive integration. All components share the
/// same nodes; error estimates are per component.
struct QuadratureResult {
  Eigen::VectorXd value;
  Eigen::VectorXd error;
  std::size_t panels = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_panels = 200000;
};

using VectorIntegrand = std::function<Eigen::VectorXd(double)>;

/// Globally adaptive 15-point Gauss-Kronrod integration over the panels
/// delimited by `breakpoints` (sorted, at least two). The panel with the
/// largest relative error is bisected until every component satisfies
/// error <= max(abs_tol, rel_tol * |value|). The integrand is never evaluated
/// at a breakpoint, so integrable endpoint singularities of a change of
/// variables are harmless.
QuadratureResult integrate_adaptive(const VectorIntegrand& f, std::span<const double> breakpoints,
                                    Eigen::Index components, const QuadratureOptions& opts = {});

}  // namespace gpcert
