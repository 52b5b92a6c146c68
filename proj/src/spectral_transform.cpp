#include "gpcert/spectral_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "gpcert/errors.hpp"
#include "gpcert/quadrature.hpp"

namespace gpcert {

namespace {

constexpr double kMaxDoublings = 80;

// Exact panel Gramian int_0^w e^{B^* t} e^{B t} dt and e^{Bw}.
template <typename Mat>
std::pair<Mat, Mat> panel_gramian(const Mat& b, double w) {
  const Eigen::Index n = b.rows();
  Mat z = Mat::Zero(2 * n, 2 * n);
  z.topLeftCorner(n, n) = -b.adjoint() * w;
  z.topRightCorner(n, n) = Mat::Identity(n, n) * w;
  z.bottomRightCorner(n, n) = b * w;
  const Mat e = z.exp();
  Mat step = e.bottomRightCorner(n, n);
  Mat g = step.adjoint() * e.topRightCorner(n, n);
  g = (0.5 * (g + g.adjoint())).eval();
  return {std::move(g), std::move(step)};
}

template <typename Mat>
std::vector<EnergyValue> time_energies_impl(const Mat& a_mat, double alpha, double norm_bound, double mu,
                                            const ComplexMatrix& probes, double tol,
                                            const std::optional<DecayData>& decay) {
  const SubnormalFlush flush;
  const Eigen::Index p = probes.cols();
  Mat b = a_mat;
  b.diagonal().array() -= alpha;

  // Power-of-two panel width with w * ||B|| <= 1.
  const double scale = std::max(1.0, norm_bound + std::abs(alpha));
  const double w = std::ldexp(1.0, -static_cast<int>(std::ceil(std::log2(scale))));
  auto [g, step] = panel_gramian(b, w);

  const RealVector x_norm2 = probes.colwise().squaredNorm().transpose();
  std::vector<EnergyValue> out(static_cast<std::size_t>(p));

  const bool have_mu = mu < alpha;
  const bool have_horizon = decay && decay->horizon_norm < 1.0;
  const bool have_k = decay && alpha > 0.0;
  if (!have_mu && !have_horizon && !have_k)
    throw Error(ErrorKind::QuadratureFailure, "no decaying tail bound for the time energy");

  // x^* M x and ||M x||^2 per probe column, in real arithmetic for real M.
  const RealMatrix xr = probes.real();
  const RealMatrix xi = probes.imag();
  const bool real_probes = xi.isZero(0.0);
  auto quadratic = [&](const Mat& m) -> RealVector {
    if constexpr (std::is_same_v<typename Mat::Scalar, double>) {
      RealVector q = (xr.cwiseProduct(m * xr)).colwise().sum().transpose();
      if (!real_probes) q += (xi.cwiseProduct(m * xi)).colwise().sum().transpose();
      return q;
    } else {
      return (probes.conjugate().cwiseProduct(m * probes)).colwise().sum().real().transpose();
    }
  };
  auto image_norm2 = [&](const Mat& m) -> RealVector {
    if constexpr (std::is_same_v<typename Mat::Scalar, double>) {
      RealVector q = (m * xr).colwise().squaredNorm().transpose();
      if (!real_probes) q += (m * xi).colwise().squaredNorm().transpose();
      return q;
    } else {
      return (m * probes).colwise().squaredNorm().transpose();
    }
  };

  for (int doubling = 0; doubling <= kMaxDoublings; ++doubling) {
    const RealVector gq = quadratic(g);
    const RealVector y2v = image_norm2(step);
    bool done = true;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double value = std::max(0.0, gq[j]);
      const double y2 = y2v[j];
      double tail = std::numeric_limits<double>::infinity();
      if (have_mu) tail = std::min(tail, y2 / (2.0 * (alpha - mu)));
      if (have_horizon) {
        const double q = decay->horizon_norm;
        tail = std::min(tail, decay->K * decay->K * decay->horizon * y2 / (1.0 - q * q));
      }
      if (have_k) tail = std::min(tail, decay->K * decay->K * y2 / (2.0 * alpha));
      out[static_cast<std::size_t>(j)] = {value, tail};
      if (x_norm2[j] == 0.0) continue;
      if (!(tail <= tol * value)) done = false;
    }
    if (done) return out;
    // G(2T) = G(T) + e^{B^* T} G(T) e^{B T}
    Mat grown = step.adjoint() * g * step;
    g += grown;
    step = (step * step).eval();
    if (!g.allFinite() || !step.allFinite())
      throw Error(ErrorKind::QuadratureFailure, "time energy diverged while extending the horizon");
  }
  throw Error(ErrorKind::QuadratureFailure, "time energy tail did not converge");
}

}  // namespace

std::vector<EnergyValue> time_energies(const Generator& a, double alpha, const ComplexMatrix& probes, double tol,
                                       const std::optional<DecayData>& decay) {
  if (probes.rows() != a.dim()) throw Error(ErrorKind::InvalidArgument, "probe dimension mismatch");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::InvalidArgument, "alpha must be >= 0");
  if (!(alpha > a.spectral_abscissa()))
    throw Error(ErrorKind::QuadratureFailure, "rescaled semigroup does not decay");
  std::optional<DecayData> d = decay;
  if (!d && !(a.log_norm() < alpha)) d = DecayData::from(sup_semigroup_norm(a));
  if (a.is_real()) return time_energies_impl(a.real_entries(), alpha, a.norm2(), a.log_norm(), probes, tol, d);
  return time_energies_impl(a.entries(), alpha, a.norm2(), a.log_norm(), probes, tol, d);
}

EnergyValue time_energy(const Generator& a, double alpha, const ComplexVector& x, double tol,
                        const std::optional<DecayData>& decay) {
  return time_energies(a, alpha, ComplexMatrix(x), tol, decay).front();
}

std::vector<EnergyValue> freq_energies(const Generator& a, double alpha, const ComplexMatrix& probes, double tol,
                                       const SchurResolvent* solver) {
  if (probes.rows() != a.dim()) throw Error(ErrorKind::InvalidArgument, "probe dimension mismatch");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  if (!std::isfinite(alpha)) throw Error(ErrorKind::InvalidArgument, "alpha must be finite");
  const double line_tol = 1e-12 * (1.0 + a.norm2() + std::abs(alpha));
  for (const Complex& l : a.spectrum())
    if (std::abs(l.real() - alpha) <= line_tol)
      throw Error(ErrorKind::SpectrumHit, "vertical line alpha + iR meets the spectrum");

  std::optional<SchurResolvent> own;
  if (!solver) {
    own.emplace(a);
    solver = &*own;
  }
  const ComplexMatrix rhs = solver->to_schur_basis(probes);
  const Eigen::Index p = probes.cols();
  const bool even = a.is_real() && probes.imag().isZero(0.0);
  const double sigma = 1.0 + a.norm2();
  constexpr double half_pi = 0.5 * std::numbers::pi;

  std::vector<double> s_points{0.0};
  for (const Complex& l : a.spectrum()) {
    const double width = std::abs(alpha - l.real());
    (void)width; s_points.push_back(even ? std::abs(l.imag()) : l.imag());
  }
  std::vector<double> breaks{even ? 0.0 : -half_pi, half_pi};
  for (double s : s_points) breaks.push_back(std::atan(s / sigma));
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> merged;
  for (double b : breaks) {
    if (b < (even ? 0.0 : -half_pi) || b > half_pi) continue;
    if (merged.empty() || b - merged.back() > 1e-12) merged.push_back(b);
  }

  const double factor = (even ? 2.0 : 1.0) / (2.0 * std::numbers::pi);
  const VectorIntegrand integrand = [&](double theta) -> Eigen::VectorXd {
    const double c = std::cos(theta);
    const double s = sigma * std::tan(theta);
    const double jac = sigma / (c * c);
    const RealVector norms = solver->column_norms(Complex(alpha, s), rhs);
    return norms.array().square() * (jac * factor);
  };

  QuadratureOptions opts;
  opts.rel_tol = tol;
  opts.abs_tol = 0.0;
  const QuadratureResult r = integrate_adaptive(integrand, merged, p, opts);
  if (!r.converged) throw Error(ErrorKind::QuadratureFailure, "frequency quadrature did not converge");
  std::vector<EnergyValue> out(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) out[static_cast<std::size_t>(j)] = {r.value[j], 0.0};
  return out;
}

EnergyValue freq_energy(const Generator& a, double alpha, const ComplexVector& x, double tol) {
  return freq_energies(a, alpha, ComplexMatrix(x), tol).front();
}

EnergyPair plancherel_check(const Generator& a, double alpha, const ComplexVector& x, double tol) {
  const EnergyValue t = time_energy(a, alpha, x, tol);
  const EnergyValue f = freq_energy(a, alpha, x, tol);
  EnergyPair pair;
  pair.time_energy = t.value;
  pair.freq_energy = f.value;
  pair.time_tail_bound = t.tail_bound;
  pair.freq_tail_bound = f.tail_bound;
  pair.rel_err = std::abs(t.value - f.value) / std::max(t.value, std::numeric_limits<double>::min());
  pair.passed = pair.rel_err <= 10.0 * tol;
  return pair;
}

std::vector<InequalityRecord> factor_two_chain(const Generator& a, double alpha, double omega, const ComplexVector& x,
                                               double tol, double K, double check_tol) {
  if (!(alpha > 0.0 && alpha < omega)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, omega)");
  const double C = 1.0 / omega;
  const double c2 = 2.0 * K * K * C;
  const ComplexMatrix probe(x);
  const SchurResolvent solver(a);
  const double f_alpha = freq_energies(a, alpha, probe, tol, &solver).front().value;
  const double f_omega = freq_energies(a, omega, probe, tol, &solver).front().value;
  const double t_omega = time_energy(a, omega, x, tol).value;

  CheckLocation at_alpha;
  at_alpha.alpha = alpha;
  CheckLocation at_omega;
  at_omega.alpha = omega;
  return {
      make_record("chain_shift", f_alpha, 4.0 * f_omega, check_tol, at_alpha),
      make_record("chain_plancherel_omega", std::abs(f_omega - t_omega), kPlancherelTol * std::max(f_omega, t_omega),
                  check_tol, at_omega),
      make_record("chain_bound", 4.0 * t_omega, c2 * x.squaredNorm(), check_tol, at_omega),
  };
}

ComplexVector resolvent_via_laplace(const Generator& a, Complex lambda, const ComplexVector& x, double tol) {
  if (x.size() != a.dim()) throw Error(ErrorKind::InvalidArgument, "probe dimension mismatch");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  const double gap = lambda.real() - a.spectral_abscissa();
  if (!(gap > 0.0)) throw Error(ErrorKind::InvalidArgument, "Re lambda must exceed the spectral abscissa");
  const Eigen::Index n = a.dim();
  if (x.norm() == 0.0) return ComplexVector::Zero(n);

  const SubnormalFlush flush;
  // sigma is the e-folding time of the slowest mode; transient growth only
  // moves mass to later t, which the adaptive refinement follows.
  const double sigma = 1.0 / gap;
  auto f = [&](double u) {
    const double t = sigma * u / (1.0 - u);
    const double jac = sigma / ((1.0 - u) * (1.0 - u));
    ComplexVector y = a.is_real() ? ComplexVector(expm_real(a, t).cast<Complex>() * x) : ComplexVector(expm(a, t) * x);
    y *= std::exp(-lambda * t) * jac;
    Eigen::VectorXd out(2 * n);
    out.head(n) = y.real();
    out.tail(n) = y.imag();
    return out;
  };
  std::vector<double> breaks{0.0};
  for (int k = -4; k <= 8; ++k) {
    const double t = sigma * std::ldexp(1.0, k);
    breaks.push_back(t / (sigma + t));
  }
  breaks.push_back(1.0);

  QuadratureOptions opts;
  opts.rel_tol = tol;
  opts.abs_tol = tol * x.norm() / (std::abs(lambda) + a.norm2());
  const QuadratureResult r = integrate_adaptive(f, breaks, 2 * n, opts);
  if (!r.converged) throw Error(ErrorKind::QuadratureFailure, "Laplace integral did not converge");
  ComplexVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = Complex(r.value(i), r.value(n + i));
  return out;
}

}  // namespace gpcert
