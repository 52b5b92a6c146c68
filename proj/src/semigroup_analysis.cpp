#include "gpcert/semigroup_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

namespace gpcert {

namespace {

constexpr double kOverflowNorm = 1e300;
constexpr double kDivergedNorm = 1e6;
constexpr double kMaxHorizon = 65536.0;
constexpr int kRefineSteps = 16;
constexpr std::size_t kRefinePeaks = 8;
constexpr double kPeakFraction = 0.75;
constexpr int kGrowthSteps = 64;

template <typename Mat>
TrajectorySample step_trajectory(const Mat& step, std::size_t n, double dt, const std::vector<ComplexVector>& probes) {
  const SubnormalFlush flush;
  TrajectorySample ts;
  ts.times.resize(n);
  ts.op_norms.resize(n);
  ts.vec_norms.assign(probes.size(), std::vector<double>(n));
  const Eigen::Index dim = step.rows();
  Mat p = Mat::Identity(dim, dim);
  Mat next(dim, dim);
  for (std::size_t k = 0; k < n; ++k) {
    ts.times[k] = dt * static_cast<double>(k);
    if (k > 0) {
      next.noalias() = p * step;
      p.swap(next);
    }
    const double nrm = k == 0 ? 1.0 : spectral_norm(p);
    if (!std::isfinite(nrm) || nrm > kOverflowNorm)
      throw Error(ErrorKind::Overflow, "semigroup norm overflowed while sampling");
    ts.op_norms[k] = nrm;
    for (std::size_t q = 0; q < probes.size(); ++q) {
      if constexpr (std::is_same_v<typename Mat::Scalar, double>) {
        ts.vec_norms[q][k] = (p.template cast<Complex>() * probes[q]).norm();
      } else {
        ts.vec_norms[q][k] = (p * probes[q]).norm();
      }
    }
  }
  return ts;
}

template <typename Mat>
Mat exp_of(const Generator& a, double t) {
  if constexpr (std::is_same_v<typename Mat::Scalar, double>)
    return expm_real(a, t);
  else
    return expm(a, t);
}

struct Peak {
  double norm = 0.0;
  double time = 0.0;
};

/// Largest of ||T(t0 + j dt)||, j = 0..count, given start = T(t0) and step = T(dt).
template <typename Mat>
Peak scan(Mat p, const Mat& step, double t0, double dt, int count) {
  Peak best{spectral_norm(p), t0};
  Mat next(p.rows(), p.cols());
  for (int j = 1; j <= count; ++j) {
    next.noalias() = p * step;
    p.swap(next);
    const double nrm = spectral_norm(p);
    if (nrm > best.norm) best = {nrm, t0 + dt * j};
  }
  return best;
}

/// Resamples the brackets around the highest local maxima of the uniform
/// samples at spacing/16, then the best bracket found at spacing/256.
template <typename Mat>
Peak refine_peak(const Generator& a, const TrajectorySample& ts, double spacing) {
  const SubnormalFlush flush;
  const auto& norms = ts.op_norms;
  const std::size_t last = norms.size() - 1;
  Peak best{0.0, 0.0};
  std::vector<std::size_t> peaks;
  for (std::size_t k = 0; k <= last; ++k) {
    if (norms[k] > best.norm) best = {norms[k], ts.times[k]};
    const bool left = k == 0 || norms[k] >= norms[k - 1];
    const bool right = k == last || norms[k] >= norms[k + 1];
    if (left && right) peaks.push_back(k);
  }
  std::erase_if(peaks, [&](std::size_t k) { return norms[k] < kPeakFraction * best.norm; });
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });
  if (peaks.size() > kRefinePeaks) peaks.resize(kRefinePeaks);

  const double horizon = ts.times.back();
  const auto refine_around = [&](double center, double dt) {
    const double t0 = std::max(0.0, center - kRefineSteps * dt);
    const int count = static_cast<int>(std::min<double>(2 * kRefineSteps, std::floor((horizon - t0) / dt)));
    if (count < 1) return;
    const Peak p = scan<Mat>(exp_of<Mat>(a, t0), exp_of<Mat>(a, dt), t0, dt, count);
    if (p.norm > best.norm) best = p;
  };
  for (std::size_t k : peaks) refine_around(ts.times[k], spacing / kRefineSteps);
  refine_around(best.time, spacing / (kRefineSteps * kRefineSteps));
  return best;
}

/// Upper bound on sup_{0 <= r <= h} ||T(r)||. [0, h] is sampled at h/64 and
/// sup over [0, h] <= max_j ||T(j h/64)|| sup over [0, h/64], recursively,
/// until the log-norm bound e^{h mu} on the last level is within 1e-3 of one.
template <typename Mat>
double interval_growth(const Generator& a, double h) {
  const SubnormalFlush flush;
  const double mu = std::max(0.0, a.log_norm());
  double factor = 1.0;
  double span = h;
  while (span * mu > 1e-3) {
    const double sub = span / kGrowthSteps;
    const Mat id = Mat::Identity(a.dim(), a.dim());
    factor *= scan<Mat>(id, exp_of<Mat>(a, sub), 0.0, sub, kGrowthSteps).norm;
    span = sub;
  }
  return factor * std::exp(span * mu);
}

template <typename Mat>
void bound_supremum(const Generator& a, SemigroupBound& out) {
  const auto& norms = out.samples.op_norms;
  const double sampled = *std::max_element(norms.begin(), norms.end());
  const Peak peak = refine_peak<Mat>(a, out.samples, out.spacing);
  out.K_lower = peak.norm;
  out.t_star_K = peak.time;
  const double growth = std::min(interval_growth<Mat>(a, out.spacing),
                                 std::exp(out.spacing * std::max(0.0, a.log_norm())));
  out.K_upper = std::max(out.K_lower, sampled * growth);
}

}  // namespace

TrajectorySample sample_trajectory(const Generator& a, double horizon, std::size_t n,
                                   const std::vector<ComplexVector>& probes) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw Error(ErrorKind::InvalidArgument, "horizon must be positive and finite");
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "trajectory needs at least two samples");
  for (const auto& x : probes)
    if (x.size() != a.dim()) throw Error(ErrorKind::InvalidArgument, "probe dimension mismatch");
  const double dt = horizon / static_cast<double>(n - 1);
  if (a.is_real()) return step_trajectory(expm_real(a, dt), n, dt, probes);
  return step_trajectory(expm(a, dt), n, dt, probes);
}

double find_horizon(const Generator& a) {
  if (a.spectral_abscissa() >= 0.0) {
    const double grow = a.spectral_abscissa() > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    throw NoHorizonError("spectral abscissa is not negative", grow, 0.0);
  }
  double max_norm = 1.0;
  for (double t = 1.0; t <= kMaxHorizon; t *= 2.0) {
    double nrm;
    try {
      nrm = spectral_norm(expm(a, t));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Overflow)
        throw NoHorizonError("semigroup overflowed during horizon search", std::numeric_limits<double>::infinity(), t);
      throw;
    }
    max_norm = std::max(max_norm, nrm);
    if (nrm < 1.0) return t;
    if (nrm > kDivergedNorm) throw NoHorizonError("semigroup norm exceeded 1e6", max_norm, t);
  }
  throw NoHorizonError("||T(t)|| < 1 not reached by t = 2^16", max_norm, kMaxHorizon);
}

SemigroupBound sup_semigroup_norm(const Generator& a, std::optional<double> h) {
  SemigroupBound out;
  out.horizon = find_horizon(a);
  const double spacing = h.value_or(out.horizon / 1024.0);
  if (!(spacing > 0.0)) throw Error(ErrorKind::InvalidArgument, "sample spacing must be positive");
  const auto steps = static_cast<std::size_t>(std::ceil(out.horizon / spacing - 1e-12));
  out.spacing = out.horizon / static_cast<double>(std::max<std::size_t>(steps, 1));
  out.samples = sample_trajectory(a, out.horizon, std::max<std::size_t>(steps, 1) + 1);
  out.horizon_norm = out.samples.op_norms.back();

  if (a.is_real())
    bound_supremum<RealMatrix>(a, out);
  else
    bound_supremum<ComplexMatrix>(a, out);
  return out;
}

ExpEnvelope fit_envelope(const TrajectorySample& ts) {
  if (ts.times.size() < 2 || ts.times.size() != ts.op_norms.size())
    throw Error(ErrorKind::InvalidArgument, "trajectory needs at least two aligned samples");
  const double last = ts.op_norms.back();
  const double t_last = ts.times.back();
  if (!(last < 1.0) || !(t_last > 0.0)) throw Error(ErrorKind::NotDecaying, "last sampled norm is not below one");
  ExpEnvelope env;
  env.omega = -std::log(std::max(last, 1e-300)) / t_last / 2.0;
  env.M = 1.0;
  for (std::size_t k = 0; k < ts.times.size(); ++k)
    env.M = std::max(env.M, ts.op_norms[k] * std::exp(env.omega * ts.times[k]));
  return env;
}

}  // namespace gpcert
