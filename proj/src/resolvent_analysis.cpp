#include "gpcert/resolvent_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gpcert/parallel.hpp"

namespace gpcert {

namespace {

constexpr double kTieRel = 1e-12;

// Tracks the running maximum of the resolvent norm and its location. Among
// values equal to within kTieRel the smallest |s| wins, then the positive s.
struct MaxTracker {
  double best = -1.0;
  double s_best = 0.0;

  void offer(double s, double v) {
    if (best < 0.0 || v > best * (1.0 + kTieRel)) {
      best = v;
      s_best = s;
      return;
    }
    if (v >= best * (1.0 - kTieRel)) {
      const bool closer = std::abs(s) < std::abs(s_best) || (std::abs(s) == std::abs(s_best) && s > s_best);
      if (closer) s_best = s;
      best = std::max(best, v);
    }
  }
};

struct Evaluator {
  const Generator& a;
  ResolventBound& out;
  MaxTracker tracker;

  double operator()(double s) {
    // For real A, R(-is) is the entrywise conjugate of R(is).
    if (a.is_real()) s = std::abs(s);
    const double v = resolvent_norm_at(a, s);
    ++out.evaluations;
    out.probed.emplace_back(s, v);
    tracker.offer(s, v);
    return v;
  }
};

template <typename Mat>
Mat hamiltonian(const Mat& a, double sigma) {
  const Eigen::Index n = a.rows();
  Mat h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = a;
  h.topRightCorner(n, n) = -sigma * Mat::Identity(n, n);
  h.bottomLeftCorner(n, n) = sigma * Mat::Identity(n, n);
  h.bottomRightCorner(n, n) = -a.adjoint();
  return h;
}

}  // namespace

double default_imag_tol(const Generator& a) { return 1e-10 * (1.0 + a.norm2()); }

bool axis_spectrum_check(const Generator& a, double imag_tol) {
  for (const Complex& l : a.spectrum())
    if (std::abs(l.real()) <= imag_tol) return false;
  return true;
}

double resolvent_norm_at(const Generator& a, double s) {
  return spectral_norm(resolvent(a, Complex(0.0, s)));
}

std::vector<double> hamiltonian_axis_frequencies(const Generator& a, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw Error(ErrorKind::InvalidArgument, "Hamiltonian level must be positive and finite");
  const double sigma = 1.0 / gamma;
  const std::vector<Complex> ev = a.is_real() ? eigenvalues(hamiltonian(a.real_entries(), sigma))
                                              : eigenvalues(hamiltonian(a.entries(), sigma));
  const double tol = 1e-8 * (a.norm2() + sigma);
  std::vector<double> freqs;
  for (const Complex& l : ev)
    if (std::abs(l.real()) <= tol) freqs.push_back(l.imag());
  std::sort(freqs.begin(), freqs.end());
  return freqs;
}

ResolventBound sup_resolvent_levelset(const Generator& a, double rel_tol) {
  if (!(rel_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "rel_tol must be positive");
  ResolventBound out;
  out.method = ResolventMethod::LevelSet;
  out.axis_clear = axis_spectrum_check(a);
  if (!out.axis_clear) return out;

  Evaluator eval{a, out, {}};
  const double radius = a.norm2() + 1.0;

  // Coarse start: the origin, the imaginary parts of the eigenvalues nearest
  // the axis, and a uniform sweep.
  std::vector<double> coarse{0.0};
  std::vector<Complex> near = a.spectrum();
  std::sort(near.begin(), near.end(), [](Complex l, Complex r) {
    if (std::abs(l.real()) != std::abs(r.real())) return std::abs(l.real()) < std::abs(r.real());
    return l.imag() < r.imag();
  });
  for (std::size_t k = 0; k < near.size() && k < 16; ++k)
    coarse.push_back(a.is_real() ? std::abs(near[k].imag()) : near[k].imag());
  constexpr int kSweep = 8;
  for (int k = 0; k <= kSweep; ++k) {
    const double s = -radius + 2.0 * radius * k / kSweep;
    coarse.push_back(a.is_real() ? std::abs(s) : s);
  }
  std::sort(coarse.begin(), coarse.end());
  coarse.erase(std::unique(coarse.begin(), coarse.end()), coarse.end());

  try {
    for (double s : coarse) eval(s);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SpectrumHit)
      throw Error(ErrorKind::BracketFailure, "resolvent singular on the imaginary axis");
    throw;
  }
  const double gamma0 = eval.tracker.best;

  constexpr int kMaxIter = 200;
  const double growth_cap = gamma0 * std::ldexp(1.0, 60);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const double gamma = eval.tracker.best;
    if (!std::isfinite(gamma) || gamma > growth_cap)
      throw Error(ErrorKind::BracketFailure, "resolvent norm grows without bound along the axis");
    const std::vector<double> freqs = hamiltonian_axis_frequencies(a, gamma * (1.0 + rel_tol));
    if (freqs.empty()) break;

    std::vector<double> candidates;
    if (freqs.size() == 1) {
      candidates.push_back(freqs.front());
    } else {
      for (std::size_t k = 0; k + 1 < freqs.size(); ++k) candidates.push_back(0.5 * (freqs[k] + freqs[k + 1]));
    }
    try {
      for (double s : candidates) eval(s);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SpectrumHit)
        throw Error(ErrorKind::BracketFailure, "resolvent singular on the imaginary axis");
      throw;
    }
    // The crossing test flagged frequencies above the level but no probe
    // improved on it: the flagged eigenvalues are rounding artefacts of a
    // level already within rounding of the supremum.
    if (!(eval.tracker.best > gamma)) break;
  }

  out.C = eval.tracker.best;
  out.s_star = eval.tracker.s_best;
  // Any s with ||R(is)|| >= C satisfies |s| <= ||A|| + 1/C.
  out.search_radius = a.norm2() + 1.0 / *out.C;
  out.tail_bound_valid = true;
  return out;
}

ResolventBound sup_resolvent_grid(const Generator& a, std::size_t n_points) {
  if (n_points == 0) throw Error(ErrorKind::InvalidArgument, "grid needs at least one point");
  ResolventBound out;
  out.method = ResolventMethod::GridOracle;
  out.axis_clear = axis_spectrum_check(a);
  if (!out.axis_clear) return out;

  const double s_max = 10.0 * (a.norm2() + 1.0);
  out.search_radius = s_max;
  std::vector<double> grid(n_points);
  for (std::size_t j = 0; j < n_points; ++j)
    grid[j] = n_points == 1 ? 0.0 : -s_max + 2.0 * s_max * static_cast<double>(j) / static_cast<double>(n_points - 1);
  std::vector<double> values(n_points);
  parallel_for(n_points, [&](std::size_t j) { values[j] = resolvent_norm_at(a, grid[j]); });

  MaxTracker tracker;
  std::size_t best_index = 0;
  out.probed.reserve(n_points + 128);
  for (std::size_t j = 0; j < n_points; ++j) {
    out.probed.emplace_back(grid[j], values[j]);
    const double before = tracker.s_best;
    const double before_v = tracker.best;
    tracker.offer(grid[j], values[j]);
    if (tracker.s_best != before || tracker.best != before_v) best_index = j;
  }
  out.evaluations = n_points;

  // Golden-section polish of the cell around the best grid point.
  if (n_points >= 3) {
    double lo = grid[best_index > 0 ? best_index - 1 : 0];
    double hi = grid[std::min(best_index + 1, n_points - 1)];
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    auto probe = [&](double s) {
      const double v = resolvent_norm_at(a, s);
      ++out.evaluations;
      out.probed.emplace_back(s, v);
      tracker.offer(s, v);
      return v;
    };
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = probe(x1);
    double f2 = probe(x2);
    for (int it = 0; it < 80 && (hi - lo) > 1e-13 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
      if (f1 >= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = probe(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = probe(x2);
      }
    }
  }

  out.C = tracker.best;
  out.s_star = tracker.s_best;
  out.tail_bound_valid = 1.0 / (s_max - a.norm2()) < *out.C;
  return out;
}

}  // namespace gpcert
