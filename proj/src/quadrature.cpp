#include "gpcert/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "gpcert/errors.hpp"

namespace gpcert {

namespace {

// Kronrod abscissae on [0,1]; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  Eigen::VectorXd value;
  Eigen::VectorXd error;
  double priority = 0.0;
};

Panel evaluate_panel(const VectorIntegrand& f, double a, double b, Eigen::Index m) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Eigen::VectorXd kronrod = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd gauss = Eigen::VectorXd::Zero(m);

  std::array<Eigen::VectorXd, 15> fv;
  fv[7] = f(center);
  kronrod += kWgk[7] * fv[7];
  gauss += kWg[3] * fv[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv[j] = f(center - dx);
    fv[14 - j] = f(center + dx);
    kronrod += kWgk[j] * (fv[j] + fv[14 - j]);
    if (j % 2 == 1) gauss += kWg[j / 2] * (fv[j] + fv[14 - j]);
  }
  // QUADPACK error estimate: the raw |K - G| difference scaled by the
  // variation of f about its mean on the panel.
  const Eigen::VectorXd mean = kronrod * 0.5;
  Eigen::VectorXd resasc = kWgk[7] * (fv[7] - mean).cwiseAbs();
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * ((fv[j] - mean).cwiseAbs() + (fv[14 - j] - mean).cwiseAbs());
  Panel p;
  p.a = a;
  p.b = b;
  p.value = kronrod * half;
  p.error.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double diff = std::abs((kronrod[i] - gauss[i]) * half);
    const double asc = resasc[i] * std::abs(half);
    double err = diff;
    if (asc != 0.0 && diff != 0.0) err = asc * std::min(1.0, std::pow(200.0 * diff / asc, 1.5));
    p.error[i] = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(p.value[i]));
  }
  return p;
}

}  // namespace

QuadratureResult integrate_adaptive(const VectorIntegrand& f, std::span<const double> breakpoints,
                                    Eigen::Index components, const QuadratureOptions& opts) {
  if (breakpoints.size() < 2) throw Error(ErrorKind::InvalidArgument, "integrate_adaptive needs two breakpoints");
  const Eigen::Index m = components;

  std::vector<Panel> panels;
  panels.reserve(breakpoints.size() * 2);
  QuadratureResult result;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    panels.push_back(evaluate_panel(f, breakpoints[i], breakpoints[i + 1], m));
    result.evaluations += 15;
  }
  if (panels.empty()) {
    result.value = Eigen::VectorXd::Zero(m);
    result.error = Eigen::VectorXd::Zero(m);
    result.converged = true;
    return result;
  }

  Eigen::VectorXd total = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd total_err = Eigen::VectorXd::Zero(m);
  for (const Panel& p : panels) {
    total += p.value;
    total_err += p.error;
  }

  auto tolerance = [&](const Eigen::VectorXd& value) {
    Eigen::VectorXd tol(m);
    for (Eigen::Index j = 0; j < m; ++j)
      tol[j] = std::max({opts.abs_tol, opts.rel_tol * std::abs(value[j]), std::numeric_limits<double>::min()});
    return tol;
  };
  auto priority = [&](const Panel& p, const Eigen::VectorXd& tol) {
    return (p.error.array() / tol.array()).maxCoeff();
  };

  // Max-heap of panel indices keyed by priority. Priorities are refreshed
  // lazily against a tolerance snapshot; the snapshot is rebuilt whenever the
  // totals drift, so ordering stays deterministic for a given input.
  Eigen::VectorXd tol = tolerance(total);
  auto cmp = [&](std::size_t l, std::size_t r) {
    if (panels[l].priority != panels[r].priority) return panels[l].priority < panels[r].priority;
    return panels[l].a > panels[r].a;
  };
  std::vector<std::size_t> heap;
  auto push = [&](std::size_t i) {
    heap.push_back(i);
    std::push_heap(heap.begin(), heap.end(), cmp);
  };
  auto rebuild = [&]() {
    heap.clear();
    for (std::size_t i = 0; i < panels.size(); ++i) {
      panels[i].priority = priority(panels[i], tol);
      heap.push_back(i);
    }
    std::make_heap(heap.begin(), heap.end(), cmp);
  };
  rebuild();

  std::size_t since_rebuild = 0;
  while (true) {
    bool done = true;
    const Eigen::VectorXd need = tolerance(total);
    for (Eigen::Index j = 0; j < m; ++j)
      if (total_err[j] > need[j]) {
        done = false;
        break;
      }
    if (done) {
      result.converged = true;
      break;
    }
    if (panels.size() >= opts.max_panels) break;

    if (since_rebuild > panels.size() / 4 + 16) {
      tol = need;
      rebuild();
      since_rebuild = 0;
    }
    std::pop_heap(heap.begin(), heap.end(), cmp);
    const std::size_t idx = heap.back();
    heap.pop_back();
    const Panel parent = panels[idx];
    const double mid = 0.5 * (parent.a + parent.b);
    if (!(mid > parent.a && mid < parent.b)) {
      // Panel cannot be split further in floating point.
      panels[idx].priority = -1.0;
      panels[idx].error.setZero();
      total_err -= parent.error;
      push(idx);
      continue;
    }
    Panel left = evaluate_panel(f, parent.a, mid, m);
    Panel right = evaluate_panel(f, mid, parent.b, m);
    result.evaluations += 30;
    total += left.value + right.value - parent.value;
    total_err += left.error + right.error - parent.error;
    left.priority = priority(left, tol);
    right.priority = priority(right, tol);
    panels[idx] = std::move(left);
    panels.push_back(std::move(right));
    push(idx);
    push(panels.size() - 1);
    ++since_rebuild;
  }

  // Fixed-order final summation, left to right.
  std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  result.value = Eigen::VectorXd::Zero(m);
  result.error = Eigen::VectorXd::Zero(m);
  for (const Panel& p : panels) {
    result.value += p.value;
    result.error += p.error;
  }
  result.panels = panels.size();
  return result;
}

}  // namespace gpcert
