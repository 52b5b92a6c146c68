#include "gpcert/certificate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "gpcert/resolvent_analysis.hpp"
#include "gpcert/spectral_transform.hpp"

namespace gpcert {

namespace {

constexpr double kNotBoundedNorm = 1e6;
/// Relative agreement required between the Laplace integral and R(is) x.
constexpr double kLaplaceTol = 1e-6;

class Stopwatch {
 public:
  explicit Stopwatch(StageTimings* sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  void lap(const char* stage) {
    const auto now = std::chrono::steady_clock::now();
    if (sink_) sink_->ms.emplace_back(stage, std::chrono::duration<double, std::milli>(now - start_).count());
    start_ = now;
  }

 private:
  StageTimings* sink_;
  std::chrono::steady_clock::time_point start_;
};

// e^{tA} together with its norm, computed once per distinct t.
struct Propagator {
  ComplexMatrix matrix;
  double norm = 0.0;
};

class PropagatorCache {
 public:
  explicit PropagatorCache(const Generator& a) : a_(a) {}

  const Propagator& at(double t) {
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
    Propagator p;
    if (a_.is_real()) {
      const RealMatrix e = expm_real(a_, t);
      p.norm = spectral_norm(e);
      p.matrix = e.cast<Complex>();
    } else {
      p.matrix = expm(a_, t);
      p.norm = spectral_norm(p.matrix);
    }
    return cache_.emplace(t, std::move(p)).first->second;
  }

 private:
  const Generator& a_;
  std::map<double, Propagator> cache_;
};

CheckLocation at_t(double t) {
  CheckLocation l;
  l.t = t;
  return l;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void validate(const CertifyConfig& cfg) {
  if (!(cfg.check_tol >= 0.0)) throw Error(ErrorKind::InvalidArgument, "check_tol must be >= 0");
  if (!(cfg.resolvent_rel_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "resolvent_rel_tol must be positive");
  if (!(cfg.energy_tol > 0.0 && cfg.energy_tol < 1e-2))
    throw Error(ErrorKind::InvalidArgument, "energy_tol must lie in (0, 1e-2)");
  for (double f : cfg.alpha_fractions)
    if (!(f > 0.0 && f < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha fractions must lie in (0, 1)");
  if (!(cfg.alpha_surrogate > 0.0 && cfg.alpha_surrogate < 1.0))
    throw Error(ErrorKind::InvalidArgument, "alpha_surrogate must lie in (0, 1)");
  if (cfg.exp_pair_samples < 2) throw Error(ErrorKind::InvalidArgument, "exp_pair_samples must be >= 2");
  if (cfg.sample_spacing && !(*cfg.sample_spacing > 0.0))
    throw Error(ErrorKind::InvalidArgument, "sample_spacing must be positive");
}

// Columns used for frequency quadrature and pairwise checks: the random
// probes, then basis vectors spread evenly over the index range.
std::vector<Eigen::Index> pick_columns(Eigen::Index n, std::size_t random, std::size_t limit) {
  std::vector<Eigen::Index> cols;
  for (std::size_t r = 0; r < random && cols.size() < limit; ++r) cols.push_back(n + static_cast<Eigen::Index>(r));
  const std::size_t basis = std::min<std::size_t>(limit - cols.size(), static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < basis; ++k)
    cols.push_back(static_cast<Eigen::Index>((k * static_cast<std::size_t>(n)) / basis));
  return cols;
}

ComplexMatrix select_columns(const ComplexMatrix& m, const std::vector<Eigen::Index>& cols) {
  ComplexMatrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(cols[k]);
  return out;
}

std::vector<InequalityRecord> pair_records(PropagatorCache& props, double c, const std::vector<double>& t_list,
                                           const ComplexMatrix& pair_probes, double check_tol,
                                           const std::vector<double>* energy, const std::vector<double>* adj_energy,
                                           const std::vector<Eigen::Index>* labels = nullptr) {
  std::vector<InequalityRecord> out;
  const Eigen::Index m = pair_probes.cols();
  if (m == 0) return out;
  const RealVector norms = pair_probes.colwise().norm().transpose();
  for (double t : t_list) {
    const ComplexMatrix& half = props.at(0.5 * t).matrix;
    const ComplexMatrix fwd = half * pair_probes;
    const ComplexMatrix bwd = half.adjoint() * pair_probes;
    // gram(i, j) = <T(t/2) x_i, T(t/2)^* y_j> = <T(t) x_i, y_j>
    const ComplexMatrix gram = bwd.adjoint() * fwd;
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        CheckLocation loc = at_t(t);
        loc.probe = static_cast<int>(labels ? (*labels)[static_cast<std::size_t>(i)] : i);
        loc.probe2 = static_cast<int>(labels ? (*labels)[static_cast<std::size_t>(j)] : j);
        const double ip = std::abs(gram(j, i));
        out.push_back(make_record("envelope_one_pair", ip, c * c / t * norms[i] * norms[j], check_tol, loc));
        if (energy && adj_energy)
          out.push_back(make_record("envelope_one_cauchy_schwarz", t * ip,
                                    std::sqrt((*energy)[static_cast<std::size_t>(i)] *
                                              (*adj_energy)[static_cast<std::size_t>(j)]),
                                    check_tol, loc));
      }
  }
  return out;
}

std::vector<double> values_of(const std::vector<EnergyValue>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].value;
  return out;
}

}  // namespace

bool GpCertificate::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const InequalityRecord& r) { return r.passed; });
}

ComplexMatrix probe_vectors(Eigen::Index n, std::size_t random, std::uint64_t seed, bool real) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "probe dimension must be positive");
  ComplexMatrix out = ComplexMatrix::Zero(n, n + static_cast<Eigen::Index>(random));
  out.leftCols(n).setIdentity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (std::size_t r = 0; r < random; ++r) {
    auto col = out.col(n + static_cast<Eigen::Index>(r));
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = real ? 0.0 : normal(rng);
      col[i] = Complex(re, im);
    }
    col /= col.norm();
  }
  return out;
}

std::vector<InequalityRecord> check_rescaled_mean(const Generator& a, double alpha, double t,
                                                  const ComplexMatrix& probes, double K, double energy_tol,
                                                  double check_tol) {
  if (!(alpha > 0.0) || !(t > 0.0) || !std::isfinite(t))
    throw Error(ErrorKind::InvalidArgument, "rescaled mean needs alpha > 0 and t > 0");
  const auto energies = time_energies(a, alpha, probes, energy_tol);
  const ComplexMatrix y = expm(a, t) * probes;
  const double decay = std::exp(-2.0 * alpha * t);
  std::vector<InequalityRecord> out;
  for (Eigen::Index j = 0; j < probes.cols(); ++j) {
    CheckLocation loc = at_t(t);
    loc.alpha = alpha;
    loc.probe = static_cast<int>(j);
    out.push_back(make_record("rescaled_mean", decay * y.col(j).squaredNorm(),
                              K * K / t * energies[static_cast<std::size_t>(j)].value, check_tol, loc));
  }
  return out;
}

std::vector<InequalityRecord> check_rescaled_mean(const Generator& a, double alpha, double t,
                                                  const ComplexMatrix& probes) {
  return check_rescaled_mean(a, alpha, t, probes, sup_semigroup_norm(a).K_lower);
}

std::vector<InequalityRecord> check_resolvent_shift_bounds(const Generator& a, double C,
                                                           const std::vector<double>& alphas,
                                                           const std::vector<double>& s_list,
                                                           const ComplexMatrix& probes, double check_tol) {
  if (!(C > 0.0) || !std::isfinite(C)) throw Error(ErrorKind::InvalidArgument, "C must be positive and finite");
  const double omega = 1.0 / C;
  for (double al : alphas)
    if (!(al > 0.0 && al < omega)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, omega)");
  if (probes.cols() > 0 && probes.rows() != a.dim())
    throw Error(ErrorKind::InvalidArgument, "probe dimension mismatch");

  std::vector<InequalityRecord> out;
  const SchurResolvent solver(a);
  const ComplexMatrix rhs = probes.cols() > 0 ? solver.to_schur_basis(probes) : ComplexMatrix();
  for (double s : s_list) {
    const RealVector at_omega = probes.cols() > 0 ? solver.column_norms(Complex(omega, s), rhs) : RealVector();
    for (double al : alphas) {
      CheckLocation loc;
      loc.alpha = al;
      loc.s = s;
      out.push_back(make_record("resolvent_shift_norm", spectral_norm(resolvent(a, Complex(al, s))),
                                1.0 / (omega - al), check_tol, loc));
      if (probes.cols() == 0) continue;
      const RealVector at_alpha = solver.column_norms(Complex(al, s), rhs);
      for (Eigen::Index j = 0; j < probes.cols(); ++j) {
        loc.probe = static_cast<int>(j);
        out.push_back(make_record("resolvent_shift_vector", at_alpha[j], 2.0 * at_omega[j], check_tol, loc));
      }
    }
  }
  return out;
}

std::vector<InequalityRecord> envelope_half(const Generator& a, double K, double C, const std::vector<double>& t_list,
                                            double check_tol) {
  const double kc = K * K * std::sqrt(2.0 * C);
  PropagatorCache props(a);
  std::vector<InequalityRecord> out;
  for (double t : t_list) {
    if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "envelope times must be positive");
    out.push_back(make_record("envelope_half", props.at(t).norm, kc / std::sqrt(t), check_tol, at_t(t)));
  }
  return out;
}

std::vector<InequalityRecord> envelope_one(const Generator& a, double c, const std::vector<double>& t_list,
                                           const ComplexMatrix& pair_probes, double check_tol) {
  PropagatorCache props(a);
  std::vector<InequalityRecord> out;
  for (double t : t_list) {
    if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "envelope times must be positive");
    out.push_back(make_record("envelope_one", props.at(t).norm, c * c / t, check_tol, at_t(t)));
  }
  if (pair_probes.cols() > 0 && pair_probes.rows() != a.dim())
    throw Error(ErrorKind::InvalidArgument, "probe dimension mismatch");
  auto pairs = pair_records(props, c, t_list, pair_probes, check_tol, nullptr, nullptr);
  out.insert(out.end(), pairs.begin(), pairs.end());
  return out;
}

InequalityRecord datko_integral(const Generator& a, double alpha, const ComplexVector& x, double c, double energy_tol,
                                double check_tol) {
  const EnergyValue e = time_energy(a, alpha, x, energy_tol);
  CheckLocation loc;
  loc.alpha = alpha;
  return make_record("datko", e.value, c * c * x.squaredNorm(), check_tol, loc);
}

InequalityRecord necessity_check(double C, const ExpEnvelope& env, double check_tol) {
  if (!(env.omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "envelope rate must be positive");
  return make_record("necessity", C, env.M / env.omega, check_tol);
}

InequalityRecord necessity_check(const Generator& a, const ExpEnvelope& env, double check_tol) {
  const ResolventBound rb = sup_resolvent_levelset(a);
  if (!rb.C) throw Error(ErrorKind::SpectrumHit, "imaginary axis meets the spectrum");
  return necessity_check(*rb.C, env, check_tol);
}

ExpPair extract_exponential(double K, double c) {
  if (!(K > 0.0) || !(c > 0.0)) throw Error(ErrorKind::InvalidArgument, "K and c must be positive");
  ExpPair p;
  p.t_star = 4.0 * K * K * c * c;
  p.M = 2.0 * K;
  p.omega = std::numbers::ln2 / p.t_star;
  return p;
}

GpCertificate certify(const Generator& a, const CertifyConfig& cfg, StageTimings* timings) {
  validate(cfg);
  const SubnormalFlush flush;
  Stopwatch clock(timings);
  GpCertificate cert;
  cert.dim = a.dim();
  cert.spectral_abscissa = a.spectral_abscissa();

  // Hypothesis 1: clear imaginary axis.
  if (!axis_spectrum_check(a)) {
    const double tol = default_imag_tol(a);
    for (const Complex& l : a.spectrum())
      if (std::abs(l.real()) <= tol) {
        std::ostringstream msg;
        msg << "eigenvalue " << l.real() << (l.imag() < 0 ? " - " : " + ") << std::abs(l.imag())
            << "i lies on the imaginary axis";
        cert.diagnostic = msg.str();
        break;
      }
    cert.verdict = Verdict::HypothesisViolatedAxisSpectrum;
    clock.lap("axis");
    return cert;
  }
  clock.lap("axis");

  // Hypothesis 2: bounded resolvent on the axis.
  ResolventBound rb;
  try {
    rb = sup_resolvent_levelset(a, cfg.resolvent_rel_tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BracketFailure) throw;
    cert.verdict = Verdict::HypothesisViolatedUnboundedResolvent;
    cert.diagnostic = e.what();
    clock.lap("resolvent");
    return cert;
  }
  clock.lap("resolvent");
  const double C = *rb.C;
  cert.C = C;
  cert.s_star = rb.s_star;

  // Hypothesis 3: bounded semigroup.
  SemigroupBound sb;
  try {
    sb = sup_semigroup_norm(a, cfg.sample_spacing);
  } catch (const NoHorizonError& e) {
    if (!(e.max_norm() > kNotBoundedNorm)) throw;
    cert.verdict = Verdict::NotBounded;
    cert.diagnostic = e.what();
    clock.lap("semigroup");
    return cert;
  }
  clock.lap("semigroup");
  const double K = sb.K_lower;
  const double omega = 1.0 / C;
  const double c = K * std::sqrt(2.0 * C);
  cert.K = K;
  cert.K_upper = sb.K_upper;
  cert.omega = omega;
  cert.c = c;
  cert.envelope_half = PowerEnvelope{K * c, -0.5};
  cert.envelope_one = PowerEnvelope{c * c, -1.0};
  const ExpPair pair = extract_exponential(K, c);
  cert.exp_pair = pair;

  // Sample sets.
  const Eigen::Index n = a.dim();
  const ComplexMatrix probes = probe_vectors(n, cfg.random_probes, cfg.seed, a.is_real());
  const Eigen::Index p = probes.cols();
  const RealVector probe_norm2 = probes.colwise().squaredNorm().transpose();
  std::vector<double> alphas{cfg.alpha_surrogate * omega};
  for (double f : cfg.alpha_fractions) alphas.push_back(f * omega);
  alphas = sorted_unique(alphas);

  std::vector<double> t_list;
  for (int k = -4; k <= 4; ++k) t_list.push_back(std::ldexp(sb.horizon, k));
  for (double m : {1.0, 2.0, 8.0}) t_list.push_back(m * pair.t_star);
  t_list = sorted_unique(t_list);

  std::vector<double> s_list{0.0, rb.s_star.value_or(0.0), -rb.s_star.value_or(0.0), a.norm2() + 1.0,
                             -(a.norm2() + 1.0)};
  {
    std::vector<Complex> near = a.spectrum();
    std::sort(near.begin(), near.end(), [](const Complex& l, const Complex& r) {
      if (std::abs(l.real()) != std::abs(r.real())) return std::abs(l.real()) < std::abs(r.real());
      return l.imag() < r.imag();
    });
    for (std::size_t k = 0; k < near.size() && k < 4; ++k) s_list.push_back(near[k].imag());
  }
  // For real A the resolvent at -s is the conjugate of the one at s.
  if (a.is_real())
    for (double& s : s_list) s = std::abs(s);
  s_list = sorted_unique(s_list);

  auto add = [&cert](std::vector<InequalityRecord> recs) {
    cert.checks.insert(cert.checks.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
  };

  // Resolvent identity bounds.
  add(check_resolvent_shift_bounds(a, C, alphas, s_list, probes, cfg.check_tol));
  clock.lap("resolvent_shift");

  // Time energies on every line used below, for all probes.
  const DecayData decay = DecayData::from(sb);
  std::vector<double> lines{0.0};
  lines.insert(lines.end(), alphas.begin(), alphas.end());
  lines.push_back(omega);
  std::vector<std::vector<double>> time_e;
  for (double al : lines) time_e.push_back(values_of(time_energies(a, al, probes, cfg.energy_tol, decay)));
  const Generator a_adj(ComplexMatrix(a.entries().adjoint()));
  const std::vector<double> adj_e = values_of(time_energies(a_adj, 0.0, probes, cfg.energy_tol, decay));
  const std::vector<double>& energy_zero = time_e.front();
  const std::vector<double>& energy_omega = time_e.back();

  for (std::size_t l = 0; l + 1 < lines.size(); ++l)
    for (Eigen::Index j = 0; j < p; ++j) {
      CheckLocation loc;
      loc.alpha = lines[l];
      loc.probe = static_cast<int>(j);
      add({make_record("datko", time_e[l][static_cast<std::size_t>(j)], c * c * probe_norm2[j], cfg.check_tol, loc)});
    }
  for (Eigen::Index j = 0; j < p; ++j) {
    CheckLocation loc;
    loc.alpha = 0.0;
    loc.probe = static_cast<int>(j);
    add({make_record("datko_adjoint", adj_e[static_cast<std::size_t>(j)], c * c * probe_norm2[j], cfg.check_tol, loc)});
  }
  clock.lap("time_energy");

  // Rescaled mean bound, one record per (alpha, t, probe).
  PropagatorCache props(a);
  for (double t : t_list) {
    const ComplexMatrix y = props.at(t).matrix * probes;
    const RealVector y2 = y.colwise().squaredNorm().transpose();
    for (std::size_t l = 1; l + 1 < lines.size(); ++l) {
      const double al = lines[l];
      const double decay_factor = std::exp(-2.0 * al * t);
      for (Eigen::Index j = 0; j < p; ++j) {
        CheckLocation loc = at_t(t);
        loc.alpha = al;
        loc.probe = static_cast<int>(j);
        add({make_record("rescaled_mean", decay_factor * y2[j], K * K / t * time_e[l][static_cast<std::size_t>(j)],
                         cfg.check_tol, loc)});
      }
    }
  }
  clock.lap("rescaled_mean");

  // Frequency energies and the integral chain on a subset of probes.
  const auto qcols = pick_columns(n, cfg.random_probes, std::max<std::size_t>(1, cfg.quadrature_probes));
  const ComplexMatrix qprobes = select_columns(probes, qcols);
  const SchurResolvent solver(a);
  std::vector<std::vector<double>> freq_e;
  for (std::size_t l = 1; l < lines.size(); ++l)
    freq_e.push_back(values_of(freq_energies(a, lines[l], qprobes, cfg.energy_tol, &solver)));
  const std::vector<double>& freq_omega = freq_e.back();
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const bool is_omega = l + 1 == lines.size();
    for (std::size_t k = 0; k < qcols.size(); ++k) {
      const auto j = static_cast<std::size_t>(qcols[k]);
      CheckLocation loc;
      loc.alpha = lines[l];
      loc.probe = static_cast<int>(j);
      const double f = freq_e[l - 1][k];
      const double t = time_e[l][j];
      add({make_record(is_omega ? "chain_plancherel_omega" : "plancherel", std::abs(f - t),
                       kPlancherelTol * std::max(f, t), cfg.check_tol, loc)});
      if (!is_omega) add({make_record("chain_shift", f, 4.0 * freq_omega[k], cfg.check_tol, loc)});
    }
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    CheckLocation loc;
    loc.alpha = omega;
    loc.probe = static_cast<int>(j);
    add({make_record("chain_bound", 4.0 * energy_omega[static_cast<std::size_t>(j)], c * c * probe_norm2[j],
                     cfg.check_tol, loc)});
  }
  clock.lap("frequency_energy");

  // Decay envelopes.
  const double kc = K * c;
  for (double t : t_list) {
    const double nrm = props.at(t).norm;
    add({make_record("envelope_half", nrm, kc / std::sqrt(t), cfg.check_tol, at_t(t))});
    CheckLocation loc = at_t(t);
    loc.alpha = alphas.front();
    add({make_record("envelope_half_rescaled", std::exp(-alphas.front() * t) * nrm, kc / std::sqrt(t), cfg.check_tol,
                     loc)});
    add({make_record("envelope_one", nrm, c * c / t, cfg.check_tol, at_t(t))});
  }
  {
    const std::size_t pair_count = std::min<std::size_t>(cfg.random_probes > 0 ? cfg.random_probes : 4, 8);
    const auto pcols = pick_columns(n, cfg.random_probes, pair_count);
    const ComplexMatrix pair_probes = select_columns(probes, pcols);
    std::vector<double> e_pair;
    std::vector<double> adj_pair;
    for (Eigen::Index col : pcols) {
      e_pair.push_back(energy_zero[static_cast<std::size_t>(col)]);
      adj_pair.push_back(adj_e[static_cast<std::size_t>(col)]);
    }
    add(pair_records(props, c, t_list, pair_probes, cfg.check_tol, &e_pair, &adj_pair, &pcols));
  }
  clock.lap("envelopes");

  // Extracted exponential dominates the trajectory on [0, 8 t_star].
  const TrajectorySample long_run = sample_trajectory(a, 8.0 * pair.t_star, cfg.exp_pair_samples);
  for (std::size_t k = 0; k < long_run.times.size(); ++k) {
    const double t = long_run.times[k];
    add({make_record("exp_pair", long_run.op_norms[k], pair.M * std::exp(-pair.omega * t), cfg.check_tol, at_t(t))});
  }
  clock.lap("exp_pair");

  // Necessity: C <= M / omega for an envelope fitted to the sampled norms.
  const ExpEnvelope env = fit_envelope(sb.samples);
  cert.fitted_envelope = env;
  add({necessity_check(C, env, cfg.check_tol)});
  // The integral representation behind that bound, R(is) x as the Laplace
  // transform of T(t) x, at the maximizing frequency.
  if (n <= static_cast<Eigen::Index>(cfg.laplace_max_dim)) {
    const Eigen::Index j = cfg.random_probes > 0 ? n : 0;
    const double s = rb.s_star.value_or(0.0);
    const ComplexVector x = probes.col(j);
    const ComplexVector direct = resolvent(a, Complex(0.0, s)) * x;
    const ComplexVector laplace = resolvent_via_laplace(a, Complex(0.0, s), x, 1e-3 * kLaplaceTol);
    CheckLocation loc;
    loc.s = s;
    loc.probe = static_cast<int>(j);
    add({make_record("laplace_representation", (laplace - direct).norm(), kLaplaceTol * direct.norm(), cfg.check_tol,
                     loc)});
  }
  clock.lap("necessity");

  if (cert.all_passed()) {
    cert.verdict = Verdict::ExponentiallyStable;
  } else {
    cert.verdict = Verdict::VerificationFailed;
    std::size_t failed = 0;
    const InequalityRecord* first = nullptr;
    for (const auto& r : cert.checks)
      if (!r.passed) {
        ++failed;
        if (!first) first = &r;
      }
    std::ostringstream msg;
    msg << failed << " of " << cert.checks.size() << " checks failed; first: " << first->name << " (lhs "
        << first->lhs << ", rhs " << first->rhs << ")";
    cert.diagnostic = msg.str();
  }
  return cert;
}

}  // namespace gpcert
