// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit status if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gpcert/certificate.hpp"
#include "gpcert/corpus.hpp"
#include "gpcert/resolvent_analysis.hpp"
#include "gpcert/semigroup_analysis.hpp"
#include "gpcert/spectral_transform.hpp"
#include "oracles.hpp"

using namespace gpcert;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (passed) detail << why;
    passed = false;
  }
};

ComplexVector unit(Eigen::Index n, Eigen::Index k) {
  ComplexVector e = ComplexVector::Zero(n);
  e(k) = 1.0;
  return e;
}

std::vector<CorpusEntry> stable_corpus() {
  std::vector<CorpusEntry> out;
  for (CorpusEntry& e : builtin_corpus())
    if (e.expected_verdict == Verdict::ExponentiallyStable) out.push_back(std::move(e));
  return out;
}

void scalar_ground_truth(Outcome& o) {
  const auto start = Clock::now();
  const GpCertificate cert = certify(builtin("scalar", {{"value", "-1"}}).generator);
  const double elapsed = seconds_since(start);
  const auto close = [&](const char* what, const std::optional<double>& v, double want) {
    if (!v || oracle::rel_diff(*v, want) > 1e-10) o.fail(std::string(what) + " off");
  };
  if (cert.verdict != Verdict::ExponentiallyStable) o.fail("verdict " + std::string(to_string(cert.verdict)));
  close("C", cert.C, 1.0);
  close("K", cert.K, 1.0);
  close("omega", cert.omega, 1.0);
  close("c", cert.c, std::sqrt(2.0));
  if (elapsed >= 1.0) o.fail("took " + std::to_string(elapsed) + " s");
  o.detail << (o.passed ? "" : "; ") << "C=" << cert.C.value_or(NAN) << " K=" << cert.K.value_or(NAN)
           << " omega=" << cert.omega.value_or(NAN) << " c=" << cert.c.value_or(NAN) << " time=" << elapsed << "s";
}

void iff_consistency(Outcome& o) {
  oracle::MatrixFactory f(20240601);
  struct Case {
    ComplexMatrix a;
    bool stable;
  };
  std::vector<Case> cases;
  for (int k = 0; k < 50; ++k) {
    const int n = f.dim(1, 10);
    cases.push_back({f.with_abscissa(n, f.uniform(-1.0, -0.051), k % 2 == 0), true});
  }
  for (int k = 0; k < 25; ++k) cases.push_back({f.skew_hermitian(f.dim(1, 10)), false});
  for (int k = 0; k < 25; ++k) {
    const int n = f.dim(1, 10);
    cases.push_back({f.with_abscissa(n, f.uniform(0.051, 1.0), k % 2 == 0), false});
  }
  const auto start = Clock::now();
  int mismatches = 0;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const GpCertificate cert = certify(Generator(cases[k].a));
    const bool stable = cert.verdict == Verdict::ExponentiallyStable;
    if (stable != cases[k].stable) {
      if (mismatches == 0)
        o.fail("case " + std::to_string(k) + " (dim " + std::to_string(cases[k].a.rows()) + ") gave " +
               std::string(to_string(cert.verdict)) + "; ");
      ++mismatches;
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 60.0) o.fail("took " + std::to_string(elapsed) + " s; ");
  o.detail << mismatches << " mismatches out of " << cases.size() << ", time=" << elapsed << "s";
}

void inequality_suite(Outcome& o) {
  CertifyConfig cfg;
  cfg.check_tol = 1e-6;
  const std::set<std::string> required{"resolvent_shift_norm", "resolvent_shift_vector", "rescaled_mean",
                                       "plancherel",           "chain_shift",            "chain_bound",
                                       "envelope_half",        "envelope_one",           "datko"};
  std::size_t total = 0;
  std::size_t failed = 0;
  for (const CorpusEntry& e : builtin_corpus()) {
    const GpCertificate cert = certify(e.generator, cfg);
    if (e.expected_verdict && cert.verdict != *e.expected_verdict)
      o.fail(e.name + " gave " + std::string(to_string(cert.verdict)) + "; ");
    std::set<std::string> seen;
    for (const InequalityRecord& r : cert.checks) {
      ++total;
      seen.insert(r.name);
      if (!r.passed) {
        if (failed == 0) o.fail(e.name + ": " + r.name + " failed; ");
        ++failed;
      }
    }
    if (cert.verdict == Verdict::ExponentiallyStable)
      for (const std::string& name : required)
        if (!seen.count(name)) o.fail(e.name + " has no " + name + " records; ");
  }
  o.detail << total << " records, " << failed << " failed";
}

void plancherel_accuracy(Outcome& o) {
  double worst = 0.0;
  for (const CorpusEntry& e : stable_corpus()) {
    const Generator& a = e.generator;
    const double omega = 1.0 / *sup_resolvent_levelset(a, 1e-9).C;
    const ComplexMatrix probes = probe_vectors(a.dim(), 1, 7, a.is_real());
    for (double alpha : {omega / 4.0, omega / 2.0})
      for (Eigen::Index p : {Eigen::Index{0}, a.dim()}) {
        const EnergyPair pair = plancherel_check(a, alpha, probes.col(p), 1e-8);
        worst = std::max(worst, pair.rel_err);
        if (!(pair.rel_err <= 1e-6)) o.fail(e.name + " rel_err " + std::to_string(pair.rel_err) + "; ");
      }
  }
  const Generator scalar = builtin("scalar", {{"value", "-1"}}).generator;
  const EnergyPair s = plancherel_check(scalar, 0.5, unit(1, 0), 1e-10);
  if (std::abs(s.time_energy - 1.0 / 3.0) > 1e-8 || std::abs(s.freq_energy - 1.0 / 3.0) > 1e-8)
    o.fail("scalar energies off; ");
  o.detail << "worst rel_err=" << worst << ", scalar time=" << s.time_energy << " freq=" << s.freq_energy;
}

void levelset_vs_grid(Outcome& o) {
  oracle::MatrixFactory f(777);
  double worst = 0.0;
  std::size_t ls_evals = 0;
  std::size_t grid_evals = 0;
  for (int k = 0; k < 50; ++k) {
    const int n = f.dim(1, 8);
    const Generator a(f.with_abscissa(n, f.uniform(-1.0, -0.05), k % 2 == 0));
    const ResolventBound ls = sup_resolvent_levelset(a, 1e-9);
    const ResolventBound grid = sup_resolvent_grid(a, 100000);
    if (!ls.C || !grid.C) {
      o.fail("case " + std::to_string(k) + " produced no C; ");
      continue;
    }
    const double d = oracle::rel_diff(*ls.C, *grid.C);
    worst = std::max(worst, d);
    if (d > 1e-6) o.fail("case " + std::to_string(k) + " differs by " + std::to_string(d) + "; ");
    if (10 * ls.evaluations > grid.evaluations) o.fail("case " + std::to_string(k) + " evaluation count; ");
    ls_evals = std::max(ls_evals, ls.evaluations);
    grid_evals = grid.evaluations;
  }
  o.detail << "worst relative difference=" << worst << ", max level-set evaluations=" << ls_evals
           << ", grid evaluations=" << grid_evals;
}

void necessity_bound(Outcome& o) {
  double tightest = INFINITY;
  for (const CorpusEntry& e : stable_corpus()) {
    const Generator& a = e.generator;
    const double C = *sup_resolvent_levelset(a, 1e-9).C;
    const ExpEnvelope env = fit_envelope(sup_semigroup_norm(a).samples);
    const double bound = env.M / env.omega;
    tightest = std::min(tightest, bound - C);
    if (!(C <= bound + 1e-6))
      o.fail(e.name + ": C=" + std::to_string(C) + " > M/omega=" + std::to_string(bound) + "; ");
  }
  o.detail << "smallest margin M/omega - C=" << tightest;
}

void exponential_extraction(Outcome& o) {
  double worst = -INFINITY;
  for (const CorpusEntry& e : stable_corpus()) {
    const Generator& a = e.generator;
    const double C = *sup_resolvent_levelset(a, 1e-9).C;
    const double K = sup_semigroup_norm(a).K_lower;
    const ExpPair pair = extract_exponential(K, K * std::sqrt(2.0 * C));
    const double horizon = 8.0 * pair.t_star;
    for (int k = 0; k < 256; ++k) {
      const double t = horizon * k / 255.0;
      const double norm = oracle::semigroup_norm(a.entries(), t);
      const double env = pair.M * std::exp(-pair.omega * t);
      worst = std::max(worst, (norm - env) / env);
      if (norm > env * (1.0 + 1e-6)) {
        o.fail(e.name + " at t=" + std::to_string(t) + "; ");
        break;
      }
    }
  }
  o.detail << "largest (norm - envelope)/envelope=" << worst;
}

void desk_performance(Outcome& o) {
  const Generator a = builtin("damped_wave", {{"n", "128"}, {"a", "1"}}).generator;
  const auto start = Clock::now();
  const GpCertificate cert = certify(a);
  const double elapsed = seconds_since(start);
  if (elapsed >= 60.0) o.fail("took " + std::to_string(elapsed) + " s; ");
  if (cert.verdict != Verdict::ExponentiallyStable) o.fail("verdict " + std::string(to_string(cert.verdict)) + "; ");
  o.detail << "dim=" << a.dim() << " time=" << elapsed << "s, " << cert.checks.size() << " records";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"scalar ground truth", scalar_ground_truth},
      {"stability iff-consistency on 100 random matrices", iff_consistency},
      {"inequality records on the built-in corpus", inequality_suite},
      {"Plancherel accuracy", plancherel_accuracy},
      {"level-set against 1e5-point grid", levelset_vs_grid},
      {"necessity bound C <= M/omega", necessity_bound},
      {"exponential extraction dominates ||T(t)||", exponential_extraction},
      {"damped_wave n=128 under 60 s", desk_performance},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %zu: %s (%s)\n", o.passed ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.passed) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
