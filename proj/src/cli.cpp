#include "gpcert/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpcert/certificate.hpp"
#include "gpcert/corpus.hpp"
#include "gpcert/report.hpp"
#include "gpcert/resolvent_analysis.hpp"
#include "gpcert/semigroup_analysis.hpp"
#include "gpcert/spectral_transform.hpp"

namespace gpcert::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kNotBoundedNorm = 1e6;
/// Relative slack allowed when comparing a sampled norm with an envelope.
constexpr double kDominationTol = 1e-6;
/// Largest relative disagreement between the two resolvent methods.
constexpr double kMethodAgreementTol = 1e-6;

/// Failure that maps straight to an exit code, with a message for stderr.
struct Exit {
  int code;
  std::string message;
};

struct InputOptions {
  std::string file;
  std::string builtin;
  std::vector<std::string> params;
};

struct LoadedInput {
  InputDescriptor descriptor;
  Generator generator;
};

void add_input_options(CLI::App& sub, InputOptions& in) {
  auto* file = sub.add_option("--file", in.file, "Matrix Market file");
  auto* builtin = sub.add_option("--builtin", in.builtin, "Built-in generator name");
  auto* param = sub.add_option("--param", in.params, "Built-in parameter k=v (repeatable)");
  file->excludes(builtin);
  param->needs(builtin);
}

LoadedInput load_input(const InputOptions& in) {
  if (in.file.empty() && in.builtin.empty()) throw Exit{kExitUsage, "one of --file or --builtin is required"};
  if (!in.file.empty()) {
    if (!std::filesystem::exists(in.file)) throw Exit{kExitParse, "ParseError: cannot open " + in.file};
    CorpusEntry entry = file_entry(in.file);
    InputDescriptor d{"file", in.file, {}, entry.generator.dim()};
    return {std::move(d), std::move(entry.generator)};
  }
  Params params;
  for (const auto& kv : in.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw Exit{kExitUsage, "--param expects k=v, got '" + kv + "'"};
    params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  CorpusEntry entry = builtin(in.builtin, params);
  InputDescriptor d{"builtin", in.builtin, params, entry.generator.dim()};
  return {std::move(d), std::move(entry.generator)};
}

/// Writes to `path` through a temporary file in the same directory, or to
/// `out` when no path is given.
void emit(const std::string& content, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << content << std::flush;
    return;
  }
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Exit{kExitFailure, "cannot write " + tmp.string()};
    f << content;
    f.flush();
    if (!f) {
      std::filesystem::remove(tmp);
      throw Exit{kExitFailure, "cannot write " + tmp.string()};
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Exit{kExitFailure, "cannot move output into place at " + path + ": " + ec.message()};
  }
}

std::string g17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Clear axis, finite C and bounded semigroup; the shared precondition of
/// the decay and plancherel commands.
struct Hypotheses {
  ResolventBound resolvent;
  SemigroupBound semigroup;
};

Hypotheses establish_hypotheses(const Generator& a, bool need_semigroup) {
  Hypotheses h;
  h.resolvent = sup_resolvent_levelset(a, 1e-9);
  if (!h.resolvent.axis_clear)
    throw Exit{kExitHypothesis, std::string(to_string(Verdict::HypothesisViolatedAxisSpectrum)) +
                                    ": eigenvalue on the imaginary axis"};
  if (need_semigroup) {
    try {
      h.semigroup = sup_semigroup_norm(a);
    } catch (const NoHorizonError& e) {
      if (e.max_norm() > kNotBoundedNorm)
        throw Exit{kExitHypothesis, std::string(to_string(Verdict::NotBounded)) + ": " + e.what()};
      throw;
    }
  }
  return h;
}

// ---------------------------------------------------------------- certify

struct CertifyOptions {
  InputOptions input;
  std::string format = "text";
  std::string out;
  std::string config;
  bool timing = false;
  std::vector<std::pair<std::string, std::string>> overrides;
};

int cmd_certify(const CertifyOptions& o, std::ostream& out, std::ostream& err) {
  CertifyConfig cfg;
  if (!o.config.empty()) {
    if (!std::filesystem::exists(o.config)) throw Exit{kExitParse, "ParseError: cannot open " + o.config};
    apply_config_file(cfg, std::filesystem::path(o.config));
  }
  for (const auto& [key, value] : o.overrides) apply_config_value(cfg, key, value);

  LoadedInput in = load_input(o.input);
  Report report;
  report.input = in.descriptor;
  report.config = cfg;
  StageTimings timings;
  report.certificate = certify(in.generator, cfg, o.timing ? &timings : nullptr);
  if (o.timing) report.timings = timings;

  emit(o.format == "json" ? render_json(report) : render_text(report), o.out, out);
  const Verdict v = report.certificate.verdict;
  if (v != Verdict::ExponentiallyStable && !o.out.empty())
    err << to_string(v) << (report.certificate.diagnostic.empty() ? "" : ": " + report.certificate.diagnostic)
        << "\n";
  return exit_code(v);
}

// -------------------------------------------------------------- resolvent

struct ResolventOptions {
  InputOptions input;
  std::string method = "levelset";
  std::size_t points = 100001;
  double rel_tol = 1e-9;
  std::string curve;
  std::string format = "text";
};

int cmd_resolvent(const ResolventOptions& o, std::ostream& out, std::ostream& err) {
  if (o.points < 2) throw Exit{kExitUsage, "--points must be at least 2"};
  if (!(o.rel_tol > 0.0)) throw Exit{kExitUsage, "--rel-tol must be positive"};
  LoadedInput in = load_input(o.input);
  const Generator& a = in.generator;

  std::vector<ResolventBound> results;
  if (o.method == "levelset" || o.method == "both") results.push_back(sup_resolvent_levelset(a, o.rel_tol));
  if (o.method == "grid" || o.method == "both") results.push_back(sup_resolvent_grid(a, o.points));
  if (!results.front().axis_clear) {
    err << to_string(Verdict::HypothesisViolatedAxisSpectrum) << ": eigenvalue on the imaginary axis\n";
    return kExitHypothesis;
  }

  std::optional<double> rel_diff;
  if (results.size() == 2) rel_diff = std::abs(*results[0].C - *results[1].C) / *results[1].C;

  if (o.format == "json") {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["input"] = {{"source", in.descriptor.source}, {"name", in.descriptor.name}, {"dim", in.descriptor.dim}};
    Json list = Json::array();
    for (const auto& r : results) {
      list.push_back({{"method", std::string(to_string(r.method))},
                      {"C", *r.C},
                      {"s_star", *r.s_star},
                      {"search_radius", r.search_radius},
                      {"tail_bound_valid", r.tail_bound_valid},
                      {"evaluations", r.evaluations}});
    }
    j["results"] = std::move(list);
    if (rel_diff) j["relative_difference"] = *rel_diff;
    out << j.dump(2) << "\n";
  } else {
    for (const auto& r : results) {
      out << "method=" << to_string(r.method) << " C=" << g6(*r.C) << " s_star=" << g6(*r.s_star)
          << " tail_bound_valid=" << (r.tail_bound_valid ? "true" : "false") << " evaluations=" << r.evaluations
          << "\n";
    }
    if (rel_diff) out << "relative_difference=" << g6(*rel_diff) << "\n";
  }

  if (!o.curve.empty()) {
    // The grid carries the dense curve when both methods ran.
    auto probed = results.back().probed;
    std::sort(probed.begin(), probed.end());
    std::string csv = "s,resolvent_norm\n";
    for (const auto& [s, norm] : probed) csv += g17(s) + "," + g17(norm) + "\n";
    emit(csv, o.curve, out);
  }

  if (rel_diff && !(*rel_diff <= kMethodAgreementTol)) {
    err << "level-set and grid values of C differ by " << g6(*rel_diff) << " relative\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ------------------------------------------------------------------ decay

struct DecayOptions {
  InputOptions input;
  std::optional<double> horizon;
  std::size_t samples = 257;
  std::string out;
};

int cmd_decay(const DecayOptions& o, std::ostream& out, std::ostream& err) {
  if (o.samples < 2) throw Exit{kExitUsage, "--samples must be at least 2"};
  if (o.horizon && !(*o.horizon > 0.0 && std::isfinite(*o.horizon)))
    throw Exit{kExitUsage, "--horizon must be positive"};
  LoadedInput in = load_input(o.input);
  const Generator& a = in.generator;
  const Hypotheses h = establish_hypotheses(a, true);

  const double C = *h.resolvent.C;
  const double K = h.semigroup.K_lower;
  const double c = K * std::sqrt(2.0 * C);
  const ExpPair pair = extract_exponential(K, c);
  const double horizon = o.horizon.value_or(8.0 * pair.t_star);

  const TrajectorySample ts = sample_trajectory(a, horizon, o.samples);
  std::string csv = "t,norm,envelope_half,envelope_one,exp_envelope\n";
  std::size_t violations = 0;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ts.times.size(); ++k) {
    const double t = ts.times[k];
    const double norm = ts.op_norms[k];
    const double half = t > 0.0 ? K * c / std::sqrt(t) : inf;
    const double one = t > 0.0 ? c * c / t : inf;
    const double expo = pair.M * std::exp(-pair.omega * t);
    for (double env : {half, one, expo})
      if (!(norm <= env * (1.0 + kDominationTol))) ++violations;
    csv += g17(t) + "," + g17(norm) + "," + g17(half) + "," + g17(one) + "," + g17(expo) + "\n";
  }
  emit(csv, o.out, out);
  if (violations > 0) {
    err << violations << " envelope value(s) below the sampled norm\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ------------------------------------------------------------- plancherel

struct PlancherelOptions {
  InputOptions input;
  std::vector<double> alphas;
  std::size_t probe = 0;
  double tol = 1e-6;
  std::string format = "text";
};

int cmd_plancherel(const PlancherelOptions& o, std::ostream& out, std::ostream& err) {
  for (double alpha : o.alphas)
    if (!(alpha > 0.0 && std::isfinite(alpha))) throw Exit{kExitUsage, "--alpha must be positive"};
  if (!(o.tol > 0.0)) throw Exit{kExitUsage, "--tol must be positive"};
  LoadedInput in = load_input(o.input);
  const Generator& a = in.generator;

  CertifyConfig defaults;
  const ComplexMatrix probes = probe_vectors(a.dim(), defaults.random_probes, defaults.seed, a.is_real());
  if (o.probe >= static_cast<std::size_t>(probes.cols()))
    throw Exit{kExitUsage, "--probe must be below " + std::to_string(probes.cols())};

  std::vector<double> alphas = o.alphas;
  if (alphas.empty()) {
    const Hypotheses h = establish_hypotheses(a, false);
    alphas.push_back(0.5 / *h.resolvent.C);
  } else if (!axis_spectrum_check(a)) {
    throw Exit{kExitHypothesis, std::string(to_string(Verdict::HypothesisViolatedAxisSpectrum)) +
                                    ": eigenvalue on the imaginary axis"};
  }

  // Each energy is computed well inside the acceptance threshold.
  const double energy_tol = std::min(1e-8, o.tol * 1e-2);
  const ComplexVector x = probes.col(static_cast<Eigen::Index>(o.probe));
  std::vector<std::pair<double, EnergyPair>> results;
  bool all_passed = true;
  for (double alpha : alphas) {
    EnergyPair p = plancherel_check(a, alpha, x, energy_tol);
    p.passed = p.rel_err <= o.tol;
    all_passed = all_passed && p.passed;
    results.emplace_back(alpha, p);
  }

  if (o.format == "json") {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["input"] = {{"source", in.descriptor.source}, {"name", in.descriptor.name}, {"dim", in.descriptor.dim}};
    j["probe"] = o.probe;
    j["tol"] = o.tol;
    Json list = Json::array();
    for (const auto& [alpha, p] : results) {
      list.push_back({{"alpha", alpha},
                      {"time_energy", p.time_energy},
                      {"freq_energy", p.freq_energy},
                      {"rel_err", p.rel_err},
                      {"time_tail_bound", p.time_tail_bound},
                      {"freq_tail_bound", p.freq_tail_bound},
                      {"passed", p.passed}});
    }
    j["results"] = std::move(list);
    out << j.dump(2) << "\n";
  } else {
    for (const auto& [alpha, p] : results) {
      out << "alpha=" << g6(alpha) << " time_energy=" << g6(p.time_energy) << " freq_energy=" << g6(p.freq_energy)
          << " rel_err=" << g6(p.rel_err) << " time_tail_bound=" << g6(p.time_tail_bound)
          << " freq_tail_bound=" << g6(p.freq_tail_bound) << " passed=" << (p.passed ? "true" : "false") << "\n";
    }
  }
  if (!all_passed) {
    err << "relative error above " << g6(o.tol) << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_builtins(std::ostream& out) {
  for (const auto& name : builtin_names()) out << name << "\n";
  return kExitOk;
}

void add_config_overrides(CLI::App& sub, CertifyOptions& o) {
  struct Key {
    const char* flag;
    const char* key;
    const char* help;
  };
  static const Key keys[] = {
      {"--check-tol", "check_tol", "Relative tolerance of every inequality check"},
      {"--resolvent-rel-tol", "resolvent_rel_tol", "Relative bracket width for C"},
      {"--energy-tol", "energy_tol", "Relative accuracy of the energies"},
      {"--alpha-fractions", "alpha_fractions", "Comma list of rescaling fractions of omega"},
      {"--alpha-surrogate", "alpha_surrogate", "Fraction of omega standing in for alpha -> 0+"},
      {"--random-probes", "random_probes", "Random unit probes added to the basis"},
      {"--seed", "seed", "Probe seed"},
      {"--quadrature-probes", "quadrature_probes", "Probes with integrated frequency energies"},
      {"--exp-pair-samples", "exp_pair_samples", "Samples of the exponential-envelope check"},
      {"--sample-spacing", "sample_spacing", "Spacing of the sup-norm sampling"},
      {"--laplace-max-dim", "laplace_max_dim", "Largest dimension with the Laplace-integral check"},
  };
  for (const Key& k : keys) {
    const std::string key = k.key;
    sub.add_option_function<std::string>(
        k.flag, [&o, key](const std::string& value) { o.overrides.emplace_back(key, value); }, k.help);
  }
}

}  // namespace

int exit_code(Verdict v) {
  if (v == Verdict::ExponentiallyStable) return kExitOk;
  if (is_hypothesis_violation(v)) return kExitHypothesis;
  return kExitFailure;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::ParseError:
    case ErrorKind::NotSquare:
    case ErrorKind::UnsupportedField:
      return kExitParse;
    case ErrorKind::UnknownName:
    case ErrorKind::BadParams:
    case ErrorKind::InvalidArgument:
      return kExitUsage;
    case ErrorKind::BracketFailure:
      return kExitHypothesis;
    case ErrorKind::NoHorizon:
      if (const auto* nh = dynamic_cast<const NoHorizonError*>(&e); nh && nh->max_norm() > kNotBoundedNorm)
        return kExitHypothesis;
      return kExitFailure;
    default:
      return kExitFailure;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exponential-stability certificates for matrix semigroups e^{tA}", "gp_certify"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  CertifyOptions certify_opts;
  auto* certify_cmd = app.add_subcommand("certify", "Full certificate with every verified inequality");
  add_input_options(*certify_cmd, certify_opts.input);
  certify_cmd->add_option("--format", certify_opts.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}));
  certify_cmd->add_option("--out", certify_opts.out, "Write the report here instead of stdout");
  certify_cmd->add_option("--config", certify_opts.config, "key=value configuration file");
  certify_cmd->add_flag("--timing", certify_opts.timing, "Include per-stage wall-clock times");
  add_config_overrides(*certify_cmd, certify_opts);

  ResolventOptions resolvent_opts;
  auto* resolvent_cmd = app.add_subcommand("resolvent", "sup of the resolvent norm on the imaginary axis");
  add_input_options(*resolvent_cmd, resolvent_opts.input);
  resolvent_cmd->add_option("--method", resolvent_opts.method, "levelset, grid or both")
      ->check(CLI::IsMember({"levelset", "grid", "both"}));
  resolvent_cmd->add_option("--points", resolvent_opts.points, "Grid points");
  resolvent_cmd->add_option("--rel-tol", resolvent_opts.rel_tol, "Level-set relative bracket width");
  resolvent_cmd->add_option("--curve", resolvent_opts.curve, "Write probed (s, norm) pairs as CSV");
  resolvent_cmd->add_option("--format", resolvent_opts.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}));

  DecayOptions decay_opts;
  auto* decay_cmd = app.add_subcommand("decay", "Sampled ||T(t)|| against the three envelopes, as CSV");
  add_input_options(*decay_cmd, decay_opts.input);
  decay_cmd->add_option("--horizon", decay_opts.horizon, "Last sample time (default 8 t*)");
  decay_cmd->add_option("--samples", decay_opts.samples, "Number of samples");
  decay_cmd->add_option("--out", decay_opts.out, "Write the CSV here instead of stdout");

  PlancherelOptions plancherel_opts;
  auto* plancherel_cmd = app.add_subcommand("plancherel", "Time against frequency energy of one probe");
  add_input_options(*plancherel_cmd, plancherel_opts.input);
  plancherel_cmd->add_option("--alpha", plancherel_opts.alphas, "Rescaling parameter(s) (default omega/2)");
  plancherel_cmd->add_option("--probe", plancherel_opts.probe, "Probe index: basis vectors, then random probes");
  plancherel_cmd->add_option("--tol", plancherel_opts.tol, "Largest accepted relative error");
  plancherel_cmd->add_option("--format", plancherel_opts.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}));

  auto* builtins_cmd = app.add_subcommand("builtins", "List built-in generator names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (certify_cmd->parsed()) return cmd_certify(certify_opts, out, err);
    if (resolvent_cmd->parsed()) return cmd_resolvent(resolvent_opts, out, err);
    if (decay_cmd->parsed()) return cmd_decay(decay_opts, out, err);
    if (plancherel_cmd->parsed()) return cmd_plancherel(plancherel_opts, out, err);
    if (builtins_cmd->parsed()) return cmd_builtins(out);
    return kExitUsage;
  } catch (const Exit& e) {
    err << "error: " << e.message << "\n";
    return e.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("gp_certify");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace gpcert::cli
