#include "gpcert/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gpcert/errors.hpp"

#ifndef GPCERT_VERSION
#define GPCERT_VERSION "0.0.0"
#endif

namespace gpcert {

using Json = nlohmann::ordered_json;

std::string_view tool_version() { return GPCERT_VERSION; }

namespace {

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json location_json(const CheckLocation& loc) {
  Json j = Json::object();
  if (loc.t) j["t"] = *loc.t;
  if (loc.s) j["s"] = *loc.s;
  if (loc.alpha) j["alpha"] = *loc.alpha;
  if (loc.probe) j["probe"] = *loc.probe;
  if (loc.probe2) j["probe2"] = *loc.probe2;
  return j;
}

struct FamilySummary {
  std::size_t count = 0;
  std::size_t failed = 0;
  /// Smallest slack relative to the right-hand side.
  double min_margin = INFINITY;
};

double margin(const InequalityRecord& r) {
  const double scale = std::abs(r.rhs) > 0.0 ? std::abs(r.rhs) : 1.0;
  return r.slack / scale;
}

/// Families in order of first appearance.
std::vector<std::pair<std::string, FamilySummary>> summarize(const std::vector<InequalityRecord>& checks) {
  std::vector<std::pair<std::string, FamilySummary>> out;
  std::map<std::string, std::size_t> index;
  for (const auto& r : checks) {
    auto [it, inserted] = index.try_emplace(r.name, out.size());
    if (inserted) out.emplace_back(r.name, FamilySummary{});
    FamilySummary& f = out[it->second].second;
    ++f.count;
    if (!r.passed) ++f.failed;
    f.min_margin = std::min(f.min_margin, margin(r));
  }
  return out;
}

Json config_json(const CertifyConfig& cfg) {
  Json j;
  j["check_tol"] = cfg.check_tol;
  j["resolvent_rel_tol"] = cfg.resolvent_rel_tol;
  j["energy_tol"] = cfg.energy_tol;
  j["alpha_fractions"] = cfg.alpha_fractions;
  j["alpha_surrogate"] = cfg.alpha_surrogate;
  j["random_probes"] = cfg.random_probes;
  j["seed"] = cfg.seed;
  j["quadrature_probes"] = cfg.quadrature_probes;
  j["exp_pair_samples"] = cfg.exp_pair_samples;
  j["sample_spacing"] = optional_json(cfg.sample_spacing);
  j["laplace_max_dim"] = cfg.laplace_max_dim;
  return j;
}

Json certificate_json(const GpCertificate& c) {
  Json j;
  j["verdict"] = std::string(to_string(c.verdict));
  j["diagnostic"] = c.diagnostic;
  j["dim"] = c.dim;
  j["spectral_abscissa"] = c.spectral_abscissa;
  j["C"] = optional_json(c.C);
  j["s_star"] = optional_json(c.s_star);
  j["K"] = optional_json(c.K);
  j["K_upper"] = optional_json(c.K_upper);
  j["omega"] = optional_json(c.omega);
  j["c"] = optional_json(c.c);
  auto power = [](const std::optional<PowerEnvelope>& e) {
    return e ? Json{{"constant", e->constant}, {"exponent", e->exponent}} : Json(nullptr);
  };
  j["envelope_half"] = power(c.envelope_half);
  j["envelope_one"] = power(c.envelope_one);
  j["exp_pair"] = c.exp_pair ? Json{{"M", c.exp_pair->M}, {"omega", c.exp_pair->omega}, {"t_star", c.exp_pair->t_star}}
                             : Json(nullptr);
  j["fitted_envelope"] =
      c.fitted_envelope ? Json{{"M", c.fitted_envelope->M}, {"omega", c.fitted_envelope->omega}} : Json(nullptr);

  Json summary;
  std::size_t failed = 0;
  for (const auto& r : c.checks) failed += r.passed ? 0 : 1;
  summary["total"] = c.checks.size();
  summary["passed"] = c.checks.size() - failed;
  summary["failed"] = failed;
  Json families = Json::array();
  for (const auto& [name, f] : summarize(c.checks)) {
    families.push_back(
        {{"name", name}, {"count", f.count}, {"failed", f.failed}, {"min_relative_slack", f.min_margin}});
  }
  summary["families"] = std::move(families);
  j["summary"] = std::move(summary);

  Json checks = Json::array();
  for (const auto& r : c.checks) {
    checks.push_back({{"name", r.name},
                      {"lhs", r.lhs},
                      {"rhs", r.rhs},
                      {"slack", r.slack},
                      {"passed", r.passed},
                      {"location", location_json(r.location)}});
  }
  j["checks"] = std::move(checks);
  return j;
}

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string g6(const std::optional<double>& v) { return v ? g6(*v) : "n/a"; }

std::string location_text(const CheckLocation& loc) {
  std::string out;
  auto add = [&out](const char* key, const std::string& value) {
    if (!out.empty()) out += ' ';
    out += key;
    out += '=';
    out += value;
  };
  if (loc.t) add("t", g6(*loc.t));
  if (loc.s) add("s", g6(*loc.s));
  if (loc.alpha) add("alpha", g6(*loc.alpha));
  if (loc.probe) add("probe", std::to_string(*loc.probe));
  if (loc.probe2) add("probe2", std::to_string(*loc.probe2));
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last)
    throw Error(ErrorKind::InvalidArgument, "bad value for " + std::string(key) + ": '" + std::string(text) + "'");
  return value;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string render_json(const Report& report) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool"] = {{"name", "gp_certify"}, {"version", std::string(tool_version())}};
  Json input;
  input["source"] = report.input.source;
  input["name"] = report.input.name;
  input["params"] = Json::object();
  for (const auto& [k, v] : report.input.params) input["params"][k] = v;
  input["dim"] = report.input.dim;
  j["input"] = std::move(input);
  j["config"] = config_json(report.config);
  j["certificate"] = certificate_json(report.certificate);
  if (report.timings) {
    Json t = Json::object();
    for (const auto& [stage, ms] : report.timings->ms) t[stage] = ms;
    j["timing_ms"] = std::move(t);
  }
  return j.dump(2) + "\n";
}

std::string render_text(const Report& report) {
  const GpCertificate& c = report.certificate;
  std::ostringstream out;
  out << "gp_certify " << tool_version() << "\n";
  out << "input: " << report.input.source << ' ' << report.input.name;
  if (!report.input.params.empty()) {
    out << " (";
    bool first = true;
    for (const auto& [k, v] : report.input.params) {
      out << (first ? "" : ", ") << k << '=' << v;
      first = false;
    }
    out << ')';
  }
  out << ", dim " << report.input.dim << "\n";
  out << "verdict: " << to_string(c.verdict) << "\n";
  if (!c.diagnostic.empty()) out << "diagnostic: " << c.diagnostic << "\n";
  out << "spectral abscissa: " << g6(c.spectral_abscissa) << "\n";
  if (c.C) out << "C = " << g6(c.C) << " at s = " << g6(c.s_star) << "\n";
  if (c.omega) out << "omega = 1/C = " << g6(c.omega) << "\n";
  if (c.K) out << "K = " << g6(c.K) << " (upper " << g6(c.K_upper) << ")\n";
  if (c.c) out << "c = K sqrt(2C) = " << g6(c.c) << "\n";
  if (c.envelope_half) out << "envelope: ||T(t)|| <= " << g6(c.envelope_half->constant) << " t^-1/2\n";
  if (c.envelope_one) out << "envelope: ||T(t)|| <= " << g6(c.envelope_one->constant) << " / t\n";
  if (c.exp_pair)
    out << "envelope: ||T(t)|| <= " << g6(c.exp_pair->M) << " exp(-" << g6(c.exp_pair->omega) << " t), t* = "
        << g6(c.exp_pair->t_star) << "\n";
  if (c.fitted_envelope)
    out << "fitted: ||T(t)|| <= " << g6(c.fitted_envelope->M) << " exp(-" << g6(c.fitted_envelope->omega)
        << " t)\n";

  if (!c.checks.empty()) {
    std::size_t failed = 0;
    for (const auto& r : c.checks) failed += r.passed ? 0 : 1;
    out << "checks: " << c.checks.size() - failed << " passed, " << failed << " failed\n";
    for (const auto& [name, f] : summarize(c.checks)) {
      char line[160];
      std::snprintf(line, sizeof line, "  %-28s %7zu  failed %5zu  min relative slack %.6g\n", name.c_str(),
                    f.count, f.failed, f.min_margin);
      out << line;
    }
    constexpr std::size_t kMaxListed = 20;
    std::size_t listed = 0;
    for (const auto& r : c.checks) {
      if (r.passed) continue;
      if (listed == 0) out << "failed checks:\n";
      if (listed++ == kMaxListed) {
        out << "  ...\n";
        break;
      }
      out << "  " << r.name << ": " << g6(r.lhs) << " > " << g6(r.rhs) << "  [" << location_text(r.location)
          << "]\n";
    }
  }
  if (report.timings) {
    out << "timing (ms):\n";
    for (const auto& [stage, ms] : report.timings->ms) {
      char line[96];
      std::snprintf(line, sizeof line, "  %-18s %10.1f\n", stage.c_str(), ms);
      out << line;
    }
  }
  return out.str();
}

void apply_config_value(CertifyConfig& cfg, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "check_tol") {
    cfg.check_tol = parse_number<double>(key, value);
  } else if (key == "resolvent_rel_tol") {
    cfg.resolvent_rel_tol = parse_number<double>(key, value);
  } else if (key == "energy_tol") {
    cfg.energy_tol = parse_number<double>(key, value);
  } else if (key == "alpha_fractions") {
    std::vector<double> fractions;
    std::size_t start = 0;
    while (start <= value.size()) {
      const std::size_t comma = std::min(value.find(',', start), value.size());
      fractions.push_back(parse_number<double>(key, trim(value.substr(start, comma - start))));
      start = comma + 1;
    }
    cfg.alpha_fractions = std::move(fractions);
  } else if (key == "alpha_surrogate") {
    cfg.alpha_surrogate = parse_number<double>(key, value);
  } else if (key == "random_probes") {
    cfg.random_probes = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "quadrature_probes") {
    cfg.quadrature_probes = parse_number<std::size_t>(key, value);
  } else if (key == "exp_pair_samples") {
    cfg.exp_pair_samples = parse_number<std::size_t>(key, value);
  } else if (key == "sample_spacing") {
    cfg.sample_spacing = parse_number<double>(key, value);
  } else if (key == "laplace_max_dim") {
    cfg.laplace_max_dim = parse_number<std::size_t>(key, value);
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown configuration key '" + std::string(key) + "'");
  }
}

void apply_config_file(CertifyConfig& cfg, std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", line_no, 1);
    try {
      apply_config_value(cfg, trim(body.substr(0, eq)), body.substr(eq + 1));
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no, 1);
    }
  }
}

void apply_config_file(CertifyConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0, 0);
  apply_config_file(cfg, in);
}

}  // namespace gpcert
