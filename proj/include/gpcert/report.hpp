#pragma once

// Serialized form of a certification run: what was analysed, with which
// settings, what came out, and optionally how long each stage took.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "gpcert/certificate.hpp"
#include "gpcert/corpus.hpp"

namespace gpcert {

inline constexpr int kReportSchemaVersion = 1;

std::string_view tool_version();

struct InputDescriptor {
  /// "builtin" or "file".
  std::string source;
  /// Builtin name, or the path as given.
  std::string name;
  Params params;
  Eigen::Index dim = 0;
};

struct Report {
  InputDescriptor input;
  CertifyConfig config;
  GpCertificate certificate;
  std::optional<StageTimings> timings;
};

/// JSON document; keys in a fixed order and every double printed with the
/// shortest representation that reads back to the same value, so equal
/// reports give equal bytes.
std::string render_json(const Report& report);

/// Plain text with 6 significant digits: constants, per-check summary and
/// the failing records.
std::string render_text(const Report& report);

/// Sets one configuration field from its textual value. Keys:
///   check_tol, resolvent_rel_tol, energy_tol, alpha_fractions (comma list),
///   alpha_surrogate, random_probes, seed, quadrature_probes,
///   exp_pair_samples, sample_spacing, laplace_max_dim
/// Throws InvalidArgument on unknown keys or malformed values.
void apply_config_value(CertifyConfig& cfg, std::string_view key, std::string_view value);

/// Reads key=value lines; blank lines and lines starting with '#' are
/// skipped. Throws ParseError with the offending line.
void apply_config_file(CertifyConfig& cfg, std::istream& in);
void apply_config_file(CertifyConfig& cfg, const std::filesystem::path& path);

}  // namespace gpcert
