#pragma once

// Matrix Market input/output and the built-in example generators.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gpcert/matrix_core.hpp"
#include "gpcert/verdict.hpp"

namespace gpcert {

enum class Provenance { BuiltIn, File };

constexpr std::string_view to_string(Provenance p) { return p == Provenance::BuiltIn ? "BuiltIn" : "File"; }

struct CorpusEntry {
  std::string name;
  Generator generator;
  std::optional<Verdict> expected_verdict;
  Provenance provenance = Provenance::BuiltIn;
};

/// Builtin parameters as given on the command line, e.g. {"n": "8"}.
using Params = std::map<std::string, std::string>;

/// Reads a square matrix in Matrix Market coordinate or array format with
/// real, integer or complex field and general, symmetric, skew-symmetric or
/// hermitian symmetry. Throws ParseError (with line and column),
/// NotSquare or UnsupportedField.
Generator read_matrix_market(std::istream& in);
Generator read_matrix_market(const std::filesystem::path& path);

/// Array format, complex field only when the generator is complex, with
/// 17 significant digits so that reading back reproduces every entry.
void write_matrix_market(const Generator& a, std::ostream& out);
void write_matrix_market(const Generator& a, const std::filesystem::path& path);

/// Names accepted by builtin().
const std::vector<std::string>& builtin_names();

/// Built-in generators:
///   scalar(value = -1)            [value]
///   diagonal(values = "-1,-2")    diag(values)
///   jordan(lambda = -1, size = 2) Jordan block
///   rotation(omega = 1)           [[0, omega], [-omega, 0]]
///   nonnormal(delta = 0.1, b = 5) [[-delta, b], [0, -2 delta]]
///   damped_wave(n = 8, a = 1)     [[0, I], [L, -a I]], L the Dirichlet
///                                 second-difference matrix on n interior
///                                 points of (0, 1), L = (n+1)^2 tridiag(1, -2, 1)
/// Throws UnknownName or BadParams.
CorpusEntry builtin(const std::string& name, const Params& params = {});

/// Entry for a Matrix Market file; the name is the file stem.
CorpusEntry file_entry(const std::filesystem::path& path);

/// The standard corpus: every builtin at its defaults plus damped_wave at
/// n in {8, 32} and a in {0.5, 2}.
std::vector<CorpusEntry> builtin_corpus();

}  // namespace gpcert
