#include "gpcert/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace gpcert {

namespace {

struct Token {
  std::string_view text;
  std::size_t column = 0;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

double parse_real(const Token& t, std::size_t line) {
  double v = 0.0;
  std::string_view s = t.text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("expected a number, got '" + std::string(t.text) + "'", line, t.column);
  if (!std::isfinite(v)) throw ParseError("non-finite entry", line, t.column);
  return v;
}

long long parse_index(const Token& t, std::size_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (ec != std::errc() || ptr != t.text.data() + t.text.size())
    throw ParseError("expected an integer, got '" + std::string(t.text) + "'", line, t.column);
  return v;
}

enum class Symmetry { General, Symmetric, SkewSymmetric, Hermitian };

double param_double(const Params& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  if (it == p.end()) return fallback;
  double v = 0.0;
  std::string_view s = it->second;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw Error(ErrorKind::BadParams, "parameter " + key + " is not a finite number: '" + it->second + "'");
  return v;
}

long long param_int(const Params& p, const std::string& key, long long fallback) {
  const auto it = p.find(key);
  if (it == p.end()) return fallback;
  long long v = 0;
  const std::string& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorKind::BadParams, "parameter " + key + " is not an integer: '" + s + "'");
  return v;
}

std::vector<double> param_list(const Params& p, const std::string& key, std::vector<double> fallback) {
  const auto it = p.find(key);
  if (it == p.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Params one{{key, item}};
    out.push_back(param_double(one, key, 0.0));
  }
  if (out.empty()) throw Error(ErrorKind::BadParams, "parameter " + key + " is empty");
  return out;
}

void check_keys(const std::string& name, const Params& p, std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : p)
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw Error(ErrorKind::BadParams, "unknown parameter '" + k + "' for builtin " + name);
}

// Expected verdict of a matrix whose eigenvalue real parts are known exactly.
Verdict expected_for_abscissa(double abscissa) {
  if (abscissa < 0.0) return Verdict::ExponentiallyStable;
  if (abscissa == 0.0) return Verdict::HypothesisViolatedAxisSpectrum;
  return Verdict::NotBounded;
}

std::string format_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

Generator read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty input", 1, 1);
  ++line_no;
  const auto header = tokenize(line);
  if (header.size() != 5 || lower(header[0].text) != "%%matrixmarket")
    throw ParseError("missing '%%MatrixMarket' header", line_no, 1);
  if (lower(header[1].text) != "matrix")
    throw ParseError("unsupported object '" + std::string(header[1].text) + "'", line_no, header[1].column);
  const std::string format = lower(header[2].text);
  if (format != "coordinate" && format != "array")
    throw ParseError("unsupported format '" + std::string(header[2].text) + "'", line_no, header[2].column);
  const std::string field = lower(header[3].text);
  if (field == "pattern") throw Error(ErrorKind::UnsupportedField, "pattern matrices carry no values");
  if (field != "real" && field != "complex" && field != "integer")
    throw Error(ErrorKind::UnsupportedField, "unsupported field '" + std::string(header[3].text) + "'");
  const bool is_complex = field == "complex";
  const std::string sym_name = lower(header[4].text);
  Symmetry sym;
  if (sym_name == "general") sym = Symmetry::General;
  else if (sym_name == "symmetric") sym = Symmetry::Symmetric;
  else if (sym_name == "skew-symmetric") sym = Symmetry::SkewSymmetric;
  else if (sym_name == "hermitian") sym = Symmetry::Hermitian;
  else throw ParseError("unsupported symmetry '" + std::string(header[4].text) + "'", line_no, header[4].column);
  if (sym == Symmetry::Hermitian && !is_complex)
    throw ParseError("hermitian symmetry requires a complex field", line_no, header[4].column);

  // Skip comments and blank lines up to the size line.
  std::vector<Token> size_tokens;
  while (std::getline(in, line)) {
    ++line_no;
    size_tokens = tokenize(line);
    if (size_tokens.empty() || size_tokens[0].text.front() == '%') continue;
    break;
  }
  const bool coordinate = format == "coordinate";
  const std::size_t expected_size_tokens = coordinate ? 3 : 2;
  if (size_tokens.size() != expected_size_tokens)
    throw ParseError("size line must hold " + std::to_string(expected_size_tokens) + " integers", line_no,
                     size_tokens.empty() ? 1 : size_tokens[0].column);
  const long long rows = parse_index(size_tokens[0], line_no);
  const long long cols = parse_index(size_tokens[1], line_no);
  if (rows < 1 || cols < 1) throw ParseError("dimensions must be positive", line_no, size_tokens[0].column);
  if (rows != cols)
    throw Error(ErrorKind::NotSquare, "matrix is " + std::to_string(rows) + "x" + std::to_string(cols));
  if (rows > 1 << 16) throw ParseError("dimension too large for dense storage", line_no, size_tokens[0].column);
  const long long n = rows;
  long long count = 0;
  if (coordinate) {
    count = parse_index(size_tokens[2], line_no);
    if (count < 0) throw ParseError("negative entry count", line_no, size_tokens[2].column);
  } else {
    count = sym == Symmetry::General ? n * n : (sym == Symmetry::SkewSymmetric ? n * (n - 1) / 2 : n * (n + 1) / 2);
  }

  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  const std::size_t value_tokens = is_complex ? 2 : 1;
  const std::size_t per_line = (coordinate ? 2 : 0) + value_tokens;
  // Array format walks column by column, in the lower triangle when a
  // symmetry is declared.
  long long ai = 0;
  long long aj = 0;
  if (!coordinate && sym == Symmetry::SkewSymmetric) ai = 1;
  auto place = [&](long long i, long long j, Complex v, const Token& at) {
    if (sym != Symmetry::General && i < j)
      throw ParseError("entry above the diagonal in a symmetric file", line_no, at.column);
    if (sym == Symmetry::SkewSymmetric && i == j)
      throw ParseError("diagonal entry in a skew-symmetric file", line_no, at.column);
    if (sym == Symmetry::Hermitian && i == j && v.imag() != 0.0)
      throw ParseError("non-real diagonal entry in a hermitian file", line_no, at.column);
    m(i, j) += v;
    if (i != j) {
      switch (sym) {
        case Symmetry::General: break;
        case Symmetry::Symmetric: m(j, i) += v; break;
        case Symmetry::SkewSymmetric: m(j, i) -= v; break;
        case Symmetry::Hermitian: m(j, i) += std::conj(v); break;
      }
    }
  };

  long long read = 0;
  while (read < count && std::getline(in, line)) {
    ++line_no;
    const auto tok = tokenize(line);
    if (tok.empty() || tok[0].text.front() == '%') continue;
    if (tok.size() != per_line)
      throw ParseError("expected " + std::to_string(per_line) + " fields, got " + std::to_string(tok.size()), line_no,
                       tok[std::min(tok.size(), per_line) - 1].column);
    long long i = 0;
    long long j = 0;
    std::size_t k = 0;
    if (coordinate) {
      i = parse_index(tok[0], line_no) - 1;
      j = parse_index(tok[1], line_no) - 1;
      if (i < 0 || i >= n) throw ParseError("row index out of range", line_no, tok[0].column);
      if (j < 0 || j >= n) throw ParseError("column index out of range", line_no, tok[1].column);
      k = 2;
    } else {
      i = ai;
      j = aj;
    }
    const double re = parse_real(tok[k], line_no);
    const double im = is_complex ? parse_real(tok[k + 1], line_no) : 0.0;
    place(i, j, Complex(re, im), tok[k]);
    ++read;
    if (!coordinate) {
      ++ai;
      if (ai >= n) {
        ++aj;
        ai = sym == Symmetry::General ? 0 : (sym == Symmetry::SkewSymmetric ? aj + 1 : aj);
      }
    }
  }
  if (read < count)
    throw ParseError("expected " + std::to_string(count) + " entries, found " + std::to_string(read), line_no + 1, 1);
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = tokenize(line);
    if (!tok.empty() && tok[0].text.front() != '%')
      throw ParseError("unexpected data after the last entry", line_no, tok[0].column);
  }
  if (!is_complex) return Generator(RealMatrix(m.real()));
  return Generator(std::move(m));
}

Generator read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0, 0);
  return read_matrix_market(in);
}

void write_matrix_market(const Generator& a, std::ostream& out) {
  const bool real = a.is_real();
  const Eigen::Index n = a.dim();
  out << "%%MatrixMarket matrix array " << (real ? "real" : "complex") << " general\n";
  out << n << ' ' << n << '\n';
  char buf[64];
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex v = a.entries()(i, j);
      if (real)
        std::snprintf(buf, sizeof buf, "%.17g\n", v.real());
      else
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.real(), v.imag());
      out << buf;
    }
}

void write_matrix_market(const Generator& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path.string() + "'");
  write_matrix_market(a, out);
  if (!out) throw Error(ErrorKind::InvalidArgument, "write to '" + path.string() + "' failed");
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"scalar", "diagonal", "jordan", "rotation", "nonnormal", "damped_wave"};
  return names;
}

CorpusEntry builtin(const std::string& name, const Params& params) {
  CorpusEntry e{name, Generator(RealMatrix(RealMatrix::Zero(1, 1))), std::nullopt, Provenance::BuiltIn};
  if (name == "scalar") {
    check_keys(name, params, {"value"});
    const double v = param_double(params, "value", -1.0);
    e.generator = Generator(RealMatrix(RealMatrix::Constant(1, 1, v)));
    e.expected_verdict = expected_for_abscissa(v);
  } else if (name == "diagonal") {
    check_keys(name, params, {"values"});
    const auto values = param_list(params, "values", {-1.0, -2.0});
    RealVector d = Eigen::Map<const RealVector>(values.data(), static_cast<Eigen::Index>(values.size()));
    e.generator = Generator(RealMatrix(d.asDiagonal()));
    e.expected_verdict = expected_for_abscissa(d.maxCoeff());
  } else if (name == "jordan") {
    check_keys(name, params, {"lambda", "size"});
    const double lambda = param_double(params, "lambda", -1.0);
    const long long size = param_int(params, "size", 2);
    if (size < 1 || size > 4096) throw Error(ErrorKind::BadParams, "jordan size must lie in [1, 4096]");
    RealMatrix m = RealMatrix::Zero(size, size);
    m.diagonal().setConstant(lambda);
    if (size > 1) m.diagonal(1).setOnes();
    e.generator = Generator(m);
    e.expected_verdict = expected_for_abscissa(lambda);
  } else if (name == "rotation") {
    check_keys(name, params, {"omega"});
    const double w = param_double(params, "omega", 1.0);
    RealMatrix m(2, 2);
    m << 0.0, w, -w, 0.0;
    e.generator = Generator(m);
    e.expected_verdict = Verdict::HypothesisViolatedAxisSpectrum;
  } else if (name == "nonnormal") {
    check_keys(name, params, {"delta", "b"});
    const double delta = param_double(params, "delta", 0.1);
    const double b = param_double(params, "b", 5.0);
    RealMatrix m(2, 2);
    m << -delta, b, 0.0, -2.0 * delta;
    e.generator = Generator(m);
    e.expected_verdict = expected_for_abscissa(-delta);
  } else if (name == "damped_wave") {
    check_keys(name, params, {"n", "a"});
    const long long n = param_int(params, "n", 8);
    const double a = param_double(params, "a", 1.0);
    if (n < 2 || n > 2048) throw Error(ErrorKind::BadParams, "damped_wave needs 2 <= n <= 2048");
    if (!(a > 0.0)) throw Error(ErrorKind::BadParams, "damped_wave needs damping a > 0");
    const double h2 = static_cast<double>((n + 1) * (n + 1));
    RealMatrix m = RealMatrix::Zero(2 * n, 2 * n);
    m.topRightCorner(n, n).setIdentity();
    auto lap = m.bottomLeftCorner(n, n);
    lap.diagonal().setConstant(-2.0 * h2);
    lap.diagonal(1).setConstant(h2);
    lap.diagonal(-1).setConstant(h2);
    m.bottomRightCorner(n, n).diagonal().setConstant(-a);
    e.generator = Generator(m);
    e.expected_verdict = Verdict::ExponentiallyStable;
  } else {
    throw Error(ErrorKind::UnknownName, "unknown builtin '" + name + "'");
  }
  if (!params.empty()) {
    e.name += '(';
    bool first = true;
    for (const auto& [k, v] : params) {
      if (!first) e.name += ',';
      e.name += k + '=' + v;
      first = false;
    }
    e.name += ')';
  }
  return e;
}

CorpusEntry file_entry(const std::filesystem::path& path) {
  return {path.stem().string(), read_matrix_market(path), std::nullopt, Provenance::File};
}

std::vector<CorpusEntry> builtin_corpus() {
  std::vector<CorpusEntry> out;
  for (const auto& name : builtin_names())
    if (name != "damped_wave") out.push_back(builtin(name));
  for (long long n : {8, 32})
    for (double a : {0.5, 2.0})
      out.push_back(builtin("damped_wave", {{"n", std::to_string(n)}, {"a", format_param(a)}}));
  return out;
}

}  // namespace gpcert
