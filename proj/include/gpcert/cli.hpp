#pragma once

// gp_certify command line:
//
//   gp_certify certify    (--file F | --builtin N [--param k=v]...) [--format json|text] [--out P]
//                         [--config P] [--timing] [config overrides]
//   gp_certify resolvent  <input> [--method levelset|grid|both] [--points N] [--curve P] [--format json|text]
//   gp_certify decay      <input> [--horizon T] [--samples N] [--out P]
//   gp_certify plancherel <input> [--alpha a]... [--probe i] [--tol e] [--format json|text]
//   gp_certify builtins

#include <iosfwd>
#include <string>
#include <vector>

#include "gpcert/errors.hpp"
#include "gpcert/verdict.hpp"

namespace gpcert::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitHypothesis = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitParse = 65;

/// 0 for ExponentiallyStable, 2 for the hypothesis-violated verdicts
/// (including NotBounded), 1 otherwise.
int exit_code(Verdict v);

/// 65 for input parse failures, 64 for bad names, parameters or arguments,
/// 2 for a diverging resolvent bracket or semigroup, 1 for anything else.
int exit_code(const Error& e);

/// Runs one command; argv[0] is the program name. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gpcert::cli
