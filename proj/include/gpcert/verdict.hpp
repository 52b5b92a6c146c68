#pragma once

#include <optional>
#include <string_view>

namespace gpcert {

/// Outcome of a certification run.
///
/// VerificationFailed means the hypotheses were met but at least one
/// numerically verified inequality did not hold to tolerance.
enum class Verdict {
  ExponentiallyStable,
  HypothesisViolatedAxisSpectrum,
  HypothesisViolatedUnboundedResolvent,
  NotBounded,
  VerificationFailed,
};

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::ExponentiallyStable: return "ExponentiallyStable";
    case Verdict::HypothesisViolatedAxisSpectrum: return "HypothesisViolatedAxisSpectrum";
    case Verdict::HypothesisViolatedUnboundedResolvent: return "HypothesisViolatedUnboundedResolvent";
    case Verdict::NotBounded: return "NotBounded";
    case Verdict::VerificationFailed: return "VerificationFailed";
  }
  return "Unknown";
}

inline std::optional<Verdict> parse_verdict(std::string_view s) {
  for (Verdict v : {Verdict::ExponentiallyStable, Verdict::HypothesisViolatedAxisSpectrum,
                    Verdict::HypothesisViolatedUnboundedResolvent, Verdict::NotBounded, Verdict::VerificationFailed})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

/// True for verdicts where an assumption of the stability criterion fails
/// (spectrum on the axis, unbounded resolvent, or an unbounded semigroup).
constexpr bool is_hypothesis_violation(Verdict v) {
  return v == Verdict::HypothesisViolatedAxisSpectrum || v == Verdict::HypothesisViolatedUnboundedResolvent ||
         v == Verdict::NotBounded;
}

}  // namespace gpcert
