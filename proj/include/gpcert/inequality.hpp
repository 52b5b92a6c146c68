#pragma once

#include <optional>
#include <string>

namespace gpcert {

/// Where an inequality was evaluated; fields that do not apply stay empty.
struct CheckLocation {
  std::optional<double> t;
  std::optional<double> s;
  std::optional<double> alpha;
  std::optional<int> probe;
  std::optional<int> probe2;
};

/// One numerically verified inequality lhs <= rhs.
/// passed <=> lhs <= rhs * (1 + check_tol).
struct InequalityRecord {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  CheckLocation location;
  bool passed = false;
};

inline constexpr double kDefaultCheckTol = 1e-6;

inline InequalityRecord make_record(std::string name, double lhs, double rhs, double check_tol,
                                    CheckLocation location = {}) {
  InequalityRecord r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.location = location;
  r.passed = lhs <= rhs * (1.0 + check_tol);
  return r;
}

}  // namespace gpcert
