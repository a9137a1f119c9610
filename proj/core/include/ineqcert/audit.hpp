#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ineqcert {

/// Finite region on which a condition is checked: shells of radius
/// inner..outer around the base point, each sampled along `directions` unit
/// vectors (ignored in dimension 1, where the shell is {x0 - r, x0 + r}).
struct AuditDomain {
  double outer = 4.0;
  double inner = 0.0;
  int shells = 401;
  int directions = 256;

  double radius(int j) const { return inner + (outer - inner) * j / (shells - 1); }
  AuditDomain refined() const { return {outer, inner, 2 * shells - 1, 2 * directions}; }
};

struct ShellStat {
  double radius = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::array<double, 3> argmin{};
  std::array<double, 3> argmax{};
  bool empty = true;
};

using PointFunction = std::function<double(std::span<const double>)>;

/// Evaluates f on every sample point and records per-shell extrema. NaN values
/// are skipped (points where the quantity is undefined, e.g. ratios at x0).
std::vector<ShellStat> scan_shells(const AuditDomain& domain, std::span<const double> x0, int dim,
                                   const PointFunction& f);

/// Unit directions used for shells in the given dimension.
std::vector<std::array<double, 3>> shell_directions(int dim, int count);

/// Result of choosing the largest c and then smallest R with f >= c on every
/// shell of radius >= R.
struct ThresholdChoice {
  double c = 0.0;
  double radius = 0.0;
  double margin = 0.0;
};

/// c ranges over 2^(k/2), k = -32..31; R must lie in the inner half of the
/// audited radii. Empty if no candidate qualifies.
std::optional<ThresholdChoice> choose_threshold(const std::vector<ShellStat>& profile, const AuditDomain& domain);

/// Smallest R such that f >= c on every shell of radius >= R.
std::optional<ThresholdChoice> radius_for_threshold(const std::vector<ShellStat>& profile, double c);

/// Log-log slope of the per-shell minimum across the outer quarter, or empty
/// when the profile is not positive and decreasing there.
std::optional<double> decaying_tail_slope(const std::vector<ShellStat>& profile);

}  // namespace ineqcert
