#include "ineqcert/audit.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ineqcert/error.hpp"
#include "ineqcert/parallel.hpp"

namespace ineqcert {

std::vector<std::array<double, 3>> shell_directions(int dim, int count) {
  std::vector<std::array<double, 3>> dirs;
  if (dim == 1) {
    dirs.push_back({1.0, 0.0, 0.0});
    dirs.push_back({-1.0, 0.0, 0.0});
  } else if (dim == 2) {
    dirs.reserve(count);
    for (int m = 0; m < count; ++m) {
      const double th = 2.0 * std::numbers::pi * m / count;
      dirs.push_back({std::cos(th), std::sin(th), 0.0});
    }
  } else {
    dirs.reserve(count);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int m = 0; m < count; ++m) {
      const double z = 1.0 - 2.0 * (m + 0.5) / count;
      const double rho = std::sqrt(1.0 - z * z);
      dirs.push_back({rho * std::cos(golden * m), rho * std::sin(golden * m), z});
    }
  }
  return dirs;
}

std::vector<ShellStat> scan_shells(const AuditDomain& domain, std::span<const double> x0, int dim,
                                   const PointFunction& f) {
  if (domain.shells < 2 || !(domain.outer > domain.inner) || domain.inner < 0.0)
    throw InputError("empty audit domain");
  if (dim > 1 && domain.directions < 1) throw InputError("audit domain needs at least one direction");
  const auto dirs = shell_directions(dim, domain.directions);
  std::vector<ShellStat> out(static_cast<std::size_t>(domain.shells));
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    std::array<double, 3> p{};
    const std::span<const double> pt(p.data(), static_cast<std::size_t>(dim));
    for (std::size_t j = begin; j < end; ++j) {
      ShellStat& s = out[j];
      s.radius = domain.radius(static_cast<int>(j));
      s.min = std::numeric_limits<double>::infinity();
      s.max = -std::numeric_limits<double>::infinity();
      const std::size_t count = s.radius == 0.0 ? 1 : dirs.size();
      for (std::size_t m = 0; m < count; ++m) {
        for (int k = 0; k < dim; ++k) p[k] = x0[k] + s.radius * dirs[m][k];
        const double v = f(pt);
        if (std::isnan(v)) continue;
        s.empty = false;
        if (v < s.min) {
          s.min = v;
          s.argmin = p;
        }
        if (v > s.max) {
          s.max = v;
          s.argmax = p;
        }
      }
    }
  });
  return out;
}

std::optional<ThresholdChoice> radius_for_threshold(const std::vector<ShellStat>& profile, double c) {
  const double tol = 1e-12 * std::max(1.0, std::abs(c));
  std::optional<ThresholdChoice> best;
  double running_margin = std::numeric_limits<double>::infinity();
  for (auto it = profile.rbegin(); it != profile.rend(); ++it) {
    if (it->empty) continue;
    if (it->min < c - tol) break;
    running_margin = std::min(running_margin, it->min - c);
    best = ThresholdChoice{c, it->radius, std::max(running_margin, 0.0)};
  }
  return best;
}

std::optional<ThresholdChoice> choose_threshold(const std::vector<ShellStat>& profile, const AuditDomain& domain) {
  const double limit = domain.inner + 0.5 * (domain.outer - domain.inner) + 1e-12;
  for (int k = 31; k >= -32; --k) {
    const double c = std::exp2(k / 2.0);
    if (auto choice = radius_for_threshold(profile, c); choice && choice->radius <= limit) return choice;
  }
  return std::nullopt;
}

std::optional<double> decaying_tail_slope(const std::vector<ShellStat>& profile) {
  std::vector<const ShellStat*> live;
  for (const auto& s : profile)
    if (!s.empty) live.push_back(&s);
  if (live.size() < 4) return std::nullopt;
  const ShellStat& last = *live.back();
  const ShellStat& quarter = *live[(3 * (live.size() - 1)) / 4];
  if (!(quarter.radius > 0.0) || !(last.min > 0.0) || !(quarter.min > 0.0) || last.min >= quarter.min)
    return std::nullopt;
  return std::log(last.min / quarter.min) / std::log(last.radius / quarter.radius);
}

}  // namespace ineqcert
