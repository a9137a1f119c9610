#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "ineqcert/error.hpp"
#include "ineqcert/verify.hpp"

namespace ineqcert {
namespace {

double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

ConcentrationReport concentration_probe(const GridMeasure& mu, int n, const ConcentrationOptions& options) {
  if (n < 1 || n > 3) throw ParameterError("concentration probe supports n = 1, 2, 3");
  if (options.samples < 100) throw ParameterError("concentration probe needs at least 100 samples");
  ConcentrationReport rep;
  rep.n = n;
  const auto& w = mu.weights();
  std::vector<double> cdf(w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) cdf[i] = acc += w[i];
  const double h = mu.spacing();
  const double norm = std::sqrt(static_cast<double>(n * mu.dim()));

  std::mt19937_64 rng(options.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(n));
  std::vector<double> s(static_cast<std::size_t>(options.samples));
  for (auto& v : s) {
    double sum = 0.0;
    for (int copy = 0; copy < n; ++copy) {
      const double u = u01(rng) * acc;
      const std::size_t i = std::min<std::size_t>(
          static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()), w.size() - 1);
      const auto x = mu.node(i);
      for (int k = 0; k < mu.dim(); ++k) sum += x[k] + h * (u01(rng) - 0.5);
    }
    v = sum / norm;
  }
  std::sort(s.begin(), s.end());
  const double count = static_cast<double>(s.size());
  auto fraction_below = [&](double t) {
    return static_cast<double>(std::upper_bound(s.begin(), s.end(), t) - s.begin()) / count;
  };
  if (options.threshold) {
    rep.threshold = *options.threshold;
    rep.mass_A = fraction_below(rep.threshold);
    if (rep.mass_A < 0.5) throw InputError("half-space has mass below 1/2");
  } else {
    rep.threshold = s[(s.size() + 1) / 2 - 1];
    rep.mass_A = fraction_below(rep.threshold);
  }
  double mean = 0.0, var = 0.0;
  for (double v : s) mean += v;
  mean /= count;
  for (double v : s) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / count);

  // Least squares for y = alpha r^2 + beta r + gamma on the well-sampled tail.
  Eigen::Matrix3d AtA = Eigen::Matrix3d::Zero();
  Eigen::Vector3d Aty = Eigen::Vector3d::Zero();
  for (int k = 1; k <= options.r_points; ++k) {
    const double r = options.r_max * sd * k / options.r_points;
    const double p = fraction_below(rep.threshold + r);
    rep.r.push_back(r);
    rep.p_hat.push_back(p);
    if ((1.0 - p) * count < options.min_tail) continue;
    const double y = -std::log(1.0 - p);
    const Eigen::Vector3d row(r * r, r, 1.0);
    AtA += row * row.transpose();
    Aty += row * y;
    ++rep.fit_points;
  }
  rep.wide_confidence = rep.fit_points < std::max(3, options.r_points / 2);
  if (rep.fit_points >= 3) {
    const Eigen::Vector3d coef = AtA.ldlt().solve(Aty);
    rep.a = coef[0];
    if (rep.a > 0.0) {
      rep.r0 = -coef[1] / (2.0 * coef[0]);
      rep.b = std::exp(rep.a * rep.r0 * rep.r0 - coef[2]);
    }
  }
  return rep;
}

}  // namespace ineqcert
