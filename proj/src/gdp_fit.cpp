#include "netens/gdp_fit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace netens {

namespace {

double expected_links_at(double a, const GdpVector& g) {
  double sum = 0.0;
  for (int i = 0; i < g.n(); ++i)
    for (int j = i + 1; j < g.n(); ++j) {
      const double agg = a * g[i] * g[j];
      sum += agg / (1.0 + agg);
    }
  return sum;
}

struct Ols {
  double slope, intercept, r2;
};

Ols ols(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double vxx = sxx - sx * sx / n;
  const double vxy = sxy - sx * sy / n;
  const double vyy = syy - sy * sy / n;
  if (vxx <= 0.0) throw std::invalid_argument("degenerate regressor: all x equal");
  Ols out;
  out.slope = vxy / vxx;
  out.intercept = (sy - out.slope * sx) / n;
  out.r2 = vyy > 0.0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
  return out;
}

}  // namespace

FitAResult fit_a(const GdpVector& g, double observed_links) {
  const int n = g.n();
  const double max_links = static_cast<double>(n) * (n - 1) / 2.0;
  if (!(observed_links >= 0.0) || observed_links > max_links)
    throw std::invalid_argument("observed link count out of range");
  if (observed_links == 0.0) return {0.0, FitAStatus::zero_links};
  if (observed_links >= max_links)
    return {std::numeric_limits<double>::infinity(), FitAStatus::saturated};

  // The objective is strictly increasing in a with range (0, max_links);
  // the doubling bracket doubles as a monotonicity check on that grid.
  double lo = 0.0;
  double hi = 1.0;
  double prev = expected_links_at(0.5, g);
  while (expected_links_at(hi, g) < observed_links) {
    const double value = expected_links_at(hi, g);
    if (value < prev)  // ties possible only at double-precision saturation
      throw std::runtime_error("fit_a objective is not increasing on the bracket grid");
    prev = value;
    hi *= 2.0;
    if (hi > 1e300) return {hi, FitAStatus::saturated};
  }
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (expected_links_at(mid, g) < observed_links)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-12 * hi) break;
  }
  return {0.5 * (lo + hi), FitAStatus::ok};
}

LogLogFit fit_bc(std::span<const double> y, std::span<const double> g) {
  if (y.size() != g.size()) throw std::invalid_argument("fit_bc: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0.0) continue;  // zero-degree nodes carry no information
    if (!(y[i] > 0.0) || y[i] >= 1.0)
      throw std::invalid_argument("fit_bc: y outside (0,1) at node " + std::to_string(i));
    if (!(g[i] > 0.0))
      throw std::invalid_argument("fit_bc: nonpositive g at node " + std::to_string(i));
    lx.push_back(std::log(g[i]));
    ly.push_back(std::log(y[i] / (1.0 - y[i])));
  }
  if (lx.size() < 3)
    throw std::invalid_argument("fit_bc: fewer than 3 usable nodes");
  const Ols fit = ols(lx, ly);
  return {std::exp(fit.intercept), fit.slope, fit.r2};
}

OriginFit fit_sqrt_a_regression(std::span<const double> zx, std::span<const double> g) {
  if (zx.size() != g.size())
    throw std::invalid_argument("fit_sqrt_a_regression: size mismatch");
  double num = 0.0, den = 0.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < zx.size(); ++i) {
    if (zx[i] == 0.0) continue;
    if (!(zx[i] > 0.0) || !(g[i] > 0.0))
      throw std::invalid_argument("fit_sqrt_a_regression: nonpositive entry at node " +
                                  std::to_string(i));
    num += zx[i] * g[i];
    den += g[i] * g[i];
    lx.push_back(std::log(g[i]));
    ly.push_back(std::log(zx[i]));
  }
  if (den == 0.0)
    throw std::invalid_argument("fit_sqrt_a_regression: no usable nodes");
  OriginFit out;
  out.sqrt_a = num / den;
  // Goodness of the unit-slope relation log zx = log sqrt_a + log g.
  const double icept = std::log(out.sqrt_a);
  double ss_res = 0.0, ss_tot = 0.0, mean = 0.0;
  for (double v : ly) mean += v;
  mean /= static_cast<double>(ly.size());
  for (std::size_t i = 0; i < ly.size(); ++i) {
    const double resid = ly[i] - (icept + lx[i]);
    ss_res += resid * resid;
    ss_tot += (ly[i] - mean) * (ly[i] - mean);
  }
  out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return out;
}

FitnessVectors gdp_fitness_vectors(const MacroParams& params, const GdpVector& g) {
  if (!(params.a >= 0.0) || !(params.b >= 0.0) || !std::isfinite(params.c) ||
      !std::isfinite(params.a) || !std::isfinite(params.b))
    throw std::invalid_argument("invalid macro parameters");
  FitnessVectors out;
  out.kind = ModelKind::ts;
  const int n = g.n();
  out.z.resize(static_cast<std::size_t>(n));
  out.y.resize(static_cast<std::size_t>(n));
  const double sqrt_a = std::sqrt(params.a);
  for (int i = 0; i < n; ++i) {
    const double f = params.b * std::pow(g[i], params.c);
    out.z[static_cast<std::size_t>(i)] = sqrt_a * g[i];
    out.y[static_cast<std::size_t>(i)] = f / (1.0 + f);
  }
  return out;
}

GdpFitResult fit_gdp_model(const ConstraintSet& observed, const FitnessVectors& fitted,
                           const GdpVector& g) {
  if (observed.n() != g.n() || fitted.n() != g.n())
    throw std::invalid_argument("fit_gdp_model: dimension mismatch");
  if (fitted.y.empty())
    throw std::invalid_argument("fit_gdp_model: fitted vectors carry no y relation");

  GdpFitResult out;
  out.observed_links = static_cast<double>(observed.total_links);
  out.observed_strength = static_cast<double>(observed.total_strength);
  for (int i = 0; i < observed.n(); ++i)
    if (observed.degrees[static_cast<std::size_t>(i)] == 0)
      out.excluded_nodes.push_back(i);

  const FitAResult a = fit_a(g, out.observed_links);
  out.params.a = a.a;
  out.a_status = a.status;

  const std::vector<double>& zx = fitted.kind == ModelKind::ecm ? fitted.x : fitted.z;
  const OriginFit xrel = fit_sqrt_a_regression(zx, g.values());
  out.sqrt_a_regression = xrel.sqrt_a;
  out.r2_x = xrel.r2;

  const LogLogFit yrel = fit_bc(fitted.y, g.values());
  out.params.b = yrel.b;
  out.params.c = yrel.c;
  out.r2_y = yrel.r2;

  for (int i = 0; i < g.n(); ++i)
    for (int j = i + 1; j < g.n(); ++j) {
      const PairPrediction pr = gdp_ts_pair(g[i], g[j], out.params);
      out.expected_links += pr.p;
      out.expected_strength += pr.expected_w;
    }
  return out;
}

}  // namespace netens
