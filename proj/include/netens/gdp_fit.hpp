#ifndef NETENS_GDP_FIT_HPP
#define NETENS_GDP_FIT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "netens/ensembles.hpp"
#include "netens/graph.hpp"

namespace netens {

enum class FitAStatus {
  ok,
  zero_links,  // L = 0 pins a = 0; boundary, not an error
  saturated,   // L = N(N-1)/2 has no finite solution
};

struct FitAResult {
  double a = 0.0;
  FitAStatus status = FitAStatus::ok;
};

// Unique a with sum_{i<j} a g_i g_j / (1 + a g_i g_j) = L. The objective is
// strictly increasing in a; solved by bracketing + bisection to relative
// tolerance 1e-12.
FitAResult fit_a(const GdpVector& g, double observed_links);

struct LogLogFit {
  double b = 0.0;
  double c = 0.0;
  double r2 = 0.0;
};

// OLS of log(y_i/(1-y_i)) on log(g_i): slope c, intercept log b. Nodes with
// y_i = 0 (zero degree) are excluded. Throws when fewer than 3 nodes remain
// or the regressor is degenerate (all included g equal).
LogLogFit fit_bc(std::span<const double> y, std::span<const double> g);

struct OriginFit {
  double sqrt_a = 0.0;
  double r2 = 0.0;  // of the fixed-slope-1 relation in log-log space
};

// Through-origin least squares sqrt(a) = sum z_i g_i / sum g_i^2 over nodes
// with z_i > 0; diagnostic companion to the likelihood-based fit_a.
OriginFit fit_sqrt_a_regression(std::span<const double> zx, std::span<const double> g);

// z_i = sqrt(a) g_i and y_i = b g_i^c / (1 + b g_i^c); a TS-kind vector set.
FitnessVectors gdp_fitness_vectors(const MacroParams& params, const GdpVector& g);

struct GdpFitResult {
  MacroParams params;
  FitAStatus a_status = FitAStatus::ok;
  double r2_x = 0.0;  // log-log goodness of the fitness-GDP proportionality
  double r2_y = 0.0;  // goodness of the y-relation regression
  double sqrt_a_regression = 0.0;
  std::vector<int> excluded_nodes;  // exactly the zero-degree nodes
  double expected_links = 0.0;
  double observed_links = 0.0;
  double expected_strength = 0.0;  // under the fitted a,b,c; generally != observed
  double observed_strength = 0.0;
};

// Full macro reduction from an already-fitted TS (or ECM) vector set:
// a from <L> = L, then (b, c) from the y-relation log-log regression.
GdpFitResult fit_gdp_model(const ConstraintSet& observed, const FitnessVectors& fitted,
                           const GdpVector& g);

}  // namespace netens

#endif
