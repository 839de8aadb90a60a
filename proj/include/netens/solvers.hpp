#ifndef NETENS_SOLVERS_HPP
#define NETENS_SOLVERS_HPP

#include <string>
#include <utility>
#include <vector>

#include "netens/ensembles.hpp"
#include "netens/graph.hpp"

namespace netens {

enum class SolveMode { fixed_point, newton };

struct SolverConfig {
  double tol = 1e-10;    // max relative constraint residual
  int max_iter = 100000;
  double damping = 1.0;  // step-mixing factor in (0,1], halved on divergence
  SolveMode mode = SolveMode::fixed_point;
  // Optional starting points (diagnostic hooks; default seeds when empty).
  std::vector<double> init_z;
  std::vector<double> init_x;
  std::vector<double> init_y;
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;  // final max relative residual over all constraints
  bool converged = false;
  double log_likelihood = 0.0;
  std::string message;
};

// Real-valued fitting targets. Observed ConstraintSets convert implicitly;
// expected constraints of a planted model are equally valid inputs.
struct FitTargets {
  std::vector<double> degrees;
  std::vector<double> strengths;  // may stay empty for degree-only fits

  FitTargets() = default;
  FitTargets(const ConstraintSet& c);  // NOLINT: implicit by design

  int n() const { return static_cast<int>(degrees.size()); }
};

// Degree-matching system: z >= 0 with sum_j z_i z_j/(1+z_i z_j) = k_i.
// Zero-degree nodes get z_i = 0 exactly and are excluded from iteration.
// A degree sequence with k_i = N-1 for every node has no finite solution;
// this is reported as boundary divergence, not thrown.
std::pair<FitnessVectors, SolveReport> solve_bcm(const FitTargets& targets,
                                                 const SolverConfig& cfg = {});

// Joint degree+strength system: x >= 0, y in [0,1) with <k_i> = k_i and
// <s_i> = s_i. Infeasible targets (s_i < k_i, or s_i = 0 xor k_i = 0) are
// rejected with std::invalid_argument before iteration.
std::pair<FitnessVectors, SolveReport> solve_ecm(const FitTargets& targets,
                                                 const SolverConfig& cfg = {});

// Two-step estimation: z from the degree system, then with p_ts frozen,
// y in [0,1) solving sum_j p_ts_ij/(1 - y_i y_j) = s_i.
std::pair<FitnessVectors, SolveReport> solve_ts(const FitTargets& targets,
                                                const SolverConfig& cfg = {});

// Exact log-probability of the observed configuration under the fitted
// ensemble. Missing links contribute log(1-p). A pair with a_ij = 1 but
// p_ij = 0 yields -infinity and, when requested, the offending pair.
double log_likelihood(const FitnessVectors& fitted, const WeightedGraph& g,
                      std::pair<int, int>* offending_pair = nullptr);

}  // namespace netens

#endif
