#ifndef NETENS_ENSEMBLES_HPP
#define NETENS_ENSEMBLES_HPP

#include <optional>
#include <string>
#include <vector>

#include "netens/graph.hpp"
#include "netens/metrics.hpp"

namespace netens {

enum class ModelKind { bcm, wcm, ecm, ts, gdp_ts };

std::string model_name(ModelKind kind);

// Per-node hidden variables of a fitted model. Which vectors are populated
// depends on the kind: z for bcm/ts, x for ecm, y for ecm/ts.
// Invariants: z_i, x_i >= 0; 0 <= y_i < 1; fitness 0 exactly for k_i = 0.
struct FitnessVectors {
  ModelKind kind = ModelKind::bcm;
  std::vector<double> z;
  std::vector<double> x;
  std::vector<double> y;

  int n() const;
  void validate() const;  // throws std::invalid_argument on violation
};

// The three scalars of the GDP-driven reduction.
struct MacroParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

struct PairPrediction {
  double p = 0.0;           // link probability, in [0,1)
  double expected_w = 0.0;  // expected weight, >= p for integer-weight models
};

// p = z_i z_j / (1 + z_i z_j)
double bcm_link_prob(double zi, double zj);

// p = x_i x_j y_i y_j / (1 - y_i y_j + x_i x_j y_i y_j); <w> = p / (1 - y_i y_j)
PairPrediction ecm_pair(double xi, double xj, double yi, double yj);

// p = z_i z_j / (1 + z_i z_j); <w> = p / (1 - y_i y_j)
PairPrediction ts_pair(double zi, double zj, double yi, double yj);

// p = a g_i g_j / (1 + a g_i g_j);
// <w> = p (1 + b g_i^c)(1 + b g_j^c) / (1 + b g_i^c + b g_j^c)
PairPrediction gdp_ts_pair(double gi, double gj, const MacroParams& params);

// Continuous strength-only baseline: <w> = T g_i g_j with p identically 1.
double wcm_gravity_weight(double gi, double gj, double total_strength);

// S(gamma, R) = sum_{w>=1} w^gamma R^w, truncated when the next term drops
// below 1e-15 of the accumulated sum (hard cap 1e6 terms). Requires
// 0 <= R < 1 and gamma >= 0. S(1, R) = R/(1-R)^2, S(0, R) = R/(1-R).
double poly_moment(double gamma, double r);

// <w^gamma> under the per-pair ECM distribution:
//   x_i x_j (1 - y_i y_j) S(gamma, y_i y_j) / (1 - y_i y_j + x_i x_j y_i y_j).
// gamma=0 gives p_ij, gamma=1 gives <w_ij>.
double ecm_weight_moment(double xi, double xj, double yi, double yj, double gamma);

// <w^gamma> under the two-step distribution:
//   p_ts (1 - y_i y_j) S(gamma, y_i y_j) / (y_i y_j), equal to p_ts at y_i y_j = 0.
double ts_weight_moment(double zi, double zj, double yi, double yj, double gamma);

// Precomputed N x N pair matrices of one fitted ensemble: link probability,
// geometric ratio y_i y_j, expected weight, and the 1/3 weight moment used by
// expected weighted clustering. Expected higher-order properties are the
// observed-metric sums with a_ij replaced by p_ij (and weight entries by
// their moments).
class EnsembleModel {
 public:
  EnsembleModel() = default;

  static EnsembleModel from_fitness(const FitnessVectors& fitted);
  static EnsembleModel from_gdp_ts(const MacroParams& params, const GdpVector& g);
  static EnsembleModel from_wcm(const GdpVector& g, double total_strength);

  ModelKind kind() const { return kind_; }
  int n() const { return n_; }
  bool fitted() const { return n_ > 0; }

  double p(int i, int j) const;
  double geometric_ratio(int i, int j) const;  // y_i y_j (0 for bcm/wcm)
  double expected_w(int i, int j) const;
  double expected_w13(int i, int j) const;  // <w_ij^{1/3}>

  double expected_degree(int i) const;    // sum_j p_ij
  double expected_strength(int i) const;  // sum_j <w_ij>
  double expected_links() const;          // sum_{i<j} p_ij
  double expected_total_weight() const;   // sum_{i<j} <w_ij>

  std::optional<double> expected_annd(int i) const;
  std::optional<double> expected_clustering(int i) const;
  std::optional<double> expected_anns(int i) const;
  std::optional<double> expected_wclustering(int i) const;

  // Same schema as the observed table, with k,s holding expected values.
  NodePropertyTable expected_table() const;

 private:
  void require_fitted() const;
  double& at(std::vector<double>& m, int i, int j) const;
  double get(const std::vector<double>& m, int i, int j) const;
  void finalize();  // fills derived matrices from p_ and r_

  ModelKind kind_ = ModelKind::bcm;
  int n_ = 0;
  std::vector<double> p_;     // N*N, zero diagonal
  std::vector<double> r_;     // y_i y_j per pair
  std::vector<double> ew_;    // expected weights
  std::vector<double> ew13_;  // <w^{1/3}>
};

// Pairwise ECM vs BCM connection probabilities, lexicographic i<j, with
// summary deviation statistics from the identity line.
struct PairProbComparison {
  struct Row {
    int i, j;
    double p_ecm, p_bcm;
  };
  std::vector<Row> rows;
  double max_abs_deviation = 0.0;
  double rms_deviation = 0.0;
  double pearson = 0.0;  // correlation between the two probability sets
};

PairProbComparison compare_probs(const FitnessVectors& ecm, const FitnessVectors& bcm);

}  // namespace netens

#endif
