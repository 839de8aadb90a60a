#ifndef NETENS_SAMPLER_HPP
#define NETENS_SAMPLER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "netens/ensembles.hpp"
#include "netens/graph.hpp"
#include "netens/metrics.hpp"

namespace netens {

struct SampleConfig {
  std::uint64_t seed = 0;
  int n_samples = 1;
};

// Counter-based substream: every (seed, i, j) pair owns an independent
// deterministic stream, so draws do not depend on evaluation order.
std::uint64_t mix64(std::uint64_t v);
double uniform_open_closed(std::uint64_t bits);  // maps to (0, 1]

// One draw from the ensemble: each pair independently gets a link with
// probability p_ij; a created link starts at weight 1 and grows by the
// geometric tail with ratio y_i y_j. The tail is drawn by closed-form
// inversion, w = 1 + floor(log u / log(y_i y_j)), which realizes exactly
// the same distribution as the increment-until-stop process.
// Pair iteration is lexicographic (i<j) and part of the output contract.
WeightedGraph sample_graph(const EnsembleModel& model, std::uint64_t seed,
                           std::vector<std::string> labels = {});

struct EnsembleStats {
  int n_samples = 0;
  std::vector<double> mean_degree, var_degree;
  std::vector<double> mean_strength, var_strength;
  // Mean observed metrics across samples, with the count of samples in
  // which each entry was defined.
  std::vector<double> mean_annd, mean_clustering, mean_anns, mean_wclustering;
  std::vector<int> n_annd, n_clustering, n_anns, n_wclustering;
};

// Monte-Carlo cross-check of the analytic expectations: sample n_samples
// graphs (per-sample seeds derived from cfg.seed) and accumulate per-node
// constraint and metric statistics.
EnsembleStats ensemble_statistics(const EnsembleModel& model, const SampleConfig& cfg);

}  // namespace netens

#endif
