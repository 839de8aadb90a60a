#include "netens/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace netens {

std::uint64_t mix64(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return v ^ (v >> 31);
}

double uniform_open_closed(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

namespace {

std::uint64_t pair_state(std::uint64_t seed, int i, int j) {
  std::uint64_t s = mix64(seed);
  s = mix64(s ^ (static_cast<std::uint64_t>(i) + 0x100000001ULL));
  s = mix64(s ^ (static_cast<std::uint64_t>(j) + 0x200000003ULL));
  return s;
}

}  // namespace

WeightedGraph sample_graph(const EnsembleModel& model, std::uint64_t seed,
                           std::vector<std::string> labels) {
  if (!model.fitted()) throw std::logic_error("ensemble model is not fitted");
  if (model.kind() == ModelKind::wcm)
    throw std::invalid_argument("the continuous baseline is not sampleable");
  const int n = model.n();
  if (labels.empty()) {
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels.push_back("n" + std::to_string(i));
  } else if (static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("label count does not match model size");
  }

  std::vector<std::tuple<int, int, std::int64_t>> entries;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double p = model.p(i, j);
      if (p <= 0.0) continue;
      const std::uint64_t state = pair_state(seed, i, j);
      const double u_link = uniform_open_closed(mix64(state ^ 1));
      if (u_link > p) continue;
      std::int64_t w = 1;
      const double r = model.geometric_ratio(i, j);
      if (r > 0.0) {
        const double u_tail = uniform_open_closed(mix64(state ^ 2));
        w += static_cast<std::int64_t>(std::floor(std::log(u_tail) / std::log(r)));
      }
      entries.emplace_back(i, j, w);
    }
  return WeightedGraph(std::move(labels), entries);
}

EnsembleStats ensemble_statistics(const EnsembleModel& model, const SampleConfig& cfg) {
  if (cfg.n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const int n = model.n();
  EnsembleStats st;
  st.n_samples = cfg.n_samples;
  const std::size_t size = static_cast<std::size_t>(n);
  st.mean_degree.assign(size, 0.0);
  st.var_degree.assign(size, 0.0);
  st.mean_strength.assign(size, 0.0);
  st.var_strength.assign(size, 0.0);
  st.mean_annd.assign(size, 0.0);
  st.mean_clustering.assign(size, 0.0);
  st.mean_anns.assign(size, 0.0);
  st.mean_wclustering.assign(size, 0.0);
  st.n_annd.assign(size, 0);
  st.n_clustering.assign(size, 0);
  st.n_anns.assign(size, 0);
  st.n_wclustering.assign(size, 0);

  std::vector<double> sum_k(size, 0.0), sumsq_k(size, 0.0);
  std::vector<double> sum_s(size, 0.0), sumsq_s(size, 0.0);
  for (int sample = 0; sample < cfg.n_samples; ++sample) {
    const std::uint64_t seed = mix64(cfg.seed ^ (0x5eedULL + static_cast<std::uint64_t>(sample)));
    const WeightedGraph g = sample_graph(model, seed);
    const NodePropertyTable table = property_table(g);
    for (int i = 0; i < n; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      const PropertyRow& row = table.rows[si];
      sum_k[si] += row.k;
      sumsq_k[si] += row.k * row.k;
      sum_s[si] += row.s;
      sumsq_s[si] += row.s * row.s;
      if (row.annd) { st.mean_annd[si] += *row.annd; ++st.n_annd[si]; }
      if (row.clustering) { st.mean_clustering[si] += *row.clustering; ++st.n_clustering[si]; }
      if (row.anns) { st.mean_anns[si] += *row.anns; ++st.n_anns[si]; }
      if (row.wclustering) { st.mean_wclustering[si] += *row.wclustering; ++st.n_wclustering[si]; }
    }
  }
  const double m = static_cast<double>(cfg.n_samples);
  for (std::size_t i = 0; i < size; ++i) {
    st.mean_degree[i] = sum_k[i] / m;
    st.mean_strength[i] = sum_s[i] / m;
    st.var_degree[i] = std::max(0.0, sumsq_k[i] / m - st.mean_degree[i] * st.mean_degree[i]);
    st.var_strength[i] =
        std::max(0.0, sumsq_s[i] / m - st.mean_strength[i] * st.mean_strength[i]);
    if (st.n_annd[i] > 0) st.mean_annd[i] /= st.n_annd[i];
    if (st.n_clustering[i] > 0) st.mean_clustering[i] /= st.n_clustering[i];
    if (st.n_anns[i] > 0) st.mean_anns[i] /= st.n_anns[i];
    if (st.n_wclustering[i] > 0) st.mean_wclustering[i] /= st.n_wclustering[i];
  }
  return st;
}

}  // namespace netens
