#include "netens/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace netens {

WeightedGraph::WeightedGraph(std::vector<std::string> labels,
                             std::span<const std::tuple<int, int, std::int64_t>> entries)
    : labels_(std::move(labels)), adj_(labels_.size()) {
  const int n = static_cast<int>(adj_.size());
  for (const auto& [i, j, w] : entries) {
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw std::out_of_range("graph entry references node out of range");
    if (i == j) throw std::invalid_argument("self-weight w_ii is not allowed");
    if (w <= 0) throw std::invalid_argument("stored weights must be positive integers");
    adj_[static_cast<std::size_t>(i)].push_back({j, w});
    adj_[static_cast<std::size_t>(j)].push_back({i, w});
    ++links_;
    total_ += w;
  }
  for (auto& nbrs : adj_) {
    std::sort(nbrs.begin(), nbrs.end(),
              [](const Edge& a, const Edge& b) { return a.to < b.to; });
    for (std::size_t k = 1; k < nbrs.size(); ++k)
      if (nbrs[k].to == nbrs[k - 1].to)
        throw std::invalid_argument("duplicate pair in graph entries");
  }
}

void WeightedGraph::check_node(int i) const {
  if (i < 0 || i >= n()) throw std::out_of_range("node index out of range");
}

std::span<const Edge> WeightedGraph::neighbors(int i) const {
  check_node(i);
  return adj_[static_cast<std::size_t>(i)];
}

std::int64_t WeightedGraph::weight(int i, int j) const {
  check_node(i);
  check_node(j);
  const auto& nbrs = adj_[static_cast<std::size_t>(i)];
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), j,
                             [](const Edge& e, int v) { return e.to < v; });
  return (it != nbrs.end() && it->to == j) ? it->weight : 0;
}

int WeightedGraph::degree(int i) const {
  check_node(i);
  return static_cast<int>(adj_[static_cast<std::size_t>(i)].size());
}

std::int64_t WeightedGraph::strength(int i) const {
  check_node(i);
  std::int64_t s = 0;
  for (const Edge& e : adj_[static_cast<std::size_t>(i)]) s += e.weight;
  return s;
}

GdpVector::GdpVector(std::vector<double> values) : g_(std::move(values)) {
  double sum = 0.0;
  for (std::size_t i = 0; i < g_.size(); ++i) {
    if (!std::isfinite(g_[i]) || g_[i] <= 0.0)
      throw std::invalid_argument("gdp share for node " + std::to_string(i) +
                                  " must be positive and finite");
    sum += g_[i];
  }
  if (!g_.empty() && std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("gdp shares must sum to 1");
}

WeightedGraph symmetrize(std::span<const DirectedEdge> edges, double scale,
                         std::vector<std::string> seed_labels) {
  if (!std::isfinite(scale) || scale <= 0.0)
    throw std::invalid_argument("scale must be positive and finite");

  std::vector<std::string> labels = std::move(seed_labels);
  std::unordered_map<std::string, int> index;
  index.reserve(labels.size() + edges.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!index.emplace(labels[i], static_cast<int>(i)).second)
      throw std::invalid_argument("duplicate node label: " + labels[i]);
  }
  auto intern = [&](const std::string& name) {
    auto [it, inserted] = index.emplace(name, static_cast<int>(labels.size()));
    if (inserted) labels.push_back(name);
    return it->second;
  };

  // Raw directed volumes accumulate per unordered pair; quantization happens
  // once per pair so that round(scale*(v_ij + v_ji)) matches the contract.
  std::map<std::pair<int, int>, double> raw;
  std::unordered_set<std::int64_t> seen_directed;
  for (const DirectedEdge& e : edges) {
    if (!std::isfinite(e.volume) || e.volume < 0.0)
      throw std::invalid_argument("volume for " + e.source + "->" + e.target +
                                  " must be finite and nonnegative");
    const int i = intern(e.source);
    const int j = intern(e.target);
    if (i == j) throw std::invalid_argument("self-loop rejected: " + e.source);
    const std::int64_t key = (static_cast<std::int64_t>(i) << 32) |
                             static_cast<std::uint32_t>(j);
    if (!seen_directed.insert(key).second)
      throw std::invalid_argument("duplicate edge: " + e.source + "->" + e.target);
    raw[{std::min(i, j), std::max(i, j)}] += e.volume;
  }

  std::vector<std::tuple<int, int, std::int64_t>> entries;
  entries.reserve(raw.size());
  for (const auto& [pair, volume] : raw) {
    if (volume == 0.0) continue;  // zero raw sum is a missing link
    std::int64_t w = std::llround(scale * volume);
    if (w < 1) w = 1;  // positive raw sums keep their link
    entries.emplace_back(pair.first, pair.second, w);
  }
  return WeightedGraph(std::move(labels), entries);
}

ConstraintSet constraints(const WeightedGraph& g) {
  ConstraintSet c;
  const int n = g.n();
  c.degrees.resize(static_cast<std::size_t>(n));
  c.strengths.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    c.degrees[static_cast<std::size_t>(i)] = g.degree(i);
    c.strengths[static_cast<std::size_t>(i)] = g.strength(i);
  }
  c.total_links = g.link_count();
  c.total_strength = g.total_weight();
  return c;
}

GdpVector rescale_gdp(std::span<const double> raw_gdp) {
  double sum = 0.0;
  for (std::size_t i = 0; i < raw_gdp.size(); ++i) {
    if (!std::isfinite(raw_gdp[i]) || raw_gdp[i] <= 0.0)
      throw std::invalid_argument("raw gdp for node " + std::to_string(i) +
                                  " must be positive and finite");
    sum += raw_gdp[i];
  }
  std::vector<double> g(raw_gdp.size());
  for (std::size_t i = 0; i < raw_gdp.size(); ++i) g[i] = raw_gdp[i] / sum;
  // Renormalize once: the shares must sum to 1 within 1e-12.
  double check = 0.0;
  for (double v : g) check += v;
  for (double& v : g) v /= check;
  return GdpVector(std::move(g));
}

}  // namespace netens
