#ifndef NETENS_GRAPH_HPP
#define NETENS_GRAPH_HPP

#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace netens {

/// One directed flow record as read from an edge file.
struct DirectedEdge {
  std::string source;
  std::string target;
  double volume = 0.0;
};

struct Edge {
  int to = -1;
  std::int64_t weight = 0;
};

// Symmetric integer-weighted graph. Stored weights are strictly positive;
// a missing entry means no link. Adjacency lists are kept sorted by
// neighbor index so iteration order is deterministic.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  // entries hold undirected weights, one per unordered pair: i != j, w > 0,
  // no duplicate pair in either orientation.
  WeightedGraph(std::vector<std::string> labels,
                std::span<const std::tuple<int, int, std::int64_t>> entries);

  int n() const { return static_cast<int>(adj_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::span<const Edge> neighbors(int i) const;
  std::int64_t weight(int i, int j) const;  // 0 when no link
  bool has_edge(int i, int j) const { return weight(i, j) != 0; }
  int degree(int i) const;
  std::int64_t strength(int i) const;
  std::int64_t link_count() const { return links_; }      // L
  std::int64_t total_weight() const { return total_; }    // T

 private:
  void check_node(int i) const;

  std::vector<std::string> labels_;
  std::vector<std::vector<Edge>> adj_;
  std::int64_t links_ = 0;
  std::int64_t total_ = 0;
};

// Local constraints of an observed graph: degree and strength sequences.
// Invariants: s_i >= k_i, s_i = 0 iff k_i = 0, sum k = 2L, sum s = 2T.
struct ConstraintSet {
  std::vector<std::int64_t> degrees;
  std::vector<std::int64_t> strengths;
  std::int64_t total_links = 0;     // L
  std::int64_t total_strength = 0;  // T

  int n() const { return static_cast<int>(degrees.size()); }
};

// Per-node rescaled GDP; entries are positive and sum to 1.
class GdpVector {
 public:
  GdpVector() = default;
  explicit GdpVector(std::vector<double> values);  // validates invariants

  int n() const { return static_cast<int>(g_.size()); }
  double operator[](int i) const { return g_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const { return g_; }

 private:
  std::vector<double> g_;
};

// Combines the two directed flows of each pair, quantizes to integer weights
// with round-half-away-from-zero, and drops pairs whose raw sum is zero.
// Positive raw sums that would round to zero are clamped to weight 1, so the
// binary topology survives coarse scales. seed_labels pre-assigns node
// indices (used to keep GDP-file nodes that trade nothing as isolated nodes);
// remaining nodes are indexed by first appearance in the edge list.
WeightedGraph symmetrize(std::span<const DirectedEdge> edges, double scale = 1.0,
                         std::vector<std::string> seed_labels = {});

ConstraintSet constraints(const WeightedGraph& g);

// g_i = raw_i / sum(raw). Throws std::invalid_argument naming the offending
// node when an entry is nonpositive or not finite.
GdpVector rescale_gdp(std::span<const double> raw_gdp);

}  // namespace netens

#endif
