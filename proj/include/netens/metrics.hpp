#ifndef NETENS_METRICS_HPP
#define NETENS_METRICS_HPP

#include <iosfwd>
#include <optional>
#include <vector>

#include "netens/graph.hpp"

namespace netens {

// Per-node record of local constraints and higher-order properties.
// Undefined entries stay nullopt and are emitted as empty CSV fields,
// never as 0. k and s are doubles so expected tables share the schema.
struct PropertyRow {
  double k = 0.0;
  double s = 0.0;
  std::optional<double> annd;         // defined iff k >= 1
  std::optional<double> clustering;   // defined iff k >= 2, in [0,1]
  std::optional<double> anns;         // defined iff k >= 1
  std::optional<double> wclustering;  // defined iff k >= 2
};

struct NodePropertyTable {
  std::vector<PropertyRow> rows;
  int n() const { return static_cast<int>(rows.size()); }
};

// Observed higher-order properties of a single node. All are undirected
// triple/neighbor sums over adjacency; see each function for the formula.

// sum_j a_ij k_j / k_i
std::optional<double> observed_annd(const WeightedGraph& g, int i);
// sum_{j!=i} sum_{k!=i,j} a_ij a_jk a_ki / sum_{j!=i} sum_{k!=i,j} a_ij a_ki
std::optional<double> observed_clustering(const WeightedGraph& g, int i);
// sum_j a_ij s_j / k_i
std::optional<double> observed_anns(const WeightedGraph& g, int i);
// sum (w_ij w_jk w_ki)^{1/3} over the clustering denominator
std::optional<double> observed_wclustering(const WeightedGraph& g, int i);

NodePropertyTable property_table(const WeightedGraph& g);

// CSV schema: node,k,s,annd,clustering,anns,wclustering.
void write_property_csv(std::ostream& out, const std::vector<std::string>& labels,
                        const NodePropertyTable& table);

}  // namespace netens

#endif
