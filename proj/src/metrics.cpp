#include "netens/metrics.hpp"

#include <cmath>
#include <ostream>

#include "netens/io.hpp"

namespace netens {

std::optional<double> observed_annd(const WeightedGraph& g, int i) {
  const int ki = g.degree(i);
  if (ki == 0) return std::nullopt;
  double sum = 0.0;
  for (const Edge& e : g.neighbors(i)) sum += g.degree(e.to);
  return sum / ki;
}

std::optional<double> observed_anns(const WeightedGraph& g, int i) {
  const int ki = g.degree(i);
  if (ki == 0) return std::nullopt;
  double sum = 0.0;
  for (const Edge& e : g.neighbors(i)) sum += static_cast<double>(g.strength(e.to));
  return sum / ki;
}

std::optional<double> observed_clustering(const WeightedGraph& g, int i) {
  const int ki = g.degree(i);
  if (ki <= 1) return std::nullopt;
  double triangles = 0.0;  // ordered neighbor pairs (j,k) with a_jk = 1
  const auto nbrs = g.neighbors(i);
  for (const Edge& ej : nbrs)
    for (const Edge& ek : nbrs) {
      if (ej.to == ek.to) continue;
      if (g.has_edge(ej.to, ek.to)) triangles += 1.0;
    }
  const double wedges = static_cast<double>(ki) * (ki - 1);
  return triangles / wedges;
}

std::optional<double> observed_wclustering(const WeightedGraph& g, int i) {
  const int ki = g.degree(i);
  if (ki <= 1) return std::nullopt;
  double sum = 0.0;
  const auto nbrs = g.neighbors(i);
  for (const Edge& ej : nbrs)
    for (const Edge& ek : nbrs) {
      if (ej.to == ek.to) continue;
      const std::int64_t wjk = g.weight(ej.to, ek.to);
      if (wjk == 0) continue;
      sum += std::cbrt(static_cast<double>(ej.weight) * static_cast<double>(wjk) *
                       static_cast<double>(ek.weight));
    }
  const double wedges = static_cast<double>(ki) * (ki - 1);
  return sum / wedges;
}

NodePropertyTable property_table(const WeightedGraph& g) {
  NodePropertyTable table;
  table.rows.resize(static_cast<std::size_t>(g.n()));
  for (int i = 0; i < g.n(); ++i) {
    PropertyRow& row = table.rows[static_cast<std::size_t>(i)];
    row.k = g.degree(i);
    row.s = static_cast<double>(g.strength(i));
    row.annd = observed_annd(g, i);
    row.clustering = observed_clustering(g, i);
    row.anns = observed_anns(g, i);
    row.wclustering = observed_wclustering(g, i);
  }
  return table;
}

void write_property_csv(std::ostream& out, const std::vector<std::string>& labels,
                        const NodePropertyTable& table) {
  auto cell = [](const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
  };
  out << "node,k,s,annd,clustering,anns,wclustering\n";
  for (int i = 0; i < table.n(); ++i) {
    const PropertyRow& row = table.rows[static_cast<std::size_t>(i)];
    out << labels[static_cast<std::size_t>(i)] << ',' << fmt_double(row.k) << ','
        << fmt_double(row.s) << ',' << cell(row.annd) << ',' << cell(row.clustering)
        << ',' << cell(row.anns) << ',' << cell(row.wclustering) << '\n';
  }
}

}  // namespace netens
