#ifndef NETENS_TESTS_HELPERS_HPP
#define NETENS_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "netens/ensembles.hpp"
#include "netens/graph.hpp"
#include "netens/sampler.hpp"

namespace netens::test {

// Deterministic generator independent of the library's sampling streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed * 2862933555777941757ULL + 3037000493ULL) {}
  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

inline std::vector<std::string> make_labels(int n) {
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back("n" + std::to_string(i));
  return labels;
}

inline WeightedGraph make_graph(int n,
                                const std::vector<std::tuple<int, int, std::int64_t>>& entries) {
  return WeightedGraph(make_labels(n), entries);
}

inline WeightedGraph random_graph(int n, double density, int max_w, Rng& rng) {
  std::vector<std::tuple<int, int, std::int64_t>> entries;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < density) entries.emplace_back(i, j, rng.uniform_int(1, max_w));
  return make_graph(n, entries);
}

// Label-keyed edge map; two graphs with permuted node order but the same
// labeled edges compare equal through this view.
inline std::map<std::pair<std::string, std::string>, std::int64_t> semantic_edges(
    const WeightedGraph& g) {
  std::map<std::pair<std::string, std::string>, std::int64_t> out;
  for (int i = 0; i < g.n(); ++i)
    for (const Edge& e : g.neighbors(i)) {
      if (e.to < i) continue;
      auto key = std::minmax(g.labels()[static_cast<std::size_t>(i)],
                             g.labels()[static_cast<std::size_t>(e.to)]);
      out[{key.first, key.second}] = e.weight;
    }
  return out;
}

// Independent dense-matrix reimplementation of the observed properties,
// written as literal triple loops over the full adjacency.
struct DenseMetrics {
  std::vector<std::vector<double>> a, w;
  std::vector<double> k, s;

  explicit DenseMetrics(const WeightedGraph& g) {
    const int n = g.n();
    a.assign(n, std::vector<double>(n, 0.0));
    w.assign(n, std::vector<double>(n, 0.0));
    k.assign(n, 0.0);
    s.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto wij = static_cast<double>(g.weight(i, j));
        w[i][j] = wij;
        a[i][j] = wij > 0 ? 1.0 : 0.0;
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        k[i] += a[i][j];
        s[i] += w[i][j];
      }
  }

  int n() const { return static_cast<int>(k.size()); }

  double annd(int i) const {
    double num = 0.0;
    for (int j = 0; j < n(); ++j) num += a[i][j] * k[j];
    return num / k[i];
  }
  double anns(int i) const {
    double num = 0.0;
    for (int j = 0; j < n(); ++j) num += a[i][j] * s[j];
    return num / k[i];
  }
  double clustering(int i) const {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n(); ++j) {
      if (j == i) continue;
      for (int q = 0; q < n(); ++q) {
        if (q == i || q == j) continue;
        num += a[i][j] * a[j][q] * a[q][i];
        den += a[i][j] * a[q][i];
      }
    }
    return num / den;
  }
  double wclustering(int i) const {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n(); ++j) {
      if (j == i) continue;
      for (int q = 0; q < n(); ++q) {
        if (q == i || q == j) continue;
        num += std::cbrt(w[i][j] * w[j][q] * w[q][i]);
        den += a[i][j] * a[q][i];
      }
    }
    return num / den;
  }
};

// Independent reimplementation of the expected properties from raw
// pair matrices (p, expected weight, 1/3 moment).
struct DenseExpected {
  std::vector<std::vector<double>> p, ew, m13;

  int n() const { return static_cast<int>(p.size()); }

  double edeg(int i) const {
    double v = 0.0;
    for (int j = 0; j < n(); ++j) v += p[i][j];
    return v;
  }
  double estr(int i) const {
    double v = 0.0;
    for (int j = 0; j < n(); ++j) v += ew[i][j];
    return v;
  }
  double annd(int i) const {
    double num = 0.0;
    for (int j = 0; j < n(); ++j)
      for (int q = 0; q < n(); ++q)
        if (j != i && q != j) num += p[i][j] * p[j][q];
    return num / edeg(i);
  }
  double anns(int i) const {
    double num = 0.0;
    for (int j = 0; j < n(); ++j)
      for (int q = 0; q < n(); ++q)
        if (j != i && q != j) num += p[i][j] * ew[j][q];
    return num / edeg(i);
  }
  double clustering(int i) const {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n(); ++j) {
      if (j == i) continue;
      for (int q = 0; q < n(); ++q) {
        if (q == i || q == j) continue;
        num += p[i][j] * p[j][q] * p[q][i];
        den += p[i][j] * p[q][i];
      }
    }
    return num / den;
  }
  double wclustering(int i) const {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n(); ++j) {
      if (j == i) continue;
      for (int q = 0; q < n(); ++q) {
        if (q == i || q == j) continue;
        num += m13[i][j] * m13[j][q] * m13[q][i];
        den += p[i][j] * p[q][i];
      }
    }
    return num / den;
  }
};

// Forward evaluation of the constraint systems from planted vectors; these
// feed the solvers in the planted-recovery oracles.
inline std::vector<double> bcm_expected_degrees(const std::vector<double>& z) {
  const int n = static_cast<int>(z.size());
  std::vector<double> k(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double zz = z[i] * z[j];
      k[i] += zz / (1.0 + zz);
    }
  return k;
}

struct ExpectedConstraints {
  std::vector<double> degrees, strengths;
};

inline ExpectedConstraints ecm_expected_constraints(const std::vector<double>& x,
                                                    const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  ExpectedConstraints out;
  out.degrees.assign(n, 0.0);
  out.strengths.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double r = y[i] * y[j];
      const double d = 1.0 - r + x[i] * x[j] * r;
      const double p = x[i] * x[j] * r / d;
      out.degrees[i] += p;
      out.strengths[i] += p / (1.0 - r);
    }
  return out;
}

inline ExpectedConstraints ts_expected_constraints(const std::vector<double>& z,
                                                   const std::vector<double>& y) {
  const int n = static_cast<int>(z.size());
  ExpectedConstraints out;
  out.degrees.assign(n, 0.0);
  out.strengths.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double zz = z[i] * z[j];
      const double p = zz / (1.0 + zz);
      out.degrees[i] += p;
      out.strengths[i] += p / (1.0 - y[i] * y[j]);
    }
  return out;
}

inline DenseExpected dense_from_model(const EnsembleModel& model) {
  DenseExpected d;
  const int n = model.n();
  d.p.assign(n, std::vector<double>(n, 0.0));
  d.ew.assign(n, std::vector<double>(n, 0.0));
  d.m13.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      d.p[i][j] = model.p(i, j);
      d.ew[i][j] = model.expected_w(i, j);
      d.m13[i][j] = model.expected_w13(i, j);
    }
  return d;
}

}  // namespace netens::test

#endif
