#include "netens/ensembles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace netens {

std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::bcm: return "bcm";
    case ModelKind::wcm: return "wcm";
    case ModelKind::ecm: return "ecm";
    case ModelKind::ts: return "ts";
    case ModelKind::gdp_ts: return "gdpts";
  }
  return "?";
}

int FitnessVectors::n() const {
  return static_cast<int>(kind == ModelKind::ecm ? x.size() : z.size());
}

void FitnessVectors::validate() const {
  const std::size_t size = static_cast<std::size_t>(n());
  auto check_nonneg = [&](const std::vector<double>& v, const char* name) {
    if (v.size() != size)
      throw std::invalid_argument(std::string("fitness vector ") + name + " has wrong size");
    for (double value : v)
      if (!std::isfinite(value) || value < 0.0)
        throw std::invalid_argument(std::string("fitness vector ") + name +
                                    " must be finite and nonnegative");
  };
  auto check_y = [&]() {
    if (y.size() != size) throw std::invalid_argument("fitness vector y has wrong size");
    for (double value : y)
      if (!(value >= 0.0) || value >= 1.0)
        throw std::invalid_argument("fitness vector y must lie in [0,1)");
  };
  switch (kind) {
    case ModelKind::bcm: check_nonneg(z, "z"); break;
    case ModelKind::ecm: check_nonneg(x, "x"); check_y(); break;
    case ModelKind::ts:
    case ModelKind::gdp_ts: check_nonneg(z, "z"); check_y(); break;
    case ModelKind::wcm:
      throw std::invalid_argument("wcm has no fitness vectors");
  }
}

namespace {

void require_nonneg(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0)
    throw std::invalid_argument(std::string(name) + " must be finite and nonnegative");
}

void require_unit_interval(double v, const char* name) {
  if (!(v >= 0.0) || v >= 1.0)
    throw std::invalid_argument(std::string(name) + " must lie in [0,1)");
}

// zz/(1+zz) with an overflow guard for the z -> infinity boundary.
double fermi(double product) {
  if (std::isinf(product)) return 1.0;
  return product / (1.0 + product);
}

// sum_{w>=1} w^gamma R^{w-1}; equals S(gamma,R)/R and tends to 1 as R -> 0.
double poly_series_over_r(double gamma, double r) {
  if (r == 0.0) return 1.0;
  double acc = 0.0;
  double rpow = 1.0;  // R^{w-1}
  for (int w = 1; w <= 1000000; ++w) {
    const double term = std::pow(static_cast<double>(w), gamma) * rpow;
    if (acc > 0.0 && term < 1e-15 * acc) return acc;
    acc += term;
    rpow *= r;
  }
  throw std::runtime_error("poly_moment series did not converge within 1e6 terms");
}

}  // namespace

double bcm_link_prob(double zi, double zj) {
  require_nonneg(zi, "z_i");
  require_nonneg(zj, "z_j");
  return fermi(zi * zj);
}

PairPrediction ecm_pair(double xi, double xj, double yi, double yj) {
  require_nonneg(xi, "x_i");
  require_nonneg(xj, "x_j");
  require_unit_interval(yi, "y_i");
  require_unit_interval(yj, "y_j");
  const double r = yi * yj;
  const double tr = xi * xj * r;
  PairPrediction out;
  out.p = std::isinf(tr) ? 1.0 : tr / (1.0 - r + tr);
  out.expected_w = out.p == 0.0 ? 0.0 : out.p / (1.0 - r);
  return out;
}

PairPrediction ts_pair(double zi, double zj, double yi, double yj) {
  require_nonneg(zi, "z_i");
  require_nonneg(zj, "z_j");
  require_unit_interval(yi, "y_i");
  require_unit_interval(yj, "y_j");
  PairPrediction out;
  out.p = fermi(zi * zj);
  out.expected_w = out.p == 0.0 ? 0.0 : out.p / (1.0 - yi * yj);
  return out;
}

PairPrediction gdp_ts_pair(double gi, double gj, const MacroParams& params) {
  if (!(gi > 0.0) || !(gj > 0.0))
    throw std::invalid_argument("gdp shares must be positive");
  require_nonneg(params.a, "a");
  require_nonneg(params.b, "b");
  if (!std::isfinite(params.c)) throw std::invalid_argument("c must be finite");
  PairPrediction out;
  out.p = fermi(params.a * gi * gj);
  const double fi = params.b * std::pow(gi, params.c);
  const double fj = params.b * std::pow(gj, params.c);
  out.expected_w = out.p * (1.0 + fi) * (1.0 + fj) / (1.0 + fi + fj);
  return out;
}

double wcm_gravity_weight(double gi, double gj, double total_strength) {
  require_nonneg(total_strength, "T");
  return total_strength * gi * gj;
}

double poly_moment(double gamma, double r) {
  require_nonneg(gamma, "gamma");
  if (!(r >= 0.0) || r >= 1.0) throw std::invalid_argument("R must lie in [0,1)");
  if (r == 0.0) return 0.0;
  return r * poly_series_over_r(gamma, r);
}

double ecm_weight_moment(double xi, double xj, double yi, double yj, double gamma) {
  require_nonneg(gamma, "gamma");
  require_nonneg(xi, "x_i");
  require_nonneg(xj, "x_j");
  require_unit_interval(yi, "y_i");
  require_unit_interval(yj, "y_j");
  const double r = yi * yj;
  const double tr = xi * xj * r;
  if (tr == 0.0) return 0.0;
  const double denom = 1.0 - r + tr;
  return (1.0 - r) * tr * poly_series_over_r(gamma, r) / denom;
}

double ts_weight_moment(double zi, double zj, double yi, double yj, double gamma) {
  require_nonneg(gamma, "gamma");
  const double p = bcm_link_prob(zi, zj);
  require_unit_interval(yi, "y_i");
  require_unit_interval(yj, "y_j");
  if (p == 0.0) return 0.0;
  const double r = yi * yj;
  return p * (1.0 - r) * poly_series_over_r(gamma, r);
}

void EnsembleModel::require_fitted() const {
  if (!fitted()) throw std::logic_error("ensemble model is not fitted");
}

double EnsembleModel::get(const std::vector<double>& m, int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= n_)
    throw std::out_of_range("node index out of range");
  return m[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(j)];
}

double& EnsembleModel::at(std::vector<double>& m, int i, int j) const {
  return m[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(j)];
}

double EnsembleModel::p(int i, int j) const {
  require_fitted();
  return get(p_, i, j);
}

double EnsembleModel::geometric_ratio(int i, int j) const {
  require_fitted();
  return get(r_, i, j);
}

double EnsembleModel::expected_w(int i, int j) const {
  require_fitted();
  return get(ew_, i, j);
}

double EnsembleModel::expected_w13(int i, int j) const {
  require_fitted();
  return get(ew13_, i, j);
}

void EnsembleModel::finalize() {
  const std::size_t size = static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  ew_.assign(size, 0.0);
  ew13_.assign(size, 0.0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      if (i == j) continue;
      const double p = get(p_, i, j);
      if (p == 0.0) continue;
      const double r = get(r_, i, j);
      at(ew_, i, j) = p / (1.0 - r);
      at(ew13_, i, j) = p * (1.0 - r) * poly_series_over_r(1.0 / 3.0, r);
    }
}

EnsembleModel EnsembleModel::from_fitness(const FitnessVectors& fitted) {
  fitted.validate();
  EnsembleModel m;
  m.kind_ = fitted.kind;
  m.n_ = fitted.n();
  const std::size_t size =
      static_cast<std::size_t>(m.n_) * static_cast<std::size_t>(m.n_);
  m.p_.assign(size, 0.0);
  m.r_.assign(size, 0.0);
  const bool ecm = fitted.kind == ModelKind::ecm;
  const bool has_y = !fitted.y.empty();
  for (int i = 0; i < m.n_; ++i)
    for (int j = i + 1; j < m.n_; ++j) {
      const std::size_t si = static_cast<std::size_t>(i);
      const std::size_t sj = static_cast<std::size_t>(j);
      const double r = has_y ? fitted.y[si] * fitted.y[sj] : 0.0;
      const double p = ecm ? ecm_pair(fitted.x[si], fitted.x[sj], fitted.y[si],
                                      fitted.y[sj]).p
                           : bcm_link_prob(fitted.z[si], fitted.z[sj]);
      m.at(m.p_, i, j) = m.at(m.p_, j, i) = p;
      m.at(m.r_, i, j) = m.at(m.r_, j, i) = r;
    }
  m.finalize();
  return m;
}

EnsembleModel EnsembleModel::from_gdp_ts(const MacroParams& params, const GdpVector& g) {
  // The closed forms equal the TS expressions with z = sqrt(a) g and
  // y = b g^c / (1 + b g^c) substituted.
  FitnessVectors fitted;
  fitted.kind = ModelKind::gdp_ts;
  const int n = g.n();
  fitted.z.resize(static_cast<std::size_t>(n));
  fitted.y.resize(static_cast<std::size_t>(n));
  const double sqrt_a = std::sqrt(params.a);
  for (int i = 0; i < n; ++i) {
    const double f = params.b * std::pow(g[i], params.c);
    fitted.z[static_cast<std::size_t>(i)] = sqrt_a * g[i];
    fitted.y[static_cast<std::size_t>(i)] = f / (1.0 + f);
  }
  return from_fitness(fitted);
}

EnsembleModel EnsembleModel::from_wcm(const GdpVector& g, double total_strength) {
  require_nonneg(total_strength, "T");
  EnsembleModel m;
  m.kind_ = ModelKind::wcm;
  m.n_ = g.n();
  const std::size_t size =
      static_cast<std::size_t>(m.n_) * static_cast<std::size_t>(m.n_);
  m.p_.assign(size, 0.0);
  m.r_.assign(size, 0.0);
  m.ew_.assign(size, 0.0);
  m.ew13_.assign(size, 0.0);
  for (int i = 0; i < m.n_; ++i)
    for (int j = 0; j < m.n_; ++j) {
      if (i == j) continue;
      const double w = wcm_gravity_weight(g[i], g[j], total_strength);
      m.at(m.p_, i, j) = 1.0;  // the continuous baseline predicts a complete graph
      m.at(m.ew_, i, j) = w;
      m.at(m.ew13_, i, j) = std::cbrt(w);
    }
  return m;
}

double EnsembleModel::expected_degree(int i) const {
  require_fitted();
  double sum = 0.0;
  for (int j = 0; j < n_; ++j) sum += get(p_, i, j);
  return sum;
}

double EnsembleModel::expected_strength(int i) const {
  require_fitted();
  double sum = 0.0;
  for (int j = 0; j < n_; ++j) sum += get(ew_, i, j);
  return sum;
}

double EnsembleModel::expected_links() const {
  require_fitted();
  double sum = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) sum += get(p_, i, j);
  return sum;
}

double EnsembleModel::expected_total_weight() const {
  require_fitted();
  double sum = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) sum += get(ew_, i, j);
  return sum;
}

std::optional<double> EnsembleModel::expected_annd(int i) const {
  const double ki = expected_degree(i);
  if (ki == 0.0) return std::nullopt;
  double num = 0.0;
  for (int j = 0; j < n_; ++j) num += get(p_, i, j) * expected_degree(j);
  return num / ki;
}

std::optional<double> EnsembleModel::expected_anns(int i) const {
  const double ki = expected_degree(i);
  if (ki == 0.0) return std::nullopt;
  double num = 0.0;
  for (int j = 0; j < n_; ++j) num += get(p_, i, j) * expected_strength(j);
  return num / ki;
}

std::optional<double> EnsembleModel::expected_clustering(int i) const {
  require_fitted();
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < n_; ++j) {
    if (j == i) continue;
    const double pij = get(p_, i, j);
    for (int k = 0; k < n_; ++k) {
      if (k == i || k == j) continue;
      den += pij * get(p_, k, i);
      num += pij * get(p_, j, k) * get(p_, k, i);
    }
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

std::optional<double> EnsembleModel::expected_wclustering(int i) const {
  require_fitted();
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < n_; ++j) {
    if (j == i) continue;
    const double pij = get(p_, i, j);
    const double mij = get(ew13_, i, j);
    for (int k = 0; k < n_; ++k) {
      if (k == i || k == j) continue;
      den += pij * get(p_, k, i);
      num += mij * get(ew13_, j, k) * get(ew13_, k, i);
    }
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

NodePropertyTable EnsembleModel::expected_table() const {
  require_fitted();
  NodePropertyTable table;
  table.rows.resize(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    PropertyRow& row = table.rows[static_cast<std::size_t>(i)];
    row.k = expected_degree(i);
    row.s = expected_strength(i);
    row.annd = expected_annd(i);
    row.clustering = expected_clustering(i);
    row.anns = expected_anns(i);
    row.wclustering = expected_wclustering(i);
  }
  return table;
}

PairProbComparison compare_probs(const FitnessVectors& ecm, const FitnessVectors& bcm) {
  if (ecm.kind != ModelKind::ecm || (bcm.kind != ModelKind::bcm && bcm.kind != ModelKind::ts))
    throw std::invalid_argument("compare_probs expects an ecm and a bcm fit");
  if (ecm.n() != bcm.n())
    throw std::invalid_argument("compare_probs: fitted vector sizes differ");
  const int n = ecm.n();
  PairProbComparison out;
  out.rows.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  double sum_sq = 0.0;
  double se = 0.0, sb = 0.0, see = 0.0, sbb = 0.0, seb = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const std::size_t si = static_cast<std::size_t>(i);
      const std::size_t sj = static_cast<std::size_t>(j);
      const double pe = ecm_pair(ecm.x[si], ecm.x[sj], ecm.y[si], ecm.y[sj]).p;
      const double pb = bcm_link_prob(bcm.z[si], bcm.z[sj]);
      out.rows.push_back({i, j, pe, pb});
      const double d = pe - pb;
      sum_sq += d * d;
      if (std::abs(d) > out.max_abs_deviation) out.max_abs_deviation = std::abs(d);
      se += pe;
      sb += pb;
      see += pe * pe;
      sbb += pb * pb;
      seb += pe * pb;
    }
  const double m = static_cast<double>(out.rows.size());
  if (m > 0.0) {
    out.rms_deviation = std::sqrt(sum_sq / m);
    const double cov = seb - se * sb / m;
    const double ve = see - se * se / m;
    const double vb = sbb - sb * sb / m;
    out.pearson = (ve > 0.0 && vb > 0.0) ? cov / std::sqrt(ve * vb) : 0.0;
  }
  return out;
}

}  // namespace netens
