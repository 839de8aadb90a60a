#include "netens/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace netens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kYMax = 1.0 - 1e-9;
constexpr double kFitnessCap = 1e150;
constexpr double kMinDamping = 1.0 / 1024.0;

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

double fermi(double product) {
  if (std::isinf(product)) return 1.0;
  return product / (1.0 + product);
}

// Halve the mixing factor once the residual grows on two consecutive sweeps,
// and flag a stall when a long window brings no meaningful improvement
// (infeasible targets otherwise burn the whole iteration budget).
class DampingController {
 public:
  explicit DampingController(double damping) : damping_(damping) {}
  double factor() const { return damping_; }
  bool stalled() const { return since_improvement_ > 2000; }
  void observe(double residual) {
    if (residual > prev_ * (1.0 + 1e-12)) {
      if (++worse_ >= 2) {
        damping_ = std::max(damping_ * 0.5, kMinDamping);
        worse_ = 0;
      }
    } else {
      worse_ = 0;
    }
    prev_ = residual;
    if (residual < best_ * (1.0 - 1e-4)) {
      best_ = residual;
      since_improvement_ = 0;
    } else {
      ++since_improvement_;
    }
  }

 private:
  double damping_;
  double prev_ = kInf;
  double best_ = kInf;
  int worse_ = 0;
  int since_improvement_ = 0;
};

struct ActiveSet {
  std::vector<int> nodes;     // original indices with k_i > 0
  std::vector<double> k;      // their degree targets
  std::vector<double> s;      // their strength targets (if any)
  int m() const { return static_cast<int>(nodes.size()); }
};

void validate_targets(const FitTargets& t, bool need_strengths) {
  const int n = t.n();
  for (int i = 0; i < n; ++i) {
    const double k = t.degrees[static_cast<std::size_t>(i)];
    if (!std::isfinite(k) || k < 0.0)
      throw std::invalid_argument("degree target at node " + std::to_string(i) +
                                  " must be finite and nonnegative");
    if (k > static_cast<double>(n - 1) + 1e-9)
      throw std::invalid_argument("degree target at node " + std::to_string(i) +
                                  " exceeds N-1");
  }
  if (!need_strengths) return;
  if (static_cast<int>(t.strengths.size()) != n)
    throw std::invalid_argument("strength targets missing or of wrong size");
  for (int i = 0; i < n; ++i) {
    const double k = t.degrees[static_cast<std::size_t>(i)];
    const double s = t.strengths[static_cast<std::size_t>(i)];
    if (!std::isfinite(s) || s < 0.0)
      throw std::invalid_argument("strength target at node " + std::to_string(i) +
                                  " must be finite and nonnegative");
    if (s < k - 1e-9 * std::max(1.0, k))
      throw std::invalid_argument("infeasible constraints: s < k at node " +
                                  std::to_string(i));
    if ((s == 0.0) != (k == 0.0))
      throw std::invalid_argument("infeasible constraints: s=0 iff k=0 violated at node " +
                                  std::to_string(i));
  }
}

ActiveSet active_set(const FitTargets& t, bool with_strengths) {
  ActiveSet a;
  for (int i = 0; i < t.n(); ++i) {
    if (t.degrees[static_cast<std::size_t>(i)] > 0.0) {
      a.nodes.push_back(i);
      a.k.push_back(t.degrees[static_cast<std::size_t>(i)]);
      if (with_strengths) a.s.push_back(t.strengths[static_cast<std::size_t>(i)]);
    }
  }
  return a;
}

std::vector<double> seed_or_init(const std::vector<double>& init, const ActiveSet& a,
                                 const std::vector<double>& fallback) {
  if (init.empty()) return fallback;
  std::vector<double> out(static_cast<std::size_t>(a.m()));
  for (int i = 0; i < a.m(); ++i)
    out[static_cast<std::size_t>(i)] =
        init[static_cast<std::size_t>(a.nodes[static_cast<std::size_t>(i)])];
  return out;
}

// ---- BCM ----------------------------------------------------------------

double bcm_residual(const std::vector<double>& z, const std::vector<double>& k) {
  const int m = static_cast<int>(z.size());
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    double ek = 0.0;
    for (int j = 0; j < m; ++j)
      if (j != i) ek += fermi(z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(j)]);
    if (!std::isfinite(ek)) return kInf;
    worst = std::max(worst, std::abs(ek - k[static_cast<std::size_t>(i)]) /
                                k[static_cast<std::size_t>(i)]);
  }
  return worst;
}

void bcm_fixed_point(std::vector<double>& z, const std::vector<double>& k,
                     const SolverConfig& cfg, SolveReport& report) {
  const int m = static_cast<int>(z.size());
  DampingController damping(cfg.damping);
  double residual = bcm_residual(z, k);
  int iter = 0;
  while (residual > cfg.tol && iter < cfg.max_iter) {
    const double mix = damping.factor();
    for (int i = 0; i < m; ++i) {
      double denom = 0.0;
      for (int j = 0; j < m; ++j)
        if (j != i)
          denom += z[static_cast<std::size_t>(j)] /
                   (1.0 + z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(j)]);
      if (denom <= 0.0) continue;
      const double updated = k[static_cast<std::size_t>(i)] / denom;
      double& zi = z[static_cast<std::size_t>(i)];
      zi = std::min(mix * updated + (1.0 - mix) * zi, kFitnessCap);
    }
    ++iter;
    residual = bcm_residual(z, k);
    damping.observe(residual);
    if (damping.stalled()) break;
  }
  report.iterations += iter;
  report.residual = residual;
  report.converged = residual <= cfg.tol;
}

void bcm_newton(std::vector<double>& z, const std::vector<double>& k,
                const SolverConfig& cfg, SolveReport& report) {
  const int m = static_cast<int>(z.size());
  Eigen::VectorXd u(m);
  for (int i = 0; i < m; ++i) u[i] = std::log(z[static_cast<std::size_t>(i)]);
  auto to_z = [&](const Eigen::VectorXd& v) {
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      out[static_cast<std::size_t>(i)] = std::exp(std::clamp(v[i], -300.0, 300.0));
    return out;
  };
  double residual = bcm_residual(to_z(u), k);
  int iter = 0;
  while (residual > cfg.tol && iter < cfg.max_iter) {
    const std::vector<double> zc = to_z(u);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        const double p = fermi(zc[static_cast<std::size_t>(i)] * zc[static_cast<std::size_t>(j)]);
        f[i] += p;
        const double d = p * (1.0 - p);
        jac(i, j) += d;
        jac(i, i) += d;
      }
      f[i] -= k[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd step = jac.ldlt().solve(-f);
    for (int i = 0; i < m; ++i) step[i] = std::clamp(step[i], -10.0, 10.0);
    double scale = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      const Eigen::VectorXd trial = u + scale * step;
      const double trial_res = bcm_residual(to_z(trial), k);
      if (trial_res < residual * (1.0 - 1e-12) || trial_res <= cfg.tol) {
        u = trial;
        residual = trial_res;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    ++iter;
    if (!accepted) break;  // stalled; report whatever residual we reached
  }
  z = to_z(u);
  report.iterations += iter;
  report.residual = residual;
  report.converged = residual <= cfg.tol;
}

double bcm_loglik_targets(const ActiveSet& a, const std::vector<double>& z) {
  double ll = 0.0;
  for (int i = 0; i < a.m(); ++i)
    ll += xlogy(a.k[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(i)]);
  for (int i = 0; i < a.m(); ++i)
    for (int j = i + 1; j < a.m(); ++j)
      ll -= std::log1p(z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(j)]);
  return ll;
}

// ---- ECM ----------------------------------------------------------------

// Internally the ECM iterates on (u, y) with u_i = x_i y_i. The likelihood
// equations keep the same fixed points, but (u, y) stays regular on the
// unit-weight boundary where y -> 0 with x y finite, which (x, y) iterations
// approach only at rate O(y^2).
struct EcmState {
  std::vector<double> u;
  std::vector<double> y;
};

constexpr double kYFloor = 1e-14;  // active-node floor; keeps x = u/y finite

// When every neighbor product y_i y_j vanishes, the strength equation of
// node i is insensitive to y_i and the iterate is arbitrary; pin such nodes
// to the floor so outputs are reproducible.
void ecm_normalize_unidentified(EcmState& st, const ActiveSet& a, double tol) {
  const int m = a.m();
  for (int i = 0; i < m; ++i) {
    const double ui = st.u[static_cast<std::size_t>(i)];
    const double yi = st.y[static_cast<std::size_t>(i)];
    double denom = 0.0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const double yj = st.y[static_cast<std::size_t>(j)];
      const double r = yi * yj;
      const double t = ui * st.u[static_cast<std::size_t>(j)];
      denom += (t / (1.0 - r + t)) * yj / (1.0 - r);
    }
    if (denom < 1e-3 * tol * a.s[static_cast<std::size_t>(i)])
      st.y[static_cast<std::size_t>(i)] = kYFloor;
  }
}

double ecm_residual(const EcmState& st, const ActiveSet& a) {
  const int m = a.m();
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    double ek = 0.0, es = 0.0;
    const double ui = st.u[static_cast<std::size_t>(i)];
    const double yi = st.y[static_cast<std::size_t>(i)];
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const double r = yi * st.y[static_cast<std::size_t>(j)];
      const double t = ui * st.u[static_cast<std::size_t>(j)];
      const double p = std::isinf(t) ? 1.0 : t / (1.0 - r + t);
      ek += p;
      es += p / (1.0 - r);
    }
    if (!std::isfinite(ek) || !std::isfinite(es)) return kInf;
    worst = std::max(worst, std::abs(ek - a.k[static_cast<std::size_t>(i)]) /
                                a.k[static_cast<std::size_t>(i)]);
    worst = std::max(worst, std::abs(es - a.s[static_cast<std::size_t>(i)]) /
                                a.s[static_cast<std::size_t>(i)]);
  }
  return worst;
}

// Solves the strictly increasing scalar equation f(v) = 0 on [lo, hi] by
// bisection with Newton acceleration. f(lo) <= 0 <= f(hi) must hold.
template <typename F, typename DF>
double solve_increasing(double lo, double hi, double guess, F f, DF df) {
  double v = std::clamp(guess, lo, hi);
  double fv = f(v);
  for (int it = 0; it < 80; ++it) {
    if (fv <= 0.0)
      lo = v;
    else
      hi = v;
    if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
    const double dfv = df(v);
    double next = dfv > 0.0 ? v - fv / dfv : lo;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    v = next;
    fv = f(v);
    if (std::abs(fv) < 1e-15) break;
  }
  return v;
}

// Coordinate sweeps move heavy-dyad partners one at a time and can crawl
// when a pair needs y_i y_j near 1. A global map y -> y^theta rescales all
// free y together; theta solves the aggregate strength equation, which is
// strictly decreasing in theta.
template <typename TotalStrength>
void global_y_exponent_step(std::vector<double>& y, const std::vector<bool>& adjustable,
                            double target_total, TotalStrength total) {
  const double at_one = total(y);
  if (!(std::abs(at_one - target_total) > 1e-13 * std::max(1.0, target_total))) return;
  auto powered = [&](double theta) {
    std::vector<double> out = y;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (adjustable[i] && y[i] > 0.0) out[i] = std::pow(y[i], theta);
    return out;
  };
  double lo = 1.0, hi = 1.0;  // f(theta) = total - target decreases in theta
  if (at_one < target_total) {
    for (int it = 0; it < 40 && total(powered(lo * 0.5)) < target_total; ++it) lo *= 0.5;
    lo *= 0.5;
  } else {
    for (int it = 0; it < 40 && total(powered(hi * 2.0)) > target_total; ++it) hi *= 2.0;
    hi *= 2.0;
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (total(powered(mid)) > target_total)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-12 * hi) break;
  }
  y = powered(0.5 * (lo + hi));
}

// Each sweep solves node i's own constraint equation exactly, holding the
// other coordinates fixed: cyclic coordinate ascent of the concave
// likelihood. The per-node maps k_i(u_i) and s_i(y_i) are strictly
// increasing, so a bracketed scalar solve is safe at any starting point.
void ecm_fixed_point(EcmState& st, const ActiveSet& a, const SolverConfig& cfg,
                     SolveReport& report) {
  const int m = a.m();
  DampingController damping(cfg.damping);
  double residual = ecm_residual(st, a);
  int iter = 0;
  while (residual > cfg.tol && iter < cfg.max_iter) {
    const double mix = damping.factor();
    for (int i = 0; i < m; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      const double yi = st.y[si];
      auto expected_k = [&](double ui) {
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
          if (j == i) continue;
          const double t = ui * st.u[static_cast<std::size_t>(j)];
          sum += t / (1.0 - yi * st.y[static_cast<std::size_t>(j)] + t);
        }
        return sum - a.k[si];
      };
      auto slope_k = [&](double ui) {
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
          if (j == i) continue;
          const double uj = st.u[static_cast<std::size_t>(j)];
          const double r = yi * st.y[static_cast<std::size_t>(j)];
          const double d = 1.0 - r + ui * uj;
          sum += uj * (1.0 - r) / (d * d);
        }
        return sum;
      };
      double hi = std::max(st.u[si], 1.0);
      while (expected_k(hi) < 0.0 && hi < kFitnessCap) hi *= 4.0;
      const double solved = expected_k(hi) < 0.0
                                ? hi
                                : solve_increasing(0.0, hi, st.u[si], expected_k, slope_k);
      st.u[si] = mix * solved + (1.0 - mix) * st.u[si];
    }
    for (int i = 0; i < m; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      const double ui = st.u[si];
      auto expected_s = [&](double yi) {
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
          if (j == i) continue;
          const double r = yi * st.y[static_cast<std::size_t>(j)];
          const double t = ui * st.u[static_cast<std::size_t>(j)];
          sum += t / ((1.0 - r + t) * (1.0 - r));
        }
        return sum - a.s[si];
      };
      auto slope_s = [&](double yi) {
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
          if (j == i) continue;
          const double yj = st.y[static_cast<std::size_t>(j)];
          const double r = yi * yj;
          const double t = ui * st.u[static_cast<std::size_t>(j)];
          const double d = 1.0 - r + t;
          sum += yj * t * (1.0 - r + d) / (d * d * (1.0 - r) * (1.0 - r));
        }
        return sum;
      };
      double solved;
      if (expected_s(kYFloor) >= 0.0)
        solved = kYFloor;  // strength met (or overshot) already at the boundary
      else if (expected_s(kYMax) <= 0.0)
        solved = kYMax;
      else
        solved = solve_increasing(kYFloor, kYMax, st.y[si], expected_s, slope_s);
      st.y[si] = std::clamp(mix * solved + (1.0 - mix) * st.y[si], kYFloor, kYMax);
    }
    {
      double target_total = 0.0;
      for (int i = 0; i < m; ++i) target_total += a.s[static_cast<std::size_t>(i)];
      const std::vector<bool> adjustable(static_cast<std::size_t>(m), true);
      auto total = [&](const std::vector<double>& ys) {
        double sum = 0.0;
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            const double r = ys[static_cast<std::size_t>(i)] * ys[static_cast<std::size_t>(j)];
            const double t = st.u[static_cast<std::size_t>(i)] * st.u[static_cast<std::size_t>(j)];
            sum += t / ((1.0 - r + t) * (1.0 - r));
          }
        return sum;
      };
      global_y_exponent_step(st.y, adjustable, target_total, total);
    }
    ++iter;
    residual = ecm_residual(st, a);
    damping.observe(residual);
    if (damping.stalled()) break;
  }
  report.iterations += iter;
  report.residual = residual;
  report.converged = residual <= cfg.tol;
}

void ecm_newton(EcmState& st, const ActiveSet& a, const SolverConfig& cfg,
                SolveReport& report) {
  const int m = a.m();
  Eigen::VectorXd vars(2 * m);  // [log u, logit y]
  for (int i = 0; i < m; ++i) {
    vars[i] = std::log(st.u[static_cast<std::size_t>(i)]);
    const double y = std::clamp(st.y[static_cast<std::size_t>(i)], 1e-15, kYMax);
    vars[m + i] = std::log(y / (1.0 - y));
  }
  auto unpack = [&](const Eigen::VectorXd& v) {
    EcmState out;
    out.u.resize(static_cast<std::size_t>(m));
    out.y.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      out.u[static_cast<std::size_t>(i)] = std::exp(std::clamp(v[i], -300.0, 300.0));
      const double w = std::clamp(v[m + i], -45.0, 45.0);
      out.y[static_cast<std::size_t>(i)] = std::min(1.0 / (1.0 + std::exp(-w)), kYMax);
    }
    return out;
  };
  double residual = ecm_residual(unpack(vars), a);
  int iter = 0;
  while (residual > cfg.tol && iter < cfg.max_iter) {
    const EcmState cur = unpack(vars);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * m);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    for (int i = 0; i < m; ++i) {
      const double ui = cur.u[static_cast<std::size_t>(i)];
      const double yi = cur.y[static_cast<std::size_t>(i)];
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        const double uj = cur.u[static_cast<std::size_t>(j)];
        const double yj = cur.y[static_cast<std::size_t>(j)];
        const double t = ui * uj;
        const double r = yi * yj;
        const double d = 1.0 - r + t;
        const double p = t / d;
        const double w = p / (1.0 - r);
        f[i] += p;
        f[m + i] += w;
        const double dp_dt = (1.0 - r) / (d * d);
        const double dp_dr = t / (d * d);
        const double dw_dt = 1.0 / (d * d);
        const double dw_dr = t * (1.0 - r + d) / (d * d * (1.0 - r) * (1.0 - r));
        const double du = dp_dt * t;  // d p / d log u_j (= d log u_i)
        jac(i, j) += du;
        jac(i, i) += du;
        jac(i, m + j) += dp_dr * r * (1.0 - yj);
        jac(i, m + i) += dp_dr * r * (1.0 - yi);
        const double su = dw_dt * t;
        jac(m + i, j) += su;
        jac(m + i, i) += su;
        jac(m + i, m + j) += dw_dr * r * (1.0 - yj);
        jac(m + i, m + i) += dw_dr * r * (1.0 - yi);
      }
      f[i] -= a.k[static_cast<std::size_t>(i)];
      f[m + i] -= a.s[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd step = jac.partialPivLu().solve(-f);
    for (int i = 0; i < 2 * m; ++i) step[i] = std::clamp(step[i], -10.0, 10.0);
    double scale = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      const Eigen::VectorXd trial = vars + scale * step;
      const double trial_res = ecm_residual(unpack(trial), a);
      if (trial_res < residual * (1.0 - 1e-12) || trial_res <= cfg.tol) {
        vars = trial;
        residual = trial_res;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    ++iter;
    if (!accepted) break;
  }
  st = unpack(vars);
  report.iterations += iter;
  report.residual = residual;
  report.converged = residual <= cfg.tol;
}

double ecm_loglik_targets(const ActiveSet& a, const std::vector<double>& x,
                          const std::vector<double>& y) {
  double ll = 0.0;
  for (int i = 0; i < a.m(); ++i) {
    ll += xlogy(a.k[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(i)]);
    ll += xlogy(a.s[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < a.m(); ++i)
    for (int j = i + 1; j < a.m(); ++j) {
      const double r = y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
      const double d =
          1.0 - r + x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)] * r;
      ll += std::log(1.0 - r) - std::log(d);
    }
  return ll;
}

// ---- TS step 2 ----------------------------------------------------------

double ts_strength_residual(const std::vector<double>& y, const ActiveSet& a,
                            const std::vector<std::vector<double>>& p) {
  const int m = a.m();
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    double es = 0.0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      es += p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] /
            (1.0 - y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)]);
    }
    if (!std::isfinite(es)) return kInf;
    worst = std::max(worst, std::abs(es - a.s[static_cast<std::size_t>(i)]) /
                                a.s[static_cast<std::size_t>(i)]);
  }
  return worst;
}

void ts_fixed_point(std::vector<double>& y, const ActiveSet& a,
                    const std::vector<std::vector<double>>& p,
                    const std::vector<bool>& free_y, const SolverConfig& cfg,
                    SolveReport& report) {
  const int m = a.m();
  DampingController damping(cfg.damping);
  double residual = ts_strength_residual(y, a, p);
  int iter = 0;
  while (residual > cfg.tol && iter < cfg.max_iter) {
    const double mix = damping.factor();
    for (int i = 0; i < m; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      if (!free_y[si]) continue;
      auto expected_s = [&](double yi) {
        double sum = 0.0;
        for (int j = 0; j < m; ++j)
          if (j != i)
            sum += p[si][static_cast<std::size_t>(j)] /
                   (1.0 - yi * y[static_cast<std::size_t>(j)]);
        return sum - a.s[si];
      };
      auto slope_s = [&](double yi) {
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
          if (j == i) continue;
          const double yj = y[static_cast<std::size_t>(j)];
          const double om = 1.0 - yi * yj;
          sum += p[si][static_cast<std::size_t>(j)] * yj / (om * om);
        }
        return sum;
      };
      double solved;
      if (expected_s(0.0) >= 0.0)
        solved = 0.0;
      else if (expected_s(kYMax) <= 0.0)
        solved = kYMax;
      else
        solved = solve_increasing(0.0, kYMax, y[si], expected_s, slope_s);
      y[si] = std::clamp(mix * solved + (1.0 - mix) * y[si], 0.0, kYMax);
    }
    {
      double target_total = 0.0;
      for (int i = 0; i < m; ++i) target_total += a.s[static_cast<std::size_t>(i)];
      auto total = [&](const std::vector<double>& ys) {
        double sum = 0.0;
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            if (j != i)
              sum += p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] /
                     (1.0 - ys[static_cast<std::size_t>(i)] * ys[static_cast<std::size_t>(j)]);
        return sum;
      };
      global_y_exponent_step(y, free_y, target_total, total);
    }
    ++iter;
    residual = ts_strength_residual(y, a, p);
    damping.observe(residual);
    if (damping.stalled()) break;
  }
  report.iterations += iter;
  report.residual = std::max(report.residual, residual);
  report.converged = report.converged && residual <= cfg.tol;
}

void ts_newton(std::vector<double>& y, const ActiveSet& a,
               const std::vector<std::vector<double>>& p, const std::vector<bool>& free_y,
               const SolverConfig& cfg, SolveReport& report) {
  const int m = a.m();
  std::vector<int> vars_idx;
  for (int i = 0; i < m; ++i)
    if (free_y[static_cast<std::size_t>(i)]) vars_idx.push_back(i);
  const int mv = static_cast<int>(vars_idx.size());
  if (mv == 0) {
    const double residual = ts_strength_residual(y, a, p);
    report.residual = std::max(report.residual, residual);
    report.converged = report.converged && residual <= cfg.tol;
    return;
  }
  Eigen::VectorXd vars(mv);
  for (int v = 0; v < mv; ++v) {
    const double yi =
        std::clamp(y[static_cast<std::size_t>(vars_idx[static_cast<std::size_t>(v)])],
                   1e-15, kYMax);
    vars[v] = std::log(yi / (1.0 - yi));
  }
  auto unpack = [&](const Eigen::VectorXd& v) {
    std::vector<double> out = y;
    for (int q = 0; q < mv; ++q) {
      const double w = std::clamp(v[q], -45.0, 45.0);
      out[static_cast<std::size_t>(vars_idx[static_cast<std::size_t>(q)])] =
          std::min(1.0 / (1.0 + std::exp(-w)), kYMax);
    }
    return out;
  };
  double residual = ts_strength_residual(unpack(vars), a, p);
  int iter = 0;
  while (residual > cfg.tol && iter < cfg.max_iter) {
    const std::vector<double> yc = unpack(vars);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(mv);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(mv, mv);
    std::vector<int> pos(static_cast<std::size_t>(m), -1);
    for (int q = 0; q < mv; ++q) pos[static_cast<std::size_t>(vars_idx[static_cast<std::size_t>(q)])] = q;
    for (int q = 0; q < mv; ++q) {
      const int i = vars_idx[static_cast<std::size_t>(q)];
      const double yi = yc[static_cast<std::size_t>(i)];
      double es = 0.0;
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        const double yj = yc[static_cast<std::size_t>(j)];
        const double pij = p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        const double om = 1.0 - yi * yj;
        es += pij / om;
        const double base = pij / (om * om);
        jac(q, q) += base * yj * yi * (1.0 - yi);
        if (pos[static_cast<std::size_t>(j)] >= 0)
          jac(q, pos[static_cast<std::size_t>(j)]) += base * yi * yj * (1.0 - yj);
      }
      f[q] = es - a.s[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd step = jac.partialPivLu().solve(-f);
    for (int q = 0; q < mv; ++q) step[q] = std::clamp(step[q], -10.0, 10.0);
    double scale = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      const Eigen::VectorXd trial = vars + scale * step;
      const double trial_res = ts_strength_residual(unpack(trial), a, p);
      if (trial_res < residual * (1.0 - 1e-12) || trial_res <= cfg.tol) {
        vars = trial;
        residual = trial_res;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    ++iter;
    if (!accepted) break;
  }
  y = unpack(vars);
  report.iterations += iter;
  report.residual = std::max(report.residual, residual);
  report.converged = report.converged && residual <= cfg.tol;
}

double ts_loglik_targets(const ActiveSet& a, const std::vector<double>& z,
                         const std::vector<double>& y) {
  // Degree and strength terms are exact sufficient statistics; the per-link
  // stop-probability term uses the expected adjacency p_ij.
  double ll = 0.0;
  for (int i = 0; i < a.m(); ++i) {
    ll += xlogy(a.k[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(i)]);
    ll += xlogy(std::max(a.s[static_cast<std::size_t>(i)] - a.k[static_cast<std::size_t>(i)], 0.0),
                y[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < a.m(); ++i)
    for (int j = i + 1; j < a.m(); ++j) {
      const double zz = z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(j)];
      const double p = fermi(zz);
      ll += p * std::log(1.0 - y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)]);
      ll -= std::log1p(zz);
    }
  return ll;
}

std::vector<double> scatter(const ActiveSet& a, const std::vector<double>& compact, int n) {
  std::vector<double> full(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < a.m(); ++i)
    full[static_cast<std::size_t>(a.nodes[static_cast<std::size_t>(i)])] =
        compact[static_cast<std::size_t>(i)];
  return full;
}

std::vector<double> compactify(const std::vector<double>& full, const ActiveSet& a) {
  std::vector<double> out(static_cast<std::size_t>(a.m()));
  for (int i = 0; i < a.m(); ++i)
    out[static_cast<std::size_t>(i)] =
        full[static_cast<std::size_t>(a.nodes[static_cast<std::size_t>(i)])];
  return out;
}

}  // namespace

FitTargets::FitTargets(const ConstraintSet& c) {
  degrees.assign(c.degrees.begin(), c.degrees.end());
  strengths.assign(c.strengths.begin(), c.strengths.end());
}

std::pair<FitnessVectors, SolveReport> solve_bcm(const FitTargets& targets,
                                                 const SolverConfig& cfg) {
  validate_targets(targets, false);
  const int n = targets.n();
  const ActiveSet a = active_set(targets, false);
  FitnessVectors fitted;
  fitted.kind = ModelKind::bcm;
  SolveReport report;

  if (a.m() == 0) {
    fitted.z.assign(static_cast<std::size_t>(n), 0.0);
    report.converged = true;
    return {fitted, report};
  }

  bool saturated = n > 1;
  for (double k : targets.degrees)
    if (k != static_cast<double>(n - 1)) saturated = false;

  double total = 0.0;
  for (double k : a.k) total += k;
  std::vector<double> z(static_cast<std::size_t>(a.m()));
  for (int i = 0; i < a.m(); ++i)
    z[static_cast<std::size_t>(i)] =
        a.k[static_cast<std::size_t>(i)] / std::sqrt(total + 1.0);  // 2L + 1
  z = seed_or_init(cfg.init_z, a, z);

  if (saturated) {
    report.converged = false;
    report.residual = bcm_residual(z, a.k);
    report.message = "boundary divergence: every degree equals N-1, z has no finite solution";
  } else {
    if (cfg.mode == SolveMode::fixed_point)
      bcm_fixed_point(z, a.k, cfg, report);
    else
      bcm_newton(z, a.k, cfg, report);
    if (!report.converged)
      report.message = "did not converge: max relative residual " +
                       std::to_string(report.residual) + " after " +
                       std::to_string(report.iterations) + " iterations";
  }
  report.log_likelihood = bcm_loglik_targets(a, z);
  fitted.z = scatter(a, z, n);
  return {fitted, report};
}

std::pair<FitnessVectors, SolveReport> solve_ecm(const FitTargets& targets,
                                                 const SolverConfig& cfg) {
  validate_targets(targets, true);
  const int n = targets.n();
  const ActiveSet a = active_set(targets, true);
  FitnessVectors fitted;
  fitted.kind = ModelKind::ecm;
  SolveReport report;

  if (a.m() == 0) {
    fitted.x.assign(static_cast<std::size_t>(n), 0.0);
    fitted.y.assign(static_cast<std::size_t>(n), 0.0);
    report.converged = true;
    return {fitted, report};
  }

  double total = 0.0;
  for (double k : a.k) total += k;
  EcmState st;
  st.u.resize(static_cast<std::size_t>(a.m()));
  st.y.resize(static_cast<std::size_t>(a.m()));
  for (int i = 0; i < a.m(); ++i) {
    st.u[static_cast<std::size_t>(i)] =
        a.k[static_cast<std::size_t>(i)] / std::sqrt(total + 1.0);
    st.y[static_cast<std::size_t>(i)] =
        std::clamp(a.s[static_cast<std::size_t>(i)] /
                       (a.s[static_cast<std::size_t>(i)] + a.k[static_cast<std::size_t>(i)] + 1.0),
                   kYFloor, kYMax);
  }
  if (!cfg.init_x.empty() && !cfg.init_y.empty()) {
    const std::vector<double> ix = seed_or_init(cfg.init_x, a, {});
    const std::vector<double> iy = seed_or_init(cfg.init_y, a, {});
    for (int i = 0; i < a.m(); ++i) {
      st.y[static_cast<std::size_t>(i)] =
          std::clamp(iy[static_cast<std::size_t>(i)], kYFloor, kYMax);
      st.u[static_cast<std::size_t>(i)] =
          std::max(ix[static_cast<std::size_t>(i)] * st.y[static_cast<std::size_t>(i)], 1e-300);
    }
  }

  if (cfg.mode == SolveMode::fixed_point) {
    ecm_fixed_point(st, a, cfg, report);
  } else {
    SolverConfig warm = cfg;  // a few sweeps stabilize the Newton start
    warm.max_iter = std::min(cfg.max_iter, 30);
    ecm_fixed_point(st, a, warm, report);
    if (!report.converged) ecm_newton(st, a, cfg, report);
  }
  ecm_normalize_unidentified(st, a, cfg.tol);
  for (double& y : st.y) y = std::max(y, kYFloor);
  report.residual = ecm_residual(st, a);
  report.converged = report.residual <= cfg.tol;
  if (!report.converged)
    report.message = "did not converge: max relative residual " +
                     std::to_string(report.residual) + " after " +
                     std::to_string(report.iterations) + " iterations";

  // Report x = u/y; flooring y keeps x finite and moves <s> by O(1e-14 * s).
  std::vector<double> xs(static_cast<std::size_t>(a.m()));
  std::vector<double> ys(static_cast<std::size_t>(a.m()));
  for (int i = 0; i < a.m(); ++i) {
    ys[static_cast<std::size_t>(i)] = std::max(st.y[static_cast<std::size_t>(i)], kYFloor);
    xs[static_cast<std::size_t>(i)] =
        st.u[static_cast<std::size_t>(i)] / ys[static_cast<std::size_t>(i)];
  }
  report.log_likelihood = ecm_loglik_targets(a, xs, ys);
  fitted.x = scatter(a, xs, n);
  fitted.y = scatter(a, ys, n);
  return {fitted, report};
}

std::pair<FitnessVectors, SolveReport> solve_ts(const FitTargets& targets,
                                                const SolverConfig& cfg) {
  validate_targets(targets, true);
  const int n = targets.n();
  auto [bcm, report] = solve_bcm(targets, cfg);
  FitnessVectors fitted;
  fitted.kind = ModelKind::ts;
  fitted.z = bcm.z;
  fitted.y.assign(static_cast<std::size_t>(n), 0.0);
  if (!report.converged) {
    report.message = "degree step failed; " + report.message;
    return {fitted, report};
  }

  const ActiveSet a = active_set(targets, true);
  if (a.m() == 0) return {fitted, report};

  // Frozen connection probabilities and their row sums.
  std::vector<std::vector<double>> p(static_cast<std::size_t>(a.m()),
                                     std::vector<double>(static_cast<std::size_t>(a.m()), 0.0));
  std::vector<double> ek(static_cast<std::size_t>(a.m()), 0.0);
  for (int i = 0; i < a.m(); ++i)
    for (int j = 0; j < a.m(); ++j) {
      if (j == i) continue;
      const double zi = fitted.z[static_cast<std::size_t>(a.nodes[static_cast<std::size_t>(i)])];
      const double zj = fitted.z[static_cast<std::size_t>(a.nodes[static_cast<std::size_t>(j)])];
      p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = fermi(zi * zj);
      ek[static_cast<std::size_t>(i)] += p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }

  // A strength target below the frozen expected degree cannot be reached
  // because 1/(1-yy) >= 1; surface the node rather than iterate in vain.
  std::vector<bool> free_y(static_cast<std::size_t>(a.m()), false);
  for (int i = 0; i < a.m(); ++i) {
    const double gap = a.s[static_cast<std::size_t>(i)] - ek[static_cast<std::size_t>(i)];
    if (gap < -1e-6 * std::max(1.0, a.s[static_cast<std::size_t>(i)])) {
      report.converged = false;
      report.message = "strength step infeasible at node " +
                       std::to_string(a.nodes[static_cast<std::size_t>(i)]) +
                       ": s below the expected degree";
      report.log_likelihood = ts_loglik_targets(a, compactify(fitted.z, a), compactify(fitted.y, a));
      return {fitted, report};
    }
    free_y[static_cast<std::size_t>(i)] = gap > 0.0;
  }

  std::vector<double> y(static_cast<std::size_t>(a.m()), 0.0);
  for (int i = 0; i < a.m(); ++i)
    if (free_y[static_cast<std::size_t>(i)])
      y[static_cast<std::size_t>(i)] =
          std::clamp(a.s[static_cast<std::size_t>(i)] /
                         (a.s[static_cast<std::size_t>(i)] + a.k[static_cast<std::size_t>(i)] + 1.0),
                     0.0, kYMax);
  if (!cfg.init_y.empty()) y = seed_or_init(cfg.init_y, a, y);

  if (cfg.mode == SolveMode::fixed_point) {
    ts_fixed_point(y, a, p, free_y, cfg, report);
  } else {
    SolverConfig warm = cfg;
    warm.max_iter = std::min(cfg.max_iter, 30);
    const bool degree_ok = report.converged;
    ts_fixed_point(y, a, p, free_y, warm, report);
    if (!report.converged) {
      report.converged = degree_ok;  // newton re-evaluates the strength side
      ts_newton(y, a, p, free_y, cfg, report);
    }
  }

  // Nodes whose strength equation is insensitive to y_i (all neighbor
  // products vanish) keep an arbitrary iterate; pin them to the y -> 0 limit.
  for (int i = 0; i < a.m(); ++i) {
    double denom = 0.0;
    for (int j = 0; j < a.m(); ++j)
      if (j != i)
        denom += p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                 y[static_cast<std::size_t>(j)] /
                 (1.0 - y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)]);
    if (denom < 1e-3 * cfg.tol * a.s[static_cast<std::size_t>(i)])
      y[static_cast<std::size_t>(i)] = 0.0;
  }
  {
    const double residual = std::max(bcm_residual(compactify(fitted.z, a), a.k),
                                     ts_strength_residual(y, a, p));
    report.residual = residual;
    report.converged = residual <= cfg.tol;
  }
  if (!report.converged && report.message.empty())
    report.message = "did not converge: max relative residual " +
                     std::to_string(report.residual) + " after " +
                     std::to_string(report.iterations) + " iterations";
  report.log_likelihood = ts_loglik_targets(a, compactify(fitted.z, a), y);
  fitted.y = scatter(a, y, n);
  return {fitted, report};
}

double log_likelihood(const FitnessVectors& fitted, const WeightedGraph& g,
                      std::pair<int, int>* offending_pair) {
  fitted.validate();
  if (fitted.n() != g.n())
    throw std::invalid_argument("fitted vectors and graph dimensions differ");
  const int n = g.n();
  double ll = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const std::size_t si = static_cast<std::size_t>(i);
      const std::size_t sj = static_cast<std::size_t>(j);
      const double w = static_cast<double>(g.weight(i, j));
      double pair_ll = 0.0;
      switch (fitted.kind) {
        case ModelKind::bcm: {
          const double zz = fitted.z[si] * fitted.z[sj];
          if (w > 0.0) {
            if (zz == 0.0) {
              if (offending_pair) *offending_pair = {i, j};
              return -kInf;
            }
            pair_ll = std::log(zz) - std::log1p(zz);
          } else {
            pair_ll = -std::log1p(zz);
          }
          break;
        }
        case ModelKind::ecm: {
          const double r = fitted.y[si] * fitted.y[sj];
          const double xx = fitted.x[si] * fitted.x[sj];
          const double d = 1.0 - r + xx * r;
          if (w > 0.0) {
            if (xx == 0.0 || r == 0.0) {
              if (offending_pair) *offending_pair = {i, j};
              return -kInf;
            }
            pair_ll = std::log(xx) + w * std::log(r) + std::log(1.0 - r) - std::log(d);
          } else {
            pair_ll = std::log(1.0 - r) - std::log(d);
          }
          break;
        }
        case ModelKind::ts:
        case ModelKind::gdp_ts: {
          const double zz = fitted.z[si] * fitted.z[sj];
          const double r = fitted.y[si] * fitted.y[sj];
          if (w > 0.0) {
            if (zz == 0.0 || (r == 0.0 && w > 1.0)) {
              if (offending_pair) *offending_pair = {i, j};
              return -kInf;
            }
            pair_ll = std::log(zz) - std::log1p(zz) + xlogy(w - 1.0, r) + std::log(1.0 - r);
          } else {
            pair_ll = -std::log1p(zz);
          }
          break;
        }
        case ModelKind::wcm:
          throw std::invalid_argument("wcm has no discrete configuration likelihood");
      }
      ll += pair_ll;
    }
  return ll;
}

}  // namespace netens
