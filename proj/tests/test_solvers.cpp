#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "helpers.hpp"
#include "netens/solvers.hpp"

using namespace netens;
using test::Rng;

namespace {

FitTargets degree_targets(std::vector<double> k) {
  FitTargets t;
  t.degrees = std::move(k);
  return t;
}

FitTargets both_targets(std::vector<double> k, std::vector<double> s) {
  FitTargets t;
  t.degrees = std::move(k);
  t.strengths = std::move(s);
  return t;
}

double max_rel_gap(const std::vector<double>& got, const std::vector<double>& want) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i)
    if (want[i] > 0.0) worst = std::max(worst, std::abs(got[i] - want[i]) / want[i]);
  return worst;
}

}  // namespace

TEST_CASE("bcm: all-zero degrees solve trivially") {
  const auto [fitted, report] = solve_bcm(degree_targets({0.0, 0.0, 0.0}));
  CHECK(report.converged);
  CHECK(fitted.z == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(report.log_likelihood == 0.0);
}

TEST_CASE("bcm: saturated degree sequence reports boundary divergence") {
  const auto [fitted, report] = solve_bcm(degree_targets({1.0, 1.0}));
  CHECK_FALSE(report.converged);
  CHECK(report.message.find("boundary") != std::string::npos);
}

TEST_CASE("bcm: recovers a planted fitness vector") {
  const std::vector<double> planted{0.4, 1.2, 0.7, 2.5};
  const std::vector<double> k = test::bcm_expected_degrees(planted);
  for (SolveMode mode : {SolveMode::fixed_point, SolveMode::newton}) {
    SolverConfig cfg;
    cfg.mode = mode;
    const auto [fitted, report] = solve_bcm(degree_targets(k), cfg);
    CHECK(report.converged);
    CHECK(report.residual <= cfg.tol);
    CHECK(max_rel_gap(test::bcm_expected_degrees(fitted.z), k) < 1e-10);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        CHECK(bcm_link_prob(fitted.z[i], fitted.z[j]) ==
              doctest::Approx(bcm_link_prob(planted[i], planted[j])).epsilon(1e-8));
  }
}

TEST_CASE("bcm: solution independent of initialization") {
  const std::vector<double> k =
      test::bcm_expected_degrees({0.3, 0.9, 1.4, 0.2, 2.0, 0.6});
  Rng rng(41);
  std::vector<double> reference;
  for (int trial = 0; trial < 10; ++trial) {
    SolverConfig cfg;
    for (int i = 0; i < 6; ++i) cfg.init_z.push_back(rng.uniform(0.01, 10.0));
    const auto [fitted, report] = solve_bcm(degree_targets(k), cfg);
    REQUIRE(report.converged);
    if (reference.empty())
      reference = fitted.z;
    else
      for (int i = 0; i < 6; ++i)
        CHECK(fitted.z[i] == doctest::Approx(reference[i]).epsilon(1e-8));
  }
}

TEST_CASE("ecm: planted constraints are reproduced") {
  const std::vector<double> x0{0.5, 1.5, 0.9, 2.0};
  const std::vector<double> y0{0.3, 0.6, 0.45, 0.2};
  const auto expected = test::ecm_expected_constraints(x0, y0);
  for (SolveMode mode : {SolveMode::fixed_point, SolveMode::newton}) {
    SolverConfig cfg;
    cfg.mode = mode;
    const auto [fitted, report] =
        solve_ecm(both_targets(expected.degrees, expected.strengths), cfg);
    CHECK(report.converged);
    const auto refit = test::ecm_expected_constraints(fitted.x, fitted.y);
    CHECK(max_rel_gap(refit.degrees, expected.degrees) < 1e-10);
    CHECK(max_rel_gap(refit.strengths, expected.strengths) < 1e-10);
  }
}

TEST_CASE("ecm: empty graph and infeasible targets") {
  const auto [fitted, report] = solve_ecm(both_targets({0.0, 0.0}, {0.0, 0.0}));
  CHECK(report.converged);
  CHECK(fitted.x == std::vector<double>{0.0, 0.0});
  CHECK(fitted.y == std::vector<double>{0.0, 0.0});

  CHECK_THROWS_AS(solve_ecm(both_targets({2.0, 1.0, 1.0}, {1.0, 1.0, 1.0})),
                  std::invalid_argument);  // s < k
  CHECK_THROWS_AS(solve_ecm(both_targets({0.0, 1.0}, {1.0, 1.0})),
                  std::invalid_argument);  // s > 0 with k = 0
}

TEST_CASE("ecm: unit-weight constraints drive y products to zero, p to bcm values") {
  // 5-cycle: k = s = 2 everywhere; the matching bcm has p = 1/2 for all pairs.
  // y_i itself is identified only through the pair products y_i y_j, which
  // all vanish in the unit-weight limit.
  const std::vector<double> k(5, 2.0);
  const auto [fitted, report] = solve_ecm(both_targets(k, k));
  CHECK(report.converged);
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      CHECK(fitted.y[i] * fitted.y[j] < 1e-8);
      CHECK(ecm_pair(fitted.x[i], fitted.x[j], fitted.y[i], fitted.y[j]).p ==
            doctest::Approx(0.5).epsilon(1e-7));
    }
}

TEST_CASE("ts: planted two-step parameters are reproduced") {
  const std::vector<double> z0{0.4, 1.1, 0.8, 1.6, 0.25};
  const std::vector<double> y0{0.35, 0.55, 0.2, 0.65, 0.45};
  const auto expected = test::ts_expected_constraints(z0, y0);
  for (SolveMode mode : {SolveMode::fixed_point, SolveMode::newton}) {
    SolverConfig cfg;
    cfg.mode = mode;
    const auto [fitted, report] =
        solve_ts(both_targets(expected.degrees, expected.strengths), cfg);
    CHECK(report.converged);
    CHECK(report.residual <= cfg.tol);
    const auto refit = test::ts_expected_constraints(fitted.z, fitted.y);
    CHECK(max_rel_gap(refit.degrees, expected.degrees) < 1e-10);
    CHECK(max_rel_gap(refit.strengths, expected.strengths) < 1e-10);
  }
}

TEST_CASE("ts: unit weights give vanishing y products; isolated nodes stay zero") {
  const WeightedGraph g =
      test::make_graph(6, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {4, 0, 1}});
  const auto [fitted, report] = solve_ts(constraints(g));
  CHECK(report.converged);
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) CHECK(fitted.y[i] * fitted.y[j] < 1e-8);
  CHECK(fitted.z[5] == 0.0);
  CHECK(fitted.y[5] == 0.0);
}

TEST_CASE("fixed-point and newton agree on fitted probabilities") {
  Rng rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 8;
    std::vector<double> z0, x0, y0;
    for (int i = 0; i < n; ++i) {
      z0.push_back(rng.uniform(0.1, 1.8));
      x0.push_back(rng.uniform(0.1, 1.8));
      y0.push_back(rng.uniform(0.1, 0.8));
    }
    const auto ecm_exp = test::ecm_expected_constraints(x0, y0);
    SolverConfig fp;
    SolverConfig nw;
    nw.mode = SolveMode::newton;
    const auto [efp, rfp] = solve_ecm(both_targets(ecm_exp.degrees, ecm_exp.strengths), fp);
    const auto [enw, rnw] = solve_ecm(both_targets(ecm_exp.degrees, ecm_exp.strengths), nw);
    REQUIRE(rfp.converged);
    REQUIRE(rnw.converged);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        CHECK(ecm_pair(efp.x[i], efp.x[j], efp.y[i], efp.y[j]).p ==
              doctest::Approx(ecm_pair(enw.x[i], enw.x[j], enw.y[i], enw.y[j]).p)
                  .epsilon(1e-8));

    const std::vector<double> kb = test::bcm_expected_degrees(z0);
    const auto [bfp, brfp] = solve_bcm(degree_targets(kb), fp);
    const auto [bnw, brnw] = solve_bcm(degree_targets(kb), nw);
    REQUIRE(brfp.converged);
    REQUIRE(brnw.converged);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        CHECK(bcm_link_prob(bfp.z[i], bfp.z[j]) ==
              doctest::Approx(bcm_link_prob(bnw.z[i], bnw.z[j])).epsilon(1e-8));
  }
}

TEST_CASE("solver permutation equivariance") {
  const std::vector<double> x0{0.5, 1.5, 0.9, 2.0, 0.3};
  const std::vector<double> y0{0.3, 0.6, 0.45, 0.2, 0.7};
  const auto expected = test::ecm_expected_constraints(x0, y0);
  const auto [fitted, report] = solve_ecm(both_targets(expected.degrees, expected.strengths));
  REQUIRE(report.converged);

  const std::vector<int> perm{2, 4, 0, 1, 3};
  std::vector<double> pk(5), ps(5);
  for (int i = 0; i < 5; ++i) {
    pk[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = expected.degrees[i];
    ps[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = expected.strengths[i];
  }
  const auto [pfit, preport] = solve_ecm(both_targets(pk, ps));
  REQUIRE(preport.converged);
  for (int i = 0; i < 5; ++i) {
    CHECK(pfit.x[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] ==
          doctest::Approx(fitted.x[i]).epsilon(1e-8));
    CHECK(pfit.y[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] ==
          doctest::Approx(fitted.y[i]).epsilon(1e-8));
  }
}

TEST_CASE("log likelihood closed cases") {
  const WeightedGraph empty = test::make_graph(2, {});
  FitnessVectors zeros;
  zeros.kind = ModelKind::bcm;
  zeros.z = {0.0, 0.0};
  CHECK(log_likelihood(zeros, empty) == 0.0);

  const WeightedGraph pair = test::make_graph(2, {{0, 1, 1}});
  FitnessVectors unit;
  unit.kind = ModelKind::bcm;
  unit.z = {1.0, 1.0};
  CHECK(log_likelihood(unit, pair) == doctest::Approx(std::log(0.5)).epsilon(1e-15));

  std::pair<int, int> offending{-1, -1};
  CHECK(log_likelihood(zeros, pair, &offending) ==
        -std::numeric_limits<double>::infinity());
  CHECK(offending == std::pair<int, int>{0, 1});
}

TEST_CASE("log likelihood equals brute-force per-pair products") {
  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const WeightedGraph g = test::random_graph(4, 0.6, 4, rng);
    FitnessVectors bcm, ecm, ts;
    bcm.kind = ModelKind::bcm;
    ecm.kind = ModelKind::ecm;
    ts.kind = ModelKind::ts;
    for (int i = 0; i < 4; ++i) {
      bcm.z.push_back(rng.uniform(0.1, 2.0));
      ecm.x.push_back(rng.uniform(0.1, 2.0));
      ecm.y.push_back(rng.uniform(0.1, 0.9));
      ts.z.push_back(rng.uniform(0.1, 2.0));
      ts.y.push_back(rng.uniform(0.1, 0.9));
    }
    double bl = 0.0, el = 0.0, tl = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        const double w = static_cast<double>(g.weight(i, j));
        const double a = w > 0 ? 1.0 : 0.0;
        const double zz = bcm.z[i] * bcm.z[j];
        bl += std::log(std::pow(zz / (1 + zz), a) * std::pow(1 / (1 + zz), 1 - a));
        const double r = ecm.y[i] * ecm.y[j];
        const double xx = ecm.x[i] * ecm.x[j];
        el += std::log(std::pow(xx, a) * std::pow(r, w) * (1 - r) / (1 - r + xx * r));
        const double tzz = ts.z[i] * ts.z[j];
        const double tr = ts.y[i] * ts.y[j];
        tl += std::log(std::pow(tzz, a) * std::pow(tr, w - a) * std::pow(1 - tr, a) /
                       (1 + tzz));
      }
    CHECK(log_likelihood(bcm, g) == doctest::Approx(bl).epsilon(1e-12));
    CHECK(log_likelihood(ecm, g) == doctest::Approx(el).epsilon(1e-12));
    CHECK(log_likelihood(ts, g) == doctest::Approx(tl).epsilon(1e-12));
  }
}

TEST_CASE("solutions are local likelihood maxima") {
  Rng rng(44);
  const WeightedGraph g = test::make_graph(
      6, {{0, 1, 3}, {0, 2, 1}, {1, 2, 2}, {1, 3, 1}, {2, 4, 4}, {3, 4, 1}, {4, 5, 2}, {0, 5, 1}});
  const ConstraintSet c = constraints(g);

  const auto [bcm, br] = solve_bcm(c);
  REQUIRE(br.converged);
  const double bcm_ll = log_likelihood(bcm, g);
  for (int trial = 0; trial < 100; ++trial) {
    FitnessVectors perturbed = bcm;
    for (double& z : perturbed.z)
      if (z > 0.0) z *= 1.0 + 0.01 * (2.0 * rng.uniform() - 1.0);
    CHECK(log_likelihood(perturbed, g) <= bcm_ll + 1e-12);
  }

  const auto [ecm, er] = solve_ecm(c);
  REQUIRE(er.converged);
  const double ecm_ll = log_likelihood(ecm, g);
  for (int trial = 0; trial < 100; ++trial) {
    FitnessVectors perturbed = ecm;
    for (double& x : perturbed.x)
      if (x > 0.0) x *= 1.0 + 0.01 * (2.0 * rng.uniform() - 1.0);
    for (double& y : perturbed.y)
      if (y > 0.0) y = std::min(y * (1.0 + 0.01 * (2.0 * rng.uniform() - 1.0)), 1.0 - 1e-9);
    CHECK(log_likelihood(perturbed, g) <= ecm_ll + 1e-12);
  }

  // For the two-step fit only the z block is a likelihood argmax (the y step
  // matches expected strengths instead); perturb z holding y fixed.
  const auto [ts, tr] = solve_ts(c);
  REQUIRE(tr.converged);
  const double ts_ll = log_likelihood(ts, g);
  for (int trial = 0; trial < 100; ++trial) {
    FitnessVectors perturbed = ts;
    for (double& z : perturbed.z)
      if (z > 0.0) z *= 1.0 + 0.01 * (2.0 * rng.uniform() - 1.0);
    CHECK(log_likelihood(perturbed, g) <= ts_ll + 1e-12);
  }
}

TEST_CASE("ecm solution is stable across random initializations") {
  const WeightedGraph g = test::make_graph(
      5, {{0, 1, 2}, {0, 2, 1}, {1, 2, 5}, {1, 3, 1}, {2, 4, 2}, {3, 4, 3}});
  const ConstraintSet c = constraints(g);
  Rng rng(45);
  std::vector<double> ref_p;
  for (int trial = 0; trial < 10; ++trial) {
    SolverConfig cfg;
    for (int i = 0; i < 5; ++i) {
      cfg.init_x.push_back(rng.uniform(0.05, 5.0));
      cfg.init_y.push_back(rng.uniform(0.05, 0.95));
    }
    const auto [fitted, report] = solve_ecm(c, cfg);
    REQUIRE(report.converged);
    std::vector<double> p;
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j)
        p.push_back(ecm_pair(fitted.x[i], fitted.x[j], fitted.y[i], fitted.y[j]).p);
    if (ref_p.empty())
      ref_p = p;
    else
      for (std::size_t q = 0; q < p.size(); ++q)
        CHECK(p[q] == doctest::Approx(ref_p[q]).epsilon(1e-8));
  }
}
