#include <doctest.h>

#include <cmath>
#include <numbers>

#include "luwc/error.hpp"
#include "luwc/families.hpp"
#include "luwc/process.hpp"

using namespace luwc;

namespace {

TripletSystem linear(double g, double a, double rate, std::size_t points = 21) {
  const std::vector<double> grid = linspace(0.0, 1.0, points);
  std::vector<Vec> gv;
  std::vector<Mat> av;
  std::vector<std::vector<double>> w(rate > 0.0 ? 1 : 0);
  for (double t : grid) {
    gv.push_back(Vec::Constant(1, g * t));
    av.push_back(Mat::Constant(1, 1, a * t));
    if (rate > 0.0) w[0].push_back(rate * t);
  }
  std::vector<Vec> pts;
  if (rate > 0.0) pts.push_back(Vec::Constant(1, 1.0));
  return TripletSystem(1, grid, std::move(gv), std::move(av), std::move(pts), std::move(w));
}

CadlagPath step_at(double s) {
  return CadlagPath(1, 1.0, {0.0, s}, {Vec::Constant(1, 0.0), Vec::Constant(1, 1.0)});
}

}  // namespace

TEST_CASE("deterministic drift samples exactly") {
  const TripletSystem sys = linear(1.0, 0.0, 0.0);
  const CadlagPath p = sample_path(sys, sys.grid(), 7, 0);
  for (double t : sys.grid()) CHECK(p.at(t)(0) == doctest::Approx(t).epsilon(1e-12));
}

TEST_CASE("Poisson ensemble mean and Gaussian ensemble variance") {
  const std::size_t count = 10000;
  const PathEnsemble poisson = sample_ensemble(linear(1.0, 0.0, 1.0), linspace(0.0, 1.0, 11), count, 1, 2);
  double mean = 0.0;
  for (const CadlagPath& p : poisson.paths) mean += p.at(1.0)(0);
  mean /= static_cast<double>(count);
  // X_1 = N_1 has mean 1 and sd 1.
  CHECK(std::abs(mean - 1.0) <= 4.0 / std::sqrt(static_cast<double>(count)));

  const PathEnsemble bm = sample_ensemble(linear(0.0, 1.0, 0.0), linspace(0.0, 1.0, 11), count, 2, 2);
  double m2 = 0.0, m1 = 0.0;
  for (const CadlagPath& p : bm.paths) {
    m1 += p.at(1.0)(0);
    m2 += p.at(1.0)(0) * p.at(1.0)(0);
  }
  const double var = m2 / static_cast<double>(count) - std::pow(m1 / static_cast<double>(count), 2);
  CHECK(std::abs(var - 1.0) <= 3.0 * std::sqrt(2.0 / static_cast<double>(count)));
}

TEST_CASE("ensembles are reproducible and independent of the thread count") {
  const TripletSystem sys = family_member("cp_to_bm", 100, 1.0, linspace(0.0, 1.0, 21));
  const PathEnsemble a = sample_ensemble(sys, sys.grid(), 64, 99, 1);
  const PathEnsemble b = sample_ensemble(sys, sys.grid(), 64, 99, 4);
  for (std::size_t i = 0; i < a.paths.size(); ++i) CHECK(a.paths[i].values() == b.paths[i].values());
}

TEST_CASE("increment characteristic functions") {
  const Vec two = Vec::Constant(1, 2.0);
  CHECK(std::abs(increment_cf(linear(0.0, 1.0, 0.0), 0.25, 1.0, two) - std::exp(cplx(-1.5, 0.0))) < 1e-12);
  const Vec pi = Vec::Constant(1, std::numbers::pi);
  CHECK(std::abs(increment_cf(linear(1.0, 0.0, 1.0), 0.0, 1.0, pi) - std::exp(cplx(-2.0, 0.0))) < 1e-12);
  CHECK(std::abs(increment_cf(linear(1.0, 1.0, 1.0), 0.5, 0.5, pi) - cplx(1.0, 0.0)) < 1e-15);
}

TEST_CASE("finite-dimensional characteristic functions") {
  const TripletSystem bm = linear(0.0, 1.0, 0.0);
  const double x1 = 0.7, x2 = -1.3;
  FddQuery q{{0.5, 1.0}, {Vec::Constant(1, x1), Vec::Constant(1, x2)}};
  // Joint Gaussian with covariance [[0.5, 0.5], [0.5, 1]].
  const double quad = 0.5 * x1 * x1 + 2.0 * 0.5 * x1 * x2 + 1.0 * x2 * x2;
  CHECK(std::abs(fdd_cf(bm, q) - std::exp(cplx(-0.5 * quad, 0.0))) < 1e-12);

  const TripletSystem poisson = linear(1.0, 0.0, 1.0);
  const double pi = std::numbers::pi;
  FddQuery pq{{0.5, 1.0}, {Vec::Constant(1, pi), Vec::Constant(1, pi)}};
  CHECK(std::abs(fdd_cf(poisson, pq) - std::exp(cplx(-1.0, 0.0))) < 1e-12);

  FddQuery single{{0.6}, {Vec::Constant(1, 1.1)}};
  CHECK(std::abs(fdd_cf(bm, single) - marginal_cf(bm, 0.6, Vec::Constant(1, 1.1))) < 1e-15);
}

TEST_CASE("discretized marginal laws reproduce the characteristic function") {
  const TripletSystem poisson = linear(1.0, 0.0, 1.0);
  const DiscreteMeasure law = marginal_law(poisson, 1.0);
  CHECK(law.is_probability());
  for (double s : {-2.0, 0.5, 3.0}) CHECK(std::abs(cf_eval(law, s) - marginal_cf(poisson, 1.0, Vec::Constant(1, s))) < 1e-9);

  const TripletSystem bm = linear(0.0, 1.0, 0.0);
  const DiscreteMeasure g = marginal_law(bm, 1.0);
  for (double s : {-1.0, 0.5, 2.0}) CHECK(std::abs(cf_eval(g, s) - marginal_cf(bm, 1.0, Vec::Constant(1, s))) < 1e-3);
}

TEST_CASE("Skorokhod J1 examples") {
  const CadlagPath a = step_at(0.5);
  CHECK(skorokhod_j1(a, a) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(skorokhod_j1(a, step_at(0.6)) == doctest::Approx(0.1).epsilon(1e-9));

  const std::vector<double> grid = family_grid("bump_drift", std::vector<long>{10}, 1.0);
  const TripletSystem bump = family_member("bump_drift", 10, 1.0, grid);
  const CadlagPath zero(1, 1.0, {0.0}, {Vec::Constant(1, 0.0)});
  CHECK(skorokhod_j1(deterministic_path(bump), zero) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Skorokhod J1 is symmetric and does not exceed the uniform distance") {
  const CadlagPath p(1, 1.0, {0.0, 0.2, 0.55, 0.8}, {Vec::Constant(1, 0.0), Vec::Constant(1, 1.0),
                                                     Vec::Constant(1, -0.5), Vec::Constant(1, 0.3)});
  const CadlagPath q(1, 1.0, {0.0, 0.25, 0.5, 0.9}, {Vec::Constant(1, 0.0), Vec::Constant(1, 0.9),
                                                     Vec::Constant(1, -0.4), Vec::Constant(1, 0.3)});
  const double pq = skorokhod_j1(p, q), qp = skorokhod_j1(q, p);
  CHECK(pq == doctest::Approx(qp).epsilon(1e-12));
  double uniform = 0.0;
  for (double t : linspace(0.0, 1.0, 2001)) uniform = std::max(uniform, std::abs(p.at(t)(0) - q.at(t)(0)));
  CHECK(pq <= uniform + 1e-12);
}

TEST_CASE("Skorokhod J1 refuses oversized paths") {
  std::vector<double> bp;
  std::vector<Vec> v;
  for (int i = 0; i < 40; ++i) {
    bp.push_back(i / 40.0);
    v.push_back(Vec::Constant(1, i % 2));
  }
  const CadlagPath many(1, 1.0, bp, v);
  CHECK_THROWS_AS(skorokhod_j1(many, many), Error);
}

TEST_CASE("harness agreement on the catalog") {
  const std::vector<long> ns{2, 10, 100, 1000, 10000};
  for (const std::string& name : {std::string("cp_to_bm"), std::string("bump_drift"), std::string("deterministic_drift")}) {
    HarnessConfig cfg;
    cfg.grid = family_grid(name, ns, 1.0);
    const auto fam = family_members(name, ns, 1.0, cfg.grid);
    const HarnessReport h = functional_harness(fam, family_limit(name, 1.0, cfg.grid), cfg);
    CHECK_MESSAGE(h.agree, name);
    if (name == "bump_drift")
      for (double j1 : h.skorokhod) CHECK(j1 == doctest::Approx(1.0).epsilon(1e-3));
  }
}
