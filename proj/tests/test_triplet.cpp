#include <doctest.h>

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "luwc/error.hpp"
#include "luwc/system.hpp"
#include "luwc/triplet.hpp"

using namespace luwc;

namespace {

TripletSystem line_system(std::vector<double> grid, double (*g)(double), double (*a)(double), double x,
                          double (*w)(double)) {
  std::vector<Vec> gv;
  std::vector<Mat> av;
  std::vector<std::vector<double>> wv(1);
  for (double t : grid) {
    gv.push_back(Vec::Constant(1, g(t)));
    av.push_back(Mat::Constant(1, 1, a(t)));
    wv[0].push_back(w(t));
  }
  return TripletSystem(1, std::move(grid), std::move(gv), std::move(av), {Vec::Constant(1, x)}, std::move(wv));
}

double zero_fn(double) { return 0.0; }
double id_fn(double t) { return t; }

}  // namespace

TEST_CASE("truncation is the identity near the origin and vanishes far out") {
  CHECK(truncate(0.7) == doctest::Approx(0.7));
  CHECK(truncate(-1.0) == doctest::Approx(-1.0));
  CHECK(truncate(2.5) == 0.0);
  CHECK(std::abs(truncate(1.5)) <= 1.5);
}

TEST_CASE("exponent of standard Gaussian and zero triplets") {
  const Triplet g = Triplet::gaussian(Mat::Identity(2, 2));
  const Vec xi = (Vec(2) << 0.3, -1.1).finished();
  CHECK(std::abs(lk_exponent(g, xi) - cplx(-0.5 * xi.squaredNorm(), 0.0)) < 1e-14);
  CHECK(std::abs(lk_exponent_modified(g, xi) - cplx(-0.5 * xi.squaredNorm(), 0.0)) < 1e-14);
  CHECK(std::abs(lk_exponent(Triplet::zero(1), 4.2)) == 0.0);
}

TEST_CASE("Poisson triplet exponent at pi") {
  const Triplet p = Triplet::scalar(1.0, 0.0, DiscreteMeasure::dirac(1.0));
  const Vec xi = Vec::Constant(1, std::numbers::pi);
  CHECK(std::abs(lk_exponent(p, xi) - cplx(-2.0, 0.0)) < 1e-12);
  CHECK(std::abs(lk_exponent_modified(p, xi) - cplx(-2.0, 0.0)) < 1e-12);
  CHECK(std::abs(triplet_cf(p, xi) - std::exp(cplx(-2.0, 0.0))) < 1e-12);
}

TEST_CASE("modified second characteristic") {
  CHECK(modified_second(Triplet::scalar(0.0, 0.0, DiscreteMeasure::dirac(0.5, 3.0)))(0, 0) == doctest::Approx(0.75));
  CHECK(modified_second(Triplet::scalar(0.0, 1.7, DiscreteMeasure::zero(1)))(0, 0) == doctest::Approx(1.7));
  CHECK(modified_second(Triplet::scalar(0.0, 0.0, DiscreteMeasure::dirac(5.0)))(0, 0) == 0.0);
}

TEST_CASE("pair form of one-dimensional triplets") {
  const Pair1D gauss = pair_from_triplet(Triplet::scalar(0.0, 2.0, DiscreteMeasure::zero(1)));
  CHECK(gauss.alpha == doctest::Approx(0.0));
  REQUIRE(gauss.sigma.size() == 1);
  CHECK(gauss.sigma.atoms()[0].point(0) == 0.0);
  CHECK(gauss.sigma.atoms()[0].weight == doctest::Approx(2.0));

  const Pair1D jump = pair_from_triplet(Triplet::scalar(0.0, 0.0, DiscreteMeasure::dirac(1.0)));
  CHECK(jump.alpha == doctest::Approx(-0.5));
  REQUIRE(jump.sigma.size() == 1);
  CHECK(jump.sigma.atoms()[0].weight == doctest::Approx(0.5));
}

TEST_CASE("Levy measure rejects an atom at the origin") {
  CHECK_THROWS_AS(LevyMeasure(DiscreteMeasure::dirac(0.0)), Error);
}

TEST_CASE("systems reject non-monotone covariance and Levy paths") {
  const std::vector<double> grid{0.0, 0.5, 1.0};
  CHECK_THROWS_AS(line_system(grid, zero_fn, [](double t) { return t * (1.0 - t); }, 1.0, zero_fn), Error);
  CHECK_THROWS_AS(line_system(grid, zero_fn, zero_fn, 1.0, [](double t) { return t < 0.9 ? t : 0.0; }), Error);
  CHECK_NOTHROW(line_system(grid, id_fn, zero_fn, 1.0, id_fn));
}

TEST_CASE("Sigma slabs for sigma_t = t delta_1") {
  // nu_t = 2t delta_1 gives sigma_t = t delta_1 after the x^2/(1+x^2) weighting.
  const TripletSystem sys = line_system({0.0, 0.2, 0.7, 1.0}, zero_fn, zero_fn, 1.0, [](double t) { return 2.0 * t; });
  const SigmaMeasure big = sigma_from_system(sys);
  const std::vector<double> one{1.0};
  CHECK(big.mass(one, 0.2, 0.7) == doctest::Approx(0.5));
  CHECK(system_sigma_check(sys, big));
  CHECK(approx_equal(big.sigma_at(1.0), sigma_at(sys, 1.0).canonicalize(), 1e-12));
}

TEST_CASE("Sigma of a capped path carries no mass after the cap") {
  const TripletSystem sys = line_system({0.0, 0.25, 0.5, 0.75, 1.0}, zero_fn, zero_fn, 2.0,
                                        [](double t) { return 1.25 * std::min(t, 0.5); });
  const SigmaMeasure big = sigma_from_system(sys);
  CHECK(big.total(0.5, 1.0) == doctest::Approx(0.0));
  CHECK(big.total(0.0, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("zero system has zero Sigma") {
  const SigmaMeasure big = sigma_from_system(TripletSystem::zero(1, {0.0, 1.0}));
  CHECK(big.total(0.0, 1.0) == 0.0);
}

TEST_CASE("density application on atomic paths") {
  const AtomicMeasurePath path(1, {0.0, 0.5, 1.0}, {Vec::Constant(1, 1.0)}, {{0.0, 0.5, 1.0}});
  const AtomicMeasurePath three = apply_density([](const Vec&) { return 3.0; }, path);
  CHECK(three.measure_at(0.5).total_mass() == doctest::Approx(1.5));
  const AtomicMeasurePath one = apply_density([](const Vec&) { return 1.0; }, path);
  CHECK(one.weights() == path.weights());
  CHECK(apply_density([](const Vec&) { return 0.0; }, path).measure_at(1.0).total_mass() == 0.0);
}

TEST_CASE("system JSON round trip") {
  const TripletSystem sys = line_system({0.0, 0.5, 1.0}, id_fn, id_fn, -0.5, id_fn);
  nlohmann::json j = sys;
  const TripletSystem back = system_from_json(j);
  CHECK(back.grid() == sys.grid());
  CHECK(back.gamma_at(0.75)(0) == doctest::Approx(0.75));
  CHECK(back.covariance_at(1.0)(0, 0) == doctest::Approx(1.0));
}
