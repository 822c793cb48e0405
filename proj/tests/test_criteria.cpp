#include <doctest.h>

#include <cmath>
#include <random>

#include "luwc/criteria.hpp"
#include "luwc/error.hpp"
#include "luwc/families.hpp"

using namespace luwc;

namespace {

const std::vector<long> kNs{2, 10, 100, 1000, 10000};

TripletSystem gaussian_system(const std::vector<double>& grid, const std::function<double(double)>& gamma,
                              const std::function<Mat(double)>& a) {
  const int d = static_cast<int>(a(0.0).rows());
  std::vector<Vec> g;
  std::vector<Mat> c;
  for (double t : grid) {
    g.push_back(Vec::Constant(d, gamma(t)));
    c.push_back(a(t));
  }
  return TripletSystem(d, grid, std::move(g), std::move(c), {}, {});
}

}  // namespace

TEST_CASE("C-sharp suite vanishes near the origin and C-sharp-sharp is cubic there") {
  for (int d : {1, 2}) {
    for (const TestFunction& f : csharp_suite(d)) CHECK_NOTHROW(verify_structure(f, d));
    for (const TestFunction& f : csharp_sharp_suite(d)) CHECK_NOTHROW(verify_structure(f, d));
  }
}

TEST_CASE("wcID on the escaping small jumps") {
  std::vector<Triplet> tr;
  for (long n : kNs) {
    const double x = 1.0 / std::sqrt(static_cast<double>(n));
    tr.push_back(Triplet::scalar(0.0, 0.0, DiscreteMeasure::dirac(x, static_cast<double>(n))));
  }
  // Modified second characteristic is n (1/sqrt n)^2 = 1 for every member once the atom sits in the identity zone.
  for (std::size_t i = 1; i < tr.size(); ++i) CHECK(modified_second(tr[i])(0, 0) == doctest::Approx(1.0));
  const Triplet limit = Triplet::scalar(0.0, 1.0, DiscreteMeasure::zero(1));
  const WcidResult r = check_wcID(tr, kNs, limit, csharp_suite(1), csharp_sharp_suite(1), VerdictRule{});
  for (const CriterionResult& row : r.rows) CHECK_MESSAGE(row.verdict == Verdict::Converging, row.name);
  CHECK(r.shadow.back());
  const CriterionResult& nu = r.rows[2];
  CHECK(nu.deviations.back() == 0.0);
}

TEST_CASE("wcID of identical triplets is zero") {
  const Triplet t = Triplet::scalar(0.3, 0.4, DiscreteMeasure::dirac(1.5, 2.0));
  const std::vector<Triplet> same(3, t);
  const std::vector<long> ns{1, 2, 3};
  const WcidResult r = check_wcID(same, ns, t, csharp_suite(1), csharp_sharp_suite(1), VerdictRule{});
  for (const CriterionResult& row : r.rows)
    for (double d : row.deviations) CHECK(d == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("functional criteria on the catalog families") {
  const std::vector<double> times{0.25, 0.5, 0.75, 1.0};
  for (const std::string& name : {std::string("cp_to_bm"), std::string("bump_drift")}) {
    const std::vector<double> grid = family_grid(name, kNs, 1.0);
    const auto fam = family_members(name, kNs, 1.0, grid);
    const TripletSystem lim = family_limit(name, 1.0, grid);
    const FunctionalResult r = check_js_functional(fam, lim, times, csharp_suite(1), VerdictRule{});
    if (name == "cp_to_bm") {
      CHECK(r.verdict == Verdict::Converging);
      for (double d : r.rows[1].deviations) CHECK(d == doctest::Approx(0.0).epsilon(1e-12));
    } else {
      CHECK(r.verdict == Verdict::NotConverging);
      for (double d : r.rows[0].deviations) CHECK(d == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("Polya lift examples") {
  const std::vector<double> grid = linspace(0.0, 1.0, 1001);
  const std::vector<double> limit = grid;
  const std::vector<long> ns{1, 2, 5, 10};
  std::vector<std::vector<double>> lin, pw;
  for (long n : ns) {
    lin.emplace_back();
    pw.emplace_back();
    for (double t : grid) {
      lin.back().push_back(t + t / static_cast<double>(n));
      pw.back().push_back(std::pow(t, 1.0 + 1.0 / static_cast<double>(n)));
    }
  }
  const PolyaResult a = polya_lift(lin, limit, grid);
  for (std::size_t i = 0; i < ns.size(); ++i) CHECK(a.uniform_dev[i] == doctest::Approx(1.0 / static_cast<double>(ns[i])));
  CHECK(a.certificate);

  // Independent maximization of t - t^1.1 on [0, 1]: the maximizer is (1/1.1)^10.
  const double tstar = std::pow(1.0 / 1.1, 10.0);
  const double exact = tstar - std::pow(tstar, 1.1);
  CHECK(tstar == doctest::Approx(0.3855).epsilon(1e-3));
  const PolyaResult b = polya_lift(pw, limit, grid);
  CHECK(b.uniform_dev[3] == doctest::Approx(exact).epsilon(1e-6));
  CHECK(b.uniform_dev[3] == doctest::Approx(0.0351).epsilon(1e-2));
}

TEST_CASE("Polya lift rejects a discontinuous limit and non-monotone input") {
  const std::vector<double> grid = linspace(0.0, 1.0, 101);
  std::vector<double> step(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) step[i] = grid[i] >= 0.5 ? 1.0 : 0.0;
  std::vector<std::vector<double>> fns{step};
  for (std::size_t i = 0; i < grid.size(); ++i) fns[0][i] = grid[i] >= 0.5 - 0.1 ? 1.0 : 0.0;
  CHECK_THROWS_AS(polya_lift(fns, step, grid), Error);

  std::vector<double> lim = grid;
  std::vector<std::vector<double>> down{std::vector<double>(grid.rbegin(), grid.rend())};
  CHECK_THROWS_AS(polya_lift(down, lim, grid), Error);
}

TEST_CASE("polarization rebuilds covariance paths exactly") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  const std::vector<double> grid = linspace(0.0, 1.0, 41);
  const int d = 3;
  for (int trial = 0; trial < 100; ++trial) {
    Mat b(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) b(i, j) = z(rng);
    const Mat rate = b * b.transpose();
    std::vector<Mat> path;
    for (double t : grid) path.push_back(rate * t);
    const std::vector<std::vector<Mat>> fam{path};
    const std::vector<long> ns{1};
    const PolarizationResult r = polarize_check(fam, ns, path, grid, VerdictRule{});
    CHECK(r.reconstruction_error <= 1e-12 * std::max(1.0, rate.norm()));
  }
}

TEST_CASE("polarization deviation on diagonal paths") {
  const std::vector<double> grid = linspace(0.0, 1.0, 101);
  std::vector<Mat> limit;
  for (double t : grid) limit.push_back((Vec(2) << t, 2.0 * t).finished().asDiagonal());
  std::vector<std::vector<Mat>> fam;
  const std::vector<long> ns{1, 10, 100};
  for (long n : ns) {
    fam.emplace_back();
    for (double t : grid) fam.back().push_back((Vec(2) << t + t / static_cast<double>(n), 2.0 * t).finished().asDiagonal());
  }
  const PolarizationResult r = polarize_check(fam, ns, limit, grid, VerdictRule{});
  for (std::size_t i = 0; i < ns.size(); ++i) {
    CHECK(r.entry_dev[i][0] == doctest::Approx(1.0 / static_cast<double>(ns[i])));
    CHECK(r.entry_dev[i][3] == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(r.certificate);
}

TEST_CASE("pair and Sigma criteria agree on the catalog") {
  const std::vector<double> times{0.25, 0.5, 0.75, 1.0};
  for (const std::string& name : family_names()) {
    const std::vector<double> grid = family_grid(name, kNs, 1.0);
    const auto fam = family_members(name, kNs, 1.0, grid);
    const TripletSystem lim = family_limit(name, 1.0, grid);
    const auto tests = default_test_suite(1);
    const PairResult pr = check_pair_criteria(fam, lim, times, tests, VerdictRule{});
    const CriterionResult big = check_sigma_big(fam, lim, 1.0, tests, VerdictRule{});
    CHECK_MESSAGE(pr.rows[1].verdict == big.verdict, name);
  }
}

TEST_CASE("cp_to_bm pair mass approaches the Gaussian variance") {
  const std::vector<double> grid = linspace(0.0, 1.0, 11);
  for (long n : {10L, 1000L}) {
    const TripletSystem sys = family_member("cp_to_bm", n, 1.0, grid);
    const double nn = static_cast<double>(n);
    CHECK(sigma_at(sys, 1.0).total_mass() == doctest::Approx(1.0 / (1.0 + 1.0 / nn)));
  }
}

TEST_CASE("drift recovery inverts the forward characteristic function") {
  const std::vector<double> grid = linspace(0.0, 1.0, 101);
  const TripletSystem zero = TripletSystem::zero(1, grid);
  for (const Vec& g : drift_recovery(zero)) CHECK(std::abs(g(0)) < 1e-14);

  std::vector<Vec> gp;
  std::vector<Mat> ap;
  std::vector<std::vector<double>> wp(1);
  for (double t : grid) {
    gp.push_back(Vec::Constant(1, t));
    ap.push_back(Mat::Zero(1, 1));
    wp[0].push_back(t);
  }
  const TripletSystem poisson(1, grid, gp, ap, {Vec::Constant(1, 1.0)}, wp);
  const std::vector<Vec> back = drift_recovery(poisson);
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(back[k](0) == doctest::Approx(grid[k]).epsilon(1e-10));

  const TripletSystem wave =
      gaussian_system(grid, [](double t) { return std::sin(t); }, [](double t) { return Mat::Constant(1, 1, t); });
  const std::vector<Vec> w = drift_recovery(wave);
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(std::abs(w[k](0) - std::sin(grid[k])) < 1e-8);
}

TEST_CASE("drift recovery rejects phase steps beyond the guard") {
  const std::vector<double> grid = linspace(0.0, 1.0, 3);
  const TripletSystem fast = gaussian_system(grid, [](double t) { return 5.0 * t; },
                                             [](double) { return Mat::Zero(1, 1); });
  CHECK_THROWS_AS(drift_recovery(fast), Error);
}
