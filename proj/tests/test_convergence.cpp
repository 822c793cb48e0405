#include <doctest.h>

#include <cmath>

#include "luwc/convergence.hpp"
#include "luwc/error.hpp"

using namespace luwc;

namespace {

double bump(double u) {
  if (u <= 1.0 || u >= 2.0) return 0.0;
  return u <= 1.5 ? 2.0 * (u - 1.0) : 2.0 * (2.0 - u);
}

MeasurePath dirac_path(const std::vector<double>& grid, const std::function<double(double)>& pos) {
  std::vector<DiscreteMeasure> m;
  for (double t : grid) m.push_back(DiscreteMeasure::dirac(pos(t)));
  return MeasurePath(grid, std::move(m));
}

std::vector<double> grid_with(long n) {
  std::vector<double> g = linspace(0.0, 1.0, 21);
  for (double u : {1.0, 1.5, 2.0})
    if (u / static_cast<double>(n) < 1.0) g = merge_grids(g, std::vector<double>{u / static_cast<double>(n)});
  return g;
}

const std::vector<long> kNs{2, 10, 100, 1000};

std::vector<IndexedPath> bump_family(const std::vector<double>& grid) {
  std::vector<IndexedPath> fam;
  for (long n : kNs) fam.push_back({n, dirac_path(grid, [n](double t) { return bump(static_cast<double>(n) * t); })});
  return fam;
}

std::vector<double> union_grid() {
  std::vector<double> g = linspace(0.0, 1.0, 21);
  for (long n : kNs) g = merge_grids(g, grid_with(n));
  return g;
}

}  // namespace

TEST_CASE("verdict rule looks at the tail of the series") {
  const std::vector<double> down{0.5, 0.1, 0.01, 0.001};
  const std::vector<double> bounce{0.5, 0.001, 0.01, 0.015};
  const std::vector<double> flat{1.0, 1.0, 1.0};
  CHECK(judge(down, VerdictRule{}) == Verdict::Converging);
  CHECK(judge(bounce, VerdictRule{}) == Verdict::NotConverging);
  CHECK(judge(flat, VerdictRule{}) == Verdict::NotConverging);
}

TEST_CASE("rho_star is a weighted geometric series") {
  const std::vector<double> grid = linspace(0.0, 1.0, 11);
  const Exhaustion ex(1.0, 20);
  const MeasurePath left = dirac_path(grid, [](double) { return -5.0; });
  const MeasurePath right = dirac_path(grid, [](double) { return 5.0; });
  CHECK(rho_star(left, left, ex, MetricKind::BoundedLipschitz) == 0.0);
  CHECK(rho_star(left, right, ex, MetricKind::BoundedLipschitz) == doctest::Approx(1.0 - std::ldexp(1.0, -20)));

  std::vector<DiscreteMeasure> a, b;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    a.push_back(DiscreteMeasure::dirac(0.0, 1.0));
    b.push_back(DiscreteMeasure::dirac(0.0, 0.5));
  }
  const double half = rho_star(MeasurePath(grid, a), MeasurePath(grid, b), ex, MetricKind::BoundedLipschitz);
  CHECK(half == doctest::Approx(0.5 * (1.0 - std::ldexp(1.0, -20))));
}

TEST_CASE("drifting point mass converges locally uniformly at rate 1/n") {
  const std::vector<double> grid = linspace(0.0, 1.0, 21);
  std::vector<IndexedPath> fam;
  for (long n : kNs) fam.push_back({n, dirac_path(grid, [n](double t) { return t / static_cast<double>(n); })});
  const MeasurePath limit = dirac_path(grid, [](double) { return 0.0; });
  const std::vector<TestFunction> tests{TestFunction::capped_norm()};
  const CriterionSeries s = check_luwc(fam, limit, tests, Interval{0.0, 1.0}, VerdictRule{});
  for (std::size_t i = 0; i < kNs.size(); ++i) CHECK(s.deviations[i] == doctest::Approx(1.0 / static_cast<double>(kNs[i])));
  CHECK(s.verdict == Verdict::Converging);

  const std::vector<Vec> xi = frequency_grid(1, -5.0, 5.0, 41);
  const CriterionSeries cf = check_cf_lu(fam, limit, xi, Interval{0.0, 1.0}, VerdictRule{});
  for (std::size_t i = 0; i < kNs.size(); ++i) CHECK(cf.deviations[i] <= 5.0 / static_cast<double>(kNs[i]) + 1e-12);
  CHECK(cf.verdict == Verdict::Converging);
}

TEST_CASE("travelling bump fails every locally uniform criterion") {
  const std::vector<double> grid = union_grid();
  const std::vector<IndexedPath> fam = bump_family(grid);
  const MeasurePath limit = dirac_path(grid, [](double) { return 0.0; });
  const std::vector<TestFunction> tests{TestFunction::capped_norm()};
  const CriterionSeries weak = check_luwc(fam, limit, tests, Interval{0.0, 1.0}, VerdictRule{});
  for (double d : weak.deviations) CHECK(d == doctest::Approx(1.0));
  CHECK(weak.verdict == Verdict::NotConverging);

  const std::vector<Vec> one{Vec::Constant(1, 1.0)};
  const CriterionSeries pw = check_cf_ptwise_lu(fam, limit, one, Interval{0.0, 1.0}, VerdictRule{});
  const double peak = std::abs(std::exp(cplx(0.0, 1.0)) - 1.0);
  for (double d : pw.deviations) CHECK(d == doctest::Approx(peak));
  CHECK(peak == doctest::Approx(0.9589).epsilon(1e-4));

  const CriterionSeries fixed = check_fixed_time(fam, limit, tests, 0.5, VerdictRule{});
  CHECK(fixed.deviations.back() == 0.0);
}

TEST_CASE("equivalence report agrees on bump, identity and drifting families") {
  const std::vector<double> grid = union_grid();
  const MeasurePath zero = dirac_path(grid, [](double) { return 0.0; });
  EquivalenceConfig cfg;
  cfg.metric = MetricKind::Levy1D;
  const ConvergenceReport bump = equivalence_report(bump_family(grid), zero, cfg);
  CHECK(bump.agreement);
  CHECK(bump.verdict() == Verdict::NotConverging);

  std::vector<IndexedPath> same;
  for (long n : kNs) same.push_back({n, zero});
  const ConvergenceReport id = equivalence_report(same, zero, cfg);
  CHECK(id.agreement);
  CHECK(id.verdict() == Verdict::Converging);
  for (const CriterionSeries* s : id.all_series())
    for (double d : s->deviations) CHECK(d == 0.0);
  REQUIRE(id.rho_consistent.has_value());
  CHECK(*id.rho_consistent);
}

TEST_CASE("family grid mismatch is reported") {
  const MeasurePath a = dirac_path(linspace(0.0, 1.0, 11), [](double) { return 0.0; });
  const MeasurePath b = dirac_path(linspace(0.0, 1.0, 21), [](double) { return 0.0; });
  const std::vector<IndexedPath> fam{{1, a}};
  CHECK_THROWS_AS(check_luwc(fam, b, std::vector<TestFunction>{TestFunction::capped_norm()}, Interval{}, VerdictRule{}),
                  Error);
}

TEST_CASE("declared modulus is verified on construction") {
  const std::vector<double> grid = linspace(0.0, 1.0, 11);
  std::vector<DiscreteMeasure> jumpy;
  for (double t : grid) jumpy.push_back(DiscreteMeasure::dirac(t < 0.5 ? 0.0 : 1.0));
  CHECK_THROWS_AS(MeasurePath(grid, jumpy, [](double h) { return h; }), Error);
  std::vector<DiscreteMeasure> smooth;
  for (double t : grid) smooth.push_back(DiscreteMeasure::dirac(0.5 * t));
  CHECK_NOTHROW(MeasurePath(grid, smooth, [](double h) { return h; }));
}

TEST_CASE("tail bound closed forms") {
  const TailBound origin = tail_bound(DiscreteMeasure::dirac(0.0), 0.7);
  CHECK(origin.lhs == 0.0);
  CHECK(origin.rhs == doctest::Approx(0.0).epsilon(1e-12));

  const TailBound four = tail_bound(DiscreteMeasure::dirac(4.0), 1.0);
  CHECK(four.lhs == doctest::Approx(1.0));
  CHECK(four.rhs == doctest::Approx(2.0 - std::sin(4.0) / 2.0).epsilon(1e-10));
  CHECK(four.rhs == doctest::Approx(2.3784).epsilon(1e-4));

  const TailBound pair = tail_bound(DiscreteMeasure::dirac(-3.0, 0.5) + DiscreteMeasure::dirac(3.0, 0.5), 1.0);
  CHECK(pair.lhs == doctest::Approx(1.0));
  CHECK(pair.rhs == doctest::Approx(2.0 - 2.0 * std::sin(3.0) / 3.0).epsilon(1e-10));
}

TEST_CASE("tightness certificate is trivial on the constant origin family") {
  const std::vector<double> grid = linspace(0.0, 1.0, 11);
  const MeasurePath zero = dirac_path(grid, [](double) { return 0.0; });
  const std::vector<IndexedPath> fam{{1, zero}, {2, zero}};
  const std::vector<double> rs{0.5, 1.0};
  const TightnessReport t = tightness_certificate(fam, zero, Interval{0.0, 1.0}, rs);
  for (double v : t.i_sup) CHECK(std::abs(v) < 1e-12);
  for (const auto& row : t.j_sup)
    for (double v : row) CHECK(std::abs(v) < 1e-12);
  CHECK(t.consistent());
}
