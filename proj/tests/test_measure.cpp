#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "luwc/error.hpp"
#include "luwc/measure.hpp"

using namespace luwc;

namespace {

// Bounded-Lipschitz distance on the line by enumerating LP vertices.
// Each support point is pinned either to +-1 or to a neighbour's value +- the gap.
double bl_vertex_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  std::vector<std::pair<double, double>> pts;
  for (const Atom& a : mu.atoms()) pts.push_back({a.point(0), a.weight});
  for (const Atom& a : nu.atoms()) pts.push_back({a.point(0), -a.weight});
  std::sort(pts.begin(), pts.end());
  std::vector<double> x, w;
  for (const auto& [px, pw] : pts) {
    if (!x.empty() && std::abs(x.back() - px) < 1e-12) {
      w.back() += pw;
    } else {
      x.push_back(px);
      w.push_back(pw);
    }
  }
  const std::size_t n = x.size();
  if (n == 0) return 0.0;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 6;
  double best = 0.0;
  std::vector<int> type(n);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      type[i] = static_cast<int>(c % 6);
      c /= 6;
    }
    std::vector<double> f(n, 0.0);
    std::vector<int> state(n, 0);
    bool ok = true;
    std::function<double(std::size_t)> resolve = [&](std::size_t i) -> double {
      if (state[i] == 2) return f[i];
      if (state[i] == 1) {
        ok = false;
        return 0.0;
      }
      state[i] = 1;
      double v = 0.0;
      switch (type[i]) {
        case 0: v = 1.0; break;
        case 1: v = -1.0; break;
        case 2: case 3:
          if (i == 0) { ok = false; break; }
          v = resolve(i - 1) + (type[i] == 2 ? 1.0 : -1.0) * (x[i] - x[i - 1]);
          break;
        default:
          if (i + 1 == n) { ok = false; break; }
          v = resolve(i + 1) + (type[i] == 4 ? 1.0 : -1.0) * (x[i + 1] - x[i]);
      }
      state[i] = 2;
      f[i] = v;
      return v;
    };
    for (std::size_t i = 0; i < n && ok; ++i) resolve(i);
    if (!ok) continue;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (std::abs(f[i]) > 1.0 + 1e-12) ok = false;
      if (i > 0 && std::abs(f[i] - f[i - 1]) > x[i] - x[i - 1] + 1e-12) ok = false;
    }
    if (!ok) continue;
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) value += f[i] * w[i];
    best = std::max(best, std::abs(value));
  }
  return best;
}

DiscreteMeasure random_line_measure(std::mt19937_64& rng, int atoms) {
  std::uniform_real_distribution<double> pos(-3.0, 3.0), wt(0.1, 1.0);
  std::vector<Atom> a;
  for (int i = 0; i < atoms; ++i) a.push_back({Vec::Constant(1, pos(rng)), wt(rng)});
  return DiscreteMeasure(1, std::move(a));
}

}  // namespace

TEST_CASE("integrate against point masses") {
  CHECK(integrate(DiscreteMeasure::dirac(0.0), TestFunction::capped_norm()).real() == doctest::Approx(0.0));
  CHECK(integrate(DiscreteMeasure::dirac(0.0, 2.0), TestFunction::constant(1.0)).real() == doctest::Approx(2.0));
  const DiscreteMeasure sym = DiscreteMeasure::dirac(-1.0, 0.5) + DiscreteMeasure::dirac(1.0, 0.5);
  const auto square = TestFunction::general("x^2", 1, [](const Vec& x) { return cplx(x(0) * x(0), 0.0); });
  CHECK(integrate(sym, square).real() == doctest::Approx(1.0));
}

TEST_CASE("characteristic function of discrete measures") {
  CHECK(std::abs(cf_eval(DiscreteMeasure::dirac(0.0), 7.3) - cplx(1.0, 0.0)) < 1e-15);
  const DiscreteMeasure sym = DiscreteMeasure::dirac(-1.0, 0.5) + DiscreteMeasure::dirac(1.0, 0.5);
  CHECK(std::abs(cf_eval(sym, std::numbers::pi) - cplx(-1.0, 0.0)) < 1e-14);
  CHECK(std::abs(cf_eval(DiscreteMeasure::dirac(0.0, 2.0), 3.0) - cplx(2.0, 0.0)) < 1e-15);
}

TEST_CASE("canonicalize merges coincident atoms and drops zero weights") {
  DiscreteMeasure m(1, {{Vec::Constant(1, 0.5), 1.0}, {Vec::Constant(1, 0.5), 2.0}, {Vec::Constant(1, 1.0), 0.0}});
  const DiscreteMeasure c = m.canonicalize();
  REQUIRE(c.size() == 1);
  CHECK(c.atoms()[0].weight == doctest::Approx(3.0));
}

TEST_CASE("negative weights are rejected") {
  CHECK_THROWS_AS(DiscreteMeasure(1, {{Vec::Constant(1, 0.0), -1.0}}), Error);
}

TEST_CASE("convolution of two-point laws") {
  const DiscreteMeasure coin = DiscreteMeasure::dirac(0.0, 0.5) + DiscreteMeasure::dirac(1.0, 0.5);
  const DiscreteMeasure two = coin.convolve(coin).canonicalize();
  REQUIRE(two.size() == 3);
  CHECK(two.atoms()[1].point(0) == doctest::Approx(1.0));
  CHECK(two.atoms()[1].weight == doctest::Approx(0.5));
}

TEST_CASE("distances vanish on identical measures") {
  const DiscreteMeasure mu = DiscreteMeasure::dirac(-0.4, 0.3) + DiscreteMeasure::dirac(1.2, 0.7);
  for (MetricKind k : {MetricKind::Levy1D, MetricKind::Prokhorov, MetricKind::BoundedLipschitz})
    CHECK(distance(mu, mu, k) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("Prokhorov examples") {
  CHECK(distance(DiscreteMeasure::dirac(0.0), DiscreteMeasure::dirac(0.3), MetricKind::Prokhorov) ==
        doctest::Approx(0.3).epsilon(1e-5));
  const DiscreteMeasure half = DiscreteMeasure::dirac(0.0, 0.5) + DiscreteMeasure::dirac(1.0, 0.5);
  CHECK(distance(DiscreteMeasure::dirac(0.0), half, MetricKind::Prokhorov) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(distance(DiscreteMeasure::dirac(0.0), DiscreteMeasure::dirac(3.0), MetricKind::Prokhorov) ==
        doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("Levy metric between point masses is min(|a|, 1)") {
  for (double a : {0.1, 0.45, 0.9, 2.5})
    CHECK(distance(DiscreteMeasure::dirac(0.0), DiscreteMeasure::dirac(a), MetricKind::Levy1D) ==
          doctest::Approx(std::min(a, 1.0)).epsilon(1e-6));
}

TEST_CASE("Levy metric requires probability measures on the line") {
  CHECK_THROWS_AS(distance(DiscreteMeasure::dirac(0.0, 2.0), DiscreteMeasure::dirac(0.0), MetricKind::Levy1D), Error);
}

TEST_CASE("bounded-Lipschitz distance matches the LP vertex oracle") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> count(1, 3);
  for (int trial = 0; trial < 60; ++trial) {
    const DiscreteMeasure mu = random_line_measure(rng, count(rng));
    const DiscreteMeasure nu = random_line_measure(rng, count(rng));
    const double fast = distance(mu, nu, MetricKind::BoundedLipschitz);
    const double oracle = bl_vertex_oracle(mu, nu);
    CHECK(fast == doctest::Approx(oracle).epsilon(1e-9));
  }
  CHECK(distance(DiscreteMeasure::dirac(0.0), DiscreteMeasure::dirac(5.0), MetricKind::BoundedLipschitz) ==
        doctest::Approx(2.0));
}

TEST_CASE("metric ordering between Levy and Prokhorov") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const DiscreteMeasure mu = random_line_measure(rng, 3).normalized();
    const DiscreteMeasure nu = random_line_measure(rng, 3).normalized();
    CHECK(distance(mu, nu, MetricKind::Levy1D) <= distance(mu, nu, MetricKind::Prokhorov) + 1e-5);
  }
}

TEST_CASE("test-function structure checks") {
  const auto square_capped = TestFunction::quadratic_vanishing(
      "x^2 min 1", 1, [](const Vec& x) { return cplx(std::min(x(0) * x(0), 1.0), 0.0); }, 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(verify_structure(square_capped, 1), Error);
  CHECK_NOTHROW(verify_structure(TestFunction::capped_norm(), 3));
}

TEST_CASE("measure JSON round trip") {
  const DiscreteMeasure mu = DiscreteMeasure::dirac(-0.25, 0.75) + DiscreteMeasure::dirac(2.0, 1.5);
  nlohmann::json j = mu;
  CHECK(approx_equal(measure_from_json(j), mu));
}
