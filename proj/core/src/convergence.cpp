#include "luwc/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

#include "luwc/error.hpp"

namespace luwc {

Exhaustion::Exhaustion(double horizon, int levels) : horizon_(horizon), levels_(levels) {
  require(horizon > 0.0 && levels >= 1, ErrorCode::InvalidArgument, "exhaustion needs T > 0 and J >= 1");
}

double Exhaustion::upper(int j) const {
  require(j >= 1 && j <= levels_, ErrorCode::InvalidArgument, "exhaustion level out of range");
  return horizon_ * static_cast<double>(j) / static_cast<double>(levels_);
}

namespace {

bool all_probability(const std::vector<DiscreteMeasure>& ms, double tol = 1e-9) {
  return std::all_of(ms.begin(), ms.end(), [tol](const DiscreteMeasure& m) { return m.is_probability(tol); });
}

void check_same_grid(const MeasurePath& a, const MeasurePath& b) {
  require(a.grid().size() == b.grid().size(), ErrorCode::GridMismatch, "paths have different grid sizes");
  for (std::size_t k = 0; k < a.grid().size(); ++k)
    require(std::abs(a.grid()[k] - b.grid()[k]) <= 1e-12, ErrorCode::GridMismatch, "paths have different grids");
  require(a.dim() == b.dim(), ErrorCode::DimensionMismatch, "paths have different dimensions");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

}  // namespace

MeasurePath::MeasurePath(std::vector<double> grid, std::vector<DiscreteMeasure> measures)
    : grid_(std::move(grid)), measures_(std::move(measures)) {
  require(!grid_.empty() && grid_.size() == measures_.size(), ErrorCode::InvalidArgument,
          "one measure per grid time");
  for (std::size_t k = 1; k < grid_.size(); ++k)
    require(grid_[k] > grid_[k - 1], ErrorCode::InvalidArgument, "path grid must be strictly increasing");
  for (const DiscreteMeasure& m : measures_)
    require(m.dim() == measures_.front().dim(), ErrorCode::DimensionMismatch, "path measures differ in dimension");
}

MeasurePath::MeasurePath(std::vector<double> grid, std::vector<DiscreteMeasure> measures, Modulus modulus,
                         double slack)
    : MeasurePath(std::move(grid), std::move(measures)) {
  require(static_cast<bool>(modulus), ErrorCode::InvalidArgument, "empty modulus");
  modulus_ = std::move(modulus);
  const bool levy = dim() == 1 && all_probability(measures_);
  for (std::size_t k = 1; k < grid_.size(); ++k) {
    const DiscreteMeasure& a = measures_[k - 1];
    const DiscreteMeasure& b = measures_[k];
    if (!levy)
      require(a.size() + b.size() <= 400, ErrorCode::LimitExceeded,
              "too many atoms to verify the modulus with the bounded-Lipschitz metric");
    const double d = distance(a, b, levy ? MetricKind::Levy1D : MetricKind::BoundedLipschitz, 1e-9);
    require(d <= modulus_(grid_[k] - grid_[k - 1]) + slack, ErrorCode::Structure,
            "declared continuity modulus violated between t=" + fmt(grid_[k - 1]) + " and t=" + fmt(grid_[k]));
  }
}

double MeasurePath::discretization_gap(const Interval& k) const {
  double gap = 0.0;
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (grid_[i] < k.lo || grid_[i - 1] > k.hi) continue;
    gap = std::max(gap, grid_[i] - grid_[i - 1]);
  }
  return gap == 0.0 ? 0.0 : modulus(gap);
}

bool MeasurePath::is_probability(double tol) const { return all_probability(measures_, tol); }

MeasurePath normalize_path(const MeasurePath& path) {
  std::vector<DiscreteMeasure> out;
  out.reserve(path.size());
  const Vec origin = Vec::Zero(path.dim());
  for (const DiscreteMeasure& m : path.measures()) {
    out.push_back((m + DiscreteMeasure::dirac(origin)).scaled(1.0 / (m.total_mass() + 1.0)));
  }
  return MeasurePath(path.grid(), std::move(out));
}

const char* to_string(Verdict v) noexcept {
  return v == Verdict::Converging ? "converging" : "not converging";
}

Verdict judge(std::span<const double> deviations, const VerdictRule& rule) {
  if (deviations.empty()) return Verdict::Converging;
  const std::size_t m = deviations.size();
  std::size_t start = static_cast<std::size_t>(std::floor(static_cast<double>(m) * (1.0 - rule.tail_fraction)));
  if (m >= 2) start = std::min(start, m - 2);
  start = std::min(start, m - 1);
  for (std::size_t i = start + 1; i < m; ++i) {
    const double allowed = deviations[i - 1] + rule.slack + 1e-9 * std::abs(deviations[i - 1]);
    if (deviations[i] > allowed) return Verdict::NotConverging;
  }
  return deviations.back() < rule.tol ? Verdict::Converging : Verdict::NotConverging;
}

double rho_star(const MeasurePath& p, const MeasurePath& q, const Exhaustion& ex, MetricKind kind,
                const DistanceOptions& options) {
  check_same_grid(p, q);
  std::vector<double> d(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) d[k] = std::min(distance(p.at(k), q.at(k), kind, options), 1.0);
  double total = 0.0;
  for (int j = 1; j <= ex.levels(); ++j) {
    const double hi = ex.upper(j);
    double sup = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k)
      if (p.grid()[k] <= hi + 1e-12) sup = std::max(sup, d[k]);
    total += std::ldexp(sup, -j);
  }
  return total;
}

namespace {

CriterionSeries finish(std::string name, std::span<const IndexedPath> family, std::vector<double> dev,
                       const VerdictRule& rule, std::vector<DetailRow> details = {}) {
  CriterionSeries s;
  s.name = std::move(name);
  for (const IndexedPath& ip : family) s.ns.push_back(ip.n);
  s.deviations = std::move(dev);
  s.verdict = judge(s.deviations, rule);
  s.details = std::move(details);
  return s;
}

void check_family(std::span<const IndexedPath> family, const MeasurePath& limit) {
  require(!family.empty(), ErrorCode::InvalidArgument, "empty family");
  for (const IndexedPath& ip : family) check_same_grid(ip.path, limit);
}

}  // namespace

CriterionSeries check_luwc(std::span<const IndexedPath> family, const MeasurePath& limit,
                           std::span<const TestFunction> tests, const Interval& k, const VerdictRule& rule) {
  require(!tests.empty(), ErrorCode::InvalidArgument, "empty test suite");
  check_family(family, limit);
  std::vector<std::vector<cplx>> base(limit.size());
  for (std::size_t i = 0; i < limit.size(); ++i) {
    if (!k.contains(limit.grid()[i])) continue;
    for (const TestFunction& f : tests) base[i].push_back(integrate(limit.at(i), f));
  }
  std::vector<double> dev;
  for (const IndexedPath& ip : family) {
    double worst = 0.0;
    for (std::size_t i = 0; i < limit.size(); ++i) {
      if (!k.contains(limit.grid()[i])) continue;
      for (std::size_t f = 0; f < tests.size(); ++f)
        worst = std::max(worst, std::abs(integrate(ip.path.at(i), tests[f]) - base[i][f]));
    }
    dev.push_back(worst);
  }
  return finish("weak_lu", family, std::move(dev), rule);
}

CriterionSeries check_cf_lu(std::span<const IndexedPath> family, const MeasurePath& limit,
                            std::span<const Vec> xi_grid, const Interval& k, const VerdictRule& rule) {
  require(!xi_grid.empty(), ErrorCode::InvalidArgument, "empty frequency grid");
  check_family(family, limit);
  std::vector<std::vector<cplx>> base(limit.size());
  for (std::size_t i = 0; i < limit.size(); ++i) {
    if (!k.contains(limit.grid()[i])) continue;
    for (const Vec& xi : xi_grid) base[i].push_back(cf_eval(limit.at(i), xi));
  }
  std::vector<double> dev;
  for (const IndexedPath& ip : family) {
    double worst = 0.0;
    for (std::size_t i = 0; i < limit.size(); ++i) {
      if (!k.contains(limit.grid()[i])) continue;
      for (std::size_t x = 0; x < xi_grid.size(); ++x)
        worst = std::max(worst, std::abs(cf_eval(ip.path.at(i), xi_grid[x]) - base[i][x]));
    }
    dev.push_back(worst);
  }
  return finish("cf_lu", family, std::move(dev), rule);
}

CriterionSeries check_cf_ptwise_lu(std::span<const IndexedPath> family, const MeasurePath& limit,
                                   std::span<const Vec> xi_list, const Interval& k, const VerdictRule& rule) {
  require(!xi_list.empty(), ErrorCode::InvalidArgument, "empty frequency list");
  check_family(family, limit);
  // per_xi[x][n]
  std::vector<std::vector<double>> per_xi(xi_list.size(), std::vector<double>(family.size(), 0.0));
  for (std::size_t x = 0; x < xi_list.size(); ++x) {
    std::vector<cplx> base(limit.size());
    for (std::size_t i = 0; i < limit.size(); ++i)
      if (k.contains(limit.grid()[i])) base[i] = cf_eval(limit.at(i), xi_list[x]);
    for (std::size_t n = 0; n < family.size(); ++n) {
      double worst = 0.0;
      for (std::size_t i = 0; i < limit.size(); ++i)
        if (k.contains(limit.grid()[i]))
          worst = std::max(worst, std::abs(cf_eval(family[n].path.at(i), xi_list[x]) - base[i]));
      per_xi[x][n] = worst;
    }
  }
  std::vector<double> dev(family.size(), 0.0);
  std::vector<DetailRow> details;
  bool all_converge = true;
  for (std::size_t x = 0; x < xi_list.size(); ++x) {
    if (judge(per_xi[x], rule) == Verdict::NotConverging) all_converge = false;
    for (std::size_t n = 0; n < family.size(); ++n) {
      dev[n] = std::max(dev[n], per_xi[x][n]);
      details.push_back({family[n].n, xi_list[x](0), per_xi[x][n]});
    }
  }
  CriterionSeries s = finish("cf_pointwise_lu", family, std::move(dev), rule, std::move(details));
  s.verdict = all_converge ? Verdict::Converging : Verdict::NotConverging;
  return s;
}

CriterionSeries check_fixed_time(std::span<const IndexedPath> family, const MeasurePath& limit,
                                 std::span<const TestFunction> tests, double t, const VerdictRule& rule) {
  require(!tests.empty(), ErrorCode::InvalidArgument, "empty test suite");
  check_family(family, limit);
  std::size_t idx = limit.size();
  for (std::size_t i = 0; i < limit.size(); ++i)
    if (std::abs(limit.grid()[i] - t) <= 1e-9) idx = i;
  require(idx < limit.size(), ErrorCode::GridMismatch, "fixed time is not a grid time");
  std::vector<double> dev;
  for (const IndexedPath& ip : family) {
    double worst = 0.0;
    for (const TestFunction& f : tests)
      worst = std::max(worst, std::abs(integrate(ip.path.at(idx), f) - integrate(limit.at(idx), f)));
    dev.push_back(worst);
  }
  std::vector<DetailRow> details;
  for (std::size_t n = 0; n < family.size(); ++n) details.push_back({family[n].n, t, dev[n]});
  return finish("weak_fixed_t", family, std::move(dev), rule, std::move(details));
}

CriterionSeries rho_star_series(std::span<const IndexedPath> family, const MeasurePath& limit,
                                const Exhaustion& ex, MetricKind kind, const VerdictRule& rule) {
  check_family(family, limit);
  std::vector<double> dev;
  for (const IndexedPath& ip : family) dev.push_back(rho_star(ip.path, limit, ex, kind));
  return finish("rho_star", family, std::move(dev), rule);
}

std::vector<TestFunction> default_test_suite(int dim) {
  std::vector<TestFunction> suite;
  for (int j = 0; j < dim; ++j) {
    for (int c = -3; c <= 3; ++c) suite.push_back(TestFunction::axis_tent(j, static_cast<double>(c), 1.0));
    if (dim == 1) {
      suite.push_back(TestFunction::capped_norm());
    } else {
      suite.push_back(TestFunction::general(
          "min(|x_" + std::to_string(j) + "|,1)", dim,
          [j](const Vec& x) { return cplx{std::min(std::abs(x(j)), 1.0), 0.0}; }, 1.0, 1.0));
    }
    for (double s : {0.25, 0.5, 0.75, 1.0}) {
      const Vec xi = s * unit_vector(dim, j);
      suite.push_back(TestFunction::cos_at(xi));
      suite.push_back(TestFunction::sin_at(xi));
    }
  }
  return suite;
}

std::vector<Vec> frequency_grid(int dim, double lo, double hi, std::size_t count) {
  std::vector<Vec> out;
  for (int j = 0; j < dim; ++j)
    for (double s : linspace(lo, hi, count)) out.push_back(s * unit_vector(dim, j));
  return out;
}

std::vector<const CriterionSeries*> ConvergenceReport::all_series() const {
  std::vector<const CriterionSeries*> out{&weak, &cf_uniform, &cf_pointwise};
  if (rho) out.push_back(&*rho);
  if (fixed_time) out.push_back(&*fixed_time);
  return out;
}

namespace {

// First index from which every deviation stays below tol; size() when none.
std::size_t settles_at(const std::vector<double>& dev, double tol) {
  std::size_t idx = dev.size();
  for (std::size_t i = dev.size(); i-- > 0;) {
    if (dev[i] < tol) idx = i;
    else break;
  }
  return idx;
}

}  // namespace

ConvergenceReport equivalence_report(std::span<const IndexedPath> family, const MeasurePath& limit,
                                     const EquivalenceConfig& config) {
  check_family(family, limit);
  ConvergenceReport report;
  for (const IndexedPath& ip : family) report.ns.push_back(ip.n);

  bool probability = limit.is_probability();
  for (const IndexedPath& ip : family) probability = probability && ip.path.is_probability();
  std::vector<IndexedPath> normalized;
  const MeasurePath* lim = &limit;
  std::optional<MeasurePath> norm_limit;
  std::span<const IndexedPath> fam = family;
  if (!probability) {
    report.normalized = true;
    norm_limit = normalize_path(limit);
    lim = &*norm_limit;
    for (const IndexedPath& ip : family) normalized.push_back({ip.n, normalize_path(ip.path)});
    fam = normalized;
  }

  const int d = limit.dim();
  const std::vector<TestFunction> tests = config.tests.empty() ? default_test_suite(d) : config.tests;
  const std::vector<Vec> xi_grid = config.xi_grid.empty() ? frequency_grid(d, -5.0, 5.0, 41) : config.xi_grid;
  std::vector<Vec> xi_list = config.xi_list;
  if (xi_list.empty())
    for (int j = 0; j < d; ++j)
      for (double s : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) xi_list.push_back(s * unit_vector(d, j));
  const Interval k = config.window.value_or(Interval{limit.grid().front(), limit.grid().back()});

  report.weak = check_luwc(fam, *lim, tests, k, config.rule);
  report.cf_uniform = check_cf_lu(fam, *lim, xi_grid, k, config.rule);
  report.cf_pointwise = check_cf_ptwise_lu(fam, *lim, xi_list, k, config.rule);
  report.agreement = report.weak.verdict == report.cf_uniform.verdict &&
                     report.weak.verdict == report.cf_pointwise.verdict;
  if (config.metric) {
    const Exhaustion ex(k.hi, config.exhaustion_levels);
    report.rho = rho_star_series(fam, *lim, ex, *config.metric, config.rule);
    const std::size_t a = settles_at(report.rho->deviations, config.rule.tol);
    const std::size_t b = settles_at(report.weak.deviations, config.rule.tol);
    const std::size_t none = report.weak.deviations.size();
    report.rho_consistent = (a == none && b == none) ||
                            (a != none && b != none && (a > b ? a - b : b - a) <= 1);
  }
  if (config.fixed_time) report.fixed_time = check_fixed_time(fam, *lim, tests, *config.fixed_time, config.rule);
  for (const IndexedPath& ip : fam) report.discretization_gap = std::max(report.discretization_gap, ip.path.discretization_gap(k));
  report.discretization_gap = std::max(report.discretization_gap, lim->discretization_gap(k));
  return report;
}

void to_json(nlohmann::json& j, const CriterionSeries& s) {
  nlohmann::json details = nlohmann::json::array();
  for (const DetailRow& r : s.details) details.push_back({{"n", r.n}, {"at", r.at}, {"deviation", r.deviation}});
  j = nlohmann::json{{"name", s.name}, {"n", s.ns}, {"deviation", s.deviations},
                     {"verdict", to_string(s.verdict)}, {"details", details}};
}

void to_json(nlohmann::json& j, const ConvergenceReport& r) {
  nlohmann::json series = nlohmann::json::array();
  for (const CriterionSeries* s : r.all_series()) series.push_back(*s);
  j = nlohmann::json{{"n", r.ns}, {"criteria", series}, {"agreement", r.agreement},
                     {"normalized", r.normalized}, {"discretization_gap", r.discretization_gap}};
  if (r.rho_consistent) j["rho_consistent"] = *r.rho_consistent;
}

std::string to_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "n,criterion,deviation,verdict\n";
  for (const CriterionSeries* s : r.all_series())
    for (std::size_t i = 0; i < s->ns.size(); ++i)
      os << s->ns[i] << ',' << s->name << ',' << fmt(s->deviations[i]) << ',' << to_string(s->verdict) << '\n';
  return os.str();
}

TailBound tail_bound(const DiscreteMeasure& mu, double r) {
  require(mu.dim() == 1, ErrorCode::DimensionMismatch, "tail bound is one-dimensional");
  require(mu.is_probability(1e-9), ErrorCode::NotProbability, "tail bound needs a probability measure");
  require(r > 0.0, ErrorCode::InvalidArgument, "r must be positive");
  TailBound out;
  const double edge = 2.0 / r;
  for (const Atom& a : mu.atoms())
    if (std::abs(a.point(0)) >= edge) out.lhs += a.weight;
  const auto re = integrate_adaptive([&](double xi) { return 1.0 - cf_eval(mu, xi).real(); }, -r, r, 1e-13, 1e-13);
  const auto im = integrate_adaptive([&](double xi) { return -cf_eval(mu, xi).imag(); }, -r, r, 1e-13, 1e-13);
  out.rhs = re.value / r;
  out.rhs_imag = im.value / r;
  require(std::abs(out.rhs_imag) < 1e-9, ErrorCode::Structure, "imaginary part of the tail integral does not cancel");
  return out;
}

bool TightnessReport::consistent() const {
  for (std::size_t n = 0; n < ns.size(); ++n)
    for (std::size_t r = 0; r < r_grid.size(); ++r) {
      if (i_sup[r] < -1e-12 || j_sup[n][r] < -1e-12 || box_mass_bound[n][r] < -1e-12) return false;
      if (box_mass_bound[n][r] > i_sup[r] + j_sup[n][r] + 1e-12) return false;
    }
  return true;
}

TightnessReport tightness_certificate(std::span<const IndexedPath> family, const MeasurePath& limit,
                                      const Interval& k, std::span<const double> r_grid) {
  check_family(family, limit);
  require(limit.is_probability(), ErrorCode::NotProbability, "tightness certificate needs probability paths");
  for (const IndexedPath& ip : family)
    require(ip.path.is_probability(), ErrorCode::NotProbability, "tightness certificate needs probability paths");
  const int d = limit.dim();
  TightnessReport rep;
  rep.r_grid.assign(r_grid.begin(), r_grid.end());
  for (const IndexedPath& ip : family) rep.ns.push_back(ip.n);
  rep.i_sup.assign(r_grid.size(), 0.0);
  rep.j_sup.assign(family.size(), std::vector<double>(r_grid.size(), 0.0));
  rep.box_mass_bound.assign(family.size(), std::vector<double>(r_grid.size(), 0.0));

  auto marginal_integral = [d](const DiscreteMeasure& m, double r, bool one_minus) {
    double total = 0.0;
    for (int j = 0; j < d; ++j) {
      const Vec e = unit_vector(d, j);
      const auto q = integrate_adaptive(
          [&](double s) {
            const double re = cf_eval(m, Vec(s * e)).real();
            return one_minus ? 1.0 - re : re;
          },
          -r, r, 1e-13, 1e-12);
      total += q.value;
    }
    return total / r;
  };

  for (std::size_t ri = 0; ri < r_grid.size(); ++ri) {
    const double r = r_grid[ri];
    require(r > 0.0, ErrorCode::InvalidArgument, "r must be positive");
    for (std::size_t i = 0; i < limit.size(); ++i) {
      if (!k.contains(limit.grid()[i])) continue;
      const double base = marginal_integral(limit.at(i), r, false);
      rep.i_sup[ri] = std::max(rep.i_sup[ri], static_cast<double>(d) * 2.0 - base);
      for (std::size_t n = 0; n < family.size(); ++n) {
        const DiscreteMeasure& m = family[n].path.at(i);
        const double jt = marginal_integral(m, r, false) - base;
        rep.j_sup[n][ri] = std::max(rep.j_sup[n][ri], std::abs(jt));
        rep.box_mass_bound[n][ri] = std::max(rep.box_mass_bound[n][ri], m.mass_outside_box(2.0 / r));
      }
    }
  }
  return rep;
}

}  // namespace luwc
