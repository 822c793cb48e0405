#include "luwc/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "luwc/error.hpp"

namespace luwc {

std::vector<TestFunction> csharp_suite(int dim) {
  (void)dim;
  std::vector<TestFunction> suite;
  for (double delta : {0.05, 0.1, 0.2, 0.5}) suite.push_back(TestFunction::radial_cutoff(delta));
  return suite;
}

std::vector<TestFunction> csharp_sharp_suite(int dim) {
  std::vector<TestFunction> suite;
  const TestFunction h2 = TestFunction::quadratic_vanishing(
      "|h|^2*min(|x|,1)", 0,
      [](const Vec& x) {
        const double hn = truncate(x).norm();
        return cplx{hn * hn * std::min(x.norm(), 1.0), 0.0};
      },
      1.0, 1.0, 1.0);
  suite.push_back(h2);
  for (int j = 0; j < dim; ++j) {
    for (double s : {0.5, 1.0, 2.0}) {
      const Vec xi = s * unit_vector(dim, j);
      suite.push_back(TestFunction::quadratic_vanishing(
          "|F_xi|(" + std::to_string(s) + "e" + std::to_string(j) + ")", dim,
          [xi](const Vec& x) { return cplx{std::abs(modified_integrand(xi, x)), 0.0}; },
          2.0 + s + 0.5 * s * s, 1.0, s * s * s / 6.0));
    }
  }
  if (dim == 1) {
    suite.push_back(TestFunction::quadratic_vanishing(
        "x^3/(1+|x|^3)", 1,
        [](const Vec& x) {
          const double a = x(0);
          return cplx{a * a * a / (1.0 + std::abs(a * a * a)), 0.0};
        },
        1.0, 1.0, 1.0));
  }
  for (double delta : {0.1, 0.5}) {
    suite.push_back(TestFunction::with_cutoff(h2, delta));
    for (int j = 0; j < dim; ++j) suite.push_back(TestFunction::with_cutoff(TestFunction::axis_tent(j, 1.0, 1.0), delta));
  }
  return suite;
}

namespace {

CriterionResult make_row(std::string name, std::span<const long> ns, std::vector<double> dev,
                         const VerdictRule& rule, std::vector<DetailRow> details = {}) {
  CriterionResult r;
  r.name = std::move(name);
  r.ns.assign(ns.begin(), ns.end());
  r.deviations = std::move(dev);
  r.verdict = judge(r.deviations, rule);
  r.details = std::move(details);
  return r;
}

double suite_deviation(const DiscreteMeasure& a, const DiscreteMeasure& b, std::span<const TestFunction> suite) {
  double worst = 0.0;
  for (const TestFunction& f : suite) worst = std::max(worst, std::abs(integrate(a, f) - integrate(b, f)));
  return worst;
}

std::vector<long> indices_of(std::span<const IndexedSystem> family) {
  std::vector<long> ns;
  for (const IndexedSystem& s : family) ns.push_back(s.n);
  return ns;
}

void check_horizons(std::span<const IndexedSystem> family, const TripletSystem& limit) {
  require(!family.empty(), ErrorCode::InvalidArgument, "empty family");
  for (const IndexedSystem& s : family) {
    require(std::abs(s.system.horizon() - limit.horizon()) <= 1e-12, ErrorCode::GridMismatch, "horizon mismatch");
    require(s.system.dim() == limit.dim(), ErrorCode::DimensionMismatch, "family dimension differs from the limit");
  }
}

std::vector<double> union_grid(const TripletSystem& a, const TripletSystem& b) {
  return merge_grids(a.grid(), b.grid());
}

}  // namespace

WcidResult check_wcID(std::span<const Triplet> triplets, std::span<const long> ns, const Triplet& limit,
                      std::span<const TestFunction> csharp, std::span<const TestFunction> csharp_sharp,
                      const VerdictRule& rule) {
  require(!csharp.empty() && !csharp_sharp.empty(), ErrorCode::InvalidArgument, "test suites must be nonempty");
  require(triplets.size() == ns.size() && !triplets.empty(), ErrorCode::InvalidArgument, "one index per triplet");
  const int d = limit.dim();
  for (const TestFunction& f : csharp) {
    require(f.is_csharp(), ErrorCode::Structure, f.name() + " does not vanish near the origin");
    verify_structure(f, d);
  }
  for (const TestFunction& f : csharp_sharp) {
    require(f.is_csharp_sharp(), ErrorCode::Structure, f.name() + " carries no vanishing-rate declaration");
    verify_structure(f, d);
  }
  const Mat lim_tilde = modified_second(limit);
  std::vector<double> beta, c, nu, nu2;
  for (const Triplet& tr : triplets) {
    require(tr.dim() == d, ErrorCode::DimensionMismatch, "triplet dimension differs from the limit");
    beta.push_back((tr.gamma() - limit.gamma()).norm());
    c.push_back((modified_second(tr) - lim_tilde).norm());
    nu.push_back(suite_deviation(tr.levy().measure(), limit.levy().measure(), csharp));
    nu2.push_back(suite_deviation(tr.levy().measure(), limit.levy().measure(), csharp_sharp));
  }
  WcidResult out;
  const double allowance = 2.0 * rule.tol * (lim_tilde.trace() + 1.0);
  for (std::size_t i = 0; i < triplets.size(); ++i)
    out.shadow.push_back(c[i] >= rule.tol || nu2[i] <= nu[i] + allowance);
  out.rows.push_back(make_row("wcID_beta", ns, std::move(beta), rule));
  out.rows.push_back(make_row("wcID_C", ns, std::move(c), rule));
  out.rows.push_back(make_row("wcID_nu", ns, std::move(nu), rule));
  if (out.rows[1].verdict == Verdict::Converging) out.rows.push_back(make_row("wcID_nu2", ns, std::move(nu2), rule));
  return out;
}

FunctionalResult check_js_functional(std::span<const IndexedSystem> family, const TripletSystem& limit,
                                     std::span<const double> times, std::span<const TestFunction> csharp,
                                     const VerdictRule& rule) {
  check_horizons(family, limit);
  require(!times.empty() && !csharp.empty(), ErrorCode::InvalidArgument, "times and suite must be nonempty");
  for (const TestFunction& f : csharp) verify_structure(f, limit.dim());
  const std::vector<long> ns = indices_of(family);
  std::vector<double> beta, c, nu;
  std::vector<DetailRow> c_rows, nu_rows;
  for (const IndexedSystem& member : family) {
    const TripletSystem& sys = member.system;
    double b = 0.0;
    for (double t : union_grid(sys, limit)) b = std::max(b, (sys.gamma_at(t) - limit.gamma_at(t)).norm());
    beta.push_back(b);
    double cw = 0.0, nw = 0.0;
    for (double t : times) {
      require(t >= 0.0 && t <= limit.horizon() + 1e-12, ErrorCode::InvalidArgument, "time outside the horizon");
      const double ct = (sys.modified_second_at(t) - limit.modified_second_at(t)).norm();
      const double nt = suite_deviation(sys.triplet_at(t).levy().measure(), limit.triplet_at(t).levy().measure(), csharp);
      c_rows.push_back({member.n, t, ct});
      nu_rows.push_back({member.n, t, nt});
      cw = std::max(cw, ct);
      nw = std::max(nw, nt);
    }
    c.push_back(cw);
    nu.push_back(nw);
  }
  FunctionalResult out;
  out.rows.push_back(make_row("beta", ns, std::move(beta), rule));
  out.rows.push_back(make_row("C", ns, std::move(c), rule, std::move(c_rows)));
  out.rows.push_back(make_row("nu", ns, std::move(nu), rule, std::move(nu_rows)));
  const bool ok = std::all_of(out.rows.begin(), out.rows.end(),
                              [](const CriterionResult& r) { return r.verdict == Verdict::Converging; });
  out.verdict = ok ? Verdict::Converging : Verdict::NotConverging;
  return out;
}

namespace {

void require_monotone(std::span<const double> f, const char* what) {
  double scale = 1.0;
  for (double v : f) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 1; i < f.size(); ++i)
    require(f[i] >= f[i - 1] - 1e-12 * scale, ErrorCode::Monotonicity, std::string(what) + " is not non-decreasing");
}

// Largest |f(s) - f(t)| over grid pairs with |s - t| <= h, for non-decreasing f.
double empirical_modulus(std::span<const double> f, std::span<const double> grid, double h) {
  double worst = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    j = std::max(j, i);
    while (j + 1 < grid.size() && grid[j + 1] - grid[i] <= h * (1.0 + 1e-12)) ++j;
    worst = std::max(worst, f[j] - f[i]);
  }
  return worst;
}

}  // namespace

PolyaResult polya_lift(std::span<const std::vector<double>> fns, std::span<const double> limit,
                       std::span<const double> grid, const PolyaOptions& options) {
  require(grid.size() >= 2 && limit.size() == grid.size(), ErrorCode::InvalidArgument,
          "limit must be sampled on the grid");
  require(options.checkpoint_stride >= 1, ErrorCode::InvalidArgument, "checkpoint stride must be positive");
  require(std::abs(limit[0]) <= 1e-12, ErrorCode::InvalidArgument, "limit must start at 0");
  require_monotone(limit, "limit function");

  double range = limit.back() - limit.front();
  double largest_step = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) largest_step = std::max(largest_step, limit[i] - limit[i - 1]);
  require(range <= 0.0 || largest_step <= options.jump_threshold * range, ErrorCode::Structure,
          "limit modulus violation: the limit jumps at grid scale");

  std::vector<std::size_t> checkpoints;
  for (std::size_t i = 0; i < grid.size(); i += options.checkpoint_stride) checkpoints.push_back(i);
  if (checkpoints.back() != grid.size() - 1) checkpoints.push_back(grid.size() - 1);

  PolyaResult out;
  for (std::size_t c = 1; c < checkpoints.size(); ++c)
    out.checkpoint_mesh = std::max(out.checkpoint_mesh, grid[checkpoints[c]] - grid[checkpoints[c - 1]]);
  out.omega_at_mesh = options.modulus ? (*options.modulus)(out.checkpoint_mesh)
                                      : empirical_modulus(limit, grid, out.checkpoint_mesh);

  for (const std::vector<double>& f : fns) {
    require(f.size() == grid.size(), ErrorCode::GridMismatch, "family member not sampled on the grid");
    require(std::abs(f[0]) <= 1e-12, ErrorCode::InvalidArgument, "family member must start at 0");
    require_monotone(f, "family member");
    double pw = 0.0, un = 0.0;
    for (std::size_t i : checkpoints) pw = std::max(pw, std::abs(f[i] - limit[i]));
    for (std::size_t i = 0; i < grid.size(); ++i) un = std::max(un, std::abs(f[i] - limit[i]));
    out.pointwise_dev.push_back(pw);
    out.uniform_dev.push_back(un);
    if (un > pw + out.omega_at_mesh + 1e-12) out.certificate = false;
  }
  return out;
}

PolarizationResult polarize_check(std::span<const std::vector<Mat>> paths, std::span<const long> ns,
                                  std::span<const Mat> limit, std::span<const double> grid,
                                  const VerdictRule& rule, const PolyaOptions& options) {
  require(paths.size() == ns.size() && !paths.empty(), ErrorCode::InvalidArgument, "one index per path");
  require(limit.size() == grid.size(), ErrorCode::GridMismatch, "limit path not on the grid");
  const int d = static_cast<int>(limit.front().rows());
  const std::size_t m = grid.size();

  PolarizationResult out;
  auto forms = [&](std::span<const Mat> path, int j, int k, std::vector<double>& plus, std::vector<double>& minus) {
    plus.resize(m);
    minus.resize(m);
    const Vec a = unit_vector(d, j) + unit_vector(d, k);
    const Vec b = unit_vector(d, j) - unit_vector(d, k);
    for (std::size_t i = 0; i < m; ++i) {
      plus[i] = a.dot(path[i] * a);
      minus[i] = b.dot(path[i] * b);
      const double rebuilt = 0.25 * (plus[i] - minus[i]);
      out.reconstruction_error = std::max(out.reconstruction_error, std::abs(rebuilt - path[i](j, k)));
    }
  };

  std::vector<std::vector<Mat>> rebuilt(paths.size(), std::vector<Mat>(m, Mat::Zero(d, d)));
  std::vector<Mat> rebuilt_limit(m, Mat::Zero(d, d));
  out.entry_dev.assign(paths.size(), std::vector<double>(static_cast<std::size_t>(d * d), 0.0));

  for (int j = 0; j < d; ++j) {
    for (int k = j; k < d; ++k) {
      std::vector<double> lp, lm;
      forms(limit, j, k, lp, lm);
      for (std::size_t i = 0; i < m; ++i) rebuilt_limit[i](j, k) = rebuilt_limit[i](k, j) = 0.25 * (lp[i] - lm[i]);
      std::vector<std::vector<double>> fp(paths.size()), fm(paths.size());
      for (std::size_t n = 0; n < paths.size(); ++n) {
        require(paths[n].size() == m, ErrorCode::GridMismatch, "family path not on the grid");
        forms(paths[n], j, k, fp[n], fm[n]);
        for (std::size_t i = 0; i < m; ++i) rebuilt[n][i](j, k) = rebuilt[n][i](k, j) = 0.25 * (fp[n][i] - fm[n][i]);
      }
      const PolyaResult plus = polya_lift(fp, lp, grid, options);
      const PolyaResult minus = polya_lift(fm, lm, grid, options);
      for (std::size_t n = 0; n < paths.size(); ++n) {
        double dev = 0.0;
        for (std::size_t i = 0; i < m; ++i) dev = std::max(dev, std::abs(rebuilt[n][i](j, k) - rebuilt_limit[i](j, k)));
        out.entry_dev[n][static_cast<std::size_t>(j * d + k)] = dev;
        out.entry_dev[n][static_cast<std::size_t>(k * d + j)] = dev;
        const double bound = 0.25 * (plus.pointwise_dev[n] + plus.omega_at_mesh + minus.pointwise_dev[n] +
                                     minus.omega_at_mesh);
        if (dev > bound + 1e-12) out.certificate = false;
      }
      out.certificate = out.certificate && plus.certificate && minus.certificate;
    }
  }

  std::vector<double> dev;
  for (std::size_t n = 0; n < paths.size(); ++n) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) worst = std::max(worst, (rebuilt[n][i] - rebuilt_limit[i]).norm());
    dev.push_back(worst);
  }
  out.series = make_row("C", ns, std::move(dev), rule);
  return out;
}

PairResult check_pair_criteria(std::span<const IndexedSystem> family, const TripletSystem& limit,
                               std::span<const double> times, std::span<const TestFunction> tests,
                               const VerdictRule& rule) {
  check_horizons(family, limit);
  require(limit.dim() == 1, ErrorCode::DimensionMismatch, "characteristic pairs are one-dimensional");
  require(!times.empty() && !tests.empty(), ErrorCode::InvalidArgument, "times and tests must be nonempty");
  const std::vector<long> ns = indices_of(family);
  std::vector<double> alpha, sigma;
  std::vector<DetailRow> sigma_rows;
  for (const IndexedSystem& member : family) {
    double a = 0.0;
    for (double t : union_grid(member.system, limit))
      a = std::max(a, std::abs(alpha_at(member.system, t) - alpha_at(limit, t)));
    alpha.push_back(a);
    double s = 0.0;
    for (double t : times) {
      const double st = suite_deviation(sigma_at(member.system, t), sigma_at(limit, t), tests);
      sigma_rows.push_back({member.n, t, st});
      s = std::max(s, st);
    }
    sigma.push_back(s);
  }
  PairResult out;
  out.rows.push_back(make_row("alpha", ns, std::move(alpha), rule));
  out.rows.push_back(make_row("sigma", ns, std::move(sigma), rule, std::move(sigma_rows)));
  return out;
}

CriterionResult check_sigma_big(std::span<const IndexedSystem> family, const TripletSystem& limit, double horizon,
                                std::span<const TestFunction> tests, const VerdictRule& rule) {
  check_horizons(family, limit);
  require(limit.dim() == 1, ErrorCode::DimensionMismatch, "the Sigma measure is built for one dimension");
  require(horizon > 0.0 && horizon <= limit.horizon() + 1e-12, ErrorCode::InvalidArgument, "horizon out of range");
  require(!tests.empty(), ErrorCode::InvalidArgument, "empty test suite");
  const std::vector<std::function<double(double)>> time_weights{
      [](double) { return 1.0; },
      [horizon](double t) { return t / horizon; },
      [horizon](double t) { return 1.0 - t / horizon; },
  };
  std::vector<std::function<double(double)>> space;
  for (const TestFunction& f : tests)
    space.push_back([f](double x) { return f(Vec::Constant(1, x)).real(); });

  auto integrals = [&](const SigmaMeasure& sig) {
    std::vector<double> v;
    for (const auto& g : space)
      for (const auto& k : time_weights) v.push_back(sig.integrate(g, k, horizon));
    return v;
  };
  const std::vector<double> base = integrals(sigma_from_system(limit));
  std::vector<double> dev;
  for (const IndexedSystem& member : family) {
    const std::vector<double> v = integrals(sigma_from_system(member.system));
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(v[i] - base[i]));
    dev.push_back(worst);
  }
  const std::vector<long> ns = indices_of(family);
  return make_row("Sigma_big", ns, std::move(dev), rule);
}

std::vector<Vec> drift_recovery(std::span<const double> grid, std::span<const std::vector<cplx>> cf,
                                std::span<const Mat> covariances, std::span<const LevyMeasure> levy,
                                const DriftRecoveryOptions& options) {
  const std::size_t m = grid.size();
  require(m >= 1 && covariances.size() == m && levy.size() == m, ErrorCode::GridMismatch,
          "drift recovery inputs must share the grid");
  const int d = static_cast<int>(cf.size());
  require(d >= 1, ErrorCode::InvalidArgument, "no characteristic function rows");
  std::vector<Vec> gamma(m, Vec::Zero(d));
  for (int j = 0; j < d; ++j) {
    require(cf[static_cast<std::size_t>(j)].size() == m, ErrorCode::GridMismatch, "cf row not on the grid");
    const Vec e = unit_vector(d, j);
    cplx prev{1.0, 0.0};
    double phase = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const cplx value = cf[static_cast<std::size_t>(j)][k];
      require(std::abs(value) >= options.zero_tol, ErrorCode::BranchTracking,
              "characteristic function vanishes at t=" + std::to_string(grid[k]));
      const Triplet centered(Vec::Zero(d), covariances[k], levy[k]);
      const cplx z = value * std::exp(-lk_exponent(centered, e));
      const double step = std::arg(z / prev);
      require(std::abs(step) < options.phase_guard, ErrorCode::BranchTracking,
              "phase step too large at t=" + std::to_string(grid[k]) + "; refine the grid");
      phase += step;
      gamma[k](j) = phase;
      prev = z;
    }
  }
  return gamma;
}

std::vector<std::vector<cplx>> system_axis_cf(const TripletSystem& sys) {
  const int d = sys.dim();
  std::vector<std::vector<cplx>> cf(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    for (std::size_t k = 0; k < sys.grid().size(); ++k)
      cf[static_cast<std::size_t>(j)].push_back(triplet_cf(sys.triplet_at_index(k), unit_vector(d, j)));
  return cf;
}

std::vector<Vec> drift_recovery(const TripletSystem& sys, const DriftRecoveryOptions& options) {
  std::vector<Mat> covs;
  std::vector<LevyMeasure> levy;
  for (std::size_t k = 0; k < sys.grid().size(); ++k) {
    const Triplet tr = sys.triplet_at_index(k);
    covs.push_back(tr.covariance());
    levy.push_back(tr.levy());
  }
  return drift_recovery(sys.grid(), system_axis_cf(sys), covs, levy, options);
}

}  // namespace luwc
