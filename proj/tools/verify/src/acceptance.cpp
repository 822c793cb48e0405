#include "luwc_verify/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "luwc/convergence.hpp"
#include "luwc/criteria.hpp"
#include "luwc/error.hpp"
#include "luwc/families.hpp"
#include "luwc/process.hpp"
#include "luwc/report.hpp"
#include "luwc/triplet.hpp"

namespace luwc::verify {

namespace {

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

std::string num(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

const std::vector<long> kDefaultNs{2, 10, 100, 1000, 10000};

DiscreteMeasure random_probability(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> scale_pick(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  const double scale = std::pow(10.0, 2.0 * scale_pick(rng) - 1.0);  // 0.1 .. 10
  std::vector<Atom> atoms;
  const int m = count(rng);
  for (int i = 0; i < m; ++i) atoms.push_back({Vec::Constant(1, scale * 3.0 * unit(rng)), weight(rng)});
  return DiscreteMeasure(1, std::move(atoms)).normalized();
}

Triplet random_triplet(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> w(0.0, 3.0);
  std::uniform_int_distribution<int> atoms(0, 5);
  Vec gamma(d);
  for (int j = 0; j < d; ++j) gamma(j) = 2.0 * u(rng);
  Mat b(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b(i, j) = u(rng);
  const Mat a = b * b.transpose();
  std::vector<Atom> nu;
  const int m = atoms(rng);
  for (int i = 0; i < m; ++i) {
    Vec x(d);
    for (int j = 0; j < d; ++j) x(j) = 3.0 * u(rng);
    if (x.cwiseAbs().maxCoeff() < 1e-3) x(0) = 0.5;
    nu.push_back({x, w(rng)});
  }
  return Triplet(gamma, 0.5 * (a + a.transpose()), LevyMeasure(DiscreteMeasure(d, std::move(nu))));
}

Check criterion_tail() {
  Check c;
  std::mt19937_64 rng(0x7a11);
  int cases = 0, held = 0;
  double worst = -1e300;
  for (int i = 0; i < 500; ++i) {
    const DiscreteMeasure mu = random_probability(rng);
    for (double r : {0.25, 0.5, 1.0, 2.0}) {
      const TailBound tb = tail_bound(mu, r);
      ++cases;
      if (tb.lhs <= tb.rhs + 1e-8) ++held;
      worst = std::max(worst, tb.lhs - tb.rhs);
    }
  }
  c.expect(held == cases, std::to_string(cases - held) + " violations");
  c.detail << (c.pass ? "" : "; ") << held << "/" << cases << " cases, max(lhs - rhs) = " << num(worst);
  return c;
}

Check criterion_lk() {
  Check c;
  std::mt19937_64 rng(0x1c);
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int d = dim(rng);
    const Triplet tr = random_triplet(rng, d);
    for (int k = 0; k < 10; ++k) {
      Vec xi(d);
      for (int j = 0; j < d; ++j) xi(j) = u(rng);
      worst = std::max(worst, std::abs(lk_exponent(tr, xi) - lk_exponent_modified(tr, xi)));
    }
  }
  c.expect(worst <= 1e-10, "exponent mismatch " + num(worst));
  double round = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Triplet tr = random_triplet(rng, 1);
    const Triplet back = triplet_from_pair(pair_from_triplet(tr));
    round = std::max(round, std::abs(back.gamma()(0) - tr.gamma()(0)));
    round = std::max(round, std::abs(back.covariance()(0, 0) - tr.covariance()(0, 0)));
    if (!approx_equal(back.levy().measure(), tr.levy().measure(), 1e-12)) round = std::max(round, 1.0);
  }
  c.expect(round <= 1e-12, "round trip error " + num(round));
  c.detail << (c.pass ? "" : "; ") << "max exponent gap " << num(worst) << ", round trip " << num(round);
  return c;
}

Check criterion_cp_rate() {
  Check c;
  const std::vector<long> ns{100, 1000, 10000};
  const std::vector<double> grid = linspace(0.0, 1.0, 21);
  const TripletSystem limit = family_limit("cp_to_bm", 1.0, grid);
  std::vector<double> dev;
  for (long n : ns) {
    const TripletSystem member = family_member("cp_to_bm", n, 1.0, grid);
    double worst = 0.0;
    for (double t : grid)
      for (double s : linspace(-5.0, 5.0, 41)) {
        const Vec xi = Vec::Constant(1, s);
        worst = std::max(worst, std::abs(marginal_cf(member, t, xi) - marginal_cf(limit, t, xi)));
      }
    dev.push_back(worst);
    c.expect(worst <= 26.0 / static_cast<double>(n), "n=" + std::to_string(n) + " exceeds 26/n");
  }
  c.expect(dev[1] <= dev[0] && dev[2] <= dev[1], "deviation not non-increasing");
  c.expect(dev[2] <= 0.01, "deviation at n=1e4 above 0.01");
  c.detail << (c.pass ? "" : "; ") << "deviation " << num(dev[0]) << ", " << num(dev[1]) << ", " << num(dev[2]);
  return c;
}

struct FamilyRun {
  std::string name;
  std::vector<IndexedSystem> members;
  TripletSystem limit;
  std::vector<double> grid;
};

FamilyRun build(const std::string& name) {
  std::vector<double> grid = merge_grids(family_grid(name, kDefaultNs, 1.0), std::vector<double>{0.5});
  auto members = family_members(name, kDefaultNs, 1.0, grid);
  TripletSystem limit = family_limit(name, 1.0, grid);
  return {name, std::move(members), std::move(limit), std::move(grid)};
}

Check criterion_three(unsigned jobs) {
  Check c;
  for (const std::string& name : family_names()) {
    const FamilyRun f = build(name);
    std::vector<std::optional<MeasurePath>> paths(f.members.size() + 1);
    parallel_for(paths.size(), jobs, [&](std::size_t i) {
      paths[i] = marginal_path(i < f.members.size() ? f.members[i].system : f.limit, f.grid);
    });
    std::vector<IndexedPath> fam;
    for (std::size_t i = 0; i < f.members.size(); ++i) fam.push_back({f.members[i].n, std::move(*paths[i])});
    EquivalenceConfig cfg;
    cfg.fixed_time = 0.5;
    const ConvergenceReport rep = equivalence_report(fam, *paths.back(), cfg);
    const FamilyInfo info = describe_family(name);
    c.expect(rep.agreement, name + ": criteria disagree");
    c.expect(rep.weak.verdict == info.expected.at("weak_lu"), name + ": verdict differs from the catalog");
    c.detail << (c.detail.tellp() > 0 ? "; " : "") << name << "=" << to_string(rep.weak.verdict);
    if (name == "bump_drift") {
      for (std::size_t i = 0; i < rep.ns.size(); ++i) {
        if (rep.ns[i] >= 10)
          c.expect(rep.fixed_time->deviations[i] < 1e-6, "bump fixed-t deviation at n=" + std::to_string(rep.ns[i]));
        c.expect(std::abs(rep.weak.deviations[i] - 1.0) <= 1e-12,
                 "bump l.u.w. deviation " + num(rep.weak.deviations[i]) + " at n=" + std::to_string(rep.ns[i]));
      }
    }
  }
  return c;
}

Check criterion_functional(unsigned jobs) {
  Check c;
  for (const std::string& name : family_names()) {
    const FamilyRun f = build(name);
    HarnessConfig hc;
    hc.grid = f.grid;
    hc.jobs = jobs;
    const HarnessReport h = functional_harness(f.members, f.limit, hc);
    c.expect(h.agree, name + ": marginal and functional verdicts differ");
    c.detail << (c.detail.tellp() > 0 ? "; " : "") << name << " " << to_string(h.marginal.verdict()) << "/"
             << to_string(h.functional.verdict);
    if (name == "bump_drift") {
      c.expect(h.deterministic && h.skorokhod.size() == f.members.size(), "bump J1 distances missing");
      for (double j1 : h.skorokhod) c.expect(std::abs(j1 - 1.0) <= hc.skorokhod.mesh, "bump J1 distance " + num(j1));
    }
  }
  return c;
}

Check criterion_polya() {
  Check c;
  const std::vector<double> grid = linspace(0.0, 1.0, 1001);
  std::vector<double> limit(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) limit[i] = grid[i];

  auto family = [&](auto fn, std::span<const long> ns) {
    std::vector<std::vector<double>> out;
    for (long n : ns) {
      out.emplace_back();
      for (double t : grid) out.back().push_back(fn(t, static_cast<double>(n)));
    }
    return out;
  };
  const std::vector<long> ns{1, 2, 5, 10, 20, 50, 100};
  const auto powers = family([](double t, double n) { return std::pow(t, 1.0 + 1.0 / n); }, ns);
  const PolyaResult pr = polya_lift(powers, limit, grid);
  const double at10 = pr.uniform_dev[3];
  c.expect(std::abs(at10 - 0.0351) <= 1e-3, "uniform deviation at n=10 is " + num(at10));
  c.expect(pr.certificate, "certificate fails for t^(1+1/n)");

  const auto linear = family([](double t, double n) { return t + t / n; }, ns);
  c.expect(polya_lift(linear, limit, grid).certificate, "certificate fails for t + t/n");

  std::mt19937_64 rng(0x9017a);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int generated = 2;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> lim(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) lim[i] = grid[i] * grid[i] + 0.3 * grid[i];
    std::vector<std::vector<double>> fns;
    for (long n : ns) {
      std::vector<double> f(grid.size(), 0.0);
      double bumpy = 0.0;
      for (std::size_t i = 1; i < grid.size(); ++i) {
        bumpy += u(rng) * 0.01 / static_cast<double>(n);
        f[i] = lim[i] + bumpy;
      }
      fns.push_back(std::move(f));
    }
    PolyaOptions o;
    o.checkpoint_stride = 1 + static_cast<std::size_t>(u(rng) * 200.0);
    if (!polya_lift(fns, lim, grid, o).certificate) c.expect(false, "certificate fails on random family " + std::to_string(trial));
    ++generated;
  }
  c.detail << (c.pass ? "" : "; ") << "uniform_dev(10) = " << num(at10) << ", certificate held on " << generated
           << " families";
  return c;
}

Check criterion_sampler(unsigned jobs) {
  Check c;
  const std::size_t count = 10000;
  const double bound = 4.0 / std::sqrt(static_cast<double>(count));
  const std::vector<double> grid = linspace(0.0, 1.0, 21);
  auto line = [&](double slope_gamma, double slope_a, double rate) {
    std::vector<Vec> g;
    std::vector<Mat> a;
    std::vector<std::vector<double>> w(rate > 0.0 ? 1 : 0);
    for (double t : grid) {
      g.push_back(Vec::Constant(1, slope_gamma * t));
      a.push_back(Mat::Constant(1, 1, slope_a * t));
      if (rate > 0.0) w[0].push_back(rate * t);
    }
    std::vector<Vec> pts;
    if (rate > 0.0) pts.push_back(Vec::Constant(1, 1.0));
    return TripletSystem(1, grid, std::move(g), std::move(a), std::move(pts), std::move(w));
  };
  const std::vector<std::pair<std::string, TripletSystem>> systems{
      {"poisson", line(1.0, 0.0, 1.0)},
      {"bm", line(0.0, 1.0, 0.0)},
      {"cp_to_bm(100)", family_member("cp_to_bm", 100, 1.0, grid)},
  };
  std::uint64_t seed = 0x5eed;
  for (const auto& [name, sys] : systems) {
    const PathEnsemble e = sample_ensemble(sys, grid, count, seed++, jobs);
    double worst = 0.0;
    for (double t : {0.5, 1.0})
      for (double s : linspace(-2.0, 2.0, 9)) {
        const Vec xi = Vec::Constant(1, s);
        worst = std::max(worst, std::abs(empirical_cf(e, t, xi) - marginal_cf(sys, t, xi)));
      }
    const double corr = std::abs(increment_correlation(e, 0, 0.0, 0.5, 1.0));
    c.expect(worst <= bound, name + " CF gap " + num(worst));
    c.expect(corr <= bound, name + " increment correlation " + num(corr));
    c.detail << (c.detail.tellp() > 0 ? "; " : "") << name << " gap " << num(worst, 3) << " corr " << num(corr, 3);
  }
  return c;
}

Check criterion_sigma() {
  Check c;
  double worst = 0.0;
  for (const std::string& name : family_names()) {
    const FamilyRun f = build(name);
    std::vector<const TripletSystem*> all{&f.limit};
    for (const IndexedSystem& m : f.members) all.push_back(&m.system);
    for (const TripletSystem* sys : all) {
      const SigmaMeasure big = sigma_from_system(*sys);
      c.expect(system_sigma_check(*sys, big), name + ": cell identity fails");
      for (double t : sys->grid()) {
        const DiscreteMeasure direct = sigma_at(*sys, t).canonicalize();
        const DiscreteMeasure rebuilt = big.sigma_at(t);
        if (!approx_equal(direct, rebuilt, 1e-12)) {
          c.expect(false, name + ": reconstruction differs at t=" + num(t));
          break;
        }
        worst = std::max(worst, std::abs(direct.total_mass() - rebuilt.total_mass()));
      }
    }
    const std::vector<TestFunction> tests = default_test_suite(1);
    const std::vector<double> times{0.25, 0.5, 0.75, 1.0};
    const PairResult pr = check_pair_criteria(f.members, f.limit, times, tests, VerdictRule{});
    const CriterionResult big = check_sigma_big(f.members, f.limit, 1.0, tests, VerdictRule{});
    c.expect(pr.rows[1].verdict == big.verdict, name + ": sigma and Sigma verdicts differ");
    c.detail << (c.detail.tellp() > 0 ? "; " : "") << name << " " << to_string(big.verdict);
  }
  c.detail << "; max mass gap " << num(worst);
  return c;
}

Check criterion_determinism(unsigned jobs) {
  Check c;
  RunConfig cfg;
  for (const std::string& name : family_names()) cfg.families.push_back({name, true, {}, {}});
  cfg.ensemble_paths = 500;
  const RunResult a = run(cfg, jobs);
  const RunResult b = run(cfg, std::max(2u, jobs));
  const std::string ca = to_csv(a.rows), cb = to_csv(b.rows);
  c.expect(ca == cb, "CSV output differs between runs");
  c.expect(a.all_agree, "a run reported a failed agreement assertion");
  c.detail << (c.pass ? "" : "; ") << a.rows.size() << " rows, " << ca.size() << " bytes, identical";
  return c;
}

}  // namespace

std::string format_line(const Outcome& o) {
  std::ostringstream os;
  os << (o.pass ? "PASS" : "FAIL") << "  [" << o.id << "] " << o.title << " (" << num(o.seconds, 3) << " s";
  if (o.budget > 0.0) os << " of " << num(o.budget, 3) << " s";
  os << ")";
  if (!o.detail.empty()) os << ": " << o.detail;
  return os.str();
}

std::vector<Outcome> run_acceptance(const Options& options) {
  const unsigned jobs = std::max(1u, options.jobs);
  struct Entry {
    int id;
    const char* title;
    double budget;
    std::function<Check()> body;
  };
  const std::vector<Entry> entries{
      {1, "tail inequality on 500 random laws", 10.0, criterion_tail},
      {2, "Levy-Khintchine forms and pair round trip", 5.0, criterion_lk},
      {3, "cp_to_bm characteristic-function rate", 5.0, criterion_cp_rate},
      {4, "three-criteria agreement on built-in families", 60.0, [jobs] { return criterion_three(jobs); }},
      {5, "marginal vs functional verdicts and J1 on bump_drift", 120.0, [jobs] { return criterion_functional(jobs); }},
      {6, "Polya certificate", 5.0, criterion_polya},
      {7, "sampler fidelity and independent increments", 60.0, [jobs] { return criterion_sampler(jobs); }},
      {8, "Sigma reconstruction and pair criteria", 10.0, criterion_sigma},
      {9, "deterministic report output", 0.0, [jobs] { return criterion_determinism(jobs); }},
  };
  std::vector<Outcome> out;
  for (const Entry& e : entries) {
    if (options.only && *options.only != e.id) continue;
    Outcome o{e.id, e.title, false, "", 0.0, e.budget};
    const auto start = std::chrono::steady_clock::now();
    try {
      Check c = e.body();
      o.pass = c.pass;
      o.detail = c.detail.str();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.budget > 0.0 && o.seconds > o.budget) {
      o.pass = false;
      o.detail += (o.detail.empty() ? "" : "; ") + std::string("time budget exceeded");
    }
    if (options.on_result) options.on_result(o);
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace luwc::verify
