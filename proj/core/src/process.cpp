#include "luwc/process.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <ostream>
#include <random>

#include "luwc/error.hpp"

namespace luwc {

CadlagPath::CadlagPath(int dim, double horizon, std::vector<double> breakpoints, std::vector<Vec> values)
    : dim_(dim), horizon_(horizon), breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  require(dim_ >= 1 && horizon_ > 0.0, ErrorCode::InvalidArgument, "path needs dim >= 1 and T > 0");
  require(!breakpoints_.empty() && breakpoints_.size() == values_.size(), ErrorCode::InvalidArgument,
          "one value per breakpoint");
  require(breakpoints_.front() == 0.0, ErrorCode::InvalidArgument, "first breakpoint must be 0");
  for (std::size_t k = 1; k < breakpoints_.size(); ++k)
    require(breakpoints_[k] > breakpoints_[k - 1], ErrorCode::InvalidArgument, "breakpoints must increase strictly");
  require(breakpoints_.back() <= horizon_ + 1e-12, ErrorCode::InvalidArgument, "breakpoint beyond the horizon");
  for (const Vec& v : values_) require(v.size() == dim_, ErrorCode::DimensionMismatch, "path value dimension");
  require(values_.front().cwiseAbs().maxCoeff() == 0.0, ErrorCode::InvalidArgument, "path must start at 0");
}

Vec CadlagPath::at(double t) const {
  require(t >= 0.0 && t <= horizon_ + 1e-12, ErrorCode::InvalidArgument, "time outside the horizon");
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

CadlagPath CadlagPath::compressed(double tol) const {
  std::vector<double> b{breakpoints_.front()};
  std::vector<Vec> v{values_.front()};
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    if ((values_[k] - v.back()).cwiseAbs().maxCoeff() <= tol) continue;
    b.push_back(breakpoints_[k]);
    v.push_back(values_[k]);
  }
  return CadlagPath(dim_, horizon_, std::move(b), std::move(v));
}

Triplet increment_triplet(const TripletSystem& sys, double s, double t) {
  require(s <= t, ErrorCode::InvalidArgument, "increment needs s <= t");
  require(s >= 0.0 && t <= sys.horizon() + 1e-12, ErrorCode::InvalidArgument, "increment outside the horizon");
  const auto& path = sys.levy_path();
  const std::vector<double> ws = path.weights_at(s);
  const std::vector<double> wt = path.weights_at(t);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const double dw = wt[i] - ws[i];
    require(dw >= -1e-12, ErrorCode::Monotonicity, "Levy weights decrease over the increment");
    if (dw > 0.0) atoms.push_back({path.points()[i], dw});
  }
  Mat da = sys.covariance_at(t) - sys.covariance_at(s);
  da = 0.5 * (da + da.transpose());
  return Triplet(sys.gamma_at(t) - sys.gamma_at(s), da, LevyMeasure(DiscreteMeasure(sys.dim(), std::move(atoms))));
}

cplx increment_cf(const TripletSystem& sys, double s, double t, const Vec& xi) {
  return triplet_cf(increment_triplet(sys, s, t), xi);
}

cplx marginal_cf(const TripletSystem& sys, double t, const Vec& xi) { return triplet_cf(sys.triplet_at(t), xi); }

cplx fdd_cf(const TripletSystem& sys, const FddQuery& q) {
  require(!q.times.empty() && q.times.size() == q.frequencies.size(), ErrorCode::InvalidArgument,
          "one frequency per time");
  for (std::size_t i = 1; i < q.times.size(); ++i)
    require(q.times[i] >= q.times[i - 1], ErrorCode::InvalidArgument, "query times must be sorted");
  std::vector<Vec> tail(q.times.size());
  Vec acc = Vec::Zero(sys.dim());
  for (std::size_t i = q.times.size(); i-- > 0;) {
    acc += q.frequencies[i];
    tail[i] = acc;
  }
  cplx value = marginal_cf(sys, q.times[0], tail[0]);
  for (std::size_t i = 1; i < q.times.size(); ++i) value *= increment_cf(sys, q.times[i - 1], q.times[i], tail[i]);
  return value;
}

CadlagPath sample_path(const TripletSystem& sys, std::span<const double> grid, std::uint64_t seed,
                       std::uint64_t path_index) {
  const TripletSystem fine = grid.empty() ? sys : sys.refined(grid);
  const auto& times = fine.grid();
  const auto& levy = fine.levy_path();
  const int d = fine.dim();
  std::vector<Vec> values{Vec::Zero(d)};
  Vec x = Vec::Zero(d);
  for (std::size_t k = 1; k < times.size(); ++k) {
    std::mt19937_64 rng(stream_seed(seed, path_index, k));
    Vec drift = fine.gammas()[k] - fine.gammas()[k - 1];
    const Mat da = fine.covariances()[k] - fine.covariances()[k - 1];
    Vec jumps = Vec::Zero(d);
    for (std::size_t i = 0; i < levy.points().size(); ++i) {
      const double dw = levy.weights()[i][k] - levy.weights()[i][k - 1];
      require(dw >= -1e-12, ErrorCode::Monotonicity, "negative Levy weight increment");
      if (dw <= 0.0) continue;
      drift -= dw * truncate(levy.points()[i]);
      std::poisson_distribution<long> count(dw);
      jumps += static_cast<double>(count(rng)) * levy.points()[i];
    }
    x += drift + jumps;
    if (da.cwiseAbs().maxCoeff() > 0.0) {
      require(min_eigenvalue(da) >= -1e-10, ErrorCode::Monotonicity, "covariance increment is not PSD");
      std::normal_distribution<double> normal;
      Vec z(d);
      for (int j = 0; j < d; ++j) z(j) = normal(rng);
      x += psd_sqrt(da) * z;
    }
    values.push_back(x);
  }
  return CadlagPath(d, fine.horizon(), times, std::move(values));
}

PathEnsemble sample_ensemble(const TripletSystem& sys, std::span<const double> grid, std::size_t count,
                             std::uint64_t seed, unsigned jobs) {
  require(count >= 1, ErrorCode::InvalidArgument, "ensemble needs at least one path");
  const TripletSystem fine = grid.empty() ? sys : sys.refined(grid);
  std::vector<std::optional<CadlagPath>> slots(count);
  parallel_for(count, jobs, [&](std::size_t i) { slots[i] = sample_path(fine, {}, seed, i); });
  PathEnsemble e;
  e.seed = seed;
  e.system = std::make_shared<const TripletSystem>(sys);
  e.paths.reserve(count);
  for (auto& p : slots) e.paths.push_back(std::move(*p));
  return e;
}

cplx empirical_cf(const PathEnsemble& e, double t, const Vec& xi) {
  require(!e.paths.empty(), ErrorCode::InvalidArgument, "empty ensemble");
  cplx s{0.0, 0.0};
  for (const CadlagPath& p : e.paths) s += std::exp(cplx{0.0, xi.dot(p.at(t))});
  return s / static_cast<double>(e.paths.size());
}

double increment_correlation(const PathEnsemble& e, int component, double s, double t, double u) {
  require(s <= t && t <= u, ErrorCode::InvalidArgument, "need s <= t <= u");
  require(e.paths.size() >= 2, ErrorCode::InvalidArgument, "correlation needs two paths");
  const double n = static_cast<double>(e.paths.size());
  double ma = 0.0, mb = 0.0;
  std::vector<double> a, b;
  for (const CadlagPath& p : e.paths) {
    a.push_back(p.at(t)(component) - p.at(s)(component));
    b.push_back(p.at(u)(component) - p.at(t)(component));
    ma += a.back();
    mb += b.back();
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

namespace {

struct Point1 {
  double x;
  double w;
};

std::vector<Point1> merge_sorted(std::vector<Point1> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point1& a, const Point1& b) { return a.x < b.x; });
  std::vector<Point1> out;
  for (const Point1& p : pts) {
    if (!out.empty() && p.x - out.back().x <= kMergeTol) out.back().w += p.w;
    else out.push_back(p);
  }
  return out;
}

std::vector<Point1> convolve1(const std::vector<Point1>& a, const std::vector<Point1>& b, double prune) {
  std::vector<Point1> pts;
  pts.reserve(a.size() * b.size());
  for (const Point1& p : a)
    for (const Point1& q : b)
      if (p.w * q.w > prune) pts.push_back({p.x + q.x, p.w * q.w});
  return merge_sorted(std::move(pts));
}

// Poisson(lambda) probabilities over the counts that carry more than tail mass each.
std::vector<std::pair<long, double>> poisson_pmf(double lambda, double tail) {
  std::vector<std::pair<long, double>> out;
  if (lambda <= 0.0) return {{0, 1.0}};
  const double sd = std::sqrt(lambda);
  const long lo = std::max(0L, static_cast<long>(std::floor(lambda - 12.0 * sd - 12.0)));
  const long hi = static_cast<long>(std::ceil(lambda + 12.0 * sd + 40.0));
  const double log_lambda = std::log(lambda);
  for (long k = lo; k <= hi; ++k) {
    const double p = std::exp(-lambda + static_cast<double>(k) * log_lambda - std::lgamma(static_cast<double>(k) + 1.0));
    if (p > tail) out.emplace_back(k, p);
  }
  return out;
}

// Common lattice step g with every atom an integer multiple of g, when one exists at moderate size.
std::optional<double> lattice_step(const std::vector<Atom>& atoms) {
  double g = std::numeric_limits<double>::infinity();
  for (const Atom& a : atoms) g = std::min(g, std::abs(a.point(0)));
  for (const Atom& a : atoms) {
    const double m = a.point(0) / g;
    if (std::abs(m - std::round(m)) > 1e-9 || std::abs(m) > 1000.0) return std::nullopt;
  }
  return g;
}

std::vector<Point1> compound_poisson_1d(const LevyMeasure& nu, const MarginalOptions& o) {
  const auto& atoms = nu.atoms();
  if (atoms.empty()) return {{0.0, 1.0}};
  if (const auto g = lattice_step(atoms)) {
    // Dense integer-lattice convolution: offsets are counts of the step g.
    long lo = 0, hi = 0;
    std::vector<double> dense{1.0};
    for (const Atom& a : atoms) {
      const long m = std::lround(a.point(0) / *g);
      const auto pmf = poisson_pmf(a.weight, o.poisson_tail);
      long alo = 0, ahi = 0;
      for (const auto& [k, p] : pmf) {
        alo = std::min(alo, k * m);
        ahi = std::max(ahi, k * m);
      }
      std::vector<double> next(static_cast<std::size_t>(hi + ahi - lo - alo + 1), 0.0);
      for (long i = lo; i <= hi; ++i) {
        const double w = dense[static_cast<std::size_t>(i - lo)];
        if (w == 0.0) continue;
        for (const auto& [k, p] : pmf) {
          if (w * p <= o.prune) continue;
          next[static_cast<std::size_t>(i + k * m - lo - alo)] += w * p;
        }
      }
      dense = std::move(next);
      lo += alo;
      hi += ahi;
    }
    std::vector<Point1> out;
    for (long i = lo; i <= hi; ++i) {
      const double w = dense[static_cast<std::size_t>(i - lo)];
      if (w > 0.0) out.push_back({static_cast<double>(i) * *g, w});
    }
    return out;
  }
  std::vector<Point1> acc{{0.0, 1.0}};
  for (const Atom& a : atoms) {
    std::vector<Point1> one;
    for (const auto& [k, p] : poisson_pmf(a.weight, o.poisson_tail)) one.push_back({static_cast<double>(k) * a.point(0), p});
    acc = convolve1(acc, one, o.prune);
  }
  return acc;
}

DiscreteMeasure compound_poisson(const LevyMeasure& nu, const MarginalOptions& o) {
  const int d = nu.dim();
  DiscreteMeasure acc = DiscreteMeasure::dirac(Vec::Zero(d));
  for (const Atom& a : nu.atoms()) {
    std::vector<Atom> one;
    for (const auto& [k, p] : poisson_pmf(a.weight, o.poisson_tail)) one.push_back({static_cast<double>(k) * a.point, p});
    acc = acc.convolve(DiscreteMeasure(d, std::move(one)), o.prune);
  }
  return acc;
}

// Lattice stand-in for N(0, A): trapezoid weights exp(-z^2/2) in the eigenbasis of A.
DiscreteMeasure gaussian_lattice(const Mat& a, const MarginalOptions& o) {
  const int d = static_cast<int>(a.rows());
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (a + a.transpose()));
  const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<Vec> dirs;
  for (int j = 0; j < d; ++j)
    if (eig.eigenvalues()(j) > 1e-14 * std::max(top, 1.0))
      dirs.push_back(eig.eigenvectors().col(j) * std::sqrt(eig.eigenvalues()(j)));
  if (dirs.empty()) return DiscreteMeasure::dirac(Vec::Zero(d));
  require(dirs.size() <= 3, ErrorCode::LimitExceeded, "Gaussian lattice supports covariance rank <= 3");
  double spacing = o.gauss_spacing, width = o.gauss_width;
  if (dirs.size() == 2) spacing *= 2.0;
  if (dirs.size() == 3) {
    spacing = std::max(spacing, 0.3);
    width = std::min(width, 6.0);
  }
  const long half = static_cast<long>(std::floor(width / spacing));
  std::vector<double> z, w;
  double total = 0.0;
  for (long m = -half; m <= half; ++m) {
    z.push_back(static_cast<double>(m) * spacing);
    w.push_back(std::exp(-0.5 * z.back() * z.back()));
    total += w.back();
  }
  for (double& v : w) v /= total;
  std::vector<Atom> atoms{{Vec::Zero(d), 1.0}};
  for (const Vec& dir : dirs) {
    std::vector<Atom> next;
    next.reserve(atoms.size() * z.size());
    for (const Atom& base : atoms)
      for (std::size_t m = 0; m < z.size(); ++m) next.push_back({base.point + z[m] * dir, base.weight * w[m]});
    atoms = std::move(next);
  }
  return DiscreteMeasure(d, std::move(atoms));
}

}  // namespace

DiscreteMeasure marginal_law(const TripletSystem& sys, double t, const MarginalOptions& options) {
  const Triplet tr = sys.triplet_at(t);
  const int d = tr.dim();
  Vec shift = tr.gamma();
  for (const Atom& a : tr.levy().atoms()) shift -= a.weight * truncate(a.point);
  DiscreteMeasure law(d);
  const DiscreteMeasure gauss = gaussian_lattice(tr.covariance(), options);
  if (d == 1) {
    std::vector<Point1> jumps = compound_poisson_1d(tr.levy(), options);
    std::vector<Point1> g;
    for (const Atom& a : gauss.atoms()) g.push_back({a.point(0), a.weight});
    if (g.size() > 1) jumps = convolve1(jumps, g, options.prune);
    std::vector<Atom> atoms;
    atoms.reserve(jumps.size());
    for (const Point1& p : jumps) atoms.push_back({Vec::Constant(1, p.x + shift(0)), p.w});
    law = DiscreteMeasure(1, std::move(atoms));
  } else {
    law = compound_poisson(tr.levy(), options).convolve(gauss, options.prune).shifted(shift);
  }
  return law.scaled(1.0 / law.total_mass());
}

MeasurePath marginal_path(const TripletSystem& sys, std::span<const double> grid, const MarginalOptions& options) {
  require(!grid.empty(), ErrorCode::InvalidArgument, "empty grid");
  std::vector<DiscreteMeasure> laws;
  laws.reserve(grid.size());
  for (double t : grid) laws.push_back(marginal_law(sys, t, options));
  std::vector<double> g(grid.begin(), grid.end());
  if (sys.dim() != 1) return MeasurePath(std::move(g), std::move(laws));
  const SystemRates r = sys.rates();
  double max_trace = 0.0;
  for (const Mat& a : sys.covariances()) max_trace = std::max(max_trace, a.trace());
  const double lattice = 2.0 * options.gauss_spacing * std::sqrt(max_trace);
  Modulus omega = [r, lattice](double s) {
    return (r.drift + 2.0 * r.jump_mass) * s + std::cbrt(r.covariance_trace * s) + lattice;
  };
  return MeasurePath(std::move(g), std::move(laws), std::move(omega));
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

}  // namespace

void write_ensemble_jsonl(std::ostream& os, const PathEnsemble& e) {
  for (const CadlagPath& p : e.paths) {
    nlohmann::json values = nlohmann::json::array();
    for (const Vec& v : p.values()) values.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    os << nlohmann::json{{"breakpoints", p.breakpoints()}, {"values", values}}.dump() << '\n';
  }
}

void write_ensemble_summary(std::ostream& os, const PathEnsemble& e, std::span<const double> times,
                            std::span<const double> xi_grid) {
  require(!e.paths.empty(), ErrorCode::InvalidArgument, "empty ensemble");
  const int d = e.paths.front().dim();
  const double n = static_cast<double>(e.paths.size());
  os << "t,component,mean,variance,xi,cf_re,cf_im\n";
  for (double t : times) {
    for (int j = 0; j < d; ++j) {
      double mean = 0.0, sq = 0.0;
      for (const CadlagPath& p : e.paths) {
        const double x = p.at(t)(j);
        mean += x;
        sq += x * x;
      }
      mean /= n;
      const double var = std::max(0.0, sq / n - mean * mean);
      for (double xi : xi_grid) {
        const cplx cf = empirical_cf(e, t, xi * unit_vector(d, j));
        os << fmt(t) << ',' << j << ',' << fmt(mean) << ',' << fmt(var) << ',' << fmt(xi) << ',' << fmt(cf.real())
           << ',' << fmt(cf.imag()) << '\n';
      }
    }
  }
}

bool is_deterministic(const TripletSystem& sys) {
  for (const Mat& a : sys.covariances())
    if (a.cwiseAbs().maxCoeff() > 0.0) return false;
  for (const auto& row : sys.levy_path().weights())
    for (double w : row)
      if (w > 0.0) return false;
  return true;
}

CadlagPath deterministic_path(const TripletSystem& sys) {
  require(is_deterministic(sys), ErrorCode::InvalidArgument, "system has a random part");
  return CadlagPath(sys.dim(), sys.horizon(), sys.grid(), sys.gammas()).compressed();
}

HarnessReport functional_harness(std::span<const IndexedSystem> family, const TripletSystem& limit,
                                 const HarnessConfig& config) {
  require(!family.empty(), ErrorCode::InvalidArgument, "empty family");
  require(!config.grid.empty(), ErrorCode::InvalidArgument, "harness needs a time grid");
  std::vector<std::optional<MeasurePath>> paths(family.size() + 1);
  parallel_for(paths.size(), config.jobs, [&](std::size_t i) {
    const TripletSystem& sys = i < family.size() ? family[i].system : limit;
    paths[i] = marginal_path(sys, config.grid, config.marginal);
  });
  std::vector<IndexedPath> indexed;
  for (std::size_t i = 0; i < family.size(); ++i) indexed.push_back({family[i].n, std::move(*paths[i])});

  HarnessReport out;
  out.marginal = equivalence_report(indexed, *paths.back(), config.equivalence);

  std::vector<double> times = config.functional_times;
  if (times.empty())
    for (double f : {0.25, 0.5, 0.75, 1.0}) times.push_back(f * limit.horizon());
  const std::vector<TestFunction> csharp = config.csharp.empty() ? csharp_suite(limit.dim()) : config.csharp;
  out.functional = check_js_functional(family, limit, times, csharp, config.equivalence.rule);
  out.agree = out.marginal.verdict() == out.functional.verdict;

  out.deterministic = is_deterministic(limit) &&
                      std::all_of(family.begin(), family.end(),
                                  [](const IndexedSystem& s) { return is_deterministic(s.system); });
  if (out.deterministic) {
    const CadlagPath target = deterministic_path(limit);
    for (const IndexedSystem& s : family)
      out.skorokhod.push_back(skorokhod_j1(deterministic_path(s.system), target, config.skorokhod));
  }
  return out;
}

}  // namespace luwc
