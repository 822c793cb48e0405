#include "luwc/system.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "luwc/error.hpp"

namespace luwc {

namespace {

void validate_grid(const std::vector<double>& grid) {
  require(grid.size() >= 2, ErrorCode::InvalidArgument, "time grid needs at least two points");
  require(grid.front() == 0.0, ErrorCode::InvalidArgument, "time grid must start at 0");
  for (std::size_t k = 1; k < grid.size(); ++k)
    require(grid[k] > grid[k - 1], ErrorCode::InvalidArgument, "time grid must be strictly increasing");
}

constexpr double kMonotoneSlack = 1e-12;

}  // namespace

std::pair<std::size_t, double> locate(std::span<const double> grid, double t) {
  require(!grid.empty(), ErrorCode::InvalidArgument, "empty grid");
  const double slack = 1e-12 * std::max(1.0, std::abs(grid.back()));
  require(t >= grid.front() - slack && t <= grid.back() + slack, ErrorCode::InvalidArgument,
          "time outside the grid range");
  if (grid.size() == 1 || t <= grid.front()) return {0, 0.0};
  if (t >= grid.back()) return {grid.size() - 2, 1.0};
  const auto it = std::upper_bound(grid.begin(), grid.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - grid.begin()) - 1;
  return {k, (t - grid[k]) / (grid[k + 1] - grid[k])};
}

AtomicMeasurePath::AtomicMeasurePath(int dim, std::vector<double> grid, std::vector<Vec> points,
                                     std::vector<std::vector<double>> weights)
    : dim_(dim), grid_(std::move(grid)), points_(std::move(points)), weights_(std::move(weights)) {
  validate_grid(grid_);
  require(points_.size() == weights_.size(), ErrorCode::InvalidArgument, "one weight row per atom");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    require(points_[i].size() == dim_, ErrorCode::DimensionMismatch, "atom dimension");
    require(weights_[i].size() == grid_.size(), ErrorCode::InvalidArgument, "one weight per grid time");
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      require(std::isfinite(weights_[i][k]) && weights_[i][k] >= 0.0, ErrorCode::InvalidArgument,
              "atom weights must be nonnegative");
      if (k > 0)
        require(weights_[i][k] >= weights_[i][k - 1] - kMonotoneSlack, ErrorCode::Monotonicity,
                "atom weight decreases in time");
    }
  }
}

std::vector<double> AtomicMeasurePath::weights_at(double t) const {
  const auto [k, f] = locate(grid_, t);
  std::vector<double> w(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double a = weights_[i][k];
    const double b = weights_[i][std::min(k + 1, grid_.size() - 1)];
    w[i] = f == 0.0 ? a : (f == 1.0 ? b : a + f * (b - a));
  }
  return w;
}

DiscreteMeasure AtomicMeasurePath::measure_at(double t) const {
  const std::vector<double> w = weights_at(t);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (w[i] > 0.0) atoms.push_back({points_[i], w[i]});
  return DiscreteMeasure(dim_, std::move(atoms));
}

DiscreteMeasure AtomicMeasurePath::measure_at_index(std::size_t k) const {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (weights_[i][k] > 0.0) atoms.push_back({points_[i], weights_[i][k]});
  return DiscreteMeasure(dim_, std::move(atoms));
}

TripletSystem::TripletSystem(int dim, std::vector<double> grid, std::vector<Vec> gamma, std::vector<Mat> covariance,
                             std::vector<Vec> nu_points, std::vector<std::vector<double>> nu_weights)
    : dim_(dim),
      grid_(grid),
      gamma_(std::move(gamma)),
      cov_(std::move(covariance)),
      nu_(dim, std::move(grid), std::move(nu_points), std::move(nu_weights)) {
  require(dim_ >= 1, ErrorCode::InvalidArgument, "system dimension must be positive");
  require(gamma_.size() == grid_.size() && cov_.size() == grid_.size(), ErrorCode::InvalidArgument,
          "one drift and one covariance per grid time");
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    require(gamma_[k].size() == dim_ && cov_[k].rows() == dim_ && cov_[k].cols() == dim_,
            ErrorCode::DimensionMismatch, "triplet component dimension");
    require((cov_[k] - cov_[k].transpose()).cwiseAbs().maxCoeff() <= 1e-10, ErrorCode::InvalidArgument,
            "covariance must be symmetric");
    if (k > 0)
      require(min_eigenvalue(cov_[k] - cov_[k - 1]) >= -1e-10, ErrorCode::Monotonicity,
              "covariance increments must be positive semidefinite");
  }
  require(gamma_[0].cwiseAbs().maxCoeff() == 0.0 && cov_[0].cwiseAbs().maxCoeff() == 0.0,
          ErrorCode::InvalidArgument, "triplet at time 0 must vanish");
  for (std::size_t i = 0; i < nu_.points().size(); ++i) {
    require(nu_.weights()[i][0] == 0.0, ErrorCode::InvalidArgument, "Levy measure at time 0 must vanish");
    require(nu_.points()[i].cwiseAbs().maxCoeff() > kMergeTol, ErrorCode::InvalidArgument,
            "Levy measure may not charge the origin");
  }
}

TripletSystem TripletSystem::zero(int dim, std::vector<double> grid) {
  const std::size_t m = grid.size();
  return TripletSystem(dim, std::move(grid), std::vector<Vec>(m, Vec::Zero(dim)),
                       std::vector<Mat>(m, Mat::Zero(dim, dim)), {}, {});
}

Vec TripletSystem::gamma_at(double t) const {
  const auto [k, f] = locate(grid_, t);
  if (f == 0.0) return gamma_[k];
  if (f == 1.0) return gamma_[k + 1];
  return gamma_[k] + f * (gamma_[k + 1] - gamma_[k]);
}

Mat TripletSystem::covariance_at(double t) const {
  const auto [k, f] = locate(grid_, t);
  if (f == 0.0) return cov_[k];
  if (f == 1.0) return cov_[k + 1];
  return cov_[k] + f * (cov_[k + 1] - cov_[k]);
}

Triplet TripletSystem::triplet_at(double t) const {
  Mat a = covariance_at(t);
  a = 0.5 * (a + a.transpose());
  return Triplet(gamma_at(t), a, LevyMeasure(nu_.measure_at(t)));
}

Triplet TripletSystem::triplet_at_index(std::size_t k) const {
  return Triplet(gamma_[k], cov_[k], LevyMeasure(nu_.measure_at_index(k)));
}

Mat TripletSystem::modified_second_at(double t) const { return modified_second(triplet_at(t)); }

TripletSystem TripletSystem::refined(std::span<const double> extra_times) const {
  std::vector<double> extra;
  for (double t : extra_times)
    if (t >= 0.0 && t <= horizon()) extra.push_back(t);
  std::vector<double> grid = merge_grids(grid_, extra);
  std::vector<Vec> g;
  std::vector<Mat> c;
  std::vector<std::vector<double>> w(nu_.points().size());
  for (double t : grid) {
    g.push_back(gamma_at(t));
    c.push_back(covariance_at(t));
    const std::vector<double> wt = nu_.weights_at(t);
    for (std::size_t i = 0; i < wt.size(); ++i) w[i].push_back(wt[i]);
  }
  g.front().setZero();
  c.front().setZero();
  return TripletSystem(dim_, std::move(grid), std::move(g), std::move(c), nu_.points(), std::move(w));
}

SystemRates TripletSystem::rates() const {
  SystemRates r;
  for (std::size_t k = 1; k < grid_.size(); ++k) {
    const double dt = grid_[k] - grid_[k - 1];
    r.drift = std::max(r.drift, (gamma_[k] - gamma_[k - 1]).norm() / dt);
    r.covariance_trace = std::max(r.covariance_trace, (cov_[k] - cov_[k - 1]).trace() / dt);
    double dm = 0.0;
    for (const auto& row : nu_.weights()) dm += row[k] - row[k - 1];
    r.jump_mass = std::max(r.jump_mass, dm / dt);
  }
  return r;
}

void to_json(nlohmann::json& j, const TripletSystem& sys) {
  nlohmann::json gamma = nlohmann::json::array();
  nlohmann::json cov = nlohmann::json::array();
  for (std::size_t k = 0; k < sys.grid().size(); ++k) {
    gamma.push_back(std::vector<double>(sys.gammas()[k].data(), sys.gammas()[k].data() + sys.dim()));
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < sys.dim(); ++r) {
      std::vector<double> row;
      for (int c = 0; c < sys.dim(); ++c) row.push_back(sys.covariances()[k](r, c));
      rows.push_back(row);
    }
    cov.push_back(rows);
  }
  nlohmann::json atoms = nlohmann::json::array();
  const auto& path = sys.levy_path();
  for (std::size_t i = 0; i < path.points().size(); ++i) {
    const Vec& p = path.points()[i];
    atoms.push_back({{"x", std::vector<double>(p.data(), p.data() + p.size())}, {"weights", path.weights()[i]}});
  }
  j = nlohmann::json{{"d", sys.dim()}, {"grid", sys.grid()}, {"gamma", gamma}, {"A", cov}, {"nu_atoms", atoms}};
}

TripletSystem system_from_json(const nlohmann::json& j) {
  try {
    const int d = j.at("d").get<int>();
    auto grid = j.at("grid").get<std::vector<double>>();
    std::vector<Vec> gamma;
    for (const auto& g : j.at("gamma")) {
      const auto v = g.get<std::vector<double>>();
      require(static_cast<int>(v.size()) == d, ErrorCode::Schema, "gamma entry length differs from d");
      gamma.push_back(Eigen::Map<const Vec>(v.data(), d));
    }
    std::vector<Mat> cov;
    for (const auto& a : j.at("A")) {
      const auto rows = a.get<std::vector<std::vector<double>>>();
      require(static_cast<int>(rows.size()) == d, ErrorCode::Schema, "A entry must be d x d");
      Mat m(d, d);
      for (int r = 0; r < d; ++r) {
        require(static_cast<int>(rows[static_cast<std::size_t>(r)].size()) == d, ErrorCode::Schema,
                "A entry must be d x d");
        for (int c = 0; c < d; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      }
      cov.push_back(m);
    }
    std::vector<Vec> points;
    std::vector<std::vector<double>> weights;
    if (j.contains("nu_atoms")) {
      for (const auto& atom : j.at("nu_atoms")) {
        const auto x = atom.at("x").get<std::vector<double>>();
        require(static_cast<int>(x.size()) == d, ErrorCode::Schema, "nu atom length differs from d");
        points.push_back(Eigen::Map<const Vec>(x.data(), d));
        weights.push_back(atom.at("weights").get<std::vector<double>>());
      }
    }
    return TripletSystem(d, std::move(grid), std::move(gamma), std::move(cov), std::move(points), std::move(weights));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("system JSON: ") + e.what());
  }
}

SigmaMeasure::SigmaMeasure(std::vector<Slab> slabs) : slabs_(std::move(slabs)) {
  for (const Slab& s : slabs_) {
    require(s.t1 > s.t0 && s.rate >= 0.0 && std::isfinite(s.rate), ErrorCode::InvalidArgument,
            "slabs need a positive time extent and a nonnegative rate");
  }
}

namespace {

double overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace

double SigmaMeasure::mass(std::span<const double> points, double s, double t) const {
  double m = 0.0;
  for (const Slab& sl : slabs_) {
    if (!points.empty()) {
      const bool hit = std::any_of(points.begin(), points.end(),
                                   [&](double p) { return std::abs(p - sl.x) <= kMergeTol; });
      if (!hit) continue;
    }
    m += sl.rate * overlap(sl.t0, sl.t1, s, t);
  }
  return m;
}

double SigmaMeasure::total(double s, double t) const { return mass({}, s, t); }

DiscreteMeasure SigmaMeasure::sigma_at(double t) const {
  std::vector<Atom> atoms;
  for (const Slab& sl : slabs_) {
    const double w = sl.rate * overlap(sl.t0, sl.t1, 0.0, t);
    if (w > 0.0) {
      Vec p(1);
      p << sl.x;
      atoms.push_back({p, w});
    }
  }
  return DiscreteMeasure(1, std::move(atoms)).canonicalize();
}

double SigmaMeasure::integrate(const std::function<double(double)>& g, const std::function<double(double)>& k,
                               double horizon) const {
  // 8-point Gauss-Legendre per slab in t.
  static constexpr double nodes[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                      0.9602898564975363};
  static constexpr double weights[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                        0.1012285362903763};
  double total = 0.0;
  for (const Slab& sl : slabs_) {
    const double a = sl.t0;
    const double b = std::min(sl.t1, horizon);
    if (b <= a) continue;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double kt = 0.0;
    for (int i = 0; i < 4; ++i) kt += weights[i] * (k(c - h * nodes[i]) + k(c + h * nodes[i]));
    total += sl.rate * g(sl.x) * kt * h;
  }
  return total;
}

DiscreteMeasure sigma_at_index(const TripletSystem& sys, std::size_t k) {
  return pair_from_triplet(sys.triplet_at_index(k)).sigma;
}

DiscreteMeasure sigma_at(const TripletSystem& sys, double t) { return pair_from_triplet(sys.triplet_at(t)).sigma; }

double alpha_at(const TripletSystem& sys, double t) { return pair_from_triplet(sys.triplet_at(t)).alpha; }

SigmaMeasure sigma_from_system(const TripletSystem& sys) {
  require(sys.dim() == 1, ErrorCode::DimensionMismatch, "Sigma measure needs a one-dimensional system");
  const auto& grid = sys.grid();
  const auto& points = sys.levy_path().points();
  // Location 0 carries A_t; the others carry w x^2 / (1 + x^2), matching the pair conversion.
  std::vector<double> locations{0.0};
  for (const Vec& p : points) locations.push_back(p(0));
  auto weight = [&](std::size_t loc, std::size_t k) {
    if (loc == 0) return sys.covariances()[k](0, 0);
    const double x = locations[loc];
    return sys.levy_path().weights()[loc - 1][k] * x * x / (1.0 + x * x);
  };
  std::vector<SigmaMeasure::Slab> slabs;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double dt = grid[k] - grid[k - 1];
    for (std::size_t loc = 0; loc < locations.size(); ++loc) {
      const double dw = weight(loc, k) - weight(loc, k - 1);
      require(dw >= -kMonotoneSlack, ErrorCode::Monotonicity, "sigma_t decreases on a grid cell");
      if (dw > 0.0) slabs.push_back({locations[loc], grid[k - 1], grid[k], dw / dt});
    }
  }
  return SigmaMeasure(std::move(slabs));
}

bool system_sigma_check(const TripletSystem& sys, const SigmaMeasure& sigma, double tol) {
  require(sys.dim() == 1, ErrorCode::DimensionMismatch, "Sigma check needs a one-dimensional system");
  const auto& grid = sys.grid();
  std::vector<double> locations{0.0};
  for (const Vec& p : sys.levy_path().points()) locations.push_back(p(0));
  DiscreteMeasure prev = sigma_at_index(sys, 0).canonicalize();
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const DiscreteMeasure cur = sigma_at_index(sys, k).canonicalize();
    for (double x : locations) {
      const double b[1] = {x};
      auto weight_of = [x](const DiscreteMeasure& m) {
        double w = 0.0;
        for (const Atom& a : m.atoms())
          if (std::abs(a.point(0) - x) <= kMergeTol) w += a.weight;
        return w;
      };
      const double expected = weight_of(cur) - weight_of(prev);
      if (std::abs(sigma.mass(b, grid[k - 1], grid[k]) - expected) > tol) return false;
    }
    prev = cur;
  }
  return true;
}

AtomicMeasurePath apply_density(const std::function<double(const Vec&)>& f, const AtomicMeasurePath& path) {
  std::vector<std::vector<double>> w = path.weights();
  for (std::size_t i = 0; i < path.points().size(); ++i) {
    const double fx = f(path.points()[i]);
    require(std::isfinite(fx), ErrorCode::InvalidArgument, "density must be finite on the atoms");
    require(fx >= 0.0, ErrorCode::InvalidArgument, "density must be nonnegative");
    for (double& v : w[i]) v *= fx;
  }
  return AtomicMeasurePath(path.dim(), path.grid(), path.points(), std::move(w));
}

}  // namespace luwc
