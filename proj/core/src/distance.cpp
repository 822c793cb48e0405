#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "luwc/error.hpp"
#include "luwc/measure.hpp"

namespace luwc {

const char* to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::Levy1D: return "levy1d";
    case MetricKind::Prokhorov: return "prokhorov";
    case MetricKind::BoundedLipschitz: return "bounded-lipschitz";
  }
  return "unknown";
}

MetricKind metric_from_string(const std::string& name) {
  if (name == "levy1d") return MetricKind::Levy1D;
  if (name == "prokhorov") return MetricKind::Prokhorov;
  if (name == "bounded-lipschitz" || name == "bl") return MetricKind::BoundedLipschitz;
  throw Error(ErrorCode::UnknownName, "metric '" + name + "'");
}

namespace {

// Right-continuous step CDF of a canonical 1D measure.
class StepCdf {
 public:
  explicit StepCdf(const DiscreteMeasure& mu) {
    for (const Atom& a : mu.atoms()) {
      x_.push_back(a.point(0));
      cum_.push_back((cum_.empty() ? 0.0 : cum_.back()) + a.weight);
    }
  }
  double at(double x) const {  // F(x)
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return it == x_.begin() ? 0.0 : cum_[static_cast<std::size_t>(it - x_.begin()) - 1];
  }
  double left(double x) const {  // F(x-)
    const auto it = std::lower_bound(x_.begin(), x_.end(), x);
    return it == x_.begin() ? 0.0 : cum_[static_cast<std::size_t>(it - x_.begin()) - 1];
  }
  double value_at_index(std::size_t i) const { return cum_[i]; }
  double left_at_index(std::size_t i) const { return i == 0 ? 0.0 : cum_[i - 1]; }
  const std::vector<double>& points() const { return x_; }
  double total() const { return cum_.empty() ? 0.0 : cum_.back(); }

 private:
  std::vector<double> x_;
  std::vector<double> cum_;
};

// sup_x G(x) - F(x + eps), evaluated at the jump points of both step functions.
double levy_excess(const StepCdf& f, const StepCdf& g, double eps) {
  double sup = std::max(0.0, g.total() - f.total());
  for (double gx : g.points()) {
    sup = std::max(sup, g.at(gx) - f.at(gx + eps));
    sup = std::max(sup, g.left(gx) - f.left(gx + eps));
  }
  const auto& fx = f.points();
  for (std::size_t j = 0; j < fx.size(); ++j) {
    const double c = fx[j] - eps;
    sup = std::max(sup, g.at(c) - f.value_at_index(j));
    sup = std::max(sup, g.left(c) - f.left_at_index(j));
  }
  return sup;
}

double levy_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double tol) {
  require(mu.dim() == 1 && nu.dim() == 1, ErrorCode::DimensionMismatch, "Levy metric needs 1D measures");
  require(mu.is_probability() && nu.is_probability(), ErrorCode::NotProbability,
          "Levy metric needs probability measures");
  const StepCdf f(mu);
  const StepCdf g(nu);
  auto feasible = [&](double eps) {
    return levy_excess(f, g, eps) <= eps + 1e-15 && levy_excess(g, f, eps) <= eps + 1e-15;
  };
  if (feasible(0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

double prokhorov_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const DistanceOptions& opt) {
  require(mu.dim() == nu.dim(), ErrorCode::DimensionMismatch, "Prokhorov metric dimension");
  require(mu.size() + nu.size() <= opt.prokhorov_atom_limit, ErrorCode::LimitExceeded,
          "Prokhorov subset enumeration limited to " + std::to_string(opt.prokhorov_atom_limit) + " atoms");
  const std::size_t m = mu.size();
  const std::size_t n = nu.size();
  Mat dist(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (mu.atoms()[i].point - nu.atoms()[j].point).norm();

  // One direction: every subset B of a's atoms obeys a(B) <= b(B^eps) + eps.
  auto direction_ok = [](const std::vector<double>& wa, const std::vector<double>& wb,
                         const std::vector<std::uint32_t>& near_mask, double eps) {
    const std::uint32_t subsets = 1u << wa.size();
    for (std::uint32_t s = 1; s < subsets; ++s) {
      double a_mass = 0.0;
      for (std::size_t i = 0; i < wa.size(); ++i)
        if (s & (1u << i)) a_mass += wa[i];
      double b_mass = 0.0;
      for (std::size_t j = 0; j < wb.size(); ++j)
        if (near_mask[j] & s) b_mass += wb[j];
      if (a_mass > b_mass + eps + 1e-14) return false;
    }
    return true;
  };
  std::vector<double> wmu, wnu;
  for (const Atom& a : mu.atoms()) wmu.push_back(a.weight);
  for (const Atom& a : nu.atoms()) wnu.push_back(a.weight);

  auto feasible = [&](double eps) {
    std::vector<std::uint32_t> nu_near(n, 0), mu_near(m, 0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) <= eps) {
          nu_near[j] |= 1u << i;
          mu_near[i] |= 1u << j;
        }
    return direction_ok(wmu, wnu, nu_near, eps) && direction_ok(wnu, wmu, mu_near, eps);
  };

  if (feasible(0.0)) return 0.0;
  double lo = 0.0;
  double hi = std::max(mu.total_mass(), nu.total_mass());
  while (hi - lo > opt.tol) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  // Snap to an exact pairwise distance when one lies in the final bracket.
  double best = hi;
  for (Eigen::Index i = 0; i < dist.rows(); ++i)
    for (Eigen::Index j = 0; j < dist.cols(); ++j) {
      const double d = dist(i, j);
      if (d > lo && d < best && feasible(d)) best = d;
    }
  return best;
}

// Transportation problem solved by successive shortest paths with potentials.
// Sources carry positive supply, sinks positive demand; all arcs source->sink uncapacitated.
double min_cost_transport(const std::vector<double>& supply, const std::vector<double>& demand, const Mat& cost) {
  const std::size_t ns = supply.size();
  const std::size_t nd = demand.size();
  if (ns == 0 || nd == 0) return 0.0;
  constexpr double kEps = 1e-15;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> s_left = supply;
  std::vector<double> d_left = demand;
  Mat flow = Mat::Zero(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(nd));
  // Node layout: sources [0, ns), sinks [ns, ns + nd).
  const std::size_t nv = ns + nd;
  std::vector<double> pot(nv, 0.0);
  for (std::size_t d = 0; d < nd; ++d) {
    double mn = inf;
    for (std::size_t s = 0; s < ns; ++s) mn = std::min(mn, cost(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(d)));
    pot[ns + d] = mn;
  }
  double total_cost = 0.0;
  for (int iter = 0; iter < 100000; ++iter) {
    double remaining = 0.0;
    for (double v : s_left) remaining += v;
    if (remaining <= 1e-13) break;
    // Dijkstra from all sources with remaining supply, reduced costs.
    std::vector<double> dist(nv, inf);
    std::vector<long> parent(nv, -1);
    std::vector<char> done(nv, 0);
    for (std::size_t s = 0; s < ns; ++s)
      if (s_left[s] > kEps) dist[s] = 0.0;
    for (std::size_t step = 0; step < nv; ++step) {
      std::size_t u = nv;
      double best = inf;
      for (std::size_t v = 0; v < nv; ++v)
        if (!done[v] && dist[v] < best) { best = dist[v]; u = v; }
      if (u == nv) break;
      done[u] = 1;
      if (u < ns) {
        for (std::size_t d = 0; d < nd; ++d) {
          const std::size_t v = ns + d;
          const double rc = cost(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(d)) + pot[u] - pot[v];
          const double nd_ = dist[u] + std::max(rc, 0.0);
          if (nd_ < dist[v]) { dist[v] = nd_; parent[v] = static_cast<long>(u); }
        }
      } else {
        const std::size_t d = u - ns;
        for (std::size_t s = 0; s < ns; ++s) {
          if (flow(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(d)) <= kEps) continue;
          const double rc = -cost(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(d)) + pot[u] - pot[s];
          const double nd_ = dist[u] + std::max(rc, 0.0);
          if (nd_ < dist[s]) { dist[s] = nd_; parent[s] = static_cast<long>(u); }
        }
      }
    }
    // Cheapest reachable sink with unmet demand.
    std::size_t target = nv;
    double best = inf;
    for (std::size_t d = 0; d < nd; ++d)
      if (d_left[d] > kEps && dist[ns + d] < best) { best = dist[ns + d]; target = ns + d; }
    if (target == nv) break;
    double reach = 0.0;
    for (std::size_t v = 0; v < nv; ++v)
      if (dist[v] < inf) reach = std::max(reach, dist[v]);
    // Unreachable nodes shift by the largest distance so reduced costs stay nonnegative.
    for (std::size_t v = 0; v < nv; ++v) pot[v] += dist[v] < inf ? dist[v] : reach;
    // Bottleneck along the path.
    double amount = d_left[target - ns];
    std::size_t v = target;
    while (parent[v] >= 0) {
      const std::size_t u = static_cast<std::size_t>(parent[v]);
      if (u >= ns) amount = std::min(amount, flow(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u - ns)));
      v = u;
    }
    amount = std::min(amount, s_left[v]);
    const std::size_t root = v;
    v = target;
    while (parent[v] >= 0) {
      const std::size_t u = static_cast<std::size_t>(parent[v]);
      if (u < ns) {
        flow(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v - ns)) += amount;
        total_cost += amount * cost(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v - ns));
      } else {
        flow(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u - ns)) -= amount;
        total_cost -= amount * cost(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u - ns));
      }
      v = u;
    }
    s_left[root] -= amount;
    d_left[target - ns] -= amount;
  }
  return total_cost;
}

double bounded_lipschitz_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require(mu.dim() == nu.dim(), ErrorCode::DimensionMismatch, "bounded-Lipschitz metric dimension");
  // Signed measure on the union of supports.
  const DiscreteMeasure signed_support = (mu + nu).canonicalize();
  const std::size_t k = signed_support.size();
  std::vector<double> charge(k, 0.0);
  auto locate = [&](const Vec& p) {
    for (std::size_t i = 0; i < k; ++i)
      if ((signed_support.atoms()[i].point - p).cwiseAbs().maxCoeff() <= kMergeTol) return i;
    throw Error(ErrorCode::InvalidArgument, "atom lost during canonicalization");
  };
  for (const Atom& a : mu.atoms()) charge[locate(a.point)] += a.weight;
  for (const Atom& a : nu.atoms()) charge[locate(a.point)] -= a.weight;

  // A ground node absorbs mass imbalance; moving mass there costs 1 (the sup-norm bound).
  std::vector<std::size_t> src, snk;
  std::vector<double> supply, demand;
  for (std::size_t i = 0; i < k; ++i) {
    if (charge[i] > 1e-15) { src.push_back(i); supply.push_back(charge[i]); }
    else if (charge[i] < -1e-15) { snk.push_back(i); demand.push_back(-charge[i]); }
  }
  const double imbalance = std::accumulate(charge.begin(), charge.end(), 0.0);
  const std::size_t ground = k;
  if (imbalance > 1e-15) { snk.push_back(ground); demand.push_back(imbalance); }
  else if (imbalance < -1e-15) { src.push_back(ground); supply.push_back(-imbalance); }

  Mat cost(static_cast<Eigen::Index>(src.size()), static_cast<Eigen::Index>(snk.size()));
  for (std::size_t s = 0; s < src.size(); ++s)
    for (std::size_t d = 0; d < snk.size(); ++d) {
      double c;
      if (src[s] == ground || snk[d] == ground) c = 1.0;
      else c = std::min((signed_support.atoms()[src[s]].point - signed_support.atoms()[snk[d]].point).norm(), 2.0);
      cost(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(d)) = c;
    }
  return min_cost_transport(supply, demand, cost);
}

}  // namespace

double distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, MetricKind kind, const DistanceOptions& options) {
  require(options.tol > 0.0, ErrorCode::InvalidArgument, "distance tolerance must be positive");
  require(mu.dim() == nu.dim(), ErrorCode::DimensionMismatch, "distance between measures of different dimension");
  const DiscreteMeasure a = mu.canonicalize();
  const DiscreteMeasure b = nu.canonicalize();
  switch (kind) {
    case MetricKind::Levy1D: return levy_distance(a, b, options.tol);
    case MetricKind::Prokhorov: return prokhorov_distance(a, b, options);
    case MetricKind::BoundedLipschitz: return bounded_lipschitz_distance(a, b);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown metric kind");
}

double distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, MetricKind kind, double tol) {
  DistanceOptions opt;
  opt.tol = tol;
  return distance(mu, nu, kind, opt);
}

}  // namespace luwc
