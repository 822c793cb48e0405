#include <algorithm>
#include <cmath>
#include <limits>

#include "luwc/error.hpp"
#include "luwc/process.hpp"

namespace luwc {

namespace {

// Jump times strictly inside (0, T), framed by 0 and T, with the value held after each node.
struct Nodes {
  std::vector<double> time;
  std::vector<Vec> value;
  Vec terminal;
};

Nodes nodes_of(const CadlagPath& path) {
  Nodes n;
  const double horizon = path.horizon();
  for (std::size_t k = 0; k < path.breakpoints().size(); ++k) {
    const double b = path.breakpoints()[k];
    if (k > 0 && b >= horizon) break;
    n.time.push_back(b);
    n.value.push_back(path.values()[k]);
  }
  n.time.push_back(horizon);
  n.value.push_back(n.value.back());
  n.terminal = path.at(horizon);
  return n;
}

// Segment between matched nodes (i0 -> j0) and (i1 -> j1): lambda maps q-time linearly onto p-time.
double segment_cost(const Nodes& p, const Nodes& q, std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
  const double qa = q.time[j0], qb = q.time[j1];
  const double pa = p.time[i0], pb = p.time[i1];
  double cost = std::max(std::abs(pa - qa), std::abs(pb - qb));
  const double ratio = (qb - qa) / (pb - pa);
  const double eps = 1e-14 * std::max(1.0, q.time.back());

  std::size_t ip = i0 + 1, jq = j0 + 1;
  Vec pv = p.value[i0], qv = q.value[j0];
  cost = std::max(cost, (pv - qv).norm());
  while (ip < i1 || jq < j1) {
    const double tp = ip < i1 ? qa + (p.time[ip] - pa) * ratio : std::numeric_limits<double>::infinity();
    const double tq = jq < j1 ? q.time[jq] : std::numeric_limits<double>::infinity();
    const double next = std::min(tp, tq);
    if (tp <= next + eps) pv = p.value[ip++];
    if (tq <= next + eps) qv = q.value[jq++];
    cost = std::max(cost, (pv - qv).norm());
  }
  return cost;
}

}  // namespace

double skorokhod_j1(const CadlagPath& p, const CadlagPath& q, const SkorokhodOptions& options) {
  require(options.mesh > 0.0, ErrorCode::InvalidArgument, "mesh must be positive");
  require(p.dim() == q.dim(), ErrorCode::DimensionMismatch, "paths differ in dimension");
  require(std::abs(p.horizon() - q.horizon()) <= 1e-12, ErrorCode::GridMismatch, "paths differ in horizon");
  const Nodes a = nodes_of(p.compressed());
  const Nodes b = nodes_of(q.compressed());
  require(a.time.size() - 2 <= options.breakpoint_limit && b.time.size() - 2 <= options.breakpoint_limit,
          ErrorCode::LimitExceeded, "too many breakpoints for the matching search");

  const std::size_t na = a.time.size(), nb = b.time.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(na, std::vector<double>(nb, inf));
  best[0][0] = 0.0;
  for (std::size_t i = 1; i < na; ++i) {
    for (std::size_t j = 1; j < nb; ++j) {
      // The horizon may only be matched with the horizon.
      if ((i == na - 1) != (j == nb - 1)) continue;
      double v = inf;
      for (std::size_t i0 = 0; i0 < i; ++i0)
        for (std::size_t j0 = 0; j0 < j; ++j0) {
          if (best[i0][j0] >= v) continue;
          v = std::min(v, std::max(best[i0][j0], segment_cost(a, b, i0, j0, i, j)));
        }
      best[i][j] = v;
    }
  }
  return std::max(best[na - 1][nb - 1], (a.terminal - b.terminal).norm());
}

double skorokhod_j1(const CadlagPath& p, const CadlagPath& q, double mesh) {
  SkorokhodOptions o;
  o.mesh = mesh;
  return skorokhod_j1(p, q, o);
}

}  // namespace luwc
