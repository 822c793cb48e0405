#include "luwc/families.hpp"

#include <cmath>
#include <functional>
#include <nlohmann/json.hpp>

#include "luwc/error.hpp"

namespace luwc {

namespace {

using Scalar = std::function<double(double)>;

struct Jump {
  double x;
  Scalar weight;
};

TripletSystem build_1d(std::vector<double> grid, const Scalar& gamma, const Scalar& a, const std::vector<Jump>& jumps) {
  std::vector<Vec> g;
  std::vector<Mat> c;
  std::vector<Vec> points;
  std::vector<std::vector<double>> weights(jumps.size());
  for (double t : grid) {
    g.push_back(Vec::Constant(1, t == 0.0 ? 0.0 : gamma(t)));
    c.push_back(Mat::Constant(1, 1, t == 0.0 ? 0.0 : a(t)));
  }
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    points.push_back(Vec::Constant(1, jumps[i].x));
    for (double t : grid) weights[i].push_back(t == 0.0 ? 0.0 : jumps[i].weight(t));
  }
  return TripletSystem(1, std::move(grid), std::move(g), std::move(c), std::move(points), std::move(weights));
}

double bump(double u) {
  if (u <= 1.0 || u >= 2.0) return 0.0;
  return u <= 1.5 ? 2.0 * (u - 1.0) : 2.0 * (2.0 - u);
}

const Scalar kZero = [](double) { return 0.0; };
const Scalar kIdentity = [](double t) { return t; };

void check_name(const std::string& name) {
  for (const std::string& n : family_names())
    if (n == name) return;
  throw Error(ErrorCode::UnknownName, "unknown family '" + name + "'");
}

std::vector<double> with_breakpoints(const std::string& name, long n, double horizon, std::span<const double> grid) {
  require(!grid.empty() && grid.front() == 0.0 && std::abs(grid.back() - horizon) <= 1e-12, ErrorCode::GridMismatch,
          "family grid must span [0, horizon]");
  const std::vector<double> extra = n > 0 ? family_breakpoints(name, n, horizon) : std::vector<double>{};
  std::vector<double> g = merge_grids(grid, extra);
  g.back() = horizon;
  return g;
}

}  // namespace

const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names{"cp_to_bm", "bump_drift", "poisson_scaled", "deterministic_drift",
                                              "small_jump_escape"};
  return names;
}

FamilyInfo describe_family(const std::string& name) {
  check_name(name);
  FamilyInfo info;
  info.name = name;
  const Verdict yes = Verdict::Converging;
  const Verdict no = Verdict::NotConverging;
  for (const char* c : {"weak_lu", "cf_lu", "cf_pointwise_lu", "rho_star", "weak_fixed_t", "beta", "C", "nu",
                        "functional", "alpha", "sigma", "Sigma_big"})
    info.expected[c] = yes;
  if (name == "cp_to_bm") {
    info.summary = "symmetric compound Poisson with jumps +-1/sqrt(n) approaching Brownian motion";
    info.member = "gamma_t = 0, A_t = 0, nu_t = (t n / 2)(delta_{1/sqrt n} + delta_{-1/sqrt n})";
    info.limit = "gamma_t = 0, A_t = t, nu_t = 0";
  } else if (name == "bump_drift") {
    info.summary = "deterministic drift bump of height 1 travelling toward t = 0";
    info.member = "gamma_t = b(n t), b the tent on [1, 2] peaking at 1.5 with height 1; A = 0, nu = 0";
    info.limit = "zero system";
    info.deterministic = true;
    for (const char* c : {"weak_lu", "cf_lu", "cf_pointwise_lu", "rho_star", "beta", "functional", "alpha"})
      info.expected[c] = no;
  } else if (name == "poisson_scaled") {
    info.summary = "Poisson process with intensity 1 + 1/n";
    info.member = "gamma_t = t (1 + 1/n), A_t = 0, nu_t = t (1 + 1/n) delta_1";
    info.limit = "gamma_t = t, A_t = 0, nu_t = t delta_1";
  } else if (name == "deterministic_drift") {
    info.summary = "deterministic linear drift with slope 1 + 1/n";
    info.member = "gamma_t = (1 + 1/n) t, A = 0, nu = 0";
    info.limit = "gamma_t = t, A = 0, nu = 0";
    info.deterministic = true;
  } else {
    info.summary = "one-sided small jumps 1/sqrt(n) at rate n, compensated through the truncation";
    info.member = "gamma_t = 0, A_t = 0, nu_t = t n delta_{1/sqrt n}";
    info.limit = "gamma_t = 0, A_t = t, nu_t = 0";
  }
  return info;
}

void to_json(nlohmann::json& j, const FamilyInfo& info) {
  nlohmann::json expected = nlohmann::json::object();
  for (const auto& [k, v] : info.expected) expected[k] = to_string(v);
  j = nlohmann::json{{"name", info.name},
                     {"summary", info.summary},
                     {"member", info.member},
                     {"limit", info.limit},
                     {"deterministic", info.deterministic},
                     {"parameters", {{"horizon", "time horizon T > 0 (default 1)"}}},
                     {"expected", expected}};
}

std::vector<double> family_breakpoints(const std::string& name, long n, double horizon) {
  check_name(name);
  require(n >= 1, ErrorCode::InvalidArgument, "family index must be positive");
  std::vector<double> out;
  if (name == "bump_drift") {
    for (double u : {1.0, 1.5, 2.0}) {
      const double t = u / static_cast<double>(n);
      if (t < horizon) out.push_back(t);
    }
  }
  return out;
}

std::vector<double> family_grid(const std::string& name, std::span<const long> ns, double horizon, std::size_t count) {
  require(horizon > 0.0 && count >= 2, ErrorCode::InvalidArgument, "grid needs T > 0 and two points");
  std::vector<double> g = linspace(0.0, horizon, count);
  for (long n : ns) {
    const std::vector<double> b = family_breakpoints(name, n, horizon);
    g = merge_grids(g, b);
  }
  g.back() = horizon;
  return g;
}

TripletSystem family_member(const std::string& name, long n, double horizon, std::span<const double> grid) {
  check_name(name);
  require(n >= 1, ErrorCode::InvalidArgument, "family index must be positive");
  const double nn = static_cast<double>(n);
  std::vector<double> g = with_breakpoints(name, n, horizon, grid);
  if (name == "cp_to_bm") {
    const double x = 1.0 / std::sqrt(nn);
    const Scalar w = [nn](double t) { return 0.5 * t * nn; };
    return build_1d(std::move(g), kZero, kZero, {{-x, w}, {x, w}});
  }
  if (name == "bump_drift") return build_1d(std::move(g), [nn](double t) { return bump(nn * t); }, kZero, {});
  if (name == "poisson_scaled") {
    const Scalar rate = [nn](double t) { return t * (1.0 + 1.0 / nn); };
    return build_1d(std::move(g), rate, kZero, {{1.0, rate}});
  }
  if (name == "deterministic_drift") return build_1d(std::move(g), [nn](double t) { return (1.0 + 1.0 / nn) * t; }, kZero, {});
  return build_1d(std::move(g), kZero, kZero, {{1.0 / std::sqrt(nn), [nn](double t) { return t * nn; }}});
}

TripletSystem family_limit(const std::string& name, double horizon, std::span<const double> grid) {
  check_name(name);
  std::vector<double> g = with_breakpoints(name, 0, horizon, grid);
  if (name == "cp_to_bm" || name == "small_jump_escape") return build_1d(std::move(g), kZero, kIdentity, {});
  if (name == "bump_drift") return TripletSystem::zero(1, std::move(g));
  if (name == "poisson_scaled") return build_1d(std::move(g), kIdentity, kZero, {{1.0, kIdentity}});
  return build_1d(std::move(g), kIdentity, kZero, {});
}

std::vector<IndexedSystem> family_members(const std::string& name, std::span<const long> ns, double horizon,
                                          std::span<const double> grid) {
  std::vector<IndexedSystem> out;
  for (long n : ns) out.push_back({n, family_member(name, n, horizon, grid)});
  return out;
}

}  // namespace luwc
