#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "luwc/measure.hpp"

namespace luwc {

/// Compact sets K_j = [0, T j / J], j = 1..J, exhausting [0, T].
class Exhaustion {
 public:
  Exhaustion(double horizon, int levels);

  double horizon() const noexcept { return horizon_; }
  int levels() const noexcept { return levels_; }
  /// Right end of K_j for j in 1..levels.
  double upper(int j) const;

 private:
  double horizon_;
  int levels_;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool contains(double t) const noexcept { return t >= lo - 1e-12 && t <= hi + 1e-12; }
};

using Modulus = std::function<double(double)>;

/// A measure-valued path sampled on a time grid, with a declared continuity modulus
/// omega such that distance(mu_s, mu_t) <= omega(|s - t|) on adjacent grid times.
class MeasurePath {
 public:
  /// Path without a declared modulus (omega is +infinity).
  MeasurePath(std::vector<double> grid, std::vector<DiscreteMeasure> measures);
  /// Verifies the declared modulus on adjacent grid pairs with the Levy metric for
  /// one-dimensional probability paths and the bounded-Lipschitz metric otherwise.
  MeasurePath(std::vector<double> grid, std::vector<DiscreteMeasure> measures, Modulus modulus,
              double slack = 1e-6);

  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<DiscreteMeasure>& measures() const noexcept { return measures_; }
  const DiscreteMeasure& at(std::size_t k) const { return measures_.at(k); }
  int dim() const noexcept { return measures_.front().dim(); }
  std::size_t size() const noexcept { return grid_.size(); }
  double modulus(double h) const { return modulus_ ? modulus_(h) : std::numeric_limits<double>::infinity(); }
  bool has_modulus() const noexcept { return static_cast<bool>(modulus_); }
  /// omega evaluated at the largest grid gap inside K: bounds how far the grid max can sit below the sup.
  double discretization_gap(const Interval& k) const;
  bool is_probability(double tol = 1e-9) const;

 private:
  std::vector<double> grid_;
  std::vector<DiscreteMeasure> measures_;
  Modulus modulus_;
};

/// Replaces mu_t by (mu_t + delta_0) / (mu_t(R^d) + 1).
MeasurePath normalize_path(const MeasurePath& path);

struct IndexedPath {
  long n = 0;
  MeasurePath path;
};

enum class Verdict { Converging, NotConverging };
const char* to_string(Verdict v) noexcept;

/// Finite-n proxy for a limit: converging iff the last deviation is below tol and the
/// deviations are non-increasing over the final tail_fraction of the index range.
struct VerdictRule {
  double tol = 0.02;
  double tail_fraction = 1.0 / 3.0;
  double slack = 1e-12;
};

Verdict judge(std::span<const double> deviations, const VerdictRule& rule);

struct DetailRow {
  long n = 0;
  double at = 0.0;  // time or frequency the row refers to
  double deviation = 0.0;
};

struct CriterionSeries {
  std::string name;
  std::vector<long> ns;
  std::vector<double> deviations;
  Verdict verdict = Verdict::Converging;
  std::vector<DetailRow> details;
};

double rho_star(const MeasurePath& p, const MeasurePath& q, const Exhaustion& ex, MetricKind kind,
                const DistanceOptions& options = {});

/// Criterion (1) on a finite test suite: max over f, t in grid and K of |int f d(mu^n_t - mu_t)|.
CriterionSeries check_luwc(std::span<const IndexedPath> family, const MeasurePath& limit,
                           std::span<const TestFunction> tests, const Interval& k, const VerdictRule& rule);
/// Criterion (2): max over the (xi, t) grid of |CF difference|.
CriterionSeries check_cf_lu(std::span<const IndexedPath> family, const MeasurePath& limit,
                            std::span<const Vec> xi_grid, const Interval& k, const VerdictRule& rule);
/// Criterion (3): per fixed xi, max over t; converging iff every xi converges.
CriterionSeries check_cf_ptwise_lu(std::span<const IndexedPath> family, const MeasurePath& limit,
                                   std::span<const Vec> xi_list, const Interval& k, const VerdictRule& rule);
/// Weak deviation at a single time t (a grid time of the family).
CriterionSeries check_fixed_time(std::span<const IndexedPath> family, const MeasurePath& limit,
                                 std::span<const TestFunction> tests, double t, const VerdictRule& rule);
CriterionSeries rho_star_series(std::span<const IndexedPath> family, const MeasurePath& limit,
                                const Exhaustion& ex, MetricKind kind, const VerdictRule& rule);

/// Per axis: tents at the integer centers -3..3 plus min(|x_j|, 1). Cos/sin at 0.25..1 follow.
std::vector<TestFunction> default_test_suite(int dim);
std::vector<Vec> frequency_grid(int dim, double lo, double hi, std::size_t count);

struct EquivalenceConfig {
  std::vector<TestFunction> tests;  // empty selects default_test_suite
  std::vector<Vec> xi_grid;         // empty selects 41 points on [-5, 5] per axis
  std::vector<Vec> xi_list;         // empty selects {+-0.5, +-1, +-2} per axis
  std::optional<Interval> window;   // empty selects the whole time range
  VerdictRule rule;
  std::optional<MetricKind> metric; // adds the rho_star series when set
  int exhaustion_levels = 20;
  std::optional<double> fixed_time;
};

struct ConvergenceReport {
  std::vector<long> ns;
  CriterionSeries weak;         // criterion (1)
  CriterionSeries cf_uniform;   // criterion (2)
  CriterionSeries cf_pointwise; // criterion (3)
  std::optional<CriterionSeries> rho;
  std::optional<CriterionSeries> fixed_time;
  double discretization_gap = 0.0;
  bool normalized = false;
  bool agreement = false;
  /// rho_star and criterion (1) fall below tol at the same index within one step, or neither does.
  std::optional<bool> rho_consistent;

  Verdict verdict() const { return weak.verdict; }
  std::vector<const CriterionSeries*> all_series() const;
};

ConvergenceReport equivalence_report(std::span<const IndexedPath> family, const MeasurePath& limit,
                                     const EquivalenceConfig& config = {});

void to_json(nlohmann::json& j, const CriterionSeries& s);
void to_json(nlohmann::json& j, const ConvergenceReport& r);
/// Rows "n,criterion,deviation,verdict".
std::string to_csv(const ConvergenceReport& r);

struct TailBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double rhs_imag = 0.0;
};

/// mu(R \ (-2/r, 2/r)) against (1/r) int_{-r}^{r} (1 - mu^(xi)) d xi, the latter by adaptive quadrature.
TailBound tail_bound(const DiscreteMeasure& mu, double r);

struct TightnessReport {
  std::vector<double> r_grid;
  std::vector<long> ns;
  std::vector<double> i_sup;                       // per r
  std::vector<std::vector<double>> j_sup;          // [n][r]
  std::vector<std::vector<double>> box_mass_bound; // [n][r]
  /// box_mass_bound <= i_sup + j_sup + 1e-12 everywhere.
  bool consistent() const;
};

TightnessReport tightness_certificate(std::span<const IndexedPath> family, const MeasurePath& limit,
                                      const Interval& k, std::span<const double> r_grid);

}  // namespace luwc
