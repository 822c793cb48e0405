#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "luwc/convergence.hpp"
#include "luwc/criteria.hpp"
#include "luwc/system.hpp"

namespace luwc {

/// Right-continuous step path on [0, T]: values[k] holds on [breakpoints[k], breakpoints[k+1]).
/// breakpoints[0] = 0 and values[0] = 0.
class CadlagPath {
 public:
  CadlagPath(int dim, double horizon, std::vector<double> breakpoints, std::vector<Vec> values);

  int dim() const noexcept { return dim_; }
  double horizon() const noexcept { return horizon_; }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<Vec>& values() const noexcept { return values_; }

  Vec at(double t) const;
  /// Drops breakpoints across which the value does not change.
  CadlagPath compressed(double tol = 0.0) const;

 private:
  int dim_;
  double horizon_;
  std::vector<double> breakpoints_;
  std::vector<Vec> values_;
};

struct PathEnsemble {
  std::vector<CadlagPath> paths;
  std::uint64_t seed = 0;
  std::shared_ptr<const TripletSystem> system;
};

struct FddQuery {
  std::vector<double> times;
  std::vector<Vec> frequencies;
};

/// One path of the additive process. Cells are those of the system grid refined by grid;
/// each cell contributes an independent infinitely divisible increment. Jumps sit at cell ends.
CadlagPath sample_path(const TripletSystem& sys, std::span<const double> grid, std::uint64_t seed,
                       std::uint64_t path_index = 0);
PathEnsemble sample_ensemble(const TripletSystem& sys, std::span<const double> grid, std::size_t count,
                             std::uint64_t seed, unsigned jobs = 1);

Triplet increment_triplet(const TripletSystem& sys, double s, double t);
cplx increment_cf(const TripletSystem& sys, double s, double t, const Vec& xi);
cplx marginal_cf(const TripletSystem& sys, double t, const Vec& xi);
cplx fdd_cf(const TripletSystem& sys, const FddQuery& q);

cplx empirical_cf(const PathEnsemble& e, double t, const Vec& xi);
/// Sample correlation of component j between X_t - X_s and X_u - X_t.
double increment_correlation(const PathEnsemble& e, int component, double s, double t, double u);

struct MarginalOptions {
  /// Gaussian lattice spacing in standard deviations (one-dimensional covariance).
  double gauss_spacing = 0.05;
  double gauss_width = 10.0;
  /// Poisson counts are cut where the remaining tail is below this.
  double poisson_tail = 1e-15;
  double prune = 1e-300;
};

/// Discrete stand-in for the law of X_t: exact compound-Poisson lattice convolved with a
/// trapezoid lattice of the Gaussian part, shifted by gamma - int h d nu and scaled to mass 1.
DiscreteMeasure marginal_law(const TripletSystem& sys, double t, const MarginalOptions& options = {});

/// Marginal laws on grid with the continuity modulus
///   omega(s) = (R_gamma + 2 R_nu) s + (R_A s)^(1/3) + lattice spacing * sqrt(max tr A),
/// verified on adjacent grid pairs (one-dimensional systems; higher dimensions carry no modulus).
MeasurePath marginal_path(const TripletSystem& sys, std::span<const double> grid,
                          const MarginalOptions& options = {});

void write_ensemble_jsonl(std::ostream& os, const PathEnsemble& e);
/// Rows t,component,mean,variance,xi,cf_re,cf_im.
void write_ensemble_summary(std::ostream& os, const PathEnsemble& e, std::span<const double> times,
                            std::span<const double> xi_grid);

struct SkorokhodOptions {
  double mesh = 1e-3;
  std::size_t breakpoint_limit = 24;
};

/// Upper bound on the J1 distance over time changes that are piecewise linear between matched
/// breakpoints, minimized exactly over all monotone matchings.
double skorokhod_j1(const CadlagPath& p, const CadlagPath& q, const SkorokhodOptions& options = {});
double skorokhod_j1(const CadlagPath& p, const CadlagPath& q, double mesh);

struct HarnessConfig {
  std::vector<double> grid;  // shared time grid of the marginal paths
  EquivalenceConfig equivalence;
  std::vector<double> functional_times;
  std::vector<TestFunction> csharp;  // empty selects csharp_suite
  SkorokhodOptions skorokhod;
  MarginalOptions marginal;
  unsigned jobs = 1;
};

struct HarnessReport {
  ConvergenceReport marginal;    // side A
  FunctionalResult functional;   // side B, the triplet criteria stand in for convergence in law on D
  bool agree = false;
  bool deterministic = false;
  std::vector<double> skorokhod; // per n, when every system is deterministic
};

bool is_deterministic(const TripletSystem& sys);
/// The path of a deterministic system sampled on its own grid.
CadlagPath deterministic_path(const TripletSystem& sys);

HarnessReport functional_harness(std::span<const IndexedSystem> family, const TripletSystem& limit,
                                 const HarnessConfig& config);

}  // namespace luwc
