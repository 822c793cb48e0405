#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "luwc/convergence.hpp"
#include "luwc/system.hpp"
#include "luwc/triplet.hpp"

namespace luwc {

// Rows share the layout of the convergence series; names are drawn from
// beta, C, nu, alpha, sigma, Sigma_big, wcID_beta, wcID_C, wcID_nu, wcID_nu2.
using CriterionResult = CriterionSeries;

/// Radial cutoffs vanishing on B(0, delta) for delta in {0.05, 0.1, 0.2, 0.5}.
std::vector<TestFunction> csharp_suite(int dim);
/// |h|^2 min(|x|,1), |F_xi| for xi in {0.5, 1, 2} e_j, x^3/(1+|x|^3) in one dimension, and
/// cutoff products f chi_delta of bounded-Lipschitz shapes.
std::vector<TestFunction> csharp_sharp_suite(int dim);

struct WcidResult {
  std::vector<CriterionResult> rows;  // wcID_beta, wcID_C, wcID_nu and, when wcID_C converges, wcID_nu2
  /// Per n: whenever the wcID_C deviation is below tol, the C-sharp-sharp deviation stays within
  /// the C-sharp deviation plus 2 tol (tr A~ + 1). Entries are true when the premise fails.
  std::vector<bool> shadow;
};

/// Convergence of infinitely divisible laws through their triplets.
WcidResult check_wcID(std::span<const Triplet> triplets, std::span<const long> ns, const Triplet& limit,
                      std::span<const TestFunction> csharp, std::span<const TestFunction> csharp_sharp,
                      const VerdictRule& rule);

struct FunctionalResult {
  std::vector<CriterionResult> rows;  // beta, C, nu
  Verdict verdict = Verdict::Converging;
};

/// beta: sup over [0, T] of |gamma^n - gamma| (exact on the union of both grids);
/// C and nu: worst case over t in times of the Frobenius and test-integral deviations.
FunctionalResult check_js_functional(std::span<const IndexedSystem> family, const TripletSystem& limit,
                                     std::span<const double> times, std::span<const TestFunction> csharp,
                                     const VerdictRule& rule);

struct PolyaResult {
  std::vector<double> pointwise_dev;  // per n, max over checkpoints
  std::vector<double> uniform_dev;    // per n, max over the full grid
  double checkpoint_mesh = 0.0;
  double omega_at_mesh = 0.0;
  bool certificate = true;
};

struct PolyaOptions {
  std::size_t checkpoint_stride = 100;
  /// Limit increments larger than this between adjacent grid points count as a discontinuity.
  double jump_threshold = 0.25;
  std::optional<Modulus> modulus;  // empirical from the grid when empty
};

PolyaResult polya_lift(std::span<const std::vector<double>> fns, std::span<const double> limit,
                       std::span<const double> grid, const PolyaOptions& options = {});

struct PolarizationResult {
  CriterionResult series;                       // name "C", uniform Frobenius deviation of the rebuilt matrices
  double reconstruction_error = 0.0;            // max |rebuilt - original| over all inputs
  std::vector<std::vector<double>> entry_dev;   // [n][j * d + k], uniform deviation per entry
  bool certificate = true;
};

/// Rebuilds each entry from the monotone quadratic forms at e_j +- e_k and runs polya_lift on them.
PolarizationResult polarize_check(std::span<const std::vector<Mat>> paths, std::span<const long> ns,
                                  std::span<const Mat> limit, std::span<const double> grid,
                                  const VerdictRule& rule, const PolyaOptions& options = {});

struct PairResult {
  std::vector<CriterionResult> rows;  // alpha, sigma
};

PairResult check_pair_criteria(std::span<const IndexedSystem> family, const TripletSystem& limit,
                               std::span<const double> times, std::span<const TestFunction> tests,
                               const VerdictRule& rule);

/// Integral deviation of Sigma^n against Sigma over R x [0, T] on products g(x) k(t),
/// with k in {1, t/T, 1 - t/T}.
CriterionResult check_sigma_big(std::span<const IndexedSystem> family, const TripletSystem& limit,
                                double horizon, std::span<const TestFunction> tests, const VerdictRule& rule);

struct DriftRecoveryOptions {
  double zero_tol = 1e-12;
  /// Largest principal phase step accepted between adjacent grid times.
  double phase_guard = 1.5707963267948966;
};

/// cf[j][k] is the characteristic function at e_j and grid time k. Returns gamma per grid time.
std::vector<Vec> drift_recovery(std::span<const double> grid, std::span<const std::vector<cplx>> cf,
                                std::span<const Mat> covariances, std::span<const LevyMeasure> levy,
                                const DriftRecoveryOptions& options = {});
/// Forward characteristic functions of a system at e_j on its grid, in the layout drift_recovery expects.
std::vector<std::vector<cplx>> system_axis_cf(const TripletSystem& sys);
std::vector<Vec> drift_recovery(const TripletSystem& sys, const DriftRecoveryOptions& options = {});

}  // namespace luwc
