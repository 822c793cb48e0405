#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace luwc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using cplx = std::complex<double>;

/// Evenly spaced points including both ends; count == 1 yields {lo}.
std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Sorted union of two grids, identifying points closer than tol.
std::vector<double> merge_grids(std::span<const double> a, std::span<const double> b, double tol = 1e-12);

Vec unit_vector(int dim, int axis);

/// Smallest eigenvalue of the symmetric part of m.
double min_eigenvalue(const Mat& m);

/// Symmetric square root of a PSD matrix; tiny negative eigenvalues are clamped to zero.
Mat psd_sqrt(const Mat& m);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol = 1e-12, double rel_tol = 1e-12,
                                    int max_depth = 40);

/// Runs body(i) for i in [0, count) on up to jobs threads (jobs <= 1 runs inline).
/// The first exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);

/// SplitMix64 finalizer; used to derive independent stream seeds from counters.
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace luwc
