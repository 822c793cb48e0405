#pragma once

#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "luwc/measure.hpp"
#include "luwc/triplet.hpp"

namespace luwc {

/// Time-indexed measures on a fixed set of atom locations whose weights are
/// non-decreasing in time and interpolated linearly between grid times.
class AtomicMeasurePath {
 public:
  AtomicMeasurePath(int dim, std::vector<double> grid, std::vector<Vec> points,
                    std::vector<std::vector<double>> weights);

  int dim() const noexcept { return dim_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<Vec>& points() const noexcept { return points_; }
  /// weights()[i][k] is the mass of atom i at grid time k.
  const std::vector<std::vector<double>>& weights() const noexcept { return weights_; }

  std::vector<double> weights_at(double t) const;
  DiscreteMeasure measure_at(double t) const;
  DiscreteMeasure measure_at_index(std::size_t k) const;

 private:
  int dim_;
  std::vector<double> grid_;
  std::vector<Vec> points_;
  std::vector<std::vector<double>> weights_;
};

/// Locates t in a grid: returns (cell index k, fraction) with t = grid[k] + fraction * (grid[k+1] - grid[k]).
std::pair<std::size_t, double> locate(std::span<const double> grid, double t);

/// Lipschitz rates of the piecewise-linear parameters, used to derive continuity moduli.
struct SystemRates {
  double drift = 0.0;             // max |d gamma / dt|
  double covariance_trace = 0.0;  // max d tr(A) / dt
  double jump_mass = 0.0;         // max d nu(R^d) / dt
};

/// Characteristic triplets (gamma_t, A_t, nu_t) on a time grid starting at 0, linear between
/// grid times. nu_t lives on fixed atom locations with non-decreasing weights.
class TripletSystem {
 public:
  TripletSystem(int dim, std::vector<double> grid, std::vector<Vec> gamma, std::vector<Mat> covariance,
                std::vector<Vec> nu_points, std::vector<std::vector<double>> nu_weights);

  static TripletSystem zero(int dim, std::vector<double> grid);

  int dim() const noexcept { return dim_; }
  double horizon() const noexcept { return grid_.back(); }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<Vec>& gammas() const noexcept { return gamma_; }
  const std::vector<Mat>& covariances() const noexcept { return cov_; }
  const AtomicMeasurePath& levy_path() const noexcept { return nu_; }

  Vec gamma_at(double t) const;
  Mat covariance_at(double t) const;
  Triplet triplet_at(double t) const;
  Triplet triplet_at_index(std::size_t k) const;
  Mat modified_second_at(double t) const;

  /// The same system on the union of its grid and extra_times (exact under linear interpolation).
  TripletSystem refined(std::span<const double> extra_times) const;
  SystemRates rates() const;

 private:
  int dim_;
  std::vector<double> grid_;
  std::vector<Vec> gamma_;
  std::vector<Mat> cov_;
  AtomicMeasurePath nu_;
};

struct IndexedSystem {
  long n = 0;
  TripletSystem system;
};

void to_json(nlohmann::json& j, const TripletSystem& sys);
TripletSystem system_from_json(const nlohmann::json& j);

/// Space-time measure on R x [0, T] carried by slabs {x} x (t0, t1] with constant rate.
/// It has no atoms in time by construction.
class SigmaMeasure {
 public:
  struct Slab {
    double x;
    double t0;
    double t1;
    double rate;
  };

  SigmaMeasure() = default;
  explicit SigmaMeasure(std::vector<Slab> slabs);

  const std::vector<Slab>& slabs() const noexcept { return slabs_; }

  /// Sigma({x} x (s, t]) summed over the atoms listed in points (all atoms when points is empty).
  double mass(std::span<const double> points, double s, double t) const;
  /// Sigma(R x (s, t]).
  double total(double s, double t) const;
  /// sigma_t recovered as Sigma(. x [0, t]).
  DiscreteMeasure sigma_at(double t) const;
  /// Integral of g(x) k(t) over R x [0, horizon].
  double integrate(const std::function<double(double)>& g, const std::function<double(double)>& k,
                   double horizon) const;

 private:
  std::vector<Slab> slabs_;
};

/// sigma_t of the characteristic pair at grid time k (zero atom carries A_k).
DiscreteMeasure sigma_at_index(const TripletSystem& sys, std::size_t k);
DiscreteMeasure sigma_at(const TripletSystem& sys, double t);
double alpha_at(const TripletSystem& sys, double t);

SigmaMeasure sigma_from_system(const TripletSystem& sys);
/// Checks Sigma(B x (t_{k-1}, t_k]) = sigma_{t_k}(B) - sigma_{t_{k-1}}(B) on every grid cell
/// and atom singleton B, within tol.
bool system_sigma_check(const TripletSystem& sys, const SigmaMeasure& sigma, double tol = 1e-12);

/// t -> f . m_t for a nonnegative density f evaluated at the atoms.
AtomicMeasurePath apply_density(const std::function<double(const Vec&)>& f, const AtomicMeasurePath& path);

}  // namespace luwc
