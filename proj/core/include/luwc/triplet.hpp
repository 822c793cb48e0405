#pragma once

#include "luwc/measure.hpp"
#include "luwc/numerics.hpp"

namespace luwc {

/// The fixed truncation function: identity on the closed unit ball, tapering radially
/// to zero at |x| = 2, and zero beyond.
Vec truncate(const Vec& x);
double truncate(double x);

/// A finite Levy measure: a discrete measure with no atom within kMergeTol of the origin.
class LevyMeasure {
 public:
  explicit LevyMeasure(int dim = 1) : base_(dim) {}
  explicit LevyMeasure(DiscreteMeasure base);

  const DiscreteMeasure& measure() const noexcept { return base_; }
  int dim() const noexcept { return base_.dim(); }
  const std::vector<Atom>& atoms() const noexcept { return base_.atoms(); }
  double total_mass() const noexcept { return base_.total_mass(); }

 private:
  DiscreteMeasure base_;
};

/// Characteristic triplet (gamma, A, nu) relative to the fixed truncation.
class Triplet {
 public:
  explicit Triplet(int dim = 1);
  Triplet(Vec gamma, Mat covariance, LevyMeasure nu);

  static Triplet zero(int dim) { return Triplet(dim); }
  static Triplet gaussian(const Mat& covariance);
  /// One-dimensional shorthand.
  static Triplet scalar(double gamma, double a, const DiscreteMeasure& nu);

  int dim() const noexcept { return static_cast<int>(gamma_.size()); }
  const Vec& gamma() const noexcept { return gamma_; }
  const Mat& covariance() const noexcept { return a_; }
  const LevyMeasure& levy() const noexcept { return nu_; }

 private:
  Vec gamma_;
  Mat a_;
  LevyMeasure nu_;
};

/// Characteristic pair (alpha, sigma) of a one-dimensional infinitely divisible law.
struct Pair1D {
  double alpha = 0.0;
  DiscreteMeasure sigma{1};
};

/// i xi.gamma - xi.A xi / 2 + sum_i w_i (exp(i xi.x_i) - 1 - i xi.h(x_i)).
cplx lk_exponent(const Triplet& tr, const Vec& xi);
cplx lk_exponent(const Triplet& tr, double xi);

/// Same exponent written with the modified second characteristic and the integrand
/// F_xi(x) = exp(i xi.x) - 1 - i xi.h(x) + |xi.h(x)|^2 / 2.
cplx lk_exponent_modified(const Triplet& tr, const Vec& xi);

/// F_xi(x), evaluated without cancellation for small arguments.
cplx modified_integrand(const Vec& xi, const Vec& x);

/// A + sum_i w_i h(x_i) h(x_i)^T.
Mat modified_second(const Triplet& tr);

/// exp(lk_exponent): characteristic function of the law with this triplet.
cplx triplet_cf(const Triplet& tr, const Vec& xi);

Pair1D pair_from_triplet(const Triplet& tr);
Triplet triplet_from_pair(const Pair1D& p);

}  // namespace luwc
