#include "luwc/triplet.hpp"

#include <cmath>

#include "luwc/error.hpp"

namespace luwc {

Vec truncate(const Vec& x) {
  const double r = x.norm();
  if (r <= 1.0) return x;
  if (r <= 2.0) return x * ((2.0 - r) / r);
  return Vec::Zero(x.size());
}

double truncate(double x) {
  const double r = std::abs(x);
  if (r <= 1.0) return x;
  if (r <= 2.0) return x * (2.0 - r) / r;
  return 0.0;
}

LevyMeasure::LevyMeasure(DiscreteMeasure base) : base_(std::move(base)) {
  for (const Atom& a : base_.atoms()) {
    require(a.point.cwiseAbs().maxCoeff() > kMergeTol, ErrorCode::InvalidArgument,
            "Levy measure may not charge the origin");
  }
}

Triplet::Triplet(int dim) : gamma_(Vec::Zero(dim)), a_(Mat::Zero(dim, dim)), nu_(dim) {}

Triplet::Triplet(Vec gamma, Mat covariance, LevyMeasure nu)
    : gamma_(std::move(gamma)), a_(std::move(covariance)), nu_(std::move(nu)) {
  const auto d = gamma_.size();
  require(d >= 1, ErrorCode::InvalidArgument, "triplet dimension must be positive");
  require(a_.rows() == d && a_.cols() == d && nu_.dim() == d, ErrorCode::DimensionMismatch,
          "triplet components disagree on dimension");
  require((a_ - a_.transpose()).cwiseAbs().maxCoeff() <= 1e-10, ErrorCode::InvalidArgument,
          "covariance must be symmetric");
  require(min_eigenvalue(a_) >= -1e-10, ErrorCode::InvalidArgument,
          "covariance must be positive semidefinite");
}

Triplet Triplet::gaussian(const Mat& covariance) {
  const int d = static_cast<int>(covariance.rows());
  return Triplet(Vec::Zero(d), covariance, LevyMeasure(d));
}

Triplet Triplet::scalar(double gamma, double a, const DiscreteMeasure& nu) {
  Vec g(1);
  g << gamma;
  Mat m(1, 1);
  m << a;
  return Triplet(g, m, LevyMeasure(nu));
}

cplx lk_exponent(const Triplet& tr, const Vec& xi) {
  require(xi.size() == tr.dim(), ErrorCode::DimensionMismatch, "frequency dimension");
  double re = -0.5 * xi.dot(tr.covariance() * xi);
  double im = xi.dot(tr.gamma());
  for (const Atom& a : tr.levy().atoms()) {
    const double phase = xi.dot(a.point);
    re += a.weight * (std::cos(phase) - 1.0);
    im += a.weight * (std::sin(phase) - xi.dot(truncate(a.point)));
  }
  return {re, im};
}

cplx lk_exponent(const Triplet& tr, double xi) {
  Vec v(1);
  v << xi;
  return lk_exponent(tr, v);
}

cplx modified_integrand(const Vec& xi, const Vec& x) {
  const double y = xi.dot(x);
  const Vec hx = truncate(x);
  const double yh = xi.dot(hx);
  if (x.norm() <= 1.0 && std::abs(y) < 1e-2) {
    // h(x) = x here, so F = sum_{k>=3} (i y)^k / k!.
    const double y2 = y * y;
    const double re = y2 * y2 / 24.0 * (1.0 - y2 / 30.0 + y2 * y2 / 1680.0);
    const double im = -y * y2 / 6.0 * (1.0 - y2 / 20.0 + y2 * y2 / 840.0);
    return {re, im};
  }
  return {std::cos(y) - 1.0 + 0.5 * yh * yh, std::sin(y) - yh};
}

cplx lk_exponent_modified(const Triplet& tr, const Vec& xi) {
  require(xi.size() == tr.dim(), ErrorCode::DimensionMismatch, "frequency dimension");
  const Mat at = modified_second(tr);
  cplx s{-0.5 * xi.dot(at * xi), xi.dot(tr.gamma())};
  for (const Atom& a : tr.levy().atoms()) s += a.weight * modified_integrand(xi, a.point);
  return s;
}

Mat modified_second(const Triplet& tr) {
  Mat m = tr.covariance();
  for (const Atom& a : tr.levy().atoms()) {
    const Vec h = truncate(a.point);
    m += a.weight * h * h.transpose();
  }
  return 0.5 * (m + m.transpose());
}

cplx triplet_cf(const Triplet& tr, const Vec& xi) { return std::exp(lk_exponent(tr, xi)); }

Pair1D pair_from_triplet(const Triplet& tr) {
  require(tr.dim() == 1, ErrorCode::DimensionMismatch, "characteristic pairs are one-dimensional");
  Pair1D p;
  p.alpha = tr.gamma()(0);
  std::vector<Atom> sigma;
  if (tr.covariance()(0, 0) > 0.0) sigma.push_back({Vec::Zero(1), tr.covariance()(0, 0)});
  for (const Atom& a : tr.levy().atoms()) {
    const double x = a.point(0);
    p.alpha -= a.weight * (truncate(x) - x / (1.0 + x * x));
    sigma.push_back({a.point, a.weight * x * x / (1.0 + x * x)});
  }
  p.sigma = DiscreteMeasure(1, std::move(sigma));
  return p;
}

Triplet triplet_from_pair(const Pair1D& p) {
  require(p.sigma.dim() == 1, ErrorCode::DimensionMismatch, "characteristic pairs are one-dimensional");
  double gamma = p.alpha;
  double a = 0.0;
  std::vector<Atom> nu;
  for (const Atom& atom : p.sigma.atoms()) {
    const double x = atom.point(0);
    if (std::abs(x) <= kMergeTol) {
      a += atom.weight;
      continue;
    }
    const double density = (1.0 + x * x) / (x * x);
    gamma -= (x / (1.0 + x * x) - truncate(x)) * density * atom.weight;
    nu.push_back({atom.point, atom.weight * density});
  }
  return Triplet::scalar(gamma, a, DiscreteMeasure(1, std::move(nu)));
}

}  // namespace luwc
