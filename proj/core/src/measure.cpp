#include "luwc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "luwc/error.hpp"

namespace luwc {

namespace {

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(int dim) : dim_(dim) {
  require(dim >= 1, ErrorCode::InvalidArgument, "measure dimension must be positive");
}

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<Atom> atoms) : dim_(dim), atoms_(std::move(atoms)) {
  require(dim >= 1, ErrorCode::InvalidArgument, "measure dimension must be positive");
  for (const Atom& a : atoms_) {
    require(a.point.size() == dim_, ErrorCode::DimensionMismatch, "atom dimension differs from measure dimension");
    require(std::isfinite(a.weight) && a.weight >= 0.0, ErrorCode::InvalidArgument,
            "atom weights must be finite and nonnegative");
    require(a.point.allFinite(), ErrorCode::InvalidArgument, "atom points must be finite");
  }
}

DiscreteMeasure DiscreteMeasure::dirac(const Vec& point, double weight) {
  return DiscreteMeasure(static_cast<int>(point.size()), {Atom{point, weight}});
}

DiscreteMeasure DiscreteMeasure::dirac(double x, double weight) {
  Vec p(1);
  p << x;
  return dirac(p, weight);
}

DiscreteMeasure DiscreteMeasure::on_line(std::span<const double> points, std::span<const double> weights) {
  require(points.size() == weights.size(), ErrorCode::DimensionMismatch, "points and weights differ in length");
  std::vector<Atom> atoms;
  atoms.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    Vec p(1);
    p << points[i];
    atoms.push_back({p, weights[i]});
  }
  return DiscreteMeasure(1, std::move(atoms));
}

double DiscreteMeasure::total_mass() const noexcept {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.weight;
  return s;
}

bool DiscreteMeasure::is_probability(double tol) const noexcept {
  return std::abs(total_mass() - 1.0) <= tol;
}

DiscreteMeasure DiscreteMeasure::canonicalize(double tol) const {
  std::vector<Atom> sorted;
  sorted.reserve(atoms_.size());
  for (const Atom& a : atoms_) {
    if (a.weight > 0.0) sorted.push_back(a);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Atom& a, const Atom& b) { return lex_less(a.point, b.point); });

  // Representatives are kept sorted by first coordinate, so only a window needs scanning.
  std::vector<Atom> merged;
  merged.reserve(sorted.size());
  for (Atom& a : sorted) {
    bool absorbed = false;
    for (std::size_t k = merged.size(); k-- > 0;) {
      if (a.point(0) - merged[k].point(0) > tol) break;
      if ((a.point - merged[k].point).cwiseAbs().maxCoeff() <= tol) {
        merged[k].weight += a.weight;
        absorbed = true;
        break;
      }
    }
    if (!absorbed) merged.push_back(std::move(a));
  }
  DiscreteMeasure out(dim_);
  out.atoms_ = std::move(merged);
  return out;
}

DiscreteMeasure DiscreteMeasure::scaled(double factor) const {
  require(factor >= 0.0, ErrorCode::InvalidArgument, "scale factor must be nonnegative");
  DiscreteMeasure out(*this);
  for (Atom& a : out.atoms_) a.weight *= factor;
  return out;
}

DiscreteMeasure DiscreteMeasure::shifted(const Vec& offset) const {
  require(offset.size() == dim_, ErrorCode::DimensionMismatch, "shift dimension");
  DiscreteMeasure out(*this);
  for (Atom& a : out.atoms_) a.point += offset;
  return out;
}

DiscreteMeasure DiscreteMeasure::normalized() const {
  const double m = total_mass();
  require(m > 0.0, ErrorCode::InvalidArgument, "cannot normalize a zero measure");
  return scaled(1.0 / m);
}

DiscreteMeasure DiscreteMeasure::convolve(const DiscreteMeasure& other, double prune) const {
  require(other.dim_ == dim_, ErrorCode::DimensionMismatch, "convolution dimension");
  std::vector<Atom> atoms;
  atoms.reserve(atoms_.size() * other.atoms_.size());
  for (const Atom& a : atoms_) {
    for (const Atom& b : other.atoms_) {
      const double w = a.weight * b.weight;
      if (w > prune) atoms.push_back({a.point + b.point, w});
    }
  }
  return DiscreteMeasure(dim_, std::move(atoms)).canonicalize();
}

double DiscreteMeasure::mass_outside_box(double half_width) const {
  double s = 0.0;
  for (const Atom& a : atoms_) {
    if (a.point.cwiseAbs().maxCoeff() >= half_width) s += a.weight;
  }
  return s;
}

DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  require(a.dim_ == b.dim_, ErrorCode::DimensionMismatch, "sum of measures");
  std::vector<Atom> atoms = a.atoms_;
  atoms.insert(atoms.end(), b.atoms_.begin(), b.atoms_.end());
  return DiscreteMeasure(a.dim_, std::move(atoms));
}

bool approx_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol) {
  if (a.dim() != b.dim()) return false;
  const DiscreteMeasure ca = a.canonicalize();
  const DiscreteMeasure cb = b.canonicalize();
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if ((ca.atoms()[i].point - cb.atoms()[i].point).cwiseAbs().maxCoeff() > tol) return false;
    if (std::abs(ca.atoms()[i].weight - cb.atoms()[i].weight) > tol) return false;
  }
  return true;
}

cplx integrate(const DiscreteMeasure& mu, const TestFunction& f) {
  require(f.dim() == 0 || f.dim() == mu.dim(), ErrorCode::DimensionMismatch,
          "test function '" + f.name() + "' does not match measure dimension");
  cplx s{0.0, 0.0};
  for (const Atom& a : mu.atoms()) s += a.weight * f(a.point);
  return s;
}

cplx cf_eval(const DiscreteMeasure& mu, const Vec& xi) {
  require(xi.size() == mu.dim(), ErrorCode::DimensionMismatch, "frequency dimension");
  double re = 0.0;
  double im = 0.0;
  for (const Atom& a : mu.atoms()) {
    const double phase = xi.dot(a.point);
    re += a.weight * std::cos(phase);
    im += a.weight * std::sin(phase);
  }
  return {re, im};
}

cplx cf_eval(const DiscreteMeasure& mu, double xi) {
  require(mu.dim() == 1, ErrorCode::DimensionMismatch, "scalar frequency needs a 1D measure");
  double re = 0.0;
  double im = 0.0;
  for (const Atom& a : mu.atoms()) {
    const double phase = xi * a.point(0);
    re += a.weight * std::cos(phase);
    im += a.weight * std::sin(phase);
  }
  return {re, im};
}

void to_json(nlohmann::json& j, const DiscreteMeasure& mu) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const Atom& a : mu.atoms()) {
    std::vector<double> p(a.point.data(), a.point.data() + a.point.size());
    atoms.push_back(nlohmann::json::array({p, a.weight}));
  }
  j = nlohmann::json{{"dim", mu.dim()}, {"atoms", atoms}};
}

DiscreteMeasure measure_from_json(const nlohmann::json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    std::vector<Atom> atoms;
    for (const auto& entry : j.at("atoms")) {
      require(entry.is_array() && entry.size() == 2, ErrorCode::Schema, "atom must be [point, weight]");
      const auto p = entry.at(0).get<std::vector<double>>();
      Vec point = Eigen::Map<const Vec>(p.data(), static_cast<Eigen::Index>(p.size()));
      atoms.push_back({point, entry.at(1).get<double>()});
    }
    return DiscreteMeasure(dim, std::move(atoms));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("measure JSON: ") + e.what());
  }
}

}  // namespace luwc
