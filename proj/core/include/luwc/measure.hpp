#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "luwc/numerics.hpp"

namespace luwc {

/// Points closer than this (max-norm) are identified by canonicalize().
inline constexpr double kMergeTol = 1e-12;

struct Atom {
  Vec point;
  double weight = 0.0;
};

/// Finite Borel measure on R^dim carried by finitely many weighted atoms.
/// Immutable after construction; all transformations return new measures.
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(int dim = 1);
  DiscreteMeasure(int dim, std::vector<Atom> atoms);

  static DiscreteMeasure dirac(const Vec& point, double weight = 1.0);
  static DiscreteMeasure dirac(double x, double weight = 1.0);
  static DiscreteMeasure zero(int dim) { return DiscreteMeasure(dim); }
  /// One-dimensional measure from parallel point/weight arrays.
  static DiscreteMeasure on_line(std::span<const double> points, std::span<const double> weights);

  int dim() const noexcept { return dim_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  double total_mass() const noexcept;
  bool is_probability(double tol = 1e-9) const noexcept;

  /// Merges atoms within kMergeTol and drops zero weights. Output is sorted lexicographically.
  DiscreteMeasure canonicalize(double tol = kMergeTol) const;
  DiscreteMeasure scaled(double factor) const;
  DiscreteMeasure shifted(const Vec& offset) const;
  DiscreteMeasure normalized() const;
  /// Convolution; atoms of weight below prune are discarded before merging.
  DiscreteMeasure convolve(const DiscreteMeasure& other, double prune = 0.0) const;
  /// Mass outside the open box (-half_width, half_width)^dim.
  double mass_outside_box(double half_width) const;

  friend DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b);

 private:
  int dim_;
  std::vector<Atom> atoms_;
};

/// True when both canonical forms agree atom-by-atom within tol.
bool approx_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol = 1e-12);

enum class TestKind {
  BoundedLipschitz,
  TrigReal,
  TrigImag,
  Exponential,
  RadialCutoff,       // C-sharp: vanishes on a closed ball around the origin
  QuadraticVanishing, // C-sharp-sharp: |f(x)| <= c |x|^3 on a ball around the origin
  General,
};

const char* to_string(TestKind kind) noexcept;

/// A bounded test function together with the structural facts the checkers rely on.
class TestFunction {
 public:
  using Fn = std::function<cplx(const Vec&)>;

  cplx operator()(const Vec& x) const { return fn_(x); }

  TestKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  /// Required dimension, or 0 when the function accepts any dimension.
  int dim() const noexcept { return dim_; }
  double bound() const noexcept { return bound_; }
  double lipschitz() const noexcept { return lipschitz_; }
  /// Radius of the closed ball on which a C-sharp member vanishes (0 otherwise).
  double zero_radius() const noexcept { return zero_radius_; }
  /// Ball radius and constant of the cubic vanishing declaration (C-sharp-sharp).
  double vanish_radius() const noexcept { return vanish_radius_; }
  double vanish_constant() const noexcept { return vanish_constant_; }

  bool is_csharp() const noexcept { return zero_radius_ > 0.0; }
  bool is_csharp_sharp() const noexcept { return vanish_radius_ > 0.0; }

  static TestFunction constant(double c);
  /// min(|x|, 1).
  static TestFunction capped_norm();
  /// Tent of height 1 and given radius around center (Euclidean norm).
  static TestFunction tent(const Vec& center, double radius);
  /// Tent in a single coordinate: max(0, 1 - |x_axis - center| / radius).
  static TestFunction axis_tent(int axis, double center, double radius);
  static TestFunction cos_at(const Vec& xi);
  static TestFunction sin_at(const Vec& xi);
  static TestFunction exp_at(const Vec& xi);
  /// 0 on |x| <= delta, (|x| - delta) / delta up to 2 delta, 1 beyond.
  static TestFunction radial_cutoff(double delta);
  /// f(x) * chi(x) where chi vanishes on B(0, delta/2) and equals 1 off B(0, delta).
  static TestFunction with_cutoff(const TestFunction& f, double delta);
  static TestFunction quadratic_vanishing(std::string name, int dim, Fn fn, double bound,
                                          double radius, double constant);
  static TestFunction general(std::string name, int dim, Fn fn,
                              double bound = std::numeric_limits<double>::infinity(),
                              double lipschitz = std::numeric_limits<double>::quiet_NaN());

 private:
  TestFunction(TestKind kind, std::string name, int dim, Fn fn, double bound, double lipschitz);

  TestKind kind_;
  std::string name_;
  int dim_;
  Fn fn_;
  double bound_;
  double lipschitz_;
  double zero_radius_ = 0.0;
  double vanish_radius_ = 0.0;
  double vanish_constant_ = 0.0;
};

/// Samples the declared structure (bound, C-sharp dead zone, cubic vanishing rate)
/// on rays toward the origin; throws ErrorCode::Structure on the first violation.
void verify_structure(const TestFunction& f, int dim);

cplx integrate(const DiscreteMeasure& mu, const TestFunction& f);
cplx cf_eval(const DiscreteMeasure& mu, const Vec& xi);
cplx cf_eval(const DiscreteMeasure& mu, double xi);

enum class MetricKind { Levy1D, Prokhorov, BoundedLipschitz };

const char* to_string(MetricKind kind) noexcept;
MetricKind metric_from_string(const std::string& name);

struct DistanceOptions {
  double tol = 1e-6;
  std::size_t prokhorov_atom_limit = 14;
};

/// Weak-topology distance between finite discrete measures.
///   Levy1D            Levy metric of the CDFs; probability measures on R only.
///   Prokhorov         Levy-Prokhorov metric via subset enumeration and bisection on epsilon.
///   BoundedLipschitz  sup over |f| <= 1, Lip(f) <= 1 of |int f d(mu - nu)|, solved exactly
///                     as the dual min-cost transshipment problem.
double distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, MetricKind kind,
                const DistanceOptions& options = {});
double distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, MetricKind kind, double tol);

void to_json(nlohmann::json& j, const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const nlohmann::json& j);

}  // namespace luwc
