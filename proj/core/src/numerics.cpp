#include "luwc/numerics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "luwc/error.hpp"

namespace luwc {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::NotProbability: return "not a probability measure";
    case ErrorCode::LimitExceeded: return "limit exceeded";
    case ErrorCode::Monotonicity: return "monotonicity violation";
    case ErrorCode::Structure: return "structural invariant violated";
    case ErrorCode::GridMismatch: return "grid mismatch";
    case ErrorCode::BranchTracking: return "branch tracking failed";
    case ErrorCode::Schema: return "schema violation";
    case ErrorCode::UnknownName: return "unknown name";
  }
  return "error";
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

std::vector<double> merge_grids(std::span<const double> a, std::span<const double> b, double tol) {
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double t : all) {
    if (out.empty() || t - out.back() > tol) out.push_back(t);
  }
  return out;
}

Vec unit_vector(int dim, int axis) {
  Vec e = Vec::Zero(dim);
  e(axis) = 1.0;
  return e;
}

double min_eigenvalue(const Mat& m) {
  if (m.size() == 0) return 0.0;
  const Mat sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Mat psd_sqrt(const Mat& m) {
  const Mat sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  Vec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

// Kronrod 15-point nodes/weights with the embedded Gauss 7-point weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

QuadratureResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  return {kronrod * h, std::abs((kronrod - gauss) * h), 15};
}

void adapt(const std::function<double(double)>& f, double a, double b, double abs_tol,
           double rel_tol, int depth, QuadratureResult& acc) {
  QuadratureResult r = gk15(f, a, b);
  acc.evaluations += r.evaluations;
  if (depth <= 0 || r.error_estimate <= std::max(abs_tol, rel_tol * std::abs(r.value))) {
    acc.value += r.value;
    acc.error_estimate += r.error_estimate;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt(f, a, m, 0.5 * abs_tol, rel_tol, depth - 1, acc);
  adapt(f, m, b, 0.5 * abs_tol, rel_tol, depth - 1, acc);
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, double rel_tol, int max_depth) {
  QuadratureResult acc;
  if (a == b) return acc;
  if (b < a) {
    QuadratureResult r = integrate_adaptive(f, b, a, abs_tol, rel_tol, max_depth);
    r.value = -r.value;
    return r;
  }
  adapt(f, a, b, abs_tol, rel_tol, max_depth, acc);
  return acc;
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n = std::min<std::size_t>(jobs, count);
  for (std::size_t w = 0; w < n; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(mix64(mix64(base) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

}  // namespace luwc
