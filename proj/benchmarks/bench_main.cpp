#include <benchmark/benchmark.h>

#include <random>

#include "luwc/convergence.hpp"
#include "luwc/families.hpp"
#include "luwc/process.hpp"

namespace {

luwc::DiscreteMeasure random_measure(std::mt19937_64& rng, int atoms) {
  std::uniform_real_distribution<double> pos(-3.0, 3.0), wt(0.1, 1.0);
  std::vector<luwc::Atom> a;
  for (int i = 0; i < atoms; ++i) a.push_back({luwc::Vec::Constant(1, pos(rng)), wt(rng)});
  return luwc::DiscreteMeasure(1, std::move(a)).normalized();
}

void BM_Distance(benchmark::State& state, luwc::MetricKind kind) {
  std::mt19937_64 rng(1);
  const int atoms = static_cast<int>(state.range(0));
  const auto mu = random_measure(rng, atoms);
  const auto nu = random_measure(rng, atoms);
  for (auto _ : state) benchmark::DoNotOptimize(luwc::distance(mu, nu, kind));
}
BENCHMARK_CAPTURE(BM_Distance, levy, luwc::MetricKind::Levy1D)->Arg(10)->Arg(100)->Arg(1000);
BENCHMARK_CAPTURE(BM_Distance, bounded_lipschitz, luwc::MetricKind::BoundedLipschitz)->Arg(10)->Arg(50)->Arg(200);
BENCHMARK_CAPTURE(BM_Distance, prokhorov, luwc::MetricKind::Prokhorov)->Arg(3)->Arg(5)->Arg(7);

void BM_MarginalLaw(benchmark::State& state) {
  const auto grid = luwc::linspace(0.0, 1.0, 21);
  const auto sys = luwc::family_member("cp_to_bm", state.range(0), 1.0, grid);
  for (auto _ : state) benchmark::DoNotOptimize(luwc::marginal_law(sys, 1.0));
}
BENCHMARK(BM_MarginalLaw)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Skorokhod(benchmark::State& state) {
  const std::size_t jumps = static_cast<std::size_t>(state.range(0));
  std::vector<double> bp;
  std::vector<luwc::Vec> pv, qv;
  for (std::size_t i = 0; i < jumps; ++i) {
    bp.push_back(static_cast<double>(i) / static_cast<double>(jumps));
    pv.push_back(luwc::Vec::Constant(1, static_cast<double>(i % 3)));
    qv.push_back(luwc::Vec::Constant(1, i == 0 ? 0.0 : static_cast<double>((i + 1) % 3)));
  }
  const luwc::CadlagPath p(1, 1.0, bp, pv), q(1, 1.0, bp, qv);
  for (auto _ : state) benchmark::DoNotOptimize(luwc::skorokhod_j1(p, q));
}
BENCHMARK(BM_Skorokhod)->Arg(4)->Arg(12)->Arg(24);

void BM_EquivalenceReport(benchmark::State& state) {
  const std::vector<long> ns{2, 10, 100, 1000, 10000};
  const auto grid = luwc::family_grid("cp_to_bm", ns, 1.0);
  std::vector<luwc::IndexedPath> fam;
  for (const auto& m : luwc::family_members("cp_to_bm", ns, 1.0, grid)) fam.push_back({m.n, luwc::marginal_path(m.system, grid)});
  const auto limit = luwc::marginal_path(luwc::family_limit("cp_to_bm", 1.0, grid), grid);
  for (auto _ : state) benchmark::DoNotOptimize(luwc::equivalence_report(fam, limit, {}));
}
BENCHMARK(BM_EquivalenceReport)->Unit(benchmark::kMillisecond);

void BM_SampleEnsemble(benchmark::State& state) {
  const auto grid = luwc::linspace(0.0, 1.0, 21);
  const auto sys = luwc::family_member("cp_to_bm", 100, 1.0, grid);
  for (auto _ : state) benchmark::DoNotOptimize(luwc::sample_ensemble(sys, grid, 1000, 7, 1));
}
BENCHMARK(BM_SampleEnsemble)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
