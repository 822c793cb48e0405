#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "luwc/error.hpp"
#include "luwc/families.hpp"
#include "luwc/process.hpp"
#include "luwc/report.hpp"
#include "luwc_verify/acceptance.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, unsigned jobs) {
  luwc::RunConfig cfg = luwc::load_config(config_path);
  if (const char* seed = std::getenv("LUWC_SEED")) {
    try {
      cfg.seed = std::stoull(seed);
    } catch (const std::exception&) {
      throw luwc::Error(luwc::ErrorCode::Schema, "LUWC_SEED must be an unsigned integer");
    }
  }
  const std::filesystem::path dir = out_dir.empty() ? cfg.out_dir : out_dir;
  const luwc::RunResult result = luwc::run(cfg, jobs);
  luwc::write_outputs(result, dir);
  std::cout << "wrote " << (dir / "report.csv").string() << " and " << (dir / "report.json").string() << '\n';
  std::cout << (result.all_agree ? "all agreement assertions hold" : "agreement assertion FAILED") << '\n';
  return result.exit_code();
}

int cmd_families() {
  for (const std::string& name : luwc::family_names()) std::cout << name << '\n';
  return 0;
}

int cmd_describe(const std::string& name) {
  nlohmann::json j = luwc::describe_family(name);
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_verify(int only, unsigned jobs) {
  luwc::verify::Options o;
  if (only > 0) o.only = only;
  o.jobs = jobs;
  o.on_result = [](const luwc::verify::Outcome& r) { std::cout << luwc::verify::format_line(r) << std::endl; };
  const auto results = luwc::verify::run_acceptance(o);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}

int cmd_sample(const std::string& family, long n, std::size_t paths, std::uint64_t seed, double horizon,
               const std::string& out_dir, unsigned jobs) {
  if (const char* env = std::getenv("LUWC_SEED")) seed = std::stoull(env);
  const std::vector<long> ns{std::max(n, 1L)};
  const std::vector<double> grid = luwc::family_grid(family, ns, horizon);
  const luwc::TripletSystem sys =
      n > 0 ? luwc::family_member(family, n, horizon, grid) : luwc::family_limit(family, horizon, grid);
  const luwc::PathEnsemble e = luwc::sample_ensemble(sys, grid, paths, seed, jobs);
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  std::ofstream jsonl(dir / "ensemble.jsonl");
  luwc::write_ensemble_jsonl(jsonl, e);
  std::ofstream summary(dir / "ensemble_summary.csv");
  luwc::write_ensemble_summary(summary, e, luwc::linspace(0.0, horizon, 5), luwc::linspace(-2.0, 2.0, 9));
  std::cout << "wrote " << paths << " paths to " << (dir / "ensemble.jsonl").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally uniform weak convergence checks for additive-process triplet systems"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  unsigned jobs = 1;
  auto* run = app.add_subcommand("run", "Run every checker on the families of a config file");
  run->add_option("--config", config_path, "JSON config path")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  app.add_subcommand("families", "List the built-in families");

  std::string name;
  auto* describe = app.add_subcommand("describe", "Describe a built-in family");
  describe->add_option("name", name, "Family name")->required();

  int only = 0;
  unsigned verify_jobs = 1;
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--only", only, "Run a single criterion by number")->check(CLI::Range(1, 9));
  verify->add_option("--jobs", verify_jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string family, sample_out = "luwc-ensemble";
  long n = 0;
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  double horizon = 1.0;
  unsigned sample_jobs = 1;
  auto* sample = app.add_subcommand("sample", "Sample paths of a built-in family member (n = 0 samples the limit)");
  sample->add_option("--family", family, "Family name")->required();
  sample->add_option("--n", n, "Family index; 0 selects the limit system");
  sample->add_option("--paths", paths, "Number of paths")->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "Ensemble seed");
  sample->add_option("--horizon", horizon, "Time horizon")->check(CLI::PositiveNumber);
  sample->add_option("--out", sample_out, "Output directory");
  sample->add_option("--jobs", sample_jobs, "Worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, out_dir, jobs);
    if (app.got_subcommand("families")) return cmd_families();
    if (*describe) return cmd_describe(name);
    if (*verify) return cmd_verify(only, verify_jobs);
    if (*sample) return cmd_sample(family, n, paths, seed, horizon, sample_out, sample_jobs);
  } catch (const luwc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
