#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "luwc/measure.hpp"
#include "luwc/system.hpp"

namespace luwc {

inline constexpr int kSchemaVersion = 1;

struct FamilySpec {
  std::string name;
  bool builtin = true;
  std::vector<IndexedSystem> members;  // inline families only
  std::vector<TripletSystem> limit;    // inline families only, exactly one entry
};

struct RunConfig {
  std::vector<FamilySpec> families;
  std::vector<long> n_list{2, 10, 100, 1000, 10000};
  double horizon = 1.0;
  std::size_t t_points = 21;
  double xi_lo = -5.0;
  double xi_hi = 5.0;
  std::size_t xi_count = 41;
  std::vector<double> xi_list{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
  double verdict_tol = 0.02;
  double distance_tol = 1e-6;
  std::optional<MetricKind> metric = MetricKind::Levy1D;
  double fixed_time = 0.5;
  std::uint64_t seed = 20240601;
  std::size_t ensemble_paths = 2000;
  double skorokhod_mesh = 1e-3;
  std::string out_dir = "luwc-out";
};

/// Validates and reads a config document; throws ErrorCode::Schema on any violation.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

struct ReportRow {
  std::string family;
  std::string n;            // empty for family-level rows
  std::string criterion;
  std::optional<double> at; // time or frequency
  std::optional<double> deviation;
  std::string verdict;
  std::string expected;
  std::string agree;
};

struct RunResult {
  std::vector<ReportRow> rows;  // sorted by (family, n, criterion, at)
  nlohmann::json json;
  bool all_agree = true;
  int exit_code() const noexcept { return all_agree ? 0 : 1; }
};

RunResult run(const RunConfig& config, unsigned jobs = 1);

/// Header family,n,criterion,t_or_xi,deviation,verdict,expected_verdict,agree.
std::string to_csv(const std::vector<ReportRow>& rows);
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

}  // namespace luwc
