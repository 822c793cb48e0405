#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "luwc/convergence.hpp"
#include "luwc/system.hpp"

namespace luwc {

struct FamilyInfo {
  std::string name;
  std::string summary;
  std::string member;  // formula of the n-th system
  std::string limit;   // formula of the limit system
  bool deterministic = false;
  /// Expected verdict per criterion name as it appears in reports.
  std::map<std::string, Verdict> expected;
};

/// Names in catalog order: cp_to_bm, bump_drift, poisson_scaled, deterministic_drift, small_jump_escape.
const std::vector<std::string>& family_names();
FamilyInfo describe_family(const std::string& name);
void to_json(nlohmann::json& j, const FamilyInfo& info);

/// Times at which the n-th member has kinks (inside [0, horizon]).
std::vector<double> family_breakpoints(const std::string& name, long n, double horizon);
/// count evenly spaced times on [0, horizon] joined with every member's breakpoints.
std::vector<double> family_grid(const std::string& name, std::span<const long> ns, double horizon,
                                std::size_t count = 21);

/// The n-th system, exact (piecewise linear) on grid joined with its own breakpoints.
TripletSystem family_member(const std::string& name, long n, double horizon, std::span<const double> grid);
TripletSystem family_limit(const std::string& name, double horizon, std::span<const double> grid);
std::vector<IndexedSystem> family_members(const std::string& name, std::span<const long> ns, double horizon,
                                          std::span<const double> grid);

}  // namespace luwc
