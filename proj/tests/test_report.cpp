#include <doctest.h>

#include <algorithm>

#include "luwc/error.hpp"
#include "luwc/families.hpp"
#include "luwc/report.hpp"

using namespace luwc;

TEST_CASE("catalog lookup") {
  const auto& names = family_names();
  CHECK(std::find(names.begin(), names.end(), "cp_to_bm") != names.end());
  const FamilyInfo bump = describe_family("bump_drift");
  for (const char* c : {"weak_lu", "cf_lu", "cf_pointwise_lu"}) CHECK(bump.expected.at(c) == Verdict::NotConverging);
  CHECK(bump.expected.at("weak_fixed_t") == Verdict::Converging);
  CHECK_THROWS_AS(describe_family("no_such_family"), Error);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(parse_config(nlohmann::json{{"schema_version", 1}, {"families", nlohmann::json::array()}}), Error);
  CHECK_THROWS_AS(parse_config(nlohmann::json{{"schema_version", 99}, {"families", {"cp_to_bm"}}}), Error);
  CHECK_THROWS_AS(parse_config(nlohmann::json{{"schema_version", 1}, {"families", {"cp_to_bm"}}, {"horizon", -1.0}}),
                  Error);
  const RunConfig c = parse_config(nlohmann::json{{"schema_version", 1}, {"families", {"cp_to_bm"}}});
  CHECK(c.families.size() == 1);
  CHECK(c.n_list.size() == 5);
}

TEST_CASE("cp_to_bm run agrees and exits cleanly") {
  RunConfig c = parse_config(
      nlohmann::json{{"schema_version", 1}, {"families", {"cp_to_bm"}}, {"n_list", {100, 1000, 10000}}, {"ensemble", {{"paths", 200}}}});
  const RunResult r = run(c);
  CHECK(r.all_agree);
  CHECK(r.exit_code() == 0);
}

TEST_CASE("bump_drift run separates fixed-time and locally uniform deviations") {
  RunConfig c = parse_config(nlohmann::json{{"schema_version", 1}, {"families", {"bump_drift"}}, {"ensemble", {{"paths", 200}}}});
  const RunResult r = run(c);
  CHECK(r.exit_code() == 0);
  bool saw_fixed = false, saw_weak = false;
  for (const ReportRow& row : r.rows) {
    if (row.n != "10000" || !row.deviation) continue;
    if (row.criterion == "weak_fixed_t") {
      saw_fixed = true;
      CHECK(*row.deviation < 1e-6);
    }
    if (row.criterion == "weak_lu") {
      saw_weak = true;
      CHECK(*row.deviation == doctest::Approx(1.0));
    }
  }
  CHECK(saw_fixed);
  CHECK(saw_weak);
}

TEST_CASE("inline families round trip through the config") {
  const std::vector<double> grid{0.0, 0.5, 1.0};
  nlohmann::json limit = TripletSystem::zero(1, grid);
  const nlohmann::json fam{{"name", "flat"},
                           {"members", {{{"n", 1}, {"system", limit}}, {{"n", 2}, {"system", limit}}}},
                           {"limit", limit}};
  RunConfig c = parse_config(nlohmann::json{{"schema_version", 1},
                                            {"families", {fam}},
                                            {"n_list", {1, 2}},
                                            {"grids", {{"t", 3}}},
                                            {"ensemble", {{"paths", 50}}}});
  const RunResult r = run(c);
  CHECK(r.all_agree);
  const std::string csv = to_csv(r.rows);
  CHECK(csv.rfind("family,n,criterion,t_or_xi,deviation,verdict,expected_verdict,agree\n", 0) == 0);
}
