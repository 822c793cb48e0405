#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace luwc::verify {

struct Outcome {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;  // wall-clock limit in seconds; 0 means none
};

struct Options {
  std::optional<int> only;
  unsigned jobs = 1;
  /// Called after each criterion finishes, for progress output.
  std::function<void(const Outcome&)> on_result;
};

/// Runs the acceptance suite; a criterion passes only when its checks hold within its time budget.
std::vector<Outcome> run_acceptance(const Options& options = {});

std::string format_line(const Outcome& o);

}  // namespace luwc::verify
