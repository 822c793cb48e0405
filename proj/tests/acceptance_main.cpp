#include <algorithm>
#include <iostream>
#include <thread>

#include "luwc_verify/acceptance.hpp"

int main() {
  luwc::verify::Options o;
  o.jobs = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
  o.on_result = [](const luwc::verify::Outcome& r) { std::cout << luwc::verify::format_line(r) << std::endl; };
  int failed = 0;
  for (const auto& r : luwc::verify::run_acceptance(o)) failed += r.pass ? 0 : 1;
  std::cout << (failed == 0 ? "all acceptance criteria passed" : "some acceptance criteria failed") << '\n';
  return failed == 0 ? 0 : 1;
}
