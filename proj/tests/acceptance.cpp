// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Optional arguments select criteria by id.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "brq/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace brq::acceptance;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) ids = suite("all");
  int failed = 0;
  for (int id : ids) {
    const auto report = run_criterion(id);
    std::cout << format_report(report, true) << std::flush;
    failed += report.passed() ? 0 : 1;
  }
  std::printf("%zu/%zu acceptance criteria passed\n", ids.size() - failed, ids.size());
  return failed == 0 ? 0 : 1;
}
