#include "pgap_cli/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

// Runs the acceptance criteria and prints one PASS/FAIL line each.
// Optional arguments select criteria by number.
int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (int i = 1; i <= 12; ++i) ids.push_back(i);
  int failed = 0;
  for (int id : ids) {
    const pgap::cli::CheckResult r = pgap::cli::acceptance_criterion(id);
    std::cout << pgap::cli::check_line(r) << std::endl;
    if (!r.passed) ++failed;
  }
  std::cout << (ids.size() - failed) << "/" << ids.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
