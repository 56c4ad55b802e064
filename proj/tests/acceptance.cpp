// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "emhd/io/verify.hpp"

int main() {
  const auto scratch = std::filesystem::temp_directory_path() / "emhd_acceptance";
  std::filesystem::remove_all(scratch);
  int failed = 0;
  for (int id = 1; id <= emhd::io::kCriteria; ++id) {
    const auto r = emhd::io::run_criterion(id, scratch);
    std::cout << emhd::io::format_line(r) << std::endl;
    if (!r.passed) ++failed;
  }
  std::filesystem::remove_all(scratch);
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion/criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
