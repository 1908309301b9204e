#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pdcli {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  bool quick = false;
  /// Name of a check whose inputs are deliberately corrupted.
  std::string inject_fault;
};

std::vector<CheckResult> run_checks(const VerifyOptions& opts);
std::vector<std::string> check_names();

}  // namespace pdcli
