#pragma once

#include <string>
#include <vector>

namespace tframe {

// One named check with its worst observed residual and the tolerance it was
// held to. pass is residual <= tolerance unless the check is pass/fail only.
struct CheckLine {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline bool all_pass(const std::vector<CheckLine>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace tframe
