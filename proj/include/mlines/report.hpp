#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace mlines {

/// Outcome of one family of identity checks.
struct Check {
  Check() = default;
  explicit Check(std::string n) : name(std::move(n)) {}

  std::string name;
  long count = 0;
  long failures = 0;
  std::string first_failure;
  double max_residual = 0.0;

  void record(bool ok, double residual, const std::string& where) {
    ++count;
    max_residual = std::max(max_residual, residual);
    if (!ok) {
      if (failures == 0) first_failure = where;
      ++failures;
    }
  }
  bool pass() const { return failures == 0; }
};

struct Report {
  std::string kind;
  std::vector<Check> checks;

  Check& add(const std::string& name) {
    checks.push_back(Check{name});
    return checks.back();
  }
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
  }
  const Check* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

}  // namespace mlines
