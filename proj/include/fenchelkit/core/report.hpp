#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include <json.hpp>

namespace fenchelkit {

/// Outcome of one named numerical check over a sample.
///
/// `worst_margin` is the smallest slack (bound minus observed) seen; a
/// negative value means at least one sample failed.
struct CheckResult {
  std::string name;
  bool passed = true;
  double worst_margin = INFINITY;
  std::size_t samples = 0;
  std::size_t failure_count = 0;
  std::vector<std::string> failures;  // first few failing samples

  static constexpr std::size_t kMaxListed = 8;

  explicit CheckResult(std::string n = {}) : name(std::move(n)) {}

  /// Records one sample whose slack is `margin` (>= 0 passes).
  void record(double margin, const std::string& where = {}) {
    ++samples;
    if (std::isnan(margin)) margin = -INFINITY;
    worst_margin = std::min(worst_margin, margin);
    if (margin < 0.0) fail(where.empty() ? "margin " + std::to_string(margin)
                                         : where + " margin " + std::to_string(margin));
  }

  void fail(const std::string& what) {
    passed = false;
    ++failure_count;
    if (failures.size() < kMaxListed) failures.push_back(what);
  }

  /// Marks a failure that is not tied to a margin (e.g. a solver error).
  void error(const std::string& what) {
    ++samples;
    worst_margin = -INFINITY;
    fail(what);
  }
};

struct Report {
  std::string name;
  std::deque<CheckResult> checks;  // deque: references from add() stay valid
  std::vector<std::string> notes;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }

  CheckResult& add(std::string check_name) {
    checks.emplace_back(std::move(check_name));
    return checks.back();
  }

  const CheckResult* find(const std::string& check_name) const {
    for (const auto& c : checks)
      if (c.name == check_name) return &c;
    return nullptr;
  }
};

inline nlohmann::ordered_json margin_json(double m) {
  if (std::isfinite(m)) return m;
  if (m > 0) return nullptr;  // no samples
  return "-inf";
}

inline nlohmann::ordered_json to_json(const CheckResult& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["status"] = c.passed ? "PASS" : "FAIL";
  j["worst_margin"] = margin_json(c.worst_margin);
  j["samples"] = c.samples;
  j["failure_count"] = c.failure_count;
  j["failures"] = c.failures;
  return j;
}

inline nlohmann::ordered_json to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["status"] = r.passed() ? "PASS" : "FAIL";
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
  j["notes"] = r.notes;
  return j;
}

}  // namespace fenchelkit
