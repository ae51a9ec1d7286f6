#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace moyal {

// max: pass iff |value| ≤ tolerance.  min: pass iff value > tolerance.
enum class CheckKind { max, min };
enum class CheckStatus { pass, fail, skipped };

struct Check {
  std::string id;
  double value = 0.0;
  double tolerance = 0.0;
  CheckKind kind = CheckKind::max;
  CheckStatus status = CheckStatus::fail;
  std::string anchor;
  std::string note;

  bool passed() const { return status != CheckStatus::fail; }
};

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    default: return "skipped";
  }
}

struct Report {
  std::string suite;
  std::vector<Check> checks;
  nlohmann::ordered_json config;
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  double wall_time = 0.0;

  Check& bound(std::string id, double value, double tol, std::string anchor) {
    const bool ok = std::isfinite(value) && std::abs(value) <= tol;
    checks.push_back({std::move(id), value, tol, CheckKind::max, ok ? CheckStatus::pass : CheckStatus::fail,
                      std::move(anchor), {}});
    return checks.back();
  }
  Check& floor(std::string id, double value, double tol, std::string anchor) {
    const bool ok = std::isfinite(value) && value > tol;
    checks.push_back({std::move(id), value, tol, CheckKind::min, ok ? CheckStatus::pass : CheckStatus::fail,
                      std::move(anchor), {}});
    return checks.back();
  }
  Check& skip(std::string id, std::string anchor, std::string why) {
    checks.push_back({std::move(id), 0.0, 0.0, CheckKind::max, CheckStatus::skipped, std::move(anchor), std::move(why)});
    return checks.back();
  }

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed()) return false;
    return true;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
      nlohmann::ordered_json r{{"id", c.id},
                               {"value", c.value},
                               {"tolerance", c.tolerance},
                               {"kind", c.kind == CheckKind::max ? "max" : "min"},
                               {"pass", c.passed()},
                               {"status", to_string(c.status)},
                               {"anchor", c.anchor}};
      if (!c.note.empty()) r["note"] = c.note;
      rows.push_back(std::move(r));
    }
    return {{"suite", suite}, {"passed", passed()}, {"checks", rows},
            {"results", results}, {"config", config}, {"wall_time", wall_time}};
  }

  void write(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    os << to_json().dump(2) << '\n';
  }
};

}  // namespace moyal
