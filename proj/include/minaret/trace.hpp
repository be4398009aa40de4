#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace minaret {

/// Ordered log of pipeline stages for one request. Timestamps are
/// non-decreasing by construction (steady clock, append-only).
class ExecutionTrace {
public:
  struct Entry {
    std::string stage;
    std::chrono::steady_clock::time_point at;
    std::string detail;
  };

  void add(std::string stage, std::string detail = {}) {
    auto now = std::chrono::steady_clock::now();
    if (!entries_.empty() && now < entries_.back().at) now = entries_.back().at;
    entries_.push_back({std::move(stage), now, std::move(detail)});
  }

  void warn(std::string detail) { add("warning", std::move(detail)); }

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  bool contains_stage(const std::string& stage) const {
    for (const auto& e : entries_)
      if (e.stage == stage) return true;
    return false;
  }

private:
  std::vector<Entry> entries_;
};

}  // namespace minaret
