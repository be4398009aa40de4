#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "minaret/trace.hpp"

namespace minaret {

struct AssemblyError : std::runtime_error {
  explicit AssemblyError(const std::string& what) : std::runtime_error(what) {}
};

struct Citation {
  int tag = 0;  // ordinal, 1-based, dense
  std::string source_title;
  std::optional<std::string> source_url;
  std::optional<std::string> span;

  bool operator==(const Citation&) const = default;
};

struct RawSource {
  std::string title;
  std::optional<std::string> url;
  std::optional<std::string> span;
};

/// Collapse duplicate (title, url) pairs and renumber tags 1..n in
/// first-appearance order. Idempotent.
std::vector<Citation> normalize_citations(const std::vector<RawSource>& raw);

struct AssembledResponse {
  std::string answer;
  std::vector<Citation> references;
  ExecutionTrace trace;
  std::string route;
  std::map<std::string, std::string> tool_metadata;
};

/// Attach normalized citations and the trace to an answer. Throws
/// AssemblyError on an empty answer or when the answer references a
/// [CITE:N] tag absent from `citations`.
AssembledResponse assemble_response(const std::string& answer,
                                    std::vector<Citation> citations,
                                    ExecutionTrace trace, std::string route);

/// Answer plus a trailing References block, for human display.
std::string render_with_references(const AssembledResponse& r);

/// All [CITE:N] tag numbers appearing in a text, in order of appearance.
std::vector<int> cite_tags_in(const std::string& text);

}  // namespace minaret
