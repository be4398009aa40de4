#include "minaret/response.hpp"

#include <regex>
#include <set>
#include <sstream>

namespace minaret {

std::vector<Citation> normalize_citations(const std::vector<RawSource>& raw) {
  std::vector<Citation> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : raw) {
    auto key = std::make_pair(r.title, r.url.value_or(""));
    if (!seen.insert(key).second) continue;
    Citation c;
    c.tag = static_cast<int>(out.size()) + 1;
    c.source_title = r.title;
    c.source_url = r.url;
    c.span = r.span;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<int> cite_tags_in(const std::string& text) {
  static const std::regex re(R"(\[CITE:(\d+)\])");
  std::vector<int> tags;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
       it != std::sregex_iterator(); ++it)
    tags.push_back(std::stoi((*it)[1].str()));
  return tags;
}

AssembledResponse assemble_response(const std::string& answer,
                                    std::vector<Citation> citations,
                                    ExecutionTrace trace, std::string route) {
  if (answer.empty()) throw AssemblyError("cannot assemble an empty answer");
  std::set<int> known;
  for (const auto& c : citations) known.insert(c.tag);
  for (int t : cite_tags_in(answer))
    if (!known.count(t))
      throw AssemblyError("dangling citation tag [CITE:" + std::to_string(t) + "]");
  if (trace.empty()) trace.add("assemble", "response assembled");
  AssembledResponse r;
  r.answer = answer;
  r.references = std::move(citations);
  r.trace = std::move(trace);
  r.route = std::move(route);
  return r;
}

std::string render_with_references(const AssembledResponse& r) {
  std::ostringstream os;
  os << r.answer;
  if (!r.references.empty()) {
    os << "\n\nReferences:\n";
    for (const auto& c : r.references) {
      os << "  [" << c.tag << "] " << c.source_title;
      if (c.source_url) os << " <" << *c.source_url << ">";
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace minaret
