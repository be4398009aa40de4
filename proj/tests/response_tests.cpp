#include <doctest.h>

#include "minaret/response.hpp"

using namespace minaret;

TEST_CASE("citation normalization dedupes and renumbers densely") {
  std::vector<RawSource> raw = {
      {"Sahih al-Bukhari", std::string("https://sunnah.com/bukhari"), std::nullopt},
      {"Fiqh Primer", std::nullopt, std::string("ch. 2")},
      {"Sahih al-Bukhari", std::string("https://sunnah.com/bukhari"), std::nullopt},  // dup
      {"Quran", std::string("https://quran.com/2/275"), std::nullopt},
  };
  auto cites = normalize_citations(raw);
  REQUIRE(cites.size() == 3);
  CHECK(cites[0].tag == 1);
  CHECK(cites[0].source_title == "Sahih al-Bukhari");
  CHECK(cites[1].tag == 2);
  CHECK(cites[1].source_title == "Fiqh Primer");
  CHECK(cites[2].tag == 3);

  // idempotent: renormalizing the normalized set changes nothing
  std::vector<RawSource> again;
  for (const auto& c : cites) again.push_back({c.source_title, c.source_url, c.span});
  CHECK(normalize_citations(again) == cites);
}

TEST_CASE("same title with different urls stays distinct") {
  std::vector<RawSource> raw = {
      {"Quran", std::string("https://quran.com/1/1"), std::nullopt},
      {"Quran", std::string("https://quran.com/2/1"), std::nullopt},
  };
  CHECK(normalize_citations(raw).size() == 2);
}

TEST_CASE("assembly rejects empty answers and dangling tags") {
  ExecutionTrace t;
  CHECK_THROWS_AS(assemble_response("", {}, t, "tool"), AssemblyError);
  CHECK_THROWS_AS(assemble_response("claim [CITE:1]", {}, t, "retrieval"), AssemblyError);
  Citation c{1, "Source", std::nullopt, std::nullopt};
  CHECK_THROWS_AS(assemble_response("claim [CITE:2]", {c}, t, "retrieval"), AssemblyError);
  CHECK_NOTHROW(assemble_response("claim [CITE:1]", {c}, t, "retrieval"));
}

TEST_CASE("references block rendering") {
  ExecutionTrace t;
  Citation c{1, "Sahih Muslim", std::string("https://sunnah.com/muslim"), std::nullopt};
  AssembledResponse r = assemble_response("Fasting is prescribed [CITE:1].", {c}, t, "retrieval");
  std::string out = render_with_references(r);
  CHECK(out.find("Fasting is prescribed") != std::string::npos);
  CHECK(out.find("References") != std::string::npos);
  CHECK(out.find("Sahih Muslim") != std::string::npos);
  CHECK(out.find("https://sunnah.com/muslim") != std::string::npos);

  // no references block when nothing is cited
  AssembledResponse plain = assemble_response("Hello.", {}, t, "tool");
  CHECK(render_with_references(plain).find("References") == std::string::npos);
}

TEST_CASE("tag scanning order") {
  auto tags = cite_tags_in("x [CITE:3] y [CITE:1]");
  REQUIRE(tags.size() == 2);
  CHECK(tags[0] == 3);
  CHECK(tags[1] == 1);
}
