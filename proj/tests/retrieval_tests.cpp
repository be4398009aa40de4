#include <doctest.h>

#include <map>

#include "minaret/retrieval.hpp"
#include "support.hpp"

using namespace minaret;

namespace {

TrigramEmbedder& emb() {
  static TrigramEmbedder e;
  return e;
}

DocumentStore& docs() {
  static DocumentStore store = [] {
    DocumentStore s(&emb());
    s.load(data_path("docs.jsonl"));
    return s;
  }();
  return store;
}

DuaStore& duas() {
  static DuaStore store = [] {
    DuaStore s(&emb());
    s.load(data_path("duas.jsonl"));
    return s;
  }();
  return store;
}

}  // namespace

TEST_CASE("document store loads the bundled corpus") {
  CHECK(docs().size() >= 30);
}

TEST_CASE("retrieval invariants: ranking, floor, diversity, top_k") {
  RetrievalParams params;
  params.top_k = 12;
  auto ranked = docs().retrieve("what are the rules of zakat on wealth", params);
  REQUIRE(!ranked.empty());
  CHECK(ranked.size() <= 12);
  std::map<std::string, int> per_source;
  double prev = 1.1;
  for (const auto& sc : ranked) {
    CHECK(sc.similarity <= prev);           // descending
    CHECK(sc.similarity >= params.min_similarity);
    per_source[sc.chunk.source_title]++;
    prev = sc.similarity;
  }
  for (const auto& [title, n] : per_source) {
    CAPTURE(title);
    CHECK(n <= params.diversity);           // at most 3 chunks per source
  }
}

TEST_CASE("collection pre-filter restricts candidates") {
  RetrievalParams params;
  params.collection = "fiqh";
  params.min_similarity = 0.0;
  auto ranked = docs().retrieve("zakat", params);
  for (const auto& sc : ranked) CHECK(sc.chunk.collection == "fiqh");
}

TEST_CASE("evidence tags are dense and rank-ordered") {
  RetrievalParams params;
  auto ranked = docs().retrieve("prayer", params);
  EvidenceSet ev = tag_evidence(ranked);
  REQUIRE(ev.size() == ranked.size());
  for (std::size_t i = 0; i < ev.size(); ++i) {
    CHECK(ev[i].tag == static_cast<int>(i) + 1);
    CHECK(ev[i].chunk.id == ranked[i].chunk.id);
  }
}

TEST_CASE("unknown citations are stripped sentence-wise with a warning") {
  RetrievalParams params;
  EvidenceSet ev = tag_evidence(docs().retrieve("zakat", params));
  REQUIRE(!ev.empty());
  std::string text = "This holds [CITE:1]. This is fabricated [CITE:99]. Tail claim.";
  ExecutionTrace trace;
  std::string cleaned = strip_unknown_citations(text, ev, trace);
  CHECK(cleaned.find("[CITE:99]") == std::string::npos);
  CHECK(cleaned.find("[CITE:1]") != std::string::npos);
  CHECK(cleaned.find("Tail claim") != std::string::npos);
  bool warned = false;
  for (const auto& e : trace.entries())
    if (e.stage == "warning") warned = true;
  CHECK(warned);
}

TEST_CASE("citation tag scanning") {
  auto tags = citation_tags_in("a [CITE:2] b [CITE:7] c [CITE:2]");
  REQUIRE(tags.size() == 3);
  CHECK(tags[0] == 2);
  CHECK(tags[1] == 7);
  CHECK(citation_tags_in("no tags here").empty());
}

TEST_CASE("fiqh answering abstains without evidence") {
  StubTextGenerator gen;
  ExecutionTrace trace;
  GroundedAnswer a = answer_fiqh("is X permissible", {}, &gen, trace);
  CHECK(a.abstained);
  CHECK(a.text.find("scholar") != std::string::npos);
}

TEST_CASE("fiqh answering abstains on provider failure") {
  FailingTextGenerator failing;
  RetrievalParams params;
  EvidenceSet ev = tag_evidence(docs().retrieve("zakat rules", params));
  REQUIRE(!ev.empty());
  ExecutionTrace trace;
  GroundedAnswer a = answer_fiqh("is X permissible", ev, &failing, trace);
  CHECK(a.abstained);
}

TEST_CASE("grounded answers cite only existing tags") {
  StubTextGenerator gen;
  RetrievalParams params;
  EvidenceSet ev = tag_evidence(docs().retrieve("rules of zakat", params));
  REQUIRE(!ev.empty());
  ExecutionTrace trace;
  GroundedAnswer a = answer_fiqh("what are the rules of zakat", ev, &gen, trace);
  CHECK(!a.abstained);
  for (int tag : citation_tags_in(a.text)) {
    CHECK(tag >= 1);
    CHECK(tag <= static_cast<int>(ev.size()));
  }
}

TEST_CASE("general answering respects the context budget") {
  StubTextGenerator gen;
  RetrievalParams params;
  params.min_similarity = 0.0;
  EvidenceSet ev = tag_evidence(docs().retrieve("islam", params));
  REQUIRE(ev.size() >= 2);
  ExecutionTrace trace;
  // A tiny budget still produces an answer (top chunk only).
  GroundedAnswer a = answer_general("tell me about islam", ev, &gen, trace, 0.1, 4500, 400);
  CHECK(!a.text.empty());
}

TEST_CASE("dua store lookup returns entries verbatim") {
  StubTextGenerator gen;
  ExecutionTrace trace;
  DuaResult r = duas().lookup("what is the dua for traveling", &gen, trace);
  REQUIRE(r.entry.has_value());
  bool verbatim = false;
  for (const auto& e : duas().entries()) {
    if (e.page_title == r.entry->page_title) {
      // byte-identical to the stored entry
      verbatim = e.arabic == r.entry->arabic && e.translation == r.entry->translation &&
                 e.occasion == r.entry->occasion && e.reference_url == r.entry->reference_url;
    }
  }
  CHECK(verbatim);
}

TEST_CASE("dua lookup with no plausible occasion gives the fallback message") {
  StubTextGenerator gen;
  ExecutionTrace trace;
  DuaResult r = duas().lookup("qqq zzz xxx www", &gen, trace);
  CHECK(!r.entry.has_value());
  CHECK(!r.message.empty());
  // Arabic queries get the Arabic fallback.
  DuaResult ar = duas().lookup("ققق ززز", &gen, trace, "ar");
  CHECK(!ar.entry.has_value());
  CHECK(ar.message != r.message);
}

TEST_CASE("dua selector failure degrades to the top cosine candidate") {
  FailingTextGenerator failing;
  ExecutionTrace trace;
  DuaResult r = duas().lookup("dua for traveling", &failing, trace);
  CHECK(r.entry.has_value());
}
