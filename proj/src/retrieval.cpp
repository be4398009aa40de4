#include "minaret/retrieval.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <json.hpp>

namespace minaret {

namespace {

DocumentChunk chunk_from_json(const nlohmann::json& j) {
  DocumentChunk c;
  c.id = j.value("id", "");
  c.text = j.at("text").get<std::string>();
  c.source_title = j.value("source_title", "");
  c.source_url = j.value("source_url", "");
  c.collection = j.value("collection", "article");
  if (j.contains("embedding"))
    c.embedding = j.at("embedding").get<std::vector<float>>();
  return c;
}

}  // namespace

void DocumentStore::load(const std::string& jsonl_path) {
  std::ifstream in(jsonl_path);
  if (!in) throw RetrievalError("cannot read document corpus " + jsonl_path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw RetrievalError(jsonl_path + ":" + std::to_string(lineno) +
                           ": bad JSON: " + e.what());
    }
    add(chunk_from_json(j));
  }
}

void DocumentStore::add(DocumentChunk chunk) {
  if (chunk.text.empty()) throw RetrievalError("document chunk with empty text");
  if (chunk.embedding.empty()) chunk.embedding = embedder_->embed(chunk.text);
  if (chunk.embedding.size() != embedder_->dimension())
    throw RetrievalError("chunk embedding dimension mismatch");
  if (chunk.id.empty()) chunk.id = "chunk-" + std::to_string(chunks_.size() + 1);
  chunks_.push_back(std::move(chunk));
}

std::vector<ScoredChunk> DocumentStore::retrieve(const std::string& query,
                                                 const RetrievalParams& params,
                                                 Reranker* reranker) const {
  if (chunks_.empty()) throw RetrievalError("document store is empty");
  auto qv = embedder_->embed(query);

  std::vector<ScoredChunk> scored;
  for (const auto& c : chunks_) {
    if (params.collection && c.collection != *params.collection) continue;
    double sim = cosine(qv, c.embedding);
    if (sim < params.min_similarity) continue;
    scored.push_back({c, sim});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredChunk& a, const ScoredChunk& b) {
                     return a.similarity > b.similarity;
                   });

  std::vector<ScoredChunk> out;
  std::map<std::string, int> per_source;
  for (auto& s : scored) {
    if (static_cast<int>(out.size()) >= params.top_k) break;
    int& n = per_source[s.chunk.source_title];
    if (n >= params.diversity) continue;
    ++n;
    out.push_back(std::move(s));
  }

  if (params.rerank && reranker) out = reranker->rerank(query, std::move(out));
  return out;
}

void ingest_docs(const std::string& input_jsonl, const std::string& output_jsonl,
                 Embedder& embedder) {
  std::ifstream in(input_jsonl);
  if (!in) throw RetrievalError("cannot read " + input_jsonl);
  std::ofstream out(output_jsonl);
  if (!out) throw RetrievalError("cannot write " + output_jsonl);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    if (!j.contains("embedding")) {
      auto v = embedder.embed(j.at("text").get<std::string>());
      j["embedding"] = v;
    }
    out << j.dump() << "\n";
  }
}

EvidenceSet tag_evidence(const std::vector<ScoredChunk>& ranked) {
  EvidenceSet out;
  int tag = 0;
  for (const auto& s : ranked) out.push_back({++tag, s.chunk, s.similarity});
  return out;
}

std::vector<int> citation_tags_in(const std::string& text) {
  static const std::regex re(R"(\[CITE:(\d+)\])");
  std::vector<int> tags;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
       it != std::sregex_iterator(); ++it)
    tags.push_back(std::stoi((*it)[1]));
  return tags;
}

namespace {

// Split keeping the ender with its sentence; handles ASCII enders plus the
// Arabic question mark (U+061F, bytes D8 9F).
std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    cur += text[i];
    bool end = text[i] == '.' || text[i] == '!' || text[i] == '?';
    if (!end && static_cast<unsigned char>(text[i]) == 0xD8 && i + 1 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0x9F) {
      cur += text[++i];
      end = true;
    }
    if (end) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string evidence_block(const EvidenceSet& evidence, std::size_t budget) {
  std::string block;
  for (const auto& t : evidence) {
    std::string piece = "[CITE:" + std::to_string(t.tag) + "] " + t.chunk.source_title +
                        ": " + t.chunk.text + "\n";
    if (budget && block.size() + piece.size() > budget) break;
    block += piece;
  }
  return block;
}

const char* kAbstention =
    "I could not find grounded evidence to answer this reliably. Please consult "
    "a qualified scholar for a definitive ruling.";

GroundedAnswer grounded_answer(const std::string& prompt, const EvidenceSet& evidence,
                               TextGenerator* generator, ExecutionTrace& trace,
                               double temperature, int max_tokens) {
  if (evidence.empty()) {
    trace.add("retrieval.answer", "empty evidence; abstaining");
    return {kAbstention, true};
  }
  std::string raw;
  try {
    raw = generator->generate(prompt, temperature, max_tokens);
  } catch (const std::exception& e) {
    trace.warn(std::string("answer provider failed: ") + e.what());
    return {kAbstention, true};
  }
  std::string cleaned = strip_unknown_citations(raw, evidence, trace);
  if (cleaned.find_first_not_of(" \t\r\n") == std::string::npos) {
    trace.warn("all sentences removed by citation verification; abstaining");
    return {kAbstention, true};
  }
  return {cleaned, false};
}

}  // namespace

std::string strip_unknown_citations(const std::string& text, const EvidenceSet& evidence,
                                    ExecutionTrace& trace) {
  std::vector<bool> known(evidence.size() + 1, false);
  for (const auto& t : evidence)
    if (t.tag >= 1 && t.tag <= static_cast<int>(evidence.size())) known[t.tag] = true;
  std::string out;
  for (const auto& sentence : split_sentences(text)) {
    bool drop = false;
    for (int tag : citation_tags_in(sentence))
      if (tag < 1 || tag > static_cast<int>(evidence.size()) || !known[tag]) {
        drop = true;
        trace.warn("removed sentence citing unknown tag [CITE:" + std::to_string(tag) + "]");
        break;
      }
    if (!drop) out += sentence;
  }
  return out;
}

GroundedAnswer answer_fiqh(const std::string& query, const EvidenceSet& evidence,
                           TextGenerator* generator, ExecutionTrace& trace,
                           double temperature, int max_tokens) {
  std::string prompt =
      "You are answering an Islamic jurisprudence question.\n"
      "State the ruling scope and assumptions first, then the ruling, then the "
      "supporting evidence as a separate section.\n"
      "Cite only the [CITE:N] tags listed below; never invent citations. If a "
      "claim needs the exact wording of scripture, quote it verbatim with its "
      "verse citation.\n"
      "Evidence:\n" +
      evidence_block(evidence, 0) + "\nQuestion: " + query;
  return grounded_answer(prompt, evidence, generator, trace, temperature, max_tokens);
}

GroundedAnswer answer_general(const std::string& query, const EvidenceSet& evidence,
                              TextGenerator* generator, ExecutionTrace& trace,
                              double temperature, int max_tokens,
                              std::size_t context_budget) {
  std::string prompt =
      "Answer the question strictly grounded in the retrieved references "
      "below. Cite only the [CITE:N] tags listed; never invent citations.\n"
      "References:\n" +
      evidence_block(evidence, context_budget) + "\nQuestion: " + query;
  return grounded_answer(prompt, evidence, generator, trace, temperature, max_tokens);
}

// ---------------------------------------------------------------------------
// Dua lookup
// ---------------------------------------------------------------------------

void DuaStore::load(const std::string& jsonl_path) {
  std::ifstream in(jsonl_path);
  if (!in) throw RetrievalError("cannot read dua store " + jsonl_path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    DuaEntry e;
    e.page_title = j.at("page_title").get<std::string>();
    e.occasion = j.at("occasion").get<std::string>();
    e.arabic = j.at("arabic").get<std::string>();
    e.translation = j.at("translation").get<std::string>();
    e.reference_url = j.value("reference_url", "");
    add(std::move(e));
  }
}

void DuaStore::add(DuaEntry entry) {
  for (const auto& e : entries_)
    if (e.page_title == entry.page_title)
      throw RetrievalError("duplicate dua page_title: " + entry.page_title);
  occasion_vecs_.push_back(embedder_->embed(entry.occasion));
  entries_.push_back(std::move(entry));
}

DuaResult DuaStore::lookup(const std::string& query, TextGenerator* generator,
                           ExecutionTrace& trace, const std::string& language) const {
  const char* kFallbackEn =
      "I could not find a matching supplication in the collection. You may wish "
      "to ask a scholar or consult an authenticated adhkar compilation.";
  const char* kFallbackAr =
      "لم أجد دعاءً مطابقاً في المجموعة. يُنصح بسؤال أهل العلم أو الرجوع إلى كتب "
      "الأذكار الموثوقة.";
  std::string fallback = language == "ar" ? kFallbackAr : kFallbackEn;

  if (entries_.empty()) {
    trace.add("dua.lookup", "empty store");
    return {std::nullopt, fallback};
  }

  auto qv = embedder_->embed(query);
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    scored.emplace_back(cosine(qv, occasion_vecs_[i]), i);
  std::stable_sort(scored.begin(), scored.end(),
                   [](auto& a, auto& b) { return a.first > b.first; });

  std::vector<std::size_t> shortlist;
  for (const auto& [sim, idx] : scored) {
    if (shortlist.size() >= 5) break;
    if (sim < 0.2) break;
    shortlist.push_back(idx);
  }
  if (shortlist.empty()) {
    trace.add("dua.lookup", "no occasion above the 0.2 similarity floor");
    return {std::nullopt, fallback};
  }

  std::string occasions_list;
  for (std::size_t i = 0; i < shortlist.size(); ++i)
    occasions_list += std::to_string(i + 1) + ". " + entries_[shortlist[i]].occasion + "\n";

  std::string prompt;
  if (language == "ar") {
    prompt =
        "أنت مساعد متخصص في تحديد المناسبات المناسبة للأدعية الإسلامية.\n"
        "مهمتك: حدد أرقام المناسبات التي تتوافق فعلاً مع سؤال المستخدم.\n"
        "أجب فقط بالأرقام مفصولة بفواصل (مثال: 1,3)\n"
        "إذا لم تجد أي مناسبة مطابقة، أجب بـ \"none\".\n\n"
        "سؤال المستخدم: " + query + "\n\nالمناسبات المرشحة:\n" + occasions_list +
        "\nما هي أرقام المناسبات المطابقة لسؤال المستخدم؟\n"
        "(occasion numbers)";
  } else {
    prompt =
        "You are a specialist in matching Islamic dua occasions to user queries.\n"
        "Your task: Identify which occasion numbers actually match the user's "
        "question.\n"
        "Respond ONLY with comma-separated numbers (e.g., 1,3)\n"
        "If no occasions match, respond with \"none\".\n\n"
        "User's question: " + query + "\n\nCandidate occasions:\n" + occasions_list +
        "\nWhich occasion numbers match the user's question?";
  }

  std::size_t pick = shortlist[0];
  try {
    std::string raw = generator->generate(prompt, 0.0, 32);
    std::string low;
    for (char c : raw) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (low.find("none") != std::string::npos) {
      trace.add("dua.lookup", "selector: none");
      return {std::nullopt, fallback};
    }
    static const std::regex num(R"((\d+))");
    std::smatch m;
    if (std::regex_search(raw, m, num)) {
      std::size_t n = std::stoul(m[1]);
      if (n >= 1 && n <= shortlist.size()) {
        pick = shortlist[n - 1];
        trace.add("dua.lookup", "selector picked candidate " + m[1].str());
      } else {
        trace.warn("selector index out of range; using top candidate");
      }
    } else {
      trace.warn("nonconforming selector output; using top candidate");
    }
  } catch (const std::exception& e) {
    trace.warn(std::string("selector provider failed; using top candidate: ") + e.what());
  }

  return {entries_[pick], ""};
}

}  // namespace minaret
