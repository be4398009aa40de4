#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "minaret/providers.hpp"
#include "minaret/trace.hpp"

namespace minaret {

struct RetrievalError : std::runtime_error {
  explicit RetrievalError(const std::string& what) : std::runtime_error(what) {}
};

struct DocumentChunk {
  std::string id;
  std::string text;
  std::string source_title;
  std::string source_url;
  std::string collection;  // quran/hadith/fiqh/fatwa/history/article
  std::vector<float> embedding;
};

struct RetrievalParams {
  int top_k = 12;
  double min_similarity = 0.25;
  int diversity = 3;  // max chunks per source_title
  bool rerank = false;
  std::optional<std::string> collection;  // metadata pre-filter
};

struct ScoredChunk {
  DocumentChunk chunk;
  double similarity = 0.0;
};

struct TaggedChunk {
  int tag = 0;  // [CITE:tag]
  DocumentChunk chunk;
  double similarity = 0.0;
};
using EvidenceSet = std::vector<TaggedChunk>;

/// Optional cross-encoder style reranker; implementations re-order the
/// survivors. None ships beyond the interface.
class Reranker {
public:
  virtual ~Reranker() = default;
  virtual std::vector<ScoredChunk> rerank(const std::string& query,
                                          std::vector<ScoredChunk> candidates) = 0;
};

/// In-memory corpus with an exhaustive-cosine index, immutable after load.
class DocumentStore {
public:
  explicit DocumentStore(Embedder* embedder) : embedder_(embedder) {}

  /// Line-delimited JSON, one chunk per line; a stored "embedding" array is
  /// used as-is, otherwise the vector is computed at load.
  void load(const std::string& jsonl_path);
  void add(DocumentChunk chunk);
  std::size_t size() const { return chunks_.size(); }

  std::vector<ScoredChunk> retrieve(const std::string& query, const RetrievalParams& params,
                                    Reranker* reranker = nullptr) const;

private:
  Embedder* embedder_;
  std::vector<DocumentChunk> chunks_;
};

/// Precompute embeddings offline: read chunks, write them back with an
/// "embedding" field filled in.
void ingest_docs(const std::string& input_jsonl, const std::string& output_jsonl,
                 Embedder& embedder);

/// Dense [CITE:1..n] tags in rank order; deterministic for identical input.
EvidenceSet tag_evidence(const std::vector<ScoredChunk>& ranked);

/// Regex scan for citation tags present in a text.
std::vector<int> citation_tags_in(const std::string& text);

/// Drop every sentence containing a tag outside the evidence set; each
/// removal adds a trace warning.
std::string strip_unknown_citations(const std::string& text, const EvidenceSet& evidence,
                                    ExecutionTrace& trace);

struct GroundedAnswer {
  std::string text;
  bool abstained = false;
};

/// Fiqh answering: scope/assumption framing, ruling separated from
/// evidence, tags restricted to the evidence set. Empty evidence or
/// provider failure gives an abstention recommending scholarly consultation.
GroundedAnswer answer_fiqh(const std::string& query, const EvidenceSet& evidence,
                           TextGenerator* generator, ExecutionTrace& trace,
                           double temperature = 0.1, int max_tokens = 4500);

/// General grounded answering; evidence context is truncated to
/// `context_budget` characters, dropping lowest-ranked chunks first.
GroundedAnswer answer_general(const std::string& query, const EvidenceSet& evidence,
                              TextGenerator* generator, ExecutionTrace& trace,
                              double temperature = 0.1, int max_tokens = 4500,
                              std::size_t context_budget = 8000);

// ---------------------------------------------------------------------------
// Dua lookup
// ---------------------------------------------------------------------------

struct DuaEntry {
  std::string page_title;  // unique canonical key
  std::string occasion;
  std::string arabic;
  std::string translation;
  std::string reference_url;
};

struct DuaResult {
  std::optional<DuaEntry> entry;  // verbatim from the store when present
  std::string message;            // fallback text when no entry matched
};

class DuaStore {
public:
  explicit DuaStore(Embedder* embedder) : embedder_(embedder) {}

  void load(const std::string& jsonl_path);
  void add(DuaEntry entry);
  std::size_t size() const { return entries_.size(); }
  const std::vector<DuaEntry>& entries() const { return entries_; }

  /// Two stages: cosine over occasions (top 5, floor 0.2), then a provider
  /// selector over the shortlist. "none" or an empty shortlist gives the
  /// fallback message; a selector failure degrades to the top candidate.
  DuaResult lookup(const std::string& query, TextGenerator* generator,
                   ExecutionTrace& trace, const std::string& language = "en") const;

private:
  Embedder* embedder_;
  std::vector<DuaEntry> entries_;
  std::vector<std::vector<float>> occasion_vecs_;
};

}  // namespace minaret
