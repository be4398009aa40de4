#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace minaret {

struct ProviderError : std::runtime_error {
  explicit ProviderError(const std::string& what) : std::runtime_error(what) {}
};

/// Generative model behind every prompt in the system. Implementations may
/// call a remote service; the stub is fully offline and deterministic.
class TextGenerator {
public:
  virtual ~TextGenerator() = default;
  virtual std::string generate(const std::string& prompt, double temperature,
                               int max_tokens) = 0;
};

/// Sentence embedder. Output dimension is constant per engine instance and
/// vectors are L2-normalized.
class Embedder {
public:
  virtual ~Embedder() = default;
  virtual std::vector<float> embed(const std::string& text) = 0;
  virtual std::size_t dimension() const = 0;
};

/// Character-trigram hashing embedder: each Unicode codepoint trigram is
/// hashed into one of D buckets and the count vector is L2-normalized.
/// Deterministic and language-agnostic.
class TrigramEmbedder final : public Embedder {
public:
  explicit TrigramEmbedder(std::size_t dim = 256) : dim_(dim) {}
  std::vector<float> embed(const std::string& text) override;
  std::size_t dimension() const override { return dim_; }

private:
  std::size_t dim_;
};

/// Offline text generator with canned replies keyed by prompt kind. Prompts
/// it does not recognize get a fixed sentinel (never valid JSON), so JSON
/// consumers deterministically take their fallback path.
class StubTextGenerator final : public TextGenerator {
public:
  std::string generate(const std::string& prompt, double temperature,
                       int max_tokens) override;
};

/// Generator that always throws, for exercising provider-failure paths.
class FailingTextGenerator final : public TextGenerator {
public:
  std::string generate(const std::string&, double, int) override {
    throw ProviderError("provider unavailable");
  }
};

/// Generator that replays a fixed script of responses (tests).
class ScriptedTextGenerator final : public TextGenerator {
public:
  explicit ScriptedTextGenerator(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}
  std::string generate(const std::string&, double, int) override {
    if (next_ >= responses_.size()) throw ProviderError("script exhausted");
    return responses_[next_++];
  }

private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
};

double cosine(const std::vector<float>& a, const std::vector<float>& b);

}  // namespace minaret
