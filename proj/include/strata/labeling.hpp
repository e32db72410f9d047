#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace strata {

const std::unordered_set<std::string>& english_stopwords();

// Lowercases ASCII, splits on anything that is not an ASCII letter, digit or a
// non-ASCII byte, then drops stopwords and tokens shorter than two bytes.
std::vector<std::string> tokenize(std::string_view text);

// Document frequencies of a corpus, reusable across the clusters of one timestep.
class TfIdfIndex {
public:
    explicit TfIdfIndex(std::span<const std::string> corpus_docs);

    // Top `m` terms of the concatenated cluster text by tf * log(N / df),
    // ties broken lexicographically. Throws EmptyCluster for no documents.
    std::vector<std::string> top_terms(std::span<const std::string> cluster_docs, std::size_t m) const;

    std::size_t document_count() const { return doc_count_; }

private:
    std::size_t doc_count_ = 0;
    std::unordered_map<std::string, std::size_t> doc_freq_;
};

std::vector<std::string> tfidf_label(std::span<const std::string> cluster_docs,
                                     std::span<const std::string> corpus_docs, std::size_t m);
std::string join_terms(std::span<const std::string> terms);

struct ExternalLabelConfig {
    std::size_t sample_size = 12;
    std::size_t max_label_chars = 60;
};

struct LabelRequest {
    std::string prompt;
    std::vector<std::string> documents;
};

// A service producing one short label per request. Implementations throw
// Error(ServiceUnavailable) on any transport or protocol failure.
class LabelClient {
public:
    virtual ~LabelClient() = default;
    virtual std::string complete(const LabelRequest& request) = 0;
};

// Answers "MOCK: " followed by the first three whitespace tokens of the sampled documents.
class MockLabelClient : public LabelClient {
public:
    std::string complete(const LabelRequest& request) override;
};

// OpenAI-style chat-completions endpoint. The API key is read from the named
// environment variable at request time.
class HttpLabelClient : public LabelClient {
public:
    struct Options {
        std::string endpoint = "https://api.openai.com/v1/chat/completions";
        std::string model = "gpt-4o-mini";
        std::string api_key_env = "STRATA_LABEL_API_KEY";
        std::chrono::milliseconds timeout{15000};
    };

    explicit HttpLabelClient(Options options);
    std::string complete(const LabelRequest& request) override;

private:
    Options options_;
};

std::string build_label_prompt(std::span<const std::string> documents, std::size_t max_label_chars);

// Uniform sample without replacement of min(k, |docs|) documents, in sampled order.
std::vector<std::string> sample_documents(std::span<const std::string> docs, std::size_t k, std::uint64_t seed);

// Samples, queries the client and returns the first line of the answer, trimmed
// and cut to `max_label_chars` bytes on a UTF-8 boundary.
std::string llm_label(std::span<const std::string> cluster_docs, LabelClient& client,
                      const ExternalLabelConfig& cfg, std::uint64_t seed);

}  // namespace strata
