#include "strata/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "strata/core.hpp"
#include "strata/random.hpp"

namespace strata {

namespace {

constexpr const char* kStopwordText =
#include "stopwords.inc"
    ;

bool token_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

// Unbiased integer in [0, bound) by rejection.
std::uint64_t bounded(std::uint64_t& state, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v;
    do {
        v = splitmix64(state);
    } while (v >= limit);
    return v % bound;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\"'");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\"'");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

const std::unordered_set<std::string>& english_stopwords() {
    static const std::unordered_set<std::string> words = [] {
        std::unordered_set<std::string> out;
        std::istringstream in(kStopwordText);
        std::string line;
        while (std::getline(in, line)) {
            const auto word = trim(line);
            if (!word.empty() && word.front() != '#') out.insert(word);
        }
        return out;
    }();
    return words;
}

std::vector<std::string> tokenize(std::string_view text) {
    const auto& stop = english_stopwords();
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2 && !stop.contains(current)) out.push_back(current);
        current.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (token_byte(c)) current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
        else flush();
    }
    flush();
    return out;
}

TfIdfIndex::TfIdfIndex(std::span<const std::string> corpus_docs) : doc_count_(corpus_docs.size()) {
    for (const auto& doc : corpus_docs) {
        auto toks = tokenize(doc);
        std::sort(toks.begin(), toks.end());
        toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
        for (auto& t : toks) ++doc_freq_[t];
    }
}

std::vector<std::string> TfIdfIndex::top_terms(std::span<const std::string> cluster_docs, std::size_t m) const {
    if (cluster_docs.empty()) throw Error(ErrorCode::EmptyCluster, "cannot label a cluster without documents");
    std::map<std::string, std::size_t> tf;
    for (const auto& doc : cluster_docs)
        for (auto& t : tokenize(doc)) ++tf[t];

    const double n = static_cast<double>(std::max<std::size_t>(doc_count_, 1));
    std::vector<std::pair<double, std::string>> scored;
    scored.reserve(tf.size());
    for (const auto& [term, count] : tf) {
        const auto it = doc_freq_.find(term);
        const double df = it == doc_freq_.end() ? 1.0 : static_cast<double>(it->second);
        scored.emplace_back(static_cast<double>(count) * std::log(n / df), term);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < std::min(m, scored.size()); ++i) out.push_back(scored[i].second);
    return out;
}

std::vector<std::string> tfidf_label(std::span<const std::string> cluster_docs,
                                     std::span<const std::string> corpus_docs, std::size_t m) {
    return TfIdfIndex(corpus_docs).top_terms(cluster_docs, m);
}

std::string join_terms(std::span<const std::string> terms) {
    std::string out;
    for (const auto& t : terms) {
        if (!out.empty()) out += '-';
        out += t;
    }
    return out;
}

std::string MockLabelClient::complete(const LabelRequest& request) {
    std::string label = "MOCK:";
    int taken = 0;
    for (const auto& doc : request.documents) {
        std::istringstream in(doc);
        std::string word;
        while (taken < 3 && in >> word) {
            label += ' ' + word;
            ++taken;
        }
        if (taken == 3) break;
    }
    return label;
}

std::string build_label_prompt(std::span<const std::string> documents, std::size_t max_label_chars) {
    std::string prompt =
        "The following documents were grouped together because they are semantically similar.\n"
        "Reply with one short, interpretable topic label for the group, at most " +
        std::to_string(max_label_chars) +
        " characters, on a single line, with no quotes or explanation.\n\nDocuments:\n";
    for (const auto& doc : documents) prompt += "- " + doc + "\n";
    return prompt;
}

std::vector<std::string> sample_documents(std::span<const std::string> docs, std::size_t k, std::uint64_t seed) {
    std::vector<std::size_t> idx(docs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const std::size_t take = std::min(k, docs.size());
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < take; ++i) {
        const auto j = i + static_cast<std::size_t>(bounded(state, idx.size() - i));
        std::swap(idx[i], idx[j]);
    }
    std::vector<std::string> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(docs[idx[i]]);
    return out;
}

std::string llm_label(std::span<const std::string> cluster_docs, LabelClient& client,
                      const ExternalLabelConfig& cfg, std::uint64_t seed) {
    if (cluster_docs.empty()) throw Error(ErrorCode::EmptyCluster, "cannot label a cluster without documents");
    LabelRequest request;
    request.documents = sample_documents(cluster_docs, cfg.sample_size, seed);
    request.prompt = build_label_prompt(request.documents, cfg.max_label_chars);
    const std::string answer = client.complete(request);

    std::string line = trim(answer.substr(0, answer.find('\n')));
    if (line.size() > cfg.max_label_chars) {
        std::size_t cut = cfg.max_label_chars;
        while (cut > 0 && (static_cast<unsigned char>(line[cut]) & 0xC0) == 0x80) --cut;
        line = trim(line.substr(0, cut));
    }
    if (line.empty()) throw Error(ErrorCode::ServiceUnavailable, "labeling service returned an empty label");
    return line;
}

}  // namespace strata
