#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmine/document.hpp"
#include "qmine/tokenizer.hpp"

namespace qmine {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct Posting {
    uint64_t doc = 0;
    uint32_t tf = 0;

    bool operator==(const Posting&) const = default;
};

struct ScoredDoc {
    uint64_t doc = 0;
    double score = 0.0;
};

// Okapi BM25 term contribution with the non-negative ln(1 + ...) IDF.
// Exposed so tests and the brute-force oracle evaluate the exact same
// expression, in the exact same operation order.
double bm25_idf(uint64_t doc_count, uint64_t doc_frequency);
double bm25_term_score(uint32_t tf, uint64_t doc_length, double avg_doc_length,
                       uint64_t doc_frequency, uint64_t doc_count, const Bm25Params& params);

// Immutable once built or loaded; safe to share across any number of
// concurrent searchers.
class InvertedIndex {
public:
    // Deterministic build; documents may be partitioned across workers, the
    // partials are merged by term then doc id. Duplicate internal_id ->
    // ContractViolation.
    static InvertedIndex build(const std::vector<Document>& docs, Bm25Params params = {},
                               int parallelism = 1);

    // Sum over unique query terms of the BM25 contribution; terms absent
    // from the index contribute 0. Unknown doc id -> ContractViolation.
    double bm25_score(const TokenList& query_terms, uint64_t doc_id) const;

    // Top-k by (score desc, doc id asc); only documents containing at least
    // one query term appear. Empty query after tokenization -> empty result.
    std::vector<ScoredDoc> search_topk(std::string_view query_text, size_t k = 1000) const;

    uint64_t doc_count() const { return doc_lengths_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    uint64_t doc_length(uint64_t doc_id) const;
    uint64_t term_count() const { return terms_.size(); }
    uint64_t document_frequency(std::string_view term) const;
    const std::vector<Posting>* postings(std::string_view term) const;
    const Bm25Params& params() const { return params_; }

    // Directory layout: manifest.json, terms.dat, postings.dat, doclens.dat.
    // load() verifies the manifest version and per-file CRC32 checksums and
    // throws FormatError on any mismatch.
    void save(const std::filesystem::path& dir) const;
    static InvertedIndex load(const std::filesystem::path& dir);

    static constexpr uint32_t kFormatVersion = 1;

private:
    void finalize();
    uint32_t term_id(std::string_view term) const;  // npos32 when absent

    static constexpr uint32_t npos32 = 0xFFFFFFFF;

    std::vector<std::string> terms_;                  // sorted
    std::vector<std::vector<Posting>> postings_;      // parallel to terms_
    std::vector<uint32_t> doc_lengths_;               // indexed by internal id
    double avg_doc_length_ = 0.0;
    Bm25Params params_;
    std::unordered_map<std::string_view, uint32_t> term_lookup_;  // views into terms_
};

}  // namespace qmine
