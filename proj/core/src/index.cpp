#include "qmine/index.hpp"

#include <algorithm>
#include <cmath>

#include "qmine/binio.hpp"
#include "qmine/errors.hpp"
#include "qmine/parallel.hpp"

namespace qmine {

using nlohmann::json;

double bm25_idf(uint64_t doc_count, uint64_t doc_frequency) {
    double n = static_cast<double>(doc_count);
    double df = static_cast<double>(doc_frequency);
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double bm25_term_score(uint32_t tf, uint64_t doc_length, double avg_doc_length,
                       uint64_t doc_frequency, uint64_t doc_count, const Bm25Params& params) {
    if (tf == 0 || doc_frequency == 0) return 0.0;
    double idf = bm25_idf(doc_count, doc_frequency);
    double norm = avg_doc_length > 0.0 ? static_cast<double>(doc_length) / avg_doc_length : 1.0;
    double denom = static_cast<double>(tf) + params.k1 * (1.0 - params.b + params.b * norm);
    return idf * (static_cast<double>(tf) * (params.k1 + 1.0)) / denom;
}

namespace {

// Unique query terms in first-occurrence order. The scoring loops follow
// this order, so the brute-force oracle reproduces the exact float sums.
TokenList unique_terms(const TokenList& terms) {
    TokenList out;
    for (const auto& t : terms) {
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
    return out;
}

}  // namespace

InvertedIndex InvertedIndex::build(const std::vector<Document>& docs, Bm25Params params,
                                   int parallelism) {
    {
        // internal_ids must be dense 0..N-1: duplicates are a consistency
        // error and holes would corrupt doc_count.
        std::vector<uint64_t> ids;
        ids.reserve(docs.size());
        for (const auto& d : docs) ids.push_back(d.internal_id);
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            throw ContractViolation("duplicate internal_id in index build");
        if (!ids.empty() && ids.back() != ids.size() - 1)
            throw ContractViolation("internal_ids are not dense 0..N-1");
    }

    InvertedIndex index;
    index.params_ = params;
    index.doc_lengths_.assign(docs.size(), 0);

    // Partition the documents, build per-worker partial maps, merge in term
    // order. Output is identical to a sequential build.
    size_t workers = parallelism <= 1 ? 1 : static_cast<size_t>(parallelism);
    workers = std::min(workers, docs.size() ? docs.size() : size_t{1});
    struct Partial {
        std::unordered_map<std::string, std::vector<Posting>> map;
    };
    std::vector<Partial> partials(workers);

    parallel_for(workers, static_cast<int>(workers), [&](size_t w) {
        size_t chunk = (docs.size() + workers - 1) / workers;
        size_t begin = w * chunk;
        size_t end = std::min(docs.size(), begin + chunk);
        std::unordered_map<std::string, uint32_t> counts;
        for (size_t i = begin; i < end; ++i) {
            const Document& doc = docs[i];
            TokenList tokens = tokenize(doc.text);
            index.doc_lengths_[doc.internal_id] = static_cast<uint32_t>(tokens.size());
            counts.clear();
            for (auto& token : tokens) ++counts[token];
            for (auto& [term, tf] : counts) {
                partials[w].map[term].push_back(Posting{doc.internal_id, tf});
            }
        }
    });

    std::unordered_map<std::string, std::vector<Posting>> merged;
    for (auto& partial : partials) {
        for (auto& [term, postings] : partial.map) {
            auto& dst = merged[term];
            dst.insert(dst.end(), postings.begin(), postings.end());
        }
    }

    index.terms_.reserve(merged.size());
    for (auto& [term, _] : merged) index.terms_.push_back(term);
    std::sort(index.terms_.begin(), index.terms_.end());

    index.postings_.resize(index.terms_.size());
    parallel_for(index.terms_.size(), parallelism, [&](size_t t) {
        auto& postings = merged[index.terms_[t]];
        std::sort(postings.begin(), postings.end(),
                  [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
        index.postings_[t] = std::move(postings);
    });

    index.finalize();
    return index;
}

void InvertedIndex::finalize() {
    uint64_t total = 0;
    for (uint32_t len : doc_lengths_) total += len;
    avg_doc_length_ =
        doc_lengths_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(doc_lengths_.size());
    term_lookup_.clear();
    term_lookup_.reserve(terms_.size());
    for (uint32_t i = 0; i < terms_.size(); ++i) {
        term_lookup_.emplace(std::string_view(terms_[i]), i);
    }
}

uint32_t InvertedIndex::term_id(std::string_view term) const {
    auto it = term_lookup_.find(term);
    return it == term_lookup_.end() ? npos32 : it->second;
}

uint64_t InvertedIndex::doc_length(uint64_t doc_id) const {
    if (doc_id >= doc_lengths_.size())
        throw ContractViolation("unknown doc id " + std::to_string(doc_id));
    return doc_lengths_[doc_id];
}

uint64_t InvertedIndex::document_frequency(std::string_view term) const {
    uint32_t t = term_id(term);
    return t == npos32 ? 0 : postings_[t].size();
}

const std::vector<Posting>* InvertedIndex::postings(std::string_view term) const {
    uint32_t t = term_id(term);
    return t == npos32 ? nullptr : &postings_[t];
}

double InvertedIndex::bm25_score(const TokenList& query_terms, uint64_t doc_id) const {
    if (doc_id >= doc_lengths_.size())
        throw ContractViolation("unknown doc id " + std::to_string(doc_id));
    double score = 0.0;
    for (const auto& term : unique_terms(query_terms)) {
        uint32_t t = term_id(term);
        if (t == npos32) continue;
        const auto& postings = postings_[t];
        auto it = std::lower_bound(postings.begin(), postings.end(), doc_id,
                                   [](const Posting& p, uint64_t id) { return p.doc < id; });
        if (it == postings.end() || it->doc != doc_id) continue;
        score += bm25_term_score(it->tf, doc_lengths_[doc_id], avg_doc_length_,
                                 postings.size(), doc_count(), params_);
    }
    return score;
}

std::vector<ScoredDoc> InvertedIndex::search_topk(std::string_view query_text, size_t k) const {
    TokenList query = unique_terms(tokenize(query_text));
    if (query.empty() || doc_count() == 0 || k == 0) return {};

    // Term-at-a-time accumulation. Every contribution is positive, so a
    // non-zero slot marks a touched document.
    std::vector<double> acc(doc_lengths_.size(), 0.0);
    std::vector<uint64_t> touched;
    for (const auto& term : query) {
        uint32_t t = term_id(term);
        if (t == npos32) continue;
        const auto& postings = postings_[t];
        uint64_t df = postings.size();
        for (const Posting& p : postings) {
            if (acc[p.doc] == 0.0) touched.push_back(p.doc);
            acc[p.doc] += bm25_term_score(p.tf, doc_lengths_[p.doc], avg_doc_length_, df,
                                          doc_count(), params_);
        }
    }

    std::vector<ScoredDoc> scored;
    scored.reserve(touched.size());
    for (uint64_t doc : touched) scored.push_back(ScoredDoc{doc, acc[doc]});

    auto better = [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc < b.doc;
    };
    if (scored.size() > k) {
        std::nth_element(scored.begin(), scored.begin() + static_cast<ptrdiff_t>(k), scored.end(),
                         better);
        scored.resize(k);
    }
    std::sort(scored.begin(), scored.end(), better);
    return scored;
}

namespace {

constexpr std::string_view kManifestFile = "manifest.json";
constexpr std::string_view kTermsFile = "terms.dat";
constexpr std::string_view kPostingsFile = "postings.dat";
constexpr std::string_view kDocLensFile = "doclens.dat";

}  // namespace

void InvertedIndex::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);

    // postings.dat: per-term blocks of (doc delta, tf) varints.
    // terms.dat: sorted dictionary of (term, df, block offset, block length).
    std::string postings_blob;
    std::string terms_blob;
    put_u32(terms_blob, static_cast<uint32_t>(terms_.size()));
    for (size_t t = 0; t < terms_.size(); ++t) {
        uint64_t offset = postings_blob.size();
        uint64_t prev = 0;
        for (const Posting& p : postings_[t]) {
            put_uvarint(postings_blob, p.doc - prev);
            put_uvarint(postings_blob, p.tf);
            prev = p.doc;
        }
        put_uvarint(terms_blob, terms_[t].size());
        terms_blob += terms_[t];
        put_uvarint(terms_blob, postings_[t].size());
        put_uvarint(terms_blob, offset);
        put_uvarint(terms_blob, postings_blob.size() - offset);
    }

    std::string doclens_blob;
    put_u64(doclens_blob, doc_lengths_.size());
    for (uint32_t len : doc_lengths_) put_u32(doclens_blob, len);

    write_file(dir / kTermsFile, terms_blob);
    write_file(dir / kPostingsFile, postings_blob);
    write_file(dir / kDocLensFile, doclens_blob);

    json manifest{{"version", kFormatVersion},
                  {"doc_count", doc_count()},
                  {"avg_doc_length", avg_doc_length_},
                  {"k1", params_.k1},
                  {"b", params_.b},
                  {"checksums",
                   {{std::string(kTermsFile), crc32_hex(terms_blob)},
                    {std::string(kPostingsFile), crc32_hex(postings_blob)},
                    {std::string(kDocLensFile), crc32_hex(doclens_blob)}}}};
    write_file(dir / kManifestFile, manifest.dump(2) + "\n");
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& dir) {
    json manifest = json::parse(read_file(dir / kManifestFile));
    if (!manifest.contains("version") || manifest["version"].get<uint32_t>() != kFormatVersion) {
        throw FormatError("index format version mismatch in " + dir.string());
    }

    auto read_checked = [&](std::string_view name) {
        std::string blob = read_file(dir / name);
        std::string expected = manifest["checksums"][std::string(name)].get<std::string>();
        if (crc32_hex(blob) != expected) {
            throw FormatError("checksum mismatch for " + (dir / name).string());
        }
        return blob;
    };

    std::string terms_blob = read_checked(kTermsFile);
    std::string postings_blob = read_checked(kPostingsFile);
    std::string doclens_blob = read_checked(kDocLensFile);

    InvertedIndex index;
    index.params_.k1 = manifest["k1"].get<double>();
    index.params_.b = manifest["b"].get<double>();

    size_t pos = 0;
    if (doclens_blob.size() < 8) throw FormatError("doclens.dat truncated");
    uint64_t n = get_u64(doclens_blob, pos);
    if (doclens_blob.size() != 8 + n * 4) throw FormatError("doclens.dat truncated");
    index.doc_lengths_.reserve(n);
    for (uint64_t i = 0; i < n; ++i) index.doc_lengths_.push_back(get_u32(doclens_blob, pos));

    pos = 0;
    if (terms_blob.size() < 4) throw FormatError("terms.dat truncated");
    uint32_t term_count = get_u32(terms_blob, pos);
    index.terms_.reserve(term_count);
    index.postings_.reserve(term_count);
    for (uint32_t t = 0; t < term_count; ++t) {
        uint64_t term_len, df, offset, block_len;
        if (!get_uvarint(terms_blob, pos, term_len) || pos + term_len > terms_blob.size())
            throw FormatError("terms.dat truncated");
        std::string term = terms_blob.substr(pos, term_len);
        pos += term_len;
        if (!get_uvarint(terms_blob, pos, df) || !get_uvarint(terms_blob, pos, offset) ||
            !get_uvarint(terms_blob, pos, block_len))
            throw FormatError("terms.dat truncated");
        if (offset + block_len > postings_blob.size())
            throw FormatError("postings.dat block out of range for term " + term);

        std::vector<Posting> postings;
        postings.reserve(df);
        size_t ppos = offset;
        uint64_t prev = 0;
        for (uint64_t i = 0; i < df; ++i) {
            uint64_t delta, tf;
            if (!get_uvarint(postings_blob, ppos, delta) || !get_uvarint(postings_blob, ppos, tf))
                throw FormatError("postings.dat truncated for term " + term);
            prev += delta;
            postings.push_back(Posting{prev, static_cast<uint32_t>(tf)});
        }
        if (ppos != offset + block_len)
            throw FormatError("postings.dat block length mismatch for term " + term);
        index.terms_.push_back(std::move(term));
        index.postings_.push_back(std::move(postings));
    }

    index.finalize();
    return index;
}

}  // namespace qmine
