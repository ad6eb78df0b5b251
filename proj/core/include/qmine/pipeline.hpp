#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmine/bootstrap.hpp"
#include "qmine/document.hpp"
#include "qmine/generation.hpp"
#include "qmine/index.hpp"

namespace qmine {

struct StageToggles {
    bool bootstrap = true;
    bool filter = true;
    bool dedup = true;
    bool dedup_first = false;  // run dedup before the quality filter
};

enum class BackendKind { mock, http };

struct PipelineConfig {
    std::string corpus_path;  // normalized documents, JSONL
    std::string index_dir;    // loaded if present, else built here
    std::string seed_file;    // empty -> builtin seed catalog
    std::string pool_file;    // set -> bootstrap stage loads instead of generating
    std::string output_dir;
    std::string model_path;   // required while the filter stage is enabled

    size_t k = 1000;
    double dedup_threshold = 0.8;
    double quality_threshold = 0.8;
    Bm25Params bm25;
    BootstrapConfig bootstrap;
    BackendKind backend = BackendKind::mock;
    HttpBackendConfig http;
    int parallelism = 1;
    StageToggles stages;
    size_t shard_size = 100000;
    uint64_t seed = 42;
    bool debug_keep_per_query = false;
    size_t stats_top_domains = 10;

    nlohmann::json to_json() const;
    // Hash of the resolved config minus output_dir: identifies the dataset
    // recipe, not where it landed.
    std::string config_hash() const;
};

// Union of the per-query top-k result sets, with per-document best score
// (max over queries) and matching-query count.
struct RetrievedSet {
    struct UnionEntry {
        uint64_t doc = 0;
        double best_score = 0.0;
        uint32_t query_matches = 0;
    };
    std::vector<std::vector<ScoredDoc>> per_query;  // pool order; empty when not retained
    std::vector<UnionEntry> members;                // ascending doc id
};

RetrievedSet retrieve_all(const InvertedIndex& index, const QueryPool& pool, size_t k,
                          int parallelism = 1, bool keep_per_query = true);

struct CorpusStats {
    uint64_t documents = 0;
    uint64_t characters = 0;     // code points
    uint64_t approx_tokens = 0;  // characters / 4
    std::vector<std::pair<std::string, uint64_t>> top_domains;  // count desc, domain asc
    std::map<int, uint64_t> year_histogram;                     // docs with timestamps only

    nlohmann::json to_json() const;
};

CorpusStats compute_stats(const std::vector<Document>& docs, size_t top_n = 10);

// Host component of a URL, lowercased, without credentials or port.
std::string url_host(std::string_view url);

struct StageCount {
    std::string name;
    uint64_t in = 0;
    uint64_t out = 0;
    uint64_t removed = 0;
    double millis = 0.0;
};

struct PipelineResult {
    std::filesystem::path manifest_path;
    std::vector<std::filesystem::path> shard_paths;
    CorpusStats stats;
    std::vector<StageCount> stage_counts;
    uint64_t final_documents = 0;
    nlohmann::json manifest;
};

class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string stage, const std::string& what)
        : std::runtime_error("stage '" + stage + "': " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

// Executes bootstrap -> retrieve -> filter -> dedup -> write (filter/dedup
// order per toggles), writing dataset shards, manifest, stats, and a run
// report under output_dir. A stage failure throws PipelineError naming the
// stage after marking the manifest incomplete. When `backend` is null one
// is constructed from the config.
PipelineResult run_pipeline(const PipelineConfig& config, GenerationBackend* backend = nullptr);

constexpr uint32_t kDatasetFormatVersion = 1;

}  // namespace qmine
