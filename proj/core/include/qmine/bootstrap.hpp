#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmine/generation.hpp"

namespace qmine {

enum class SeedCategory { stem, humanities, social_science, misc };

std::string_view category_name(SeedCategory c);
SeedCategory category_from_name(std::string_view name);

enum class SeedOrigin { initial, generated };

struct SeedInfo {
    uint64_t id = 0;
    std::string text;
    SeedCategory category = SeedCategory::misc;
    std::string subcategory;
    SeedOrigin origin = SeedOrigin::initial;
    std::optional<uint64_t> parent;  // seed whose extension produced this one
    uint32_t round = 0;              // 0 for initial seeds
};

enum class QueryKind { question, thought };

struct Query {
    uint64_t id = 0;
    std::string text;
    QueryKind kind = QueryKind::question;
    uint64_t seed_ref = 0;
    uint32_t round = 0;  // 0 marks an initial seed passed through as-is
    uint64_t generator_seed = 0;
    double temperature = 0.0;
};

struct QueryPool {
    std::vector<Query> queries;
    double dedup_threshold = 0.8;
};

// Generation-output gate. Checks run in this order, first hit wins:
//   too_short   — empty or fewer than min_chars code points
//   non_natural — non-alphanumeric-non-space ratio above max_symbol_ratio
//   incomplete  — missing terminal . ! ? (questions must end with ?)
//   repetition  — some token repeats more than max_token_run times in a row
struct CleanRules {
    size_t min_chars = 8;
    double max_symbol_ratio = 0.3;
    uint32_t max_token_run = 10;
};

struct CleanResult {
    bool accepted = false;
    std::string reason;  // empty when accepted
    std::string text;    // trimmed input when accepted
};

CleanResult clean_generation(std::string_view text, bool require_question = false,
                             const CleanRules& rules = {});

struct BootstrapConfig {
    uint32_t rounds = 3;
    uint32_t per_seed_count = 10;
    double question_temperature = 1.0;
    double thought_temperature = 0.7;
    uint32_t max_tokens = 256;
    double dedup_threshold = 0.8;
    uint64_t base_seed = 42;
    int parallelism = 1;
    bool use_questions = true;
    bool use_thoughts = true;
    std::string question_template = "Write one diverse exam-style question about: {seed}";
    std::string thought_template =
        "Answer the following question, reasoning step by step: {question}";
    CleanRules clean;
};

struct BootstrapReport {
    uint64_t calls_attempted = 0;
    uint64_t calls_failed = 0;
    std::map<std::string, uint64_t> rejected;  // clean_generation reason -> count
    uint64_t candidates = 0;
    uint64_t removed_as_duplicates = 0;
    bool empty_pool = false;

    nlohmann::json to_json() const;
};

// `count` generation calls with seeds base_seed..base_seed+count-1, prompt
// from the template with {seed} substituted. Raw outputs, unfiltered; failed
// calls are skipped and counted in the report. count < 1 -> ContractViolation.
std::vector<std::string> question_extension(GenerationBackend& backend, const SeedInfo& seed,
                                            uint32_t count, double temperature,
                                            uint64_t base_seed, const std::string& prompt_template,
                                            BootstrapReport* report = nullptr);

// One generation call with {question} substituted into the thought template.
// question.kind must be QueryKind::question.
std::string thought_generation(GenerationBackend& backend, const Query& question,
                               double temperature, uint64_t seed,
                               const std::string& prompt_template);

// Iterative expansion: each round extends every seed in the pool, cleans and
// near-dedups the questions, promotes survivors into the seed pool, generates
// a thought per survivor, and collects questions + thoughts as pool
// candidates. Initial seeds that are already well-formed questions enter the
// candidates directly (round 0). Candidates are deduplicated once more before
// the pool is sealed.
QueryPool bootstrap_queries(std::vector<SeedInfo> seeds, const BootstrapConfig& config,
                            GenerationBackend& backend, BootstrapReport* report = nullptr,
                            std::vector<SeedInfo>* final_seed_pool = nullptr);

// Starter seed keywords for the four stock categories.
std::vector<SeedInfo> builtin_seed_catalog();

// JSONL persistence (one object per line, all provenance fields).
std::vector<SeedInfo> load_seeds(const std::filesystem::path& path);
void save_seeds(const std::filesystem::path& path, const std::vector<SeedInfo>& seeds);
void save_pool(const std::filesystem::path& path, const QueryPool& pool);
QueryPool load_pool(const std::filesystem::path& path);

nlohmann::json query_to_json(const Query& query);

}  // namespace qmine
