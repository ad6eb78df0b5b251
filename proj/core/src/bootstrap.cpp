#include "qmine/bootstrap.hpp"

#include <algorithm>
#include <fstream>

#include "qmine/dedup.hpp"
#include "qmine/errors.hpp"
#include "qmine/hash.hpp"
#include "qmine/parallel.hpp"
#include "qmine/tokenizer.hpp"

namespace qmine {

using nlohmann::json;

std::string_view category_name(SeedCategory c) {
    switch (c) {
        case SeedCategory::stem: return "stem";
        case SeedCategory::humanities: return "humanities";
        case SeedCategory::social_science: return "social_science";
        case SeedCategory::misc: return "misc";
    }
    return "misc";
}

SeedCategory category_from_name(std::string_view name) {
    if (name == "stem") return SeedCategory::stem;
    if (name == "humanities") return SeedCategory::humanities;
    if (name == "social_science") return SeedCategory::social_science;
    return SeedCategory::misc;
}

namespace {

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::string substitute(const std::string& prompt_template, std::string_view placeholder,
                       std::string_view value) {
    std::string out = prompt_template;
    size_t pos = out.find(placeholder);
    if (pos != std::string::npos) out.replace(pos, placeholder.size(), value);
    return out;
}

}  // namespace

CleanResult clean_generation(std::string_view text, bool require_question,
                             const CleanRules& rules) {
    std::string_view trimmed = trim_view(text);

    if (trimmed.empty() || count_codepoints(trimmed) < rules.min_chars) {
        return CleanResult{false, "too_short", ""};
    }

    size_t symbols = 0;
    size_t total = 0;
    uint32_t last_cp = 0;
    for (size_t pos = 0; pos < trimmed.size();) {
        uint32_t cp = decode_utf8(trimmed, pos);
        last_cp = cp;
        ++total;
        if (!is_alnum_cp(cp) && !is_space_cp(cp)) ++symbols;
    }
    if (total > 0 && static_cast<double>(symbols) / static_cast<double>(total) > rules.max_symbol_ratio) {
        return CleanResult{false, "non_natural", ""};
    }

    bool terminal = last_cp == '.' || last_cp == '!' || last_cp == '?';
    if (require_question ? last_cp != '?' : !terminal) {
        return CleanResult{false, "incomplete", ""};
    }

    TokenList tokens = tokenize(trimmed);
    uint32_t run = 1;
    for (size_t i = 1; i < tokens.size(); ++i) {
        run = tokens[i] == tokens[i - 1] ? run + 1 : 1;
        if (run > rules.max_token_run) {
            return CleanResult{false, "repetition", ""};
        }
    }

    return CleanResult{true, "", std::string(trimmed)};
}

std::vector<std::string> question_extension(GenerationBackend& backend, const SeedInfo& seed,
                                            uint32_t count, double temperature,
                                            uint64_t base_seed, const std::string& prompt_template,
                                            BootstrapReport* report) {
    if (count < 1) throw ContractViolation("question_extension count must be >= 1");
    std::string prompt = substitute(prompt_template, "{seed}", seed.text);
    std::vector<std::string> out;
    out.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        if (report) ++report->calls_attempted;
        try {
            out.push_back(backend.generate(prompt, temperature, base_seed + i, 256));
        } catch (const IoError&) {
            if (report) ++report->calls_failed;
        }
    }
    return out;
}

std::string thought_generation(GenerationBackend& backend, const Query& question,
                               double temperature, uint64_t seed,
                               const std::string& prompt_template) {
    if (question.kind != QueryKind::question)
        throw ContractViolation("thought_generation requires a question query");
    std::string prompt = substitute(prompt_template, "{question}", question.text);
    return backend.generate(prompt, temperature, seed, 512);
}

json BootstrapReport::to_json() const {
    json rejected_json = json::object();
    for (const auto& [k, v] : rejected) rejected_json[k] = v;
    return json{{"calls_attempted", calls_attempted}, {"calls_failed", calls_failed},
                {"rejected", rejected_json},          {"candidates", candidates},
                {"removed_as_duplicates", removed_as_duplicates}, {"empty_pool", empty_pool}};
}

QueryPool bootstrap_queries(std::vector<SeedInfo> seeds, const BootstrapConfig& config,
                            GenerationBackend& backend, BootstrapReport* report,
                            std::vector<SeedInfo>* final_seed_pool) {
    BootstrapReport local_report;
    if (!report) report = &local_report;

    std::vector<SeedInfo> pool = std::move(seeds);
    for (size_t i = 0; i < pool.size(); ++i) {
        pool[i].id = i;
        pool[i].origin = SeedOrigin::initial;
        pool[i].parent.reset();
        pool[i].round = 0;
    }

    DedupOptions dd;
    dd.threshold = config.dedup_threshold;
    dd.parallelism = config.parallelism;

    std::vector<Query> candidates;

    // Initial seeds that already read as questions go straight into the
    // candidate set; with rounds=0 they are the entire pool.
    for (const auto& seed : pool) {
        CleanResult cleaned = clean_generation(seed.text, /*require_question=*/true, config.clean);
        if (cleaned.accepted) {
            candidates.push_back(Query{0, cleaned.text, QueryKind::question, seed.id, 0, 0, 0.0});
        }
    }

    for (uint32_t round = 1; round <= config.rounds; ++round) {
        struct RawQuestion {
            uint64_t parent_seed;
            std::string text;
            uint64_t generator_seed;
        };

        // Fan generation out per seed; slots keep results in (seed, call)
        // order no matter how the workers are scheduled.
        size_t snapshot = pool.size();
        std::vector<std::vector<RawQuestion>> per_seed(snapshot);
        std::vector<BootstrapReport> per_seed_report(snapshot);
        parallel_for(snapshot, config.parallelism, [&](size_t s) {
            const SeedInfo& seed = pool[s];
            uint64_t base = mix64(config.base_seed ^ mix64(round) ^ mix64(seed.id * 2 + 1));
            auto raw = question_extension(backend, seed, config.per_seed_count,
                                          config.question_temperature, base,
                                          config.question_template, &per_seed_report[s]);
            for (size_t i = 0; i < raw.size(); ++i) {
                CleanResult cleaned = clean_generation(raw[i], /*require_question=*/true, config.clean);
                if (cleaned.accepted) {
                    per_seed[s].push_back(RawQuestion{seed.id, cleaned.text, base + i});
                } else {
                    ++per_seed_report[s].rejected[cleaned.reason];
                }
            }
        });
        for (const auto& r : per_seed_report) {
            report->calls_attempted += r.calls_attempted;
            report->calls_failed += r.calls_failed;
            for (const auto& [k, v] : r.rejected) report->rejected[k] += v;
        }

        std::vector<RawQuestion> fresh;
        for (auto& bucket : per_seed)
            for (auto& q : bucket) fresh.push_back(std::move(q));

        // Round dedup runs over existing pool texts plus the new questions,
        // with existing seeds at lower ids so they win representative spots.
        std::vector<std::pair<uint64_t, std::string>> items;
        items.reserve(pool.size() + fresh.size());
        for (const auto& seed : pool) items.emplace_back(seed.id, seed.text);
        uint64_t next_id = pool.size();
        for (const auto& q : fresh) items.emplace_back(next_id++, q.text);
        DedupResult round_dedup = dedup(items, dd);

        std::vector<bool> kept_flag(items.size(), false);
        for (uint64_t id : round_dedup.kept) kept_flag[id] = true;

        struct Survivor {
            uint64_t seed_id;  // the SeedInfo created from this question
            Query question;
        };
        std::vector<Survivor> survivors;
        for (size_t i = 0; i < fresh.size(); ++i) {
            uint64_t item_id = pool.size() + i;
            if (!kept_flag[item_id]) {
                ++report->removed_as_duplicates;
                continue;
            }
            const RawQuestion& q = fresh[i];
            const SeedInfo& parent = pool[q.parent_seed];
            SeedInfo promoted;
            promoted.id = pool.size() + survivors.size();
            promoted.text = q.text;
            promoted.category = parent.category;
            promoted.subcategory = parent.subcategory;
            promoted.origin = SeedOrigin::generated;
            promoted.parent = parent.id;
            promoted.round = round;

            Query question{0, q.text, QueryKind::question, q.parent_seed, round,
                           q.generator_seed, config.question_temperature};
            survivors.push_back(Survivor{promoted.id, question});
            pool.push_back(std::move(promoted));
        }

        if (config.use_questions) {
            for (const auto& s : survivors) candidates.push_back(s.question);
        }

        if (config.use_thoughts) {
            std::vector<std::string> thoughts(survivors.size());
            std::vector<uint64_t> thought_seeds(survivors.size());
            std::vector<BootstrapReport> thought_report(survivors.size());
            parallel_for(survivors.size(), config.parallelism, [&](size_t i) {
                thought_seeds[i] =
                    mix64(config.base_seed ^ mix64(round) ^ mix64(survivors[i].seed_id * 2));
                ++thought_report[i].calls_attempted;
                try {
                    thoughts[i] = thought_generation(backend, survivors[i].question,
                                                     config.thought_temperature, thought_seeds[i],
                                                     config.thought_template);
                } catch (const IoError&) {
                    ++thought_report[i].calls_failed;
                }
            });
            for (size_t i = 0; i < survivors.size(); ++i) {
                report->calls_attempted += thought_report[i].calls_attempted;
                report->calls_failed += thought_report[i].calls_failed;
                if (thoughts[i].empty()) continue;
                CleanResult cleaned = clean_generation(thoughts[i], false, config.clean);
                if (!cleaned.accepted) {
                    ++report->rejected[cleaned.reason];
                    continue;
                }
                candidates.push_back(Query{0, cleaned.text, QueryKind::thought,
                                           survivors[i].question.seed_ref, round, thought_seeds[i],
                                           config.thought_temperature});
            }
        }
    }

    report->candidates = candidates.size();

    // Seal the pool: one more near-dedup over every candidate, then dense ids
    // in candidate order.
    std::vector<std::pair<uint64_t, std::string>> items;
    items.reserve(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) items.emplace_back(i, candidates[i].text);
    DedupResult final_dedup = dedup(items, dd);
    report->removed_as_duplicates += candidates.size() - final_dedup.kept.size();

    QueryPool sealed;
    sealed.dedup_threshold = config.dedup_threshold;
    sealed.queries.reserve(final_dedup.kept.size());
    for (uint64_t idx : final_dedup.kept) {
        Query q = candidates[idx];
        q.id = sealed.queries.size();
        sealed.queries.push_back(std::move(q));
    }
    report->empty_pool = sealed.queries.empty();
    if (final_seed_pool) *final_seed_pool = std::move(pool);
    return sealed;
}

std::vector<SeedInfo> builtin_seed_catalog() {
    struct Entry {
        SeedCategory category;
        const char* keyword;
    };
    static const Entry kEntries[] = {
        {SeedCategory::stem, "mathematics"},
        {SeedCategory::stem, "physics"},
        {SeedCategory::stem, "chemistry"},
        {SeedCategory::stem, "biology"},
        {SeedCategory::stem, "computer science"},
        {SeedCategory::stem, "engine"},
        {SeedCategory::humanities, "logical"},
        {SeedCategory::humanities, "history"},
        {SeedCategory::humanities, "law"},
        {SeedCategory::humanities, "philosophy"},
        {SeedCategory::humanities, "religions"},
        {SeedCategory::social_science, "econometrics"},
        {SeedCategory::social_science, "politics"},
        {SeedCategory::social_science, "psychology"},
        {SeedCategory::social_science, "sexuality"},
        {SeedCategory::social_science, "public relations"},
        {SeedCategory::social_science, "sociology"},
        {SeedCategory::misc, "medicine"},
        {SeedCategory::misc, "virology"},
        {SeedCategory::misc, "commonsense knowledge"},
    };
    std::vector<SeedInfo> seeds;
    uint64_t id = 0;
    for (const auto& entry : kEntries) {
        SeedInfo seed;
        seed.id = id++;
        seed.text = entry.keyword;
        seed.category = entry.category;
        seed.subcategory = entry.keyword;
        seed.origin = SeedOrigin::initial;
        seeds.push_back(std::move(seed));
    }
    return seeds;
}

std::vector<SeedInfo> load_seeds(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::vector<SeedInfo> seeds;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("text")) {
            throw FormatError("malformed seed line: " + line);
        }
        SeedInfo seed;
        seed.id = seeds.size();
        seed.text = obj["text"].get<std::string>();
        if (obj.contains("category")) seed.category = category_from_name(obj["category"].get<std::string>());
        if (obj.contains("subcategory")) seed.subcategory = obj["subcategory"].get<std::string>();
        seeds.push_back(std::move(seed));
    }
    return seeds;
}

void save_seeds(const std::filesystem::path& path, const std::vector<SeedInfo>& seeds) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    for (const auto& seed : seeds) {
        json obj{{"id", seed.id},
                 {"text", seed.text},
                 {"category", std::string(category_name(seed.category))},
                 {"subcategory", seed.subcategory},
                 {"origin", seed.origin == SeedOrigin::initial ? "initial" : "generated"},
                 {"round", seed.round}};
        if (seed.parent) obj["parent"] = *seed.parent;
        out << obj.dump() << '\n';
    }
}

json query_to_json(const Query& query) {
    return json{{"id", query.id},
                {"text", query.text},
                {"kind", query.kind == QueryKind::question ? "question" : "thought"},
                {"seed_ref", query.seed_ref},
                {"round", query.round},
                {"generator_seed", query.generator_seed},
                {"temperature", query.temperature}};
}

void save_pool(const std::filesystem::path& path, const QueryPool& pool) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    for (const auto& query : pool.queries) out << query_to_json(query).dump() << '\n';
}

QueryPool load_pool(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    QueryPool pool;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("text")) {
            throw FormatError("malformed query line: " + line);
        }
        Query query;
        query.id = obj.value("id", static_cast<uint64_t>(pool.queries.size()));
        query.text = obj["text"].get<std::string>();
        query.kind = obj.value("kind", "question") == "thought" ? QueryKind::thought
                                                                : QueryKind::question;
        query.seed_ref = obj.value("seed_ref", 0ULL);
        query.round = obj.value("round", 0U);
        query.generator_seed = obj.value("generator_seed", 0ULL);
        query.temperature = obj.value("temperature", 0.0);
        pool.queries.push_back(std::move(query));
    }
    return pool;
}

}  // namespace qmine
