#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmine/document.hpp"

namespace qmine {

constexpr uint32_t kFeatureBuckets = 1u << 20;

// Sparse L2-normalized counts of hashed character 3/4/5-grams over the
// case-folded text; entries sorted by bucket.
struct FeatureVector {
    std::vector<std::pair<uint32_t, float>> entries;
};

FeatureVector extract_features(std::string_view text);

// ASCII case fold; non-ASCII bytes pass through untouched. Character
// n-grams hash raw UTF-8 bytes either way.
std::string casefold(std::string_view text);

struct TrainOptions {
    uint32_t epochs = 10;
    double learning_rate = 0.5;
    uint64_t seed = 42;
    double holdout_fraction = 0.1;  // per class; skipped for tiny classes
};

struct TrainMetrics {
    std::vector<double> epoch_loss;        // mean log-loss per epoch
    std::optional<double> holdout_auc;     // absent when classes are too small
    size_t train_positives = 0;
    size_t train_negatives = 0;
    size_t holdout_size = 0;

    nlohmann::json to_json() const;
};

// Logistic scorer over hashed n-gram features. Training is seeded SGD with
// (exact, lazily maintained) iterate averaging; identical data and seed
// give bit-identical models. score() is in [0,1] for any text.
class QualityModel {
public:
    static QualityModel train(const std::vector<std::string>& positives,
                              const std::vector<std::string>& negatives,
                              const TrainOptions& options = {}, TrainMetrics* metrics = nullptr);

    double score(std::string_view text) const;

    // Header (magic, version, feature spec, seed) + little-endian f32
    // weights + bias. Round-trips bit-exactly.
    void save(const std::filesystem::path& path) const;
    static QualityModel load(const std::filesystem::path& path);

    uint64_t seed() const { return seed_; }
    const std::vector<float>& weights() const { return weights_; }
    float bias() const { return bias_; }

    static constexpr uint32_t kFormatVersion = 1;

private:
    std::vector<float> weights_ = std::vector<float>(kFeatureBuckets, 0.0f);
    float bias_ = 0.0f;
    uint64_t seed_ = 0;
};

// True iff the stopword-hit ratio and the ASCII-letter share of alphabetic
// code points both clear their thresholds. Deliberately recall-biased for
// English prose.
struct EnglishHeuristic {
    double min_stopword_ratio = 0.04;
    double min_ascii_letter_ratio = 0.9;
};
bool is_english(std::string_view text, const EnglishHeuristic& heuristic = {});

// Line-indicator vote: > 30% of lines look like source code, over at least
// 5 non-blank lines. Conservative so prose with formulas survives.
bool is_code(std::string_view text);

struct FilterDecision {
    uint64_t doc = 0;            // internal id
    std::string external_id;
    bool kept = false;
    bool low_quality = false;
    bool non_english = false;
    bool code = false;
    double quality_score = 0.0;

    std::vector<std::string> reasons() const;
    nlohmann::json to_json() const;
};

// Identifier hooks are pluggable; null means the built-in heuristics.
struct FilterHooks {
    std::function<bool(std::string_view)> english;
    std::function<bool(std::string_view)> code;
};

// Keeps a document iff score >= threshold AND English AND not code. All
// three predicates are always evaluated so the reason set is complete;
// decisions come back in input order, one per document.
std::pair<std::vector<Document>, std::vector<FilterDecision>> filter_documents(
    const std::vector<Document>& docs, const QualityModel& model, double threshold = 0.8,
    const FilterHooks& hooks = {}, int parallelism = 1);

}  // namespace qmine
