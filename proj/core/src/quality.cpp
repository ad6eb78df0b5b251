#include "qmine/quality.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "qmine/binio.hpp"
#include "qmine/errors.hpp"
#include "qmine/hash.hpp"
#include "qmine/parallel.hpp"
#include "qmine/tokenizer.hpp"

namespace qmine {

using nlohmann::json;

namespace {

constexpr int kNgramOrders[] = {3, 4, 5};

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::string casefold(std::string_view text) {
    // tokenize() already owns the ICU plumbing; for feature extraction we
    // only need a cheap deterministic fold, and ASCII dominates the target
    // corpora. Non-ASCII bytes pass through unchanged.
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

FeatureVector extract_features(std::string_view text) {
    std::string folded = casefold(trim_view(text));

    std::unordered_map<uint32_t, uint32_t> counts;
    for (int n : kNgramOrders) {
        if (folded.size() < static_cast<size_t>(n)) continue;
        for (size_t i = 0; i + n <= folded.size(); ++i) {
            uint64_t h = fnv1a64(std::string_view(folded).substr(i, n));
            counts[static_cast<uint32_t>(h & (kFeatureBuckets - 1))] += 1;
        }
    }

    FeatureVector fv;
    fv.entries.reserve(counts.size());
    for (const auto& [bucket, count] : counts) fv.entries.emplace_back(bucket, static_cast<float>(count));
    std::sort(fv.entries.begin(), fv.entries.end());

    double norm_sq = 0.0;
    for (const auto& [_, v] : fv.entries) norm_sq += static_cast<double>(v) * v;
    if (norm_sq > 0.0) {
        float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
        for (auto& [_, v] : fv.entries) v *= inv;
    }
    return fv;
}

json TrainMetrics::to_json() const {
    json j{{"epoch_loss", epoch_loss},
           {"train_positives", train_positives},
           {"train_negatives", train_negatives},
           {"holdout_size", holdout_size}};
    if (holdout_auc) j["holdout_auc"] = *holdout_auc;
    return j;
}

namespace {

// Mann-Whitney AUC with tie correction.
double auc_of(const std::vector<double>& scores, const std::vector<int>& labels) {
    std::vector<size_t> order(scores.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    size_t positives = 0, negatives = 0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        double avg_rank = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
        for (size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) {
                rank_sum_pos += avg_rank;
                ++positives;
            } else {
                ++negatives;
            }
        }
        i = j;
    }
    if (positives == 0 || negatives == 0) return 1.0;
    double u = rank_sum_pos - static_cast<double>(positives) * (positives + 1) / 2.0;
    return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

}  // namespace

QualityModel QualityModel::train(const std::vector<std::string>& positives,
                                 const std::vector<std::string>& negatives,
                                 const TrainOptions& options, TrainMetrics* metrics) {
    if (positives.empty() || negatives.empty())
        throw ContractViolation("training requires non-empty positive and negative classes");

    struct Example {
        FeatureVector features;
        int label;
    };
    std::vector<Example> all;
    all.reserve(positives.size() + negatives.size());
    for (const auto& text : positives) all.push_back(Example{extract_features(text), 1});
    for (const auto& text : negatives) all.push_back(Example{extract_features(text), 0});

    // Deterministic shuffle, then carve the holdout off the tail per class
    // (only when both classes are big enough to spare examples).
    Rng rng(mix64(options.seed));
    std::vector<size_t> order(all.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.next_below(i)]);
    }

    size_t holdout_pos = positives.size() >= 4
                             ? static_cast<size_t>(options.holdout_fraction * positives.size())
                             : 0;
    size_t holdout_neg = negatives.size() >= 4
                             ? static_cast<size_t>(options.holdout_fraction * negatives.size())
                             : 0;
    std::vector<size_t> train_idx, holdout_idx;
    size_t taken_pos = 0, taken_neg = 0;
    for (size_t idx : order) {
        if (all[idx].label == 1 && taken_pos < holdout_pos) {
            holdout_idx.push_back(idx);
            ++taken_pos;
        } else if (all[idx].label == 0 && taken_neg < holdout_neg) {
            holdout_idx.push_back(idx);
            ++taken_neg;
        } else {
            train_idx.push_back(idx);
        }
    }

    const size_t dim = kFeatureBuckets;
    std::vector<double> w(dim, 0.0);
    std::vector<double> w_sum(dim, 0.0);
    std::vector<uint64_t> last_step(dim, 0);
    double bias = 0.0, bias_sum = 0.0;

    TrainMetrics local;
    uint64_t t = 0;
    for (uint32_t epoch = 0; epoch < options.epochs; ++epoch) {
        for (size_t i = train_idx.size(); i > 1; --i) {
            std::swap(train_idx[i - 1], train_idx[rng.next_below(i)]);
        }
        double loss = 0.0;
        for (size_t idx : train_idx) {
            ++t;
            const Example& ex = all[idx];
            double z = bias;
            for (const auto& [bucket, value] : ex.features.entries) {
                z += w[bucket] * value;
            }
            double p = sigmoid(z);
            loss += ex.label == 1 ? -std::log(std::max(p, 1e-12))
                                  : -std::log(std::max(1.0 - p, 1e-12));
            double gradient = p - ex.label;
            for (const auto& [bucket, value] : ex.features.entries) {
                // Exact averaging with lazy per-coordinate flushes: account
                // for the steps this weight sat unchanged.
                w_sum[bucket] += w[bucket] * static_cast<double>(t - 1 - last_step[bucket]);
                w[bucket] -= options.learning_rate * gradient * value;
                w_sum[bucket] += w[bucket];
                last_step[bucket] = t;
            }
            bias -= options.learning_rate * gradient;
            bias_sum += bias;
        }
        local.epoch_loss.push_back(train_idx.empty() ? 0.0 : loss / train_idx.size());
    }

    QualityModel model;
    model.seed_ = options.seed;
    if (t > 0) {
        for (size_t j = 0; j < dim; ++j) {
            double flushed = w_sum[j] + w[j] * static_cast<double>(t - last_step[j]);
            model.weights_[j] = static_cast<float>(flushed / static_cast<double>(t));
        }
        model.bias_ = static_cast<float>(bias_sum / static_cast<double>(t));
    }

    for (size_t idx : train_idx) {
        if (all[idx].label == 1) ++local.train_positives;
        else ++local.train_negatives;
    }
    local.holdout_size = holdout_idx.size();
    if (taken_pos > 0 && taken_neg > 0) {
        std::vector<double> scores;
        std::vector<int> labels;
        for (size_t idx : holdout_idx) {
            double z = model.bias_;
            for (const auto& [bucket, value] : all[idx].features.entries) {
                z += static_cast<double>(model.weights_[bucket]) * value;
            }
            scores.push_back(sigmoid(z));
            labels.push_back(all[idx].label);
        }
        local.holdout_auc = auc_of(scores, labels);
    }
    if (metrics) *metrics = std::move(local);
    return model;
}

double QualityModel::score(std::string_view text) const {
    FeatureVector fv = extract_features(text);
    double z = bias_;
    for (const auto& [bucket, value] : fv.entries) {
        z += static_cast<double>(weights_[bucket]) * value;
    }
    return sigmoid(z);
}

namespace {
constexpr uint32_t kModelMagic = 0x514d4c52;  // "QMLR"
}

void QualityModel::save(const std::filesystem::path& path) const {
    std::string blob;
    blob.reserve(16 + weights_.size() * 4 + 16);
    put_u32(blob, kModelMagic);
    put_u32(blob, kFormatVersion);
    put_u32(blob, kFeatureBuckets);
    put_u32(blob, 3);  // n-gram orders
    blob.push_back(3);
    blob.push_back(4);
    blob.push_back(5);
    put_u64(blob, seed_);
    put_f32(blob, bias_);
    for (float w : weights_) put_f32(blob, w);
    write_file(path, blob);
}

QualityModel QualityModel::load(const std::filesystem::path& path) {
    std::string blob = read_file(path);
    size_t pos = 0;
    if (blob.size() < 31 || get_u32(blob, pos) != kModelMagic)
        throw FormatError("not a quality model file: " + path.string());
    if (get_u32(blob, pos) != kFormatVersion)
        throw FormatError("quality model version mismatch: " + path.string());
    uint32_t buckets = get_u32(blob, pos);
    uint32_t order_count = get_u32(blob, pos);
    pos += order_count;
    if (buckets != kFeatureBuckets)
        throw FormatError("quality model bucket count mismatch: " + path.string());
    QualityModel model;
    model.seed_ = get_u64(blob, pos);
    if (blob.size() != pos + 4 + static_cast<size_t>(buckets) * 4)
        throw FormatError("quality model truncated: " + path.string());
    model.bias_ = get_f32(blob, pos);
    for (uint32_t i = 0; i < buckets; ++i) model.weights_[i] = get_f32(blob, pos);
    return model;
}

namespace {

const std::unordered_set<std::string>& english_stopwords() {
    static const std::unordered_set<std::string> kWords = {
        "the",  "of",    "and",   "a",     "to",    "in",   "is",    "you",  "that", "it",
        "he",   "was",   "for",   "on",    "are",   "as",   "with",  "his",  "they", "i",
        "at",   "be",    "this",  "have",  "from",  "or",   "one",   "had",  "by",   "word",
        "but",  "not",   "what",  "all",   "were",  "we",   "when",  "your", "can",  "said",
        "there", "use",  "an",    "each",  "which", "she",  "do",    "how",  "their", "if",
        "will", "up",    "other", "about", "out",   "many", "then",  "them", "these", "so",
        "some", "her",   "would", "make",  "like",  "him",  "into",  "time", "has",  "look",
        "its",  "because", "did", "been",  "who",   "than", "may"};
    return kWords;
}

}  // namespace

bool is_english(std::string_view text, const EnglishHeuristic& heuristic) {
    TokenList tokens = tokenize(text);
    if (tokens.empty()) return false;

    size_t stopword_hits = 0;
    for (const auto& token : tokens) {
        if (english_stopwords().count(token)) ++stopword_hits;
    }
    double stopword_ratio = static_cast<double>(stopword_hits) / static_cast<double>(tokens.size());
    if (stopword_ratio < heuristic.min_stopword_ratio) return false;

    size_t alpha = 0, ascii_alpha = 0;
    for (size_t pos = 0; pos < text.size();) {
        uint32_t cp = decode_utf8(text, pos);
        if (is_alpha_cp(cp)) {
            ++alpha;
            if (cp < 0x80) ++ascii_alpha;
        }
    }
    if (alpha == 0) return false;
    return static_cast<double>(ascii_alpha) / static_cast<double>(alpha) >=
           heuristic.min_ascii_letter_ratio;
}

namespace {

bool line_is_codelike(std::string_view line) {
    size_t indent = 0;
    while (indent < line.size() && line[indent] == ' ') ++indent;
    std::string_view trimmed = trim_view(line);
    if (trimmed.empty()) return false;

    char last = trimmed.back();
    if (last == ';' || last == '{' || last == '}') return true;

    static constexpr std::string_view kStarters[] = {"def ", "class ", "import ", "#include",
                                                     "function "};
    for (std::string_view starter : kStarters) {
        if (trimmed.substr(0, starter.size()) == starter) return true;
    }

    if (indent >= 4) {
        static constexpr std::string_view kOperators = "+-*/=<>|&%,(";
        if (kOperators.find(last) != std::string_view::npos) return true;
    }
    return false;
}

}  // namespace

bool is_code(std::string_view text) {
    size_t lines = 0, codelike = 0;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!trim_view(line).empty()) {
            ++lines;
            if (line_is_codelike(line)) ++codelike;
        }
        if (end == text.size()) break;
        start = end + 1;
    }
    if (lines < 5) return false;
    return static_cast<double>(codelike) / static_cast<double>(lines) > 0.3;
}

std::vector<std::string> FilterDecision::reasons() const {
    std::vector<std::string> out;
    if (low_quality) out.push_back("low_quality");
    if (non_english) out.push_back("non_english");
    if (code) out.push_back("code");
    return out;
}

json FilterDecision::to_json() const {
    return json{{"doc", doc},
                {"external_id", external_id},
                {"kept", kept},
                {"reasons", reasons()},
                {"quality_score", quality_score}};
}

std::pair<std::vector<Document>, std::vector<FilterDecision>> filter_documents(
    const std::vector<Document>& docs, const QualityModel& model, double threshold,
    const FilterHooks& hooks, int parallelism) {
    if (threshold < 0.0 || threshold > 1.0)
        throw ContractViolation("quality threshold must be in [0, 1]");

    std::vector<FilterDecision> decisions(docs.size());
    parallel_for(docs.size(), parallelism, [&](size_t i) {
        const Document& doc = docs[i];
        FilterDecision d;
        d.doc = doc.internal_id;
        d.external_id = doc.external_id;
        d.quality_score = model.score(doc.text);
        d.low_quality = d.quality_score < threshold;
        d.non_english = !(hooks.english ? hooks.english(doc.text) : is_english(doc.text));
        d.code = hooks.code ? hooks.code(doc.text) : is_code(doc.text);
        d.kept = !d.low_quality && !d.non_english && !d.code;
        decisions[i] = std::move(d);
    });

    std::vector<Document> kept;
    for (size_t i = 0; i < docs.size(); ++i) {
        if (decisions[i].kept) kept.push_back(docs[i]);
    }
    return {std::move(kept), std::move(decisions)};
}

}  // namespace qmine
