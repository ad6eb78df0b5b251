#include "qmine/generation.hpp"

#include <httplib.h>

#include <chrono>
#include <cstring>
#include <thread>

#include <nlohmann/json.hpp>

#include "qmine/errors.hpp"
#include "qmine/hash.hpp"

namespace qmine {

using nlohmann::json;

const std::vector<std::string>& mock_vocabulary() {
    static const std::vector<std::string> kWords = {
        "energy",      "momentum",   "entropy",    "molecule",   "catalyst",  "enzyme",
        "genome",      "neuron",     "vector",     "matrix",     "integral",  "derivative",
        "prime",       "graph",      "algorithm",  "compiler",   "circuit",   "voltage",
        "magnetism",   "gravity",    "orbit",      "isotope",    "polymer",   "membrane",
        "photosynthesis", "mitosis", "evolution",  "ecosystem",  "climate",   "erosion",
        "revolution",  "empire",     "treaty",     "constitution", "jurisprudence", "precedent",
        "ethics",      "epistemology", "theology", "rhetoric",   "syntax",    "semantics",
        "inflation",   "elasticity", "equilibrium", "cognition", "perception", "memory",
        "society",     "institution", "diagnosis", "pathogen",   "antibody",  "vaccine",
        "metabolism",  "protein",    "crystal",    "spectrum",   "particle",  "wavelength",
        "theorem",     "topology",   "probability", "statistics"};
    return kWords;
}

namespace {

const std::string& word(Rng& rng) {
    const auto& vocab = mock_vocabulary();
    return vocab[rng.next_below(vocab.size())];
}

std::string mock_question(Rng& rng) {
    switch (rng.next_below(4)) {
        case 0:
            return "What is the relationship between " + word(rng) + " and " + word(rng) +
                   " in the study of " + word(rng) + "?";
        case 1:
            return "How does " + word(rng) + " influence " + word(rng) + " under conditions of " +
                   word(rng) + "?";
        case 2:
            return "Why is " + word(rng) + " considered essential for understanding " + word(rng) +
                   "?";
        default:
            return "Which properties of " + word(rng) + " explain the behavior of " + word(rng) +
                   " within " + word(rng) + " systems?";
    }
}

std::string mock_thought(Rng& rng, uint32_t max_tokens) {
    std::string out = "To approach this, first consider how " + word(rng) + " relates to " +
                      word(rng) + ".";
    size_t sentences = 1 + rng.next_below(3);
    for (size_t i = 0; i < sentences && out.size() < max_tokens * 4; ++i) {
        out += " The role of " + word(rng) + " depends on " + word(rng) +
               ", which in turn constrains " + word(rng) + ".";
    }
    out += " Therefore the answer follows from the interaction of " + word(rng) + " and " +
           word(rng) + ".";
    return out;
}

}  // namespace

std::string MockBackend::generate(const std::string& prompt, double temperature, uint64_t seed,
                                  uint32_t max_tokens) {
    uint64_t temperature_bits;
    static_assert(sizeof(temperature_bits) == sizeof(temperature));
    std::memcpy(&temperature_bits, &temperature, sizeof(temperature));

    uint64_t state = fnv1a64(prompt);
    state = fnv1a64_u64(seed, state);
    state = fnv1a64_u64(temperature_bits, state);
    Rng rng(state);

    bool wants_question = prompt.find("question") != std::string::npos ||
                          prompt.find("Question") != std::string::npos;
    return wants_question ? mock_question(rng) : mock_thought(rng, max_tokens);
}

std::string extract_json_path(const std::string& body, const std::string& path) {
    json node = json::parse(body, nullptr, false);
    if (node.is_discarded()) throw FormatError("backend returned invalid JSON");

    size_t pos = 0;
    while (pos <= path.size()) {
        size_t dot = path.find('.', pos);
        std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (node.is_array()) {
            size_t idx = 0;
            try {
                idx = std::stoul(key);
            } catch (...) {
                throw FormatError("response path step '" + key + "' is not an array index");
            }
            if (idx >= node.size()) throw FormatError("response path index out of range: " + key);
            node = node[idx];
        } else if (node.is_object()) {
            if (!node.contains(key)) throw FormatError("response path key missing: " + key);
            node = node[key];
        } else {
            throw FormatError("response path descends into a scalar at: " + key);
        }
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    if (!node.is_string()) throw FormatError("response path does not end at a string");
    return node.get<std::string>();
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {}

std::string HttpBackend::generate(const std::string& prompt, double temperature, uint64_t seed,
                                  uint32_t max_tokens) {
    json body{{"model", config_.model},
              {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
              {"temperature", temperature},
              {"seed", seed},
              {"max_tokens", max_tokens}};
    std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms * attempt));
        }
        httplib::Client client(config_.url);
        client.set_connection_timeout(0, config_.timeout_ms * 1000);
        client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        }
        auto res = client.Post(config_.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_error = "http status " + std::to_string(res->status);
            // 4xx will not get better on retry
            if (res->status >= 400 && res->status < 500) break;
            continue;
        }
        return extract_json_path(res->body, config_.response_path);
    }
    throw IoError("generation backend failed after " + std::to_string(config_.max_retries + 1) +
                  " attempts: " + last_error);
}

}  // namespace qmine
