#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace qmine {

// Text-generation service used for query bootstrapping. Implementations
// must be safe to call from multiple threads.
class GenerationBackend {
public:
    virtual ~GenerationBackend() = default;

    // Transport failures throw IoError after the backend's retry policy is
    // exhausted; callers decide whether to skip or abort.
    virtual std::string generate(const std::string& prompt, double temperature, uint64_t seed,
                                 uint32_t max_tokens) = 0;

    virtual std::string name() const = 0;
};

// Deterministic in-process stand-in: a pure function of (prompt,
// temperature, seed). Prompts that ask for a question yield a
// well-formed "...?" sentence; anything else yields a short multi-sentence
// reasoning passage. Vocabulary is shared via mock_vocabulary() so test
// fixtures can build corpora the generated queries actually hit.
class MockBackend final : public GenerationBackend {
public:
    std::string generate(const std::string& prompt, double temperature, uint64_t seed,
                         uint32_t max_tokens) override;
    std::string name() const override { return "mock"; }
};

const std::vector<std::string>& mock_vocabulary();

struct HttpBackendConfig {
    std::string url = "http://127.0.0.1:8080";  // scheme://host[:port]
    std::string path = "/v1/chat/completions";
    std::string model = "default";
    std::string api_key;                          // sent as Bearer token when set
    std::string response_path = "choices.0.message.content";
    int timeout_ms = 30000;
    int max_retries = 3;
    int backoff_ms = 250;
};

// Minimal JSON-over-HTTP chat-completion client: POSTs {model, messages,
// temperature, seed, max_tokens} and pulls the generated text from a
// configurable JSON path. Retries with linear backoff.
class HttpBackend final : public GenerationBackend {
public:
    explicit HttpBackend(HttpBackendConfig config);

    std::string generate(const std::string& prompt, double temperature, uint64_t seed,
                         uint32_t max_tokens) override;
    std::string name() const override { return "http"; }

    const HttpBackendConfig& config() const { return config_; }

private:
    HttpBackendConfig config_;
};

// Extracts a dotted path ("choices.0.message.content") from a JSON
// document serialized in `body`. Throws FormatError when the path does not
// resolve to a string.
std::string extract_json_path(const std::string& body, const std::string& path);

}  // namespace qmine
