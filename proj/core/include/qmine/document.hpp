#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace qmine {

enum class Source { jsonl, warc, synthetic };

std::string_view source_name(Source s);
Source source_from_name(std::string_view name);

// One corpus record. internal_id is dense (0..N-1) within a corpus build;
// external_id is a stable content hash so re-ingesting the same data yields
// the same identities.
struct Document {
    uint64_t internal_id = 0;
    std::string external_id;
    std::string text;
    std::string url;                        // empty allowed
    std::optional<int64_t> timestamp;       // UTC epoch seconds
    Source source = Source::jsonl;
    std::map<std::string, std::string> meta;
};

// Hex of a 64-bit hash over (url, timestamp, text), deterministic across
// runs and platforms.
std::string make_external_id(std::string_view url, std::optional<int64_t> timestamp,
                             std::string_view text);

// ISO-8601 UTC parsing/formatting. Accepts "YYYY-MM-DD[THH:MM:SS[.frac]][Z|±HH:MM]";
// fractional seconds are truncated. Returns nullopt on anything else.
std::optional<int64_t> parse_iso8601(std::string_view s);
std::string format_iso8601(int64_t epoch_seconds);

// Year of a UTC instant, for the timestamp histogram.
int year_of(int64_t epoch_seconds);

}  // namespace qmine
