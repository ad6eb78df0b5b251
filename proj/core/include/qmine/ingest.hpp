#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmine/document.hpp"

namespace qmine {

struct IngestOptions {
    // WARC records whose post-strip text has fewer code points than this
    // are dropped. 0 disables the filter. JSONL lines only need non-empty
    // valid UTF-8 text.
    size_t min_warc_text_chars = 200;
};

struct IngestReport {
    uint64_t files = 0;
    uint64_t records_seen = 0;
    uint64_t documents_emitted = 0;
    uint64_t skipped = 0;
    std::map<std::string, uint64_t> reasons;   // skip reasons
    std::map<std::string, uint64_t> warnings;  // non-fatal oddities

    void skip(const std::string& reason) {
        ++skipped;
        ++reasons[reason];
    }
    nlohmann::json to_json() const;
};

using DocumentSink = std::function<void(Document&&)>;

// One Document per valid JSONL line ({"text": ..., "url"?, "timestamp"?,
// "meta"?}); malformed lines are counted and skipped. internal_ids are
// assigned in line order starting at base_id. Unreadable file -> IoError.
void ingest_jsonl(const std::filesystem::path& path, const IngestOptions& options,
                  uint64_t base_id, const DocumentSink& sink, IngestReport& report);

// Documents from WARC response records with a textual payload; HTML is
// stripped to plain text. Truncation skips the rest of the file with a
// warning in the report. Non-WARC input -> FormatError.
void ingest_warc(const std::filesystem::path& path, const IngestOptions& options,
                 uint64_t base_id, const DocumentSink& sink, IngestReport& report);

// Multi-file ingestion with deterministic internal_id assignment: files are
// processed in sorted-path order, ids in (file, record offset) order.
// Format is chosen per file: *.warc / *.warc.gz -> WARC, otherwise JSONL.
std::vector<Document> ingest_files(std::vector<std::filesystem::path> paths,
                                   const IngestOptions& options, IngestReport& report,
                                   int parallelism = 1);

// Dataset-style JSONL round-trip for normalized documents. Loading assigns
// internal ids by line order and recomputes external ids (contents being
// equal, the ids come out identical).
void save_documents(const std::filesystem::path& path, const std::vector<Document>& docs);
std::vector<Document> load_documents(const std::filesystem::path& path);

nlohmann::json document_to_json(const Document& doc);

}  // namespace qmine
