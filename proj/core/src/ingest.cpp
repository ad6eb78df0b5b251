#include "qmine/ingest.hpp"

#include <algorithm>
#include <fstream>

#include "qmine/errors.hpp"
#include "qmine/html.hpp"
#include "qmine/parallel.hpp"
#include "qmine/tokenizer.hpp"
#include "qmine/warc.hpp"

namespace qmine {

using nlohmann::json;

json IngestReport::to_json() const {
    json reasons_json = json::object();
    for (const auto& [k, v] : reasons) reasons_json[k] = v;
    json warnings_json = json::object();
    for (const auto& [k, v] : warnings) warnings_json[k] = v;
    return json{{"files", files},
                {"records_seen", records_seen},
                {"documents_emitted", documents_emitted},
                {"skipped", skipped},
                {"reasons", reasons_json},
                {"warnings", warnings_json}};
}

void ingest_jsonl(const std::filesystem::path& path, const IngestOptions&,
                  uint64_t base_id, const DocumentSink& sink, IngestReport& report) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    ++report.files;

    std::string line;
    uint64_t next_id = base_id;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++report.records_seen;

        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            report.skip("invalid_json");
            continue;
        }
        if (!obj.contains("text") || !obj["text"].is_string()) {
            report.skip("missing_text");
            continue;
        }
        Document doc;
        doc.text = obj["text"].get<std::string>();
        if (doc.text.empty()) {
            report.skip("empty_text");
            continue;
        }
        if (!is_valid_utf8(doc.text)) {
            report.skip("invalid_utf8");
            continue;
        }
        if (obj.contains("url") && obj["url"].is_string()) doc.url = obj["url"].get<std::string>();
        if (obj.contains("timestamp") && obj["timestamp"].is_string()) {
            doc.timestamp = parse_iso8601(obj["timestamp"].get<std::string>());
            if (!doc.timestamp) ++report.warnings["unparseable_timestamp"];
        }
        if (obj.contains("meta") && obj["meta"].is_object()) {
            for (auto& [k, v] : obj["meta"].items()) {
                if (v.is_string()) doc.meta[k] = v.get<std::string>();
            }
        }
        if (obj.contains("source") && obj["source"].is_string()) {
            doc.source = source_from_name(obj["source"].get<std::string>());
        } else {
            doc.source = Source::jsonl;
        }
        doc.internal_id = next_id++;
        doc.external_id = make_external_id(doc.url, doc.timestamp, doc.text);
        ++report.documents_emitted;
        sink(std::move(doc));
    }
}

void ingest_warc(const std::filesystem::path& path, const IngestOptions& options,
                 uint64_t base_id, const DocumentSink& sink, IngestReport& report) {
    WarcReader reader(path);
    ++report.files;

    WarcRecord record;
    uint64_t next_id = base_id;
    while (reader.next(record)) {
        ++report.records_seen;

        auto type = record.headers.find("warc-type");
        if (type == record.headers.end() || type->second != "response") {
            report.skip("non_response_record");
            continue;
        }
        HttpPayload payload;
        std::string text;
        if (parse_http_response(record.block, payload)) {
            bool textual = payload.content_type.rfind("text/", 0) == 0 ||
                           payload.content_type == "application/xhtml+xml";
            if (!textual) {
                report.skip("non_textual");
                continue;
            }
            if (payload.content_type == "text/html" ||
                payload.content_type == "application/xhtml+xml") {
                text = strip_html(payload.body);
            } else {
                text = collapse_whitespace(payload.body);
            }
        } else {
            report.skip("non_http_block");
            continue;
        }

        if (!is_valid_utf8(text)) {
            report.skip("invalid_utf8");
            continue;
        }
        if (text.empty() ||
            (options.min_warc_text_chars > 0 &&
             count_codepoints(text) < options.min_warc_text_chars)) {
            report.skip("too_short");
            continue;
        }

        Document doc;
        doc.text = std::move(text);
        auto uri = record.headers.find("warc-target-uri");
        if (uri != record.headers.end()) doc.url = uri->second;
        auto date = record.headers.find("warc-date");
        if (date != record.headers.end()) {
            doc.timestamp = parse_iso8601(date->second);
            if (!doc.timestamp) ++report.warnings["unparseable_timestamp"];
        }
        doc.source = Source::warc;
        doc.internal_id = next_id++;
        doc.external_id = make_external_id(doc.url, doc.timestamp, doc.text);
        ++report.documents_emitted;
        sink(std::move(doc));
    }
    if (reader.truncated()) ++report.warnings["truncated_file"];
}

namespace {

bool is_warc_path(const std::filesystem::path& path) {
    std::string name = path.filename().string();
    return name.ends_with(".warc") || name.ends_with(".warc.gz");
}

}  // namespace

std::vector<Document> ingest_files(std::vector<std::filesystem::path> paths,
                                   const IngestOptions& options, IngestReport& report,
                                   int parallelism) {
    std::sort(paths.begin(), paths.end());

    // Each file is ingested independently; ids are assigned afterwards in
    // (file path, record offset) order, so the merge is deterministic no
    // matter how the work was scheduled.
    std::vector<std::vector<Document>> per_file(paths.size());
    std::vector<IngestReport> per_report(paths.size());
    parallel_for(paths.size(), parallelism, [&](size_t i) {
        auto sink = [&per_file, i](Document&& d) { per_file[i].push_back(std::move(d)); };
        if (is_warc_path(paths[i])) {
            ingest_warc(paths[i], options, 0, sink, per_report[i]);
        } else {
            ingest_jsonl(paths[i], options, 0, sink, per_report[i]);
        }
    });

    std::vector<Document> docs;
    uint64_t next_id = 0;
    for (size_t i = 0; i < paths.size(); ++i) {
        report.files += per_report[i].files;
        report.records_seen += per_report[i].records_seen;
        report.documents_emitted += per_report[i].documents_emitted;
        report.skipped += per_report[i].skipped;
        for (const auto& [k, v] : per_report[i].reasons) report.reasons[k] += v;
        for (const auto& [k, v] : per_report[i].warnings) report.warnings[k] += v;
        for (auto& doc : per_file[i]) {
            doc.internal_id = next_id++;
            docs.push_back(std::move(doc));
        }
    }
    return docs;
}

json document_to_json(const Document& doc) {
    json obj{{"external_id", doc.external_id},
             {"text", doc.text},
             {"source", std::string(source_name(doc.source))}};
    if (!doc.url.empty()) obj["url"] = doc.url;
    if (doc.timestamp) obj["timestamp"] = format_iso8601(*doc.timestamp);
    if (!doc.meta.empty()) {
        json meta = json::object();
        for (const auto& [k, v] : doc.meta) meta[k] = v;
        obj["meta"] = meta;
    }
    return obj;
}

void save_documents(const std::filesystem::path& path, const std::vector<Document>& docs) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    for (const auto& doc : docs) {
        out << document_to_json(doc).dump() << '\n';
    }
    if (!out) throw IoError("short write: " + path.string());
}

std::vector<Document> load_documents(const std::filesystem::path& path) {
    std::vector<Document> docs;
    IngestReport report;
    ingest_jsonl(path, IngestOptions{}, 0,
                 [&docs](Document&& d) { docs.push_back(std::move(d)); }, report);
    return docs;
}

}  // namespace qmine
