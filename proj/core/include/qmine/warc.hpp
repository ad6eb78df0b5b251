#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace qmine {

struct WarcRecord {
    std::string version;                               // e.g. "WARC/1.0"
    std::map<std::string, std::string> headers;        // names lowercased
    std::string block;                                 // raw record block
};

// Reads WARC 1.0/1.1 files, plain or as concatenated gzip members
// (the usual .warc.gz layout, one member per record). The whole file is
// decompressed up front; this is a desk-scale reader, not a crawler.
//
// A truncated record stops iteration and sets truncated(); a file that does
// not start with a WARC record throws FormatError.
class WarcReader {
public:
    explicit WarcReader(const std::filesystem::path& path);

    // Advances to the next record; false at end of input or on truncation.
    bool next(WarcRecord& record);

    bool truncated() const { return truncated_; }

private:
    std::string data_;
    size_t pos_ = 0;
    bool truncated_ = false;
    bool first_ = true;
};

// HTTP response payload extraction for WARC response records: splits the
// stored HTTP message into headers and body. Returns false if the block is
// not an HTTP response.
struct HttpPayload {
    int status = 0;
    std::string content_type;  // media type only, lowercased, no parameters
    std::string_view body;
};
bool parse_http_response(std::string_view block, HttpPayload& out);

}  // namespace qmine
