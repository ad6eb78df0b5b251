#include "qmine/warc.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>

#include "qmine/binio.hpp"
#include "qmine/errors.hpp"

namespace qmine {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool starts_with_gzip(std::string_view data) {
    return data.size() >= 2 && static_cast<uint8_t>(data[0]) == 0x1f &&
           static_cast<uint8_t>(data[1]) == 0x8b;
}

// Inflates a stream of concatenated gzip members. A truncated trailing
// member yields whatever decompressed cleanly, with truncated=true.
std::string gunzip_members(std::string_view data, bool& truncated) {
    std::string out;
    size_t offset = 0;
    while (offset < data.size() && starts_with_gzip(data.substr(offset))) {
        z_stream zs{};
        if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK)
            throw FormatError("zlib init failed");
        zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data() + offset));
        zs.avail_in = static_cast<uInt>(data.size() - offset);

        char buf[1 << 16];
        int rc = Z_OK;
        size_t member_out_start = out.size();
        while (rc == Z_OK) {
            zs.next_out = reinterpret_cast<Bytef*>(buf);
            zs.avail_out = sizeof(buf);
            rc = inflate(&zs, Z_NO_FLUSH);
            if (rc == Z_OK || rc == Z_STREAM_END) {
                out.append(buf, sizeof(buf) - zs.avail_out);
            }
        }
        size_t consumed = (data.size() - offset) - zs.avail_in;
        inflateEnd(&zs);

        if (rc != Z_STREAM_END) {
            out.resize(member_out_start);  // partial member is unusable
            truncated = true;
            break;
        }
        offset += consumed;
    }
    if (offset < data.size() && !truncated && !starts_with_gzip(data.substr(offset))) {
        truncated = true;  // trailing garbage after the last member
    }
    return out;
}

}  // namespace

WarcReader::WarcReader(const std::filesystem::path& path) {
    std::string raw = read_file(path);
    if (starts_with_gzip(raw)) {
        data_ = gunzip_members(raw, truncated_);
    } else {
        data_ = std::move(raw);
    }
}

bool WarcReader::next(WarcRecord& record) {
    if (truncated_ && pos_ >= data_.size()) return false;

    // Skip inter-record blank lines.
    while (pos_ < data_.size() && (data_[pos_] == '\r' || data_[pos_] == '\n')) ++pos_;
    if (pos_ >= data_.size()) return false;

    if (data_.compare(pos_, 5, "WARC/") != 0) {
        if (first_) throw FormatError("not a WARC file: missing WARC/ record header");
        truncated_ = true;
        return false;
    }
    first_ = false;

    size_t line_end = data_.find("\r\n", pos_);
    if (line_end == std::string::npos) {
        truncated_ = true;
        return false;
    }
    record.version = data_.substr(pos_, line_end - pos_);
    record.headers.clear();
    size_t cursor = line_end + 2;

    // Header lines until the blank separator.
    while (true) {
        size_t eol = data_.find("\r\n", cursor);
        if (eol == std::string::npos) {
            truncated_ = true;
            return false;
        }
        if (eol == cursor) {
            cursor += 2;
            break;
        }
        std::string_view line(data_.data() + cursor, eol - cursor);
        size_t colon = line.find(':');
        if (colon != std::string_view::npos) {
            record.headers[lower(trim(line.substr(0, colon)))] =
                std::string(trim(line.substr(colon + 1)));
        }
        cursor = eol + 2;
    }

    auto it = record.headers.find("content-length");
    if (it == record.headers.end()) {
        truncated_ = true;
        return false;
    }
    size_t content_length = 0;
    try {
        content_length = static_cast<size_t>(std::stoull(it->second));
    } catch (...) {
        truncated_ = true;
        return false;
    }
    if (cursor + content_length > data_.size()) {
        truncated_ = true;
        return false;
    }
    record.block = data_.substr(cursor, content_length);
    pos_ = cursor + content_length;
    return true;
}

bool parse_http_response(std::string_view block, HttpPayload& out) {
    if (block.compare(0, 5, "HTTP/") != 0) return false;
    size_t header_end = block.find("\r\n\r\n");
    size_t body_start;
    if (header_end == std::string_view::npos) {
        // Tolerate bare-LF framing from sloppy producers.
        header_end = block.find("\n\n");
        if (header_end == std::string_view::npos) return false;
        body_start = header_end + 2;
    } else {
        body_start = header_end + 4;
    }

    std::string_view head = block.substr(0, header_end);
    size_t line_end = head.find('\n');
    std::string_view status_line = head.substr(0, line_end == std::string_view::npos ? head.size() : line_end);
    size_t sp = status_line.find(' ');
    if (sp != std::string_view::npos) {
        out.status = std::atoi(std::string(status_line.substr(sp + 1, 3)).c_str());
    }

    out.content_type.clear();
    size_t cursor = line_end == std::string_view::npos ? head.size() : line_end + 1;
    while (cursor < head.size()) {
        size_t eol = head.find('\n', cursor);
        if (eol == std::string_view::npos) eol = head.size();
        std::string_view line = head.substr(cursor, eol - cursor);
        size_t colon = line.find(':');
        if (colon != std::string_view::npos && lower(trim(line.substr(0, colon))) == "content-type") {
            std::string_view value = trim(line.substr(colon + 1));
            size_t semi = value.find(';');
            out.content_type = lower(trim(value.substr(0, semi)));
        }
        cursor = eol + 1;
    }
    out.body = block.substr(body_start);
    return true;
}

}  // namespace qmine
