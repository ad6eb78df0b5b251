#include "qmine/binio.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>

#include "qmine/errors.hpp"

namespace qmine {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::string data;
    in.seekg(0, std::ios::end);
    auto size = in.tellg();
    if (size < 0) throw IoError("cannot stat: " + path.string());
    data.resize(static_cast<size_t>(size));
    in.seekg(0, std::ios::beg);
    if (!data.empty()) in.read(data.data(), static_cast<std::streamsize>(data.size()));
    if (!in) throw IoError("short read: " + path.string());
    return data;
}

void write_file(const std::filesystem::path& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw IoError("short write: " + path.string());
}

uint32_t crc32_of(std::string_view data) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()),
                static_cast<uInt>(data.size()));
    return static_cast<uint32_t>(crc);
}

std::string crc32_hex(std::string_view data) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08x", crc32_of(data));
    return buf;
}

std::string to_hex(uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace qmine
