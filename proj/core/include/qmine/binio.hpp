#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qmine {

// Little-endian scalar packing for the on-disk formats. Explicit byte
// shuffling so the files are identical on any host.

inline void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (i * 8)));
}

inline void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (i * 8)));
}

inline void put_f32(std::string& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

inline uint32_t get_u32(std::string_view in, size_t& pos) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(in[pos + i])) << (i * 8);
    pos += 4;
    return v;
}

inline uint64_t get_u64(std::string_view in, size_t& pos) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(in[pos + i])) << (i * 8);
    pos += 8;
    return v;
}

inline float get_f32(std::string_view in, size_t& pos) {
    uint32_t bits = get_u32(in, pos);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

// Unsigned LEB128. Postings and dictionaries are almost entirely small
// deltas, so this wins over fixed width by a wide margin.
inline void put_uvarint(std::string& out, uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<char>(v | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<char>(v));
}

// Returns false on truncated input.
inline bool get_uvarint(std::string_view in, size_t& pos, uint64_t& v) {
    v = 0;
    int shift = 0;
    while (pos < in.size() && shift < 64) {
        uint8_t byte = static_cast<uint8_t>(in[pos++]);
        v |= static_cast<uint64_t>(byte & 0x7f) << shift;
        if ((byte & 0x80) == 0) return true;
        shift += 7;
    }
    return false;
}

// Whole-file helpers; throw IoError on failure.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

// CRC-32 (zlib polynomial) of a buffer, hex-encoded for manifests.
uint32_t crc32_of(std::string_view data);
std::string crc32_hex(std::string_view data);

std::string to_hex(uint64_t v);

}  // namespace qmine
