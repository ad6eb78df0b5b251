#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "qmine/minhash.hpp"

namespace qmine {

// bands * rows must equal the signature width. Defaults 16x8 put the
// S-curve threshold (1/b)^(1/r) ~= 0.707 just below the 0.8 dedup
// threshold, favoring recall.
struct LshParams {
    uint32_t bands = 16;
    uint32_t rows = 8;
};

// Banded candidate index: an item lands in exactly `bands` buckets; two
// items are candidates iff they share at least one band key. Identical
// signatures are always mutual candidates. One writer or many readers.
class LshIndex {
public:
    explicit LshIndex(LshParams params = {});

    void insert(uint64_t id, const MinHashSignature& sig);

    // Distinct ids sharing >= 1 band bucket with sig, ascending. Includes
    // the item itself if it was inserted.
    std::vector<uint64_t> candidates(const MinHashSignature& sig) const;

    const LshParams& params() const { return params_; }
    size_t size() const { return inserted_; }

private:
    uint64_t band_key(uint32_t band, const MinHashSignature& sig) const;

    LshParams params_;
    size_t inserted_ = 0;
    std::vector<std::unordered_map<uint64_t, std::vector<uint64_t>>> buckets_;  // per band
};

}  // namespace qmine
