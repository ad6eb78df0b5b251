#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace qmine {

// Word-level n-gram shingles as 64-bit hashes, sorted and deduplicated.
// Texts shorter than n tokens contribute their whole token list as a
// single shingle; empty text yields the empty set.
struct ShingleSet {
    std::vector<uint64_t> hashes;
    int n = 13;

    size_t size() const { return hashes.size(); }
    bool empty() const { return hashes.empty(); }
};

ShingleSet shingles(std::string_view text, int n = 13);

// Exact Jaccard of two shingle sets; the oracle the estimator is tested
// against. J(empty, empty) is defined as 1.
double exact_jaccard(const ShingleSet& a, const ShingleSet& b);

constexpr uint32_t kNumPerm = 128;
constexpr uint64_t kMinHashDefaultSeed = 0x5eed0fcc2024ULL;

struct MinHashSignature {
    std::vector<uint64_t> slots;  // kNumPerm entries in normal use

    uint32_t num_perm() const { return static_cast<uint32_t>(slots.size()); }
    bool operator==(const MinHashSignature&) const = default;
};

// 128 permutations of the form (a*x + b) mod p over the Mersenne prime
// p = 2^61 - 1, with (a, b) drawn once from a fixed, recorded seed — the
// same seed always produces the same signatures on any platform. The empty
// set maps to an all-max sentinel (permutation values never reach 2^64-1).
class MinHasher {
public:
    explicit MinHasher(uint64_t seed = kMinHashDefaultSeed, uint32_t num_perm = kNumPerm);

    MinHashSignature compute(const ShingleSet& set) const;

    uint64_t seed() const { return seed_; }
    uint32_t num_perm() const { return static_cast<uint32_t>(a_.size()); }

    static constexpr uint64_t kMersennePrime = (1ULL << 61) - 1;

private:
    uint64_t seed_;
    std::vector<uint64_t> a_;
    std::vector<uint64_t> b_;
};

// Fraction of equal slots. Mismatched widths -> ContractViolation.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

// Signature file: header (magic, num_perm, seed), then one record per item:
// item id u64 followed by num_perm u64 slots. All little-endian.
void write_signatures(const std::filesystem::path& path, const std::vector<uint64_t>& ids,
                      const std::vector<MinHashSignature>& sigs, uint64_t seed);
void read_signatures(const std::filesystem::path& path, std::vector<uint64_t>& ids,
                     std::vector<MinHashSignature>& sigs, uint64_t& seed);

}  // namespace qmine
