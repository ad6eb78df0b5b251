#include "qmine/minhash.hpp"

#include <algorithm>
#include <limits>

#include "qmine/binio.hpp"
#include "qmine/errors.hpp"
#include "qmine/hash.hpp"
#include "qmine/tokenizer.hpp"

namespace qmine {

namespace {

uint64_t hash_window(const TokenList& tokens, size_t begin, size_t end) {
    uint64_t h = kFnvOffset;
    for (size_t i = begin; i < end; ++i) {
        h = fnv1a64(tokens[i], h);
        h = fnv1a64_byte(0x1f, h);  // separator so ["ab","c"] != ["a","bc"]
    }
    return h;
}

}  // namespace

ShingleSet shingles(std::string_view text, int n) {
    if (n < 1) throw ContractViolation("shingle size must be >= 1");
    ShingleSet set;
    set.n = n;
    TokenList tokens = tokenize(text);
    if (tokens.empty()) return set;

    size_t window = static_cast<size_t>(n);
    if (tokens.size() < window) {
        set.hashes.push_back(hash_window(tokens, 0, tokens.size()));
        return set;
    }
    set.hashes.reserve(tokens.size() - window + 1);
    for (size_t i = 0; i + window <= tokens.size(); ++i) {
        set.hashes.push_back(hash_window(tokens, i, i + window));
    }
    std::sort(set.hashes.begin(), set.hashes.end());
    set.hashes.erase(std::unique(set.hashes.begin(), set.hashes.end()), set.hashes.end());
    return set;
}

double exact_jaccard(const ShingleSet& a, const ShingleSet& b) {
    if (a.empty() && b.empty()) return 1.0;
    size_t inter = 0;
    size_t i = 0, j = 0;
    while (i < a.hashes.size() && j < b.hashes.size()) {
        if (a.hashes[i] == b.hashes[j]) {
            ++inter;
            ++i;
            ++j;
        } else if (a.hashes[i] < b.hashes[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    size_t uni = a.hashes.size() + b.hashes.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

MinHasher::MinHasher(uint64_t seed, uint32_t num_perm) : seed_(seed) {
    a_.reserve(num_perm);
    b_.reserve(num_perm);
    uint64_t state = seed;
    for (uint32_t i = 0; i < num_perm; ++i) {
        a_.push_back(splitmix64(state) % (kMersennePrime - 1) + 1);  // a in [1, p-1]
        b_.push_back(splitmix64(state) % kMersennePrime);            // b in [0, p-1]
    }
}

MinHashSignature MinHasher::compute(const ShingleSet& set) const {
    MinHashSignature sig;
    sig.slots.assign(a_.size(), std::numeric_limits<uint64_t>::max());
    for (uint64_t x : set.hashes) {
        uint64_t value = x % kMersennePrime;
        for (size_t i = 0; i < a_.size(); ++i) {
            uint64_t h = static_cast<uint64_t>(
                (static_cast<unsigned __int128>(a_[i]) * value + b_[i]) % kMersennePrime);
            if (h < sig.slots[i]) sig.slots[i] = h;
        }
    }
    return sig;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.num_perm() != b.num_perm() || a.num_perm() == 0)
        throw ContractViolation("signature num_perm mismatch");
    uint32_t equal = 0;
    for (size_t i = 0; i < a.slots.size(); ++i) {
        if (a.slots[i] == b.slots[i]) ++equal;
    }
    return static_cast<double>(equal) / static_cast<double>(a.slots.size());
}

namespace {
constexpr uint32_t kSignatureMagic = 0x4d485331;  // "MHS1"
}

void write_signatures(const std::filesystem::path& path, const std::vector<uint64_t>& ids,
                      const std::vector<MinHashSignature>& sigs, uint64_t seed) {
    if (ids.size() != sigs.size()) throw ContractViolation("ids/signatures size mismatch");
    uint32_t num_perm = sigs.empty() ? kNumPerm : sigs.front().num_perm();
    std::string blob;
    put_u32(blob, kSignatureMagic);
    put_u32(blob, num_perm);
    put_u64(blob, seed);
    for (size_t r = 0; r < ids.size(); ++r) {
        if (sigs[r].num_perm() != num_perm)
            throw ContractViolation("inconsistent num_perm in signature batch");
        put_u64(blob, ids[r]);
        for (uint64_t slot : sigs[r].slots) put_u64(blob, slot);
    }
    write_file(path, blob);
}

void read_signatures(const std::filesystem::path& path, std::vector<uint64_t>& ids,
                     std::vector<MinHashSignature>& sigs, uint64_t& seed) {
    std::string blob = read_file(path);
    size_t pos = 0;
    if (blob.size() < 16 || get_u32(blob, pos) != kSignatureMagic)
        throw FormatError("not a signature file: " + path.string());
    uint32_t num_perm = get_u32(blob, pos);
    seed = get_u64(blob, pos);
    size_t record = 8 + static_cast<size_t>(num_perm) * 8;
    if ((blob.size() - pos) % record != 0)
        throw FormatError("truncated signature file: " + path.string());
    size_t count = (blob.size() - pos) / record;
    ids.clear();
    sigs.clear();
    ids.reserve(count);
    sigs.reserve(count);
    for (size_t r = 0; r < count; ++r) {
        ids.push_back(get_u64(blob, pos));
        MinHashSignature sig;
        sig.slots.reserve(num_perm);
        for (uint32_t i = 0; i < num_perm; ++i) sig.slots.push_back(get_u64(blob, pos));
        sigs.push_back(std::move(sig));
    }
}

}  // namespace qmine
