#include "qmine/lsh.hpp"

#include <algorithm>

#include "qmine/errors.hpp"
#include "qmine/hash.hpp"

namespace qmine {

LshIndex::LshIndex(LshParams params) : params_(params), buckets_(params.bands) {
    if (params_.bands == 0 || params_.rows == 0)
        throw ContractViolation("lsh bands and rows must be positive");
}

uint64_t LshIndex::band_key(uint32_t band, const MinHashSignature& sig) const {
    if (sig.num_perm() != params_.bands * params_.rows)
        throw ContractViolation("signature width does not match bands*rows");
    uint64_t h = fnv1a64_u64(band);
    for (uint32_t r = 0; r < params_.rows; ++r) {
        h = fnv1a64_u64(sig.slots[band * params_.rows + r], h);
    }
    return h;
}

void LshIndex::insert(uint64_t id, const MinHashSignature& sig) {
    for (uint32_t band = 0; band < params_.bands; ++band) {
        buckets_[band][band_key(band, sig)].push_back(id);
    }
    ++inserted_;
}

std::vector<uint64_t> LshIndex::candidates(const MinHashSignature& sig) const {
    std::vector<uint64_t> out;
    for (uint32_t band = 0; band < params_.bands; ++band) {
        auto it = buckets_[band].find(band_key(band, sig));
        if (it != buckets_[band].end()) {
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace qmine
