#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmine/lsh.hpp"
#include "qmine/minhash.hpp"

namespace qmine {

struct DedupOptions {
    double threshold = 0.8;
    int shingle_n = 13;
    LshParams lsh;
    uint64_t minhash_seed = kMinHashDefaultSeed;
    // Verify candidates with exact shingle-set Jaccard instead of the
    // signature estimate. O(|set|) per pair; meant for tests.
    bool exact_verification = false;
    int parallelism = 1;
};

struct DedupCluster {
    uint64_t representative = 0;
    std::vector<uint64_t> duplicates;
};

struct DedupResult {
    std::vector<uint64_t> kept;           // ascending ids
    std::vector<DedupCluster> clusters;   // only clusters with duplicates
    double threshold = 0.8;

    nlohmann::json to_json() const;
};

// Single pass in ascending id order: an item is a duplicate iff some
// earlier kept item is an LSH candidate and the similarity is >= threshold;
// the earliest qualifying kept item becomes its representative. Duplicate
// ids in the input or a threshold outside (0, 1] -> ContractViolation.
DedupResult dedup(const std::vector<std::pair<uint64_t, std::string>>& items,
                  const DedupOptions& options = {});

// Same pass over precomputed signatures (exact verification additionally
// needs the shingle sets, in the same order as ids).
DedupResult dedup_signatures(const std::vector<uint64_t>& ids,
                             const std::vector<MinHashSignature>& sigs,
                             const std::vector<ShingleSet>* sets, const DedupOptions& options);

}  // namespace qmine
