#include "qmine/dedup.hpp"

#include <algorithm>
#include <unordered_map>

#include "qmine/errors.hpp"
#include "qmine/parallel.hpp"

namespace qmine {

using nlohmann::json;

json DedupResult::to_json() const {
    json clusters_json = json::array();
    for (const auto& cluster : clusters) {
        clusters_json.push_back(json{{"rep", cluster.representative}, {"dups", cluster.duplicates}});
    }
    return json{{"threshold", threshold}, {"kept", kept}, {"clusters", clusters_json}};
}

DedupResult dedup_signatures(const std::vector<uint64_t>& ids,
                             const std::vector<MinHashSignature>& sigs,
                             const std::vector<ShingleSet>* sets, const DedupOptions& options) {
    if (options.threshold <= 0.0 || options.threshold > 1.0)
        throw ContractViolation("dedup threshold must be in (0, 1]");
    if (ids.size() != sigs.size()) throw ContractViolation("ids/signatures size mismatch");
    if (options.exact_verification && (sets == nullptr || sets->size() != ids.size()))
        throw ContractViolation("exact verification needs shingle sets");

    // Process in ascending id order so representatives are earliest-id.
    std::vector<size_t> order(ids.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return ids[a] < ids[b]; });
    for (size_t i = 1; i < order.size(); ++i) {
        if (ids[order[i]] == ids[order[i - 1]]) throw ContractViolation("duplicate item id in dedup input");
    }

    DedupResult result;
    result.threshold = options.threshold;
    LshIndex lsh(options.lsh);
    std::unordered_map<uint64_t, size_t> row_of_kept;          // id -> row
    std::unordered_map<uint64_t, size_t> cluster_of;           // representative id -> cluster slot

    for (size_t row : order) {
        uint64_t id = ids[row];
        uint64_t duplicate_of = 0;
        bool is_duplicate = false;
        for (uint64_t candidate : lsh.candidates(sigs[row])) {
            auto it = row_of_kept.find(candidate);
            if (it == row_of_kept.end()) continue;  // earlier duplicate, not kept
            double similarity = options.exact_verification
                                    ? exact_jaccard((*sets)[row], (*sets)[it->second])
                                    : estimate_jaccard(sigs[row], sigs[it->second]);
            if (similarity >= options.threshold) {
                duplicate_of = candidate;  // candidates come back ascending: earliest wins
                is_duplicate = true;
                break;
            }
        }
        if (is_duplicate) {
            auto [slot, inserted] = cluster_of.try_emplace(duplicate_of, result.clusters.size());
            if (inserted) result.clusters.push_back(DedupCluster{duplicate_of, {}});
            result.clusters[slot->second].duplicates.push_back(id);
        } else {
            result.kept.push_back(id);
            row_of_kept.emplace(id, row);
            lsh.insert(id, sigs[row]);
        }
    }

    std::sort(result.clusters.begin(), result.clusters.end(),
              [](const DedupCluster& a, const DedupCluster& b) {
                  return a.representative < b.representative;
              });
    return result;
}

DedupResult dedup(const std::vector<std::pair<uint64_t, std::string>>& items,
                  const DedupOptions& options) {
    MinHasher hasher(options.minhash_seed, options.lsh.bands * options.lsh.rows);
    std::vector<uint64_t> ids(items.size());
    std::vector<ShingleSet> sets(items.size());
    std::vector<MinHashSignature> sigs(items.size());
    parallel_for(items.size(), options.parallelism, [&](size_t i) {
        ids[i] = items[i].first;
        sets[i] = shingles(items[i].second, options.shingle_n);
        sigs[i] = hasher.compute(sets[i]);
    });
    return dedup_signatures(ids, sigs, options.exact_verification ? &sets : nullptr, options);
}

}  // namespace qmine
