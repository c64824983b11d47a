#include "chaintrace/cospend.hpp"

#include "chaintrace/error.hpp"
#include "chaintrace/txgraph.hpp"

#include <algorithm>

namespace chaintrace::cluster {

DisjointSet::DisjointSet(std::size_t n) : parent_(n), size_(n, 1) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
}

std::size_t DisjointSet::find(std::size_t x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

void DisjointSet::unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
}

const std::string& CoSpendClusters::representative(const std::string& address) const {
    auto it = rep_.find(address);
    if (it == rep_.end()) throw data_error("address not in partition: " + address);
    return it->second;
}

bool CoSpendClusters::same_cluster(const std::string& a, const std::string& b) const {
    return representative(a) == representative(b);
}

std::map<std::string, std::vector<std::string>> CoSpendClusters::partition() const {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [address, rep] : rep_) out[rep].push_back(address);
    return out; // members sorted by map iteration order
}

CoSpendClusters cospend_clusters(const ledger::TxGraph& g) {
    const std::vector<std::string> addresses = g.addresses();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < addresses.size(); ++i) index.emplace(addresses[i], i);

    DisjointSet sets(addresses.size());
    for (const auto& [txid, tx] : g.transactions()) {
        if (tx.inputs.size() < 2) continue;
        const std::size_t first = index.at(tx.inputs.front().address);
        for (const auto& slot : tx.inputs) sets.unite(first, index.at(slot.address));
    }

    // pick the lexicographic minimum of each set as representative; addresses
    // are sorted, so the first member seen per root is the minimum
    std::vector<const std::string*> root_min(addresses.size(), nullptr);
    for (std::size_t i = 0; i < addresses.size(); ++i) {
        const std::size_t root = sets.find(i);
        if (!root_min[root]) root_min[root] = &addresses[i];
    }
    CoSpendClusters out;
    for (std::size_t i = 0; i < addresses.size(); ++i)
        out.rep_.emplace(addresses[i], *root_min[sets.find(i)]);
    return out;
}

} // namespace chaintrace::cluster
