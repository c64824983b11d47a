#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace chaintrace::ledger {
class TxGraph;
}

namespace chaintrace::cluster {

// Union-find with path halving and union by size.
class DisjointSet {
public:
    explicit DisjointSet(std::size_t n);

    std::size_t find(std::size_t x);
    void unite(std::size_t a, std::size_t b);

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

// The common-input-ownership partition: two addresses share a cluster iff
// they are connected through chains of transactions spending them together.
class CoSpendClusters {
public:
    bool contains(const std::string& address) const { return rep_.count(address) != 0; }

    // lexicographically smallest member, deterministic
    const std::string& representative(const std::string& address) const;
    bool same_cluster(const std::string& a, const std::string& b) const;

    // representative -> sorted members
    std::map<std::string, std::vector<std::string>> partition() const;

    std::size_t address_count() const { return rep_.size(); }

private:
    friend CoSpendClusters cospend_clusters(const ledger::TxGraph& g);
    std::map<std::string, std::string> rep_;
};

// Disjoint-set union over every transaction's input address set. Addresses
// that never co-spend (including receive-only addresses) form singletons.
CoSpendClusters cospend_clusters(const ledger::TxGraph& g);

} // namespace chaintrace::cluster
