#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chaintrace::cluster {
class CoSpendClusters;
}

namespace chaintrace::labels {

enum class Category {
    Salary,
    Reimbursement,
    ReimbursementSalary, // one address used for both, kept as its own bucket
    RansomPayment,
    ClaimedOwnership,
    Services,
    VictimName,
};

enum class Source { LeakAnnotation, CrowdsourcedDataset, Derived };

struct LabelRecord {
    std::string address; // canonical, validated on load
    Category category = Category::Salary;
    std::string owner_alias;   // empty when not applicable
    std::string note;          // free text; victim names live here, never as a key
    Source source = Source::LeakAnnotation;
    std::string run_id;        // required for Derived records
};

class LabelStore {
public:
    // Derived records must carry the producing run id.
    void append(LabelRecord record);

    const std::vector<LabelRecord>& records() const { return records_; }
    std::vector<const LabelRecord*> for_address(const std::string& address) const;
    bool has_category(const std::string& address, Category c) const;

    std::vector<std::string> addresses_with(Category c) const;          // distinct, sorted
    std::vector<std::string> addresses_with(Category c, Source s) const;
    std::map<Category, std::size_t> category_counts() const;            // distinct addresses

private:
    std::vector<LabelRecord> records_;
    std::multimap<std::string, std::size_t> by_address_;
};

// CSV "address,category,alias,note,source". Addresses must validate; category
// and source come from the closed enums.
LabelStore load_labels(const std::filesystem::path& path);
void dump_labels(const LabelStore& store, const std::filesystem::path& path);

// one address per line plus its category
void export_published(const LabelStore& store, const std::filesystem::path& path);

enum class EntityKind { Exchange, Mixer, Marketplace, IllegalService, UnlabeledCluster, Other };
enum class Risk { Low, Medium, High, Sanctioned };

struct EntityRecord {
    std::string key; // address, or cluster representative prefixed "cluster:"
    std::string entity_name;
    EntityKind kind = EntityKind::Other;
    Risk risk = Risk::Medium;
};

class EntityStore {
public:
    void append(EntityRecord record);

    // Direct address match first, then (when clusters are given) the record
    // keyed by "cluster:" + the address's co-spend representative.
    std::optional<EntityRecord> resolve(const std::string& address,
                                        const cluster::CoSpendClusters* clusters = nullptr) const;

    const std::vector<EntityRecord>& records() const { return records_; }

    // the single reserved unlabeled-cluster entity name, when present
    std::optional<std::string> unlabeled_cluster_name() const;

private:
    std::vector<EntityRecord> records_;
    std::map<std::string, std::size_t> by_key_;
};

// CSV "address_or_cluster,entity,kind,risk". Every exchange needs a risk tier;
// all unlabeled-cluster rows must agree on one reserved entity name.
EntityStore load_entities(const std::filesystem::path& path);

const char* to_string(Category c) noexcept;
const char* to_string(Source s) noexcept;
const char* to_string(EntityKind k) noexcept;
const char* to_string(Risk r) noexcept;
std::optional<Category> category_from_string(const std::string& text);
std::optional<Source> source_from_string(const std::string& text);
std::optional<EntityKind> kind_from_string(const std::string& text);
std::optional<Risk> risk_from_string(const std::string& text);

} // namespace chaintrace::labels
