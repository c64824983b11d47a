#include "chaintrace/labels.hpp"

#include "chaintrace/address.hpp"
#include "chaintrace/cospend.hpp"
#include "chaintrace/csv.hpp"
#include "chaintrace/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

namespace chaintrace::labels {

namespace {

std::string normalize(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (u == ' ' || u == '_') out += '-';
        else out += char(std::tolower(u));
    }
    // trim
    const auto b = out.find_first_not_of('-');
    if (b == std::string::npos) return "";
    const auto e = out.find_last_not_of('-');
    return out.substr(b, e - b + 1);
}

} // namespace

const char* to_string(Category c) noexcept {
    switch (c) {
    case Category::Salary: return "salary";
    case Category::Reimbursement: return "reimbursement";
    case Category::ReimbursementSalary: return "reimbursement/salary";
    case Category::RansomPayment: return "ransom-payment";
    case Category::ClaimedOwnership: return "claimed-ownership";
    case Category::Services: return "services";
    case Category::VictimName: return "victim-name";
    }
    return "?";
}

std::optional<Category> category_from_string(const std::string& text) {
    const std::string n = normalize(text);
    if (n == "salary") return Category::Salary;
    if (n == "reimbursement") return Category::Reimbursement;
    if (n == "reimbursement/salary" || n == "reimbursement-salary" || n == "salary/reimbursement")
        return Category::ReimbursementSalary;
    if (n == "ransom-payment" || n == "ransom-payment-address") return Category::RansomPayment;
    if (n == "claimed-ownership") return Category::ClaimedOwnership;
    if (n == "services") return Category::Services;
    if (n == "victim-name") return Category::VictimName;
    return std::nullopt;
}

const char* to_string(Source s) noexcept {
    switch (s) {
    case Source::LeakAnnotation: return "leak";
    case Source::CrowdsourcedDataset: return "crowdsourced";
    case Source::Derived: return "derived";
    }
    return "?";
}

std::optional<Source> source_from_string(const std::string& text) {
    const std::string n = normalize(text);
    if (n == "leak" || n == "leak-annotation") return Source::LeakAnnotation;
    if (n == "crowdsourced" || n == "crowdsourced-dataset") return Source::CrowdsourcedDataset;
    if (n == "derived") return Source::Derived;
    return std::nullopt;
}

const char* to_string(EntityKind k) noexcept {
    switch (k) {
    case EntityKind::Exchange: return "exchange";
    case EntityKind::Mixer: return "mixer";
    case EntityKind::Marketplace: return "marketplace";
    case EntityKind::IllegalService: return "illegal-service";
    case EntityKind::UnlabeledCluster: return "unlabeled-cluster";
    case EntityKind::Other: return "other";
    }
    return "?";
}

std::optional<EntityKind> kind_from_string(const std::string& text) {
    const std::string n = normalize(text);
    if (n == "exchange") return EntityKind::Exchange;
    if (n == "mixer") return EntityKind::Mixer;
    if (n == "marketplace") return EntityKind::Marketplace;
    if (n == "illegal-service") return EntityKind::IllegalService;
    if (n == "unlabeled-cluster") return EntityKind::UnlabeledCluster;
    if (n == "other") return EntityKind::Other;
    return std::nullopt;
}

const char* to_string(Risk r) noexcept {
    switch (r) {
    case Risk::Low: return "low";
    case Risk::Medium: return "medium";
    case Risk::High: return "high";
    case Risk::Sanctioned: return "sanctioned";
    }
    return "?";
}

std::optional<Risk> risk_from_string(const std::string& text) {
    const std::string n = normalize(text);
    if (n == "low") return Risk::Low;
    if (n == "medium") return Risk::Medium;
    if (n == "high") return Risk::High;
    if (n == "sanctioned") return Risk::Sanctioned;
    return std::nullopt;
}

void LabelStore::append(LabelRecord record) {
    if (record.source == Source::Derived && record.run_id.empty())
        throw data_error("derived label for " + record.address + " lacks a run id");
    by_address_.emplace(record.address, records_.size());
    records_.push_back(std::move(record));
}

std::vector<const LabelRecord*> LabelStore::for_address(const std::string& address) const {
    std::vector<const LabelRecord*> out;
    auto [lo, hi] = by_address_.equal_range(address);
    for (auto it = lo; it != hi; ++it) out.push_back(&records_[it->second]);
    return out;
}

bool LabelStore::has_category(const std::string& address, Category c) const {
    for (const auto* rec : for_address(address))
        if (rec->category == c) return true;
    return false;
}

std::vector<std::string> LabelStore::addresses_with(Category c) const {
    std::set<std::string> seen;
    for (const auto& rec : records_)
        if (rec.category == c) seen.insert(rec.address);
    return {seen.begin(), seen.end()};
}

std::vector<std::string> LabelStore::addresses_with(Category c, Source s) const {
    std::set<std::string> seen;
    for (const auto& rec : records_)
        if (rec.category == c && rec.source == s) seen.insert(rec.address);
    return {seen.begin(), seen.end()};
}

std::map<Category, std::size_t> LabelStore::category_counts() const {
    std::map<Category, std::set<std::string>> seen;
    for (const auto& rec : records_) seen[rec.category].insert(rec.address);
    std::map<Category, std::size_t> out;
    for (const auto& [c, addrs] : seen) out[c] = addrs.size();
    return out;
}

LabelStore load_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open label file " + path.string());
    LabelStore store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = csv::split(line);
        if (lineno == 1 && !fields.empty() && fields[0] == "address") continue; // header
        const std::string where = path.filename().string() + ":" + std::to_string(lineno);
        if (fields.size() < 5 || fields.size() > 6)
            throw data_error(where + ": expected address,category,alias,note,source[,run_id]");

        auto validated = addr::validate(fields[0]);
        if (!addr::is_valid(validated))
            throw data_error(where + ": invalid address '" + fields[0] + "' (" +
                             addr::to_string(std::get<addr::ValidationFailure>(validated).rule) +
                             ")");
        const auto category = category_from_string(fields[1]);
        if (!category) throw data_error(where + ": unknown category '" + fields[1] + "'");
        const auto source = source_from_string(fields[4]);
        if (!source) throw data_error(where + ": unknown source '" + fields[4] + "'");

        LabelRecord rec;
        rec.address = std::get<addr::Address>(validated).canonical;
        rec.category = *category;
        rec.owner_alias = fields[2];
        rec.note = fields[3];
        rec.source = *source;
        if (fields.size() == 6) rec.run_id = fields[5];
        try {
            store.append(std::move(rec));
        } catch (const Error& e) {
            throw data_error(where + ": " + e.what());
        }
    }
    return store;
}

void dump_labels(const LabelStore& store, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write label file " + path.string());
    out << "address,category,alias,note,source";
    bool any_run_id = false;
    for (const auto& rec : store.records()) any_run_id |= !rec.run_id.empty();
    if (any_run_id) out << ",run_id";
    out << '\n';
    for (const auto& rec : store.records()) {
        std::vector<std::string> fields{rec.address, to_string(rec.category), rec.owner_alias,
                                        rec.note, to_string(rec.source)};
        if (any_run_id) fields.push_back(rec.run_id);
        out << csv::join(fields) << '\n';
    }
}

void export_published(const LabelStore& store, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write export file " + path.string());
    std::set<std::pair<std::string, Category>> seen;
    for (const auto& rec : store.records()) seen.emplace(rec.address, rec.category);
    for (const auto& [address, category] : seen) out << address << ' ' << to_string(category) << '\n';
}

void EntityStore::append(EntityRecord record) {
    if (record.key.empty() || record.entity_name.empty())
        throw data_error("entity record with empty key or name");
    if (record.kind == EntityKind::UnlabeledCluster) {
        const auto existing = unlabeled_cluster_name();
        if (existing && *existing != record.entity_name)
            throw data_error("conflicting unlabeled-cluster names: '" + *existing + "' vs '" +
                             record.entity_name + "'");
    }
    const auto [it, inserted] = by_key_.try_emplace(record.key, records_.size());
    if (!inserted) throw data_error("duplicate entity key " + record.key);
    records_.push_back(std::move(record));
}

std::optional<EntityRecord> EntityStore::resolve(const std::string& address,
                                                 const cluster::CoSpendClusters* clusters) const {
    auto it = by_key_.find(address);
    if (it != by_key_.end()) return records_[it->second];
    if (clusters && clusters->contains(address)) {
        it = by_key_.find("cluster:" + clusters->representative(address));
        if (it != by_key_.end()) return records_[it->second];
    }
    return std::nullopt;
}

std::optional<std::string> EntityStore::unlabeled_cluster_name() const {
    for (const auto& rec : records_)
        if (rec.kind == EntityKind::UnlabeledCluster) return rec.entity_name;
    return std::nullopt;
}

EntityStore load_entities(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open entity file " + path.string());
    EntityStore store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = csv::split(line);
        if (lineno == 1 && !fields.empty() && fields[0] == "address_or_cluster") continue;
        const std::string where = path.filename().string() + ":" + std::to_string(lineno);
        if (fields.size() != 4) throw data_error(where + ": expected address_or_cluster,entity,kind,risk");
        const auto kind = kind_from_string(fields[2]);
        if (!kind) throw data_error(where + ": unknown entity kind '" + fields[2] + "'");
        auto risk = risk_from_string(fields[3]);
        if (!risk) {
            // exchanges must carry a tier; anything else defaults to medium
            if (*kind == EntityKind::Exchange || !fields[3].empty())
                throw data_error(where + ": bad risk '" + fields[3] + "'");
            risk = Risk::Medium;
        }
        try {
            store.append({fields[0], fields[1], *kind, *risk});
        } catch (const Error& e) {
            throw data_error(where + ": " + e.what());
        }
    }
    return store;
}

} // namespace chaintrace::labels
