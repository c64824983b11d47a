#include "chaintrace/heuristics.hpp"

#include "chaintrace/csv.hpp"
#include "chaintrace/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>

namespace chaintrace::heur {

const char* const kUnknownEntity = "unknown";

const char* to_string(Strain s) noexcept { return s == Strain::Ryuk ? "ryuk" : "conti"; }

std::optional<Strain> strain_from_string(const std::string& text) {
    if (text == "ryuk") return Strain::Ryuk;
    if (text == "conti") return Strain::Conti;
    return std::nullopt;
}

std::optional<SplitEvent> detect_split(const std::string& address, const ledger::TxGraph& g,
                                       double tol_pp) {
    if (!g.contains_address(address)) throw data_error("unknown address " + address);
    const auto& spends = g.spending_txids(address);
    if (spends.empty()) return std::nullopt;

    // spending index is (timestamp, txid) ordered: front is the first spend
    const ledger::Transaction& spend = g.tx(spends.front());

    // aggregate per destination, change back to the source excluded
    std::map<std::string, std::int64_t> destinations;
    for (const auto& slot : spend.outputs)
        if (slot.address != address) destinations[slot.address] += slot.value_sats;
    if (destinations.size() != 2) return std::nullopt;

    auto it = destinations.begin();
    const auto& [addr_a, sats_a] = *it;
    const auto& [addr_b, sats_b] = *std::next(it);
    const bool a_small = sats_a <= sats_b;
    const std::int64_t small = a_small ? sats_a : sats_b;
    const std::int64_t total = sats_a + sats_b;
    if (small <= 0 || total <= 0) return std::nullopt;

    const double percent = 100.0 * double(small) / double(total);
    int matched = int(std::lround(percent / 5.0)) * 5;
    matched = std::clamp(matched, 5, 50);
    const double residual = std::abs(percent - double(matched));
    if (residual > tol_pp) return std::nullopt;

    SplitEvent ev;
    ev.address = address;
    ev.spend_txid = spend.txid;
    ev.small_sats = small;
    ev.total_sats = total;
    ev.matched_percent = matched;
    ev.residual_pp = residual;
    ev.small_destination = a_small ? addr_a : addr_b;
    ev.large_destination = a_small ? addr_b : addr_a;
    return ev;
}

namespace {

bool absorbed_by_exchange(const std::string& address, const labels::EntityStore& entities,
                          const cluster::CoSpendClusters* clusters) {
    const auto rec = entities.resolve(address, clusters);
    return rec && rec->kind == labels::EntityKind::Exchange;
}

} // namespace

bool reaches_leak(const std::string& address, const std::set<std::string>& leak_set,
                  const ledger::TxGraph& g, int max_hops, const labels::EntityStore& entities,
                  const cluster::CoSpendClusters* clusters, std::vector<std::string>* out_path) {
    if (!g.contains_address(address)) throw data_error("unknown address " + address);
    if (max_hops < 1) return false;

    struct Node {
        std::string address;
        int hops;
        std::size_t parent; // index into visited tx trail
    };
    // trail of (txid, predecessor) pairs for path reconstruction
    std::vector<std::pair<std::string, std::size_t>> trail;
    constexpr std::size_t kNoParent = std::size_t(-1);

    std::set<std::string> seen{address};
    std::deque<Node> queue{{address, 0, kNoParent}};

    while (!queue.empty()) {
        const Node node = queue.front();
        queue.pop_front();
        if (node.hops >= max_hops) continue;

        for (const auto& txid : g.spending_txids(node.address)) {
            const ledger::Transaction& tx = g.tx(txid);
            trail.emplace_back(txid, node.parent);
            const std::size_t trail_id = trail.size() - 1;
            for (const auto& slot : tx.outputs) {
                if (slot.address == node.address) continue;
                if (leak_set.count(slot.address)) {
                    if (out_path) {
                        out_path->clear();
                        for (std::size_t t = trail_id; t != kNoParent; t = trail[t].second)
                            out_path->push_back(trail[t].first);
                        std::reverse(out_path->begin(), out_path->end());
                    }
                    return true;
                }
                if (!seen.insert(slot.address).second) continue;
                // funds entering a labeled exchange lose traceability
                if (absorbed_by_exchange(slot.address, entities, clusters)) continue;
                queue.push_back({slot.address, node.hops + 1, trail_id});
            }
        }
    }
    return false;
}

namespace {

// fractions of an address's received value by entity; depth-bounded recursion
// through unlabeled inputs implements the haircut mode
using Composition = std::map<std::string, double>;

const Composition& compose_sources(const std::string& address, const ledger::TxGraph& g,
                                   const labels::EntityStore& entities,
                                   const cluster::CoSpendClusters* clusters, int depth,
                                   std::map<std::pair<std::string, int>, Composition>& memo) {
    const auto key = std::make_pair(address, depth);
    const auto found = memo.find(key);
    if (found != memo.end()) return found->second;

    Composition sats_by_entity;
    const std::int64_t received = ledger::received_total(g, address);
    for (const auto& txid : g.funding_txids(address)) {
        const ledger::Transaction& tx = g.tx(txid);
        std::int64_t credited = 0;
        for (const auto& slot : tx.outputs)
            if (slot.address == address) credited += slot.value_sats;
        if (credited == 0) continue;

        const std::int64_t in_total = tx.input_total();
        if (tx.coinbase() || in_total == 0) {
            sats_by_entity[kUnknownEntity] += double(credited);
            continue;
        }
        for (const auto& slot : tx.inputs) {
            const double part = double(credited) * double(slot.value_sats) / double(in_total);
            const auto rec = entities.resolve(slot.address, clusters);
            if (rec) {
                sats_by_entity[rec->entity_name] += part;
            } else if (depth > 1 && ledger::received_total(g, slot.address) > 0) {
                const auto& upstream =
                    compose_sources(slot.address, g, entities, clusters, depth - 1, memo);
                for (const auto& [entity, fraction] : upstream)
                    sats_by_entity[entity] += part * fraction;
            } else {
                sats_by_entity[kUnknownEntity] += part;
            }
        }
    }

    Composition fractions;
    if (received > 0)
        for (const auto& [entity, sats] : sats_by_entity) fractions[entity] = sats / double(received);
    return memo.emplace(key, std::move(fractions)).first->second;
}

} // namespace

std::map<std::string, double> source_attribution(const std::string& address,
                                                 const ledger::TxGraph& g,
                                                 const labels::EntityStore& entities,
                                                 const cluster::CoSpendClusters* clusters,
                                                 int taint_depth) {
    if (!g.contains_address(address)) throw data_error("unknown address " + address);
    if (taint_depth < 1) throw data_error("taint_depth must be at least 1");
    if (ledger::received_total(g, address) <= 0)
        throw data_error("source_attribution requires received_total > 0 for " + address);

    std::map<std::pair<std::string, int>, Composition> memo;
    return compose_sources(address, g, entities, clusters, taint_depth, memo);
}

RansomVerdict classify_ransom(const std::string& address, const std::set<std::string>& leak_set,
                              const ledger::TxGraph& g, const labels::EntityStore& entities,
                              const cluster::CoSpendClusters* clusters,
                              const DetectorParams& params) {
    RansomVerdict verdict;
    verdict.address = address;

    verdict.split = detect_split(address, g, params.tol_pp);
    verdict.split_ok = verdict.split.has_value();

    verdict.reaches_leak =
        reaches_leak(address, leak_set, g, params.max_hops, entities, clusters, &verdict.leak_path);

    if (ledger::received_total(g, address) > 0) {
        const auto attribution =
            source_attribution(address, g, entities, clusters, params.taint_depth);
        // several rows (hot wallets) may share an entity name; kind and risk
        // are per-entity, so the first row wins
        std::map<std::string, const labels::EntityRecord*> by_name;
        for (const auto& rec : entities.records()) by_name.emplace(rec.entity_name, &rec);
        double clean = 0.0;
        for (const auto& [entity_name, fraction] : attribution) {
            const auto it = by_name.find(entity_name);
            if (it == by_name.end()) continue;
            const auto& rec = *it->second;
            if ((rec.kind == labels::EntityKind::Exchange && rec.risk == labels::Risk::Low) ||
                rec.kind == labels::EntityKind::UnlabeledCluster)
                clean += fraction;
        }
        verdict.clean_fraction = clean;
        verdict.source_ok = clean > params.source_threshold;
    }

    if (verdict.positive())
        verdict.strain = g.first_seen(address) < params.era_cutoff ? Strain::Ryuk : Strain::Conti;

    {
        std::ostringstream notes;
        notes.precision(4);
        if (verdict.split)
            notes << "split " << verdict.split->matched_percent << "% residual "
                  << verdict.split->residual_pp << "pp";
        else
            notes << "no qualifying split";
        notes << "; clean funding " << verdict.clean_fraction;
        if (verdict.reaches_leak)
            notes << "; leak reached in " << verdict.leak_path.size() << " hop"
                  << (verdict.leak_path.size() == 1 ? "" : "s");
        else
            notes << "; no leak path within " << params.max_hops << " hops";
        verdict.notes = notes.str();
    }
    return verdict;
}

namespace {

std::string format_residual(double pp) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", pp);
    return buf;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

void write_verdicts_csv(const std::vector<RansomVerdict>& verdicts,
                        const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write verdict file " + path.string());
    out << "address,verdict,percent,strain,residual,evidence\n";
    for (const auto& v : verdicts) {
        std::string evidence = "leak=" + std::to_string(int(v.reaches_leak)) +
                               ";split=" + std::to_string(int(v.split_ok)) +
                               ";source=" + std::to_string(int(v.source_ok)) +
                               ";clean=" + format_residual(v.clean_fraction);
        if (v.split) evidence += ";spend=" + v.split->spend_txid;
        if (!v.leak_path.empty()) {
            evidence += ";path=";
            for (std::size_t i = 0; i < v.leak_path.size(); ++i) {
                if (i) evidence += '>';
                evidence += v.leak_path[i];
            }
        }
        out << csv::join({v.address, v.positive() ? "positive" : "negative",
                          v.split ? std::to_string(v.split->matched_percent) : "",
                          v.strain ? to_string(*v.strain) : "",
                          v.split ? format_residual(v.split->residual_pp) : "", evidence})
            << '\n';
    }
}

std::vector<RansomVerdict> read_verdicts_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open verdict file " + path.string());
    std::vector<RansomVerdict> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = csv::split(line);
        if (lineno == 1 && !fields.empty() && fields[0] == "address") continue;
        const std::string where = path.filename().string() + ":" + std::to_string(lineno);
        if (fields.size() != 6) throw data_error(where + ": expected 6 verdict columns");

        RansomVerdict v;
        v.address = fields[0];
        if (!fields[3].empty()) v.strain = strain_from_string(fields[3]);
        std::string spend_txid;
        for (const auto& token : split_on(fields[5], ';')) {
            const auto eq = token.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = token.substr(0, eq);
            const std::string value = token.substr(eq + 1);
            if (key == "leak") v.reaches_leak = value == "1";
            else if (key == "split") v.split_ok = value == "1";
            else if (key == "source") v.source_ok = value == "1";
            else if (key == "clean") v.clean_fraction = std::stod(value);
            else if (key == "spend") spend_txid = value;
            else if (key == "path") v.leak_path = split_on(value, '>');
        }
        if (v.split_ok) {
            SplitEvent ev;
            ev.address = v.address;
            ev.spend_txid = spend_txid;
            ev.matched_percent = fields[2].empty() ? 0 : std::stoi(fields[2]);
            ev.residual_pp = fields[4].empty() ? 0.0 : std::stod(fields[4]);
            v.split = ev;
        }
        const bool positive_column = fields[1] == "positive";
        if (positive_column != v.positive())
            throw data_error(where + ": verdict column disagrees with criterion flags");
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace chaintrace::heur
