#include "chaintrace/txgraph.hpp"

#include "chaintrace/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>

namespace chaintrace::ledger {

using nlohmann::json;

std::int64_t Transaction::input_total() const {
    std::int64_t total = 0;
    for (const auto& slot : inputs) total += slot.value_sats;
    return total;
}

std::int64_t Transaction::output_total() const {
    std::int64_t total = 0;
    for (const auto& slot : outputs) total += slot.value_sats;
    return total;
}

namespace {

bool is_hex64(const std::string& s) {
    return s.size() == 64 && std::all_of(s.begin(), s.end(), [](unsigned char c) {
               return std::isdigit(c) || (c >= 'a' && c <= 'f');
           });
}

void check_record(const Transaction& tx, const std::string& where) {
    if (!is_hex64(tx.txid)) throw data_error(where + ": txid is not 64 lowercase hex chars");
    if (tx.fee_sats < 0) throw data_error(where + ": negative fee");
    for (const auto& slot : tx.inputs)
        if (slot.value_sats < 0 || slot.address.empty())
            throw data_error(where + ": bad input slot");
    for (const auto& slot : tx.outputs)
        if (slot.value_sats < 0 || slot.address.empty())
            throw data_error(where + ": bad output slot");
    if (tx.coinbase()) {
        if (tx.fee_sats != 0) throw data_error(where + ": coinbase with nonzero fee");
    } else if (tx.input_total() != tx.output_total() + tx.fee_sats) {
        throw data_error(where + ": value not conserved (inputs != outputs + fee)");
    }
}

bool same_content(const Transaction& a, const Transaction& b) {
    const auto slots_equal = [](const std::vector<TxSlot>& x, const std::vector<TxSlot>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i].address != y[i].address || x[i].value_sats != y[i].value_sats) return false;
        return true;
    };
    return a.timestamp == b.timestamp && a.fee_sats == b.fee_sats &&
           slots_equal(a.inputs, b.inputs) && slots_equal(a.outputs, b.outputs);
}

} // namespace

TxGraph ingest(const std::vector<Transaction>& records) {
    TxGraph g;
    std::size_t position = 0;
    for (const auto& tx : records) {
        ++position;
        check_record(tx, "record " + std::to_string(position));
        auto [it, inserted] = g.txs_.try_emplace(tx.txid, tx);
        if (!inserted) {
            if (!same_content(it->second, tx))
                throw data_error("conflicting duplicate txid " + tx.txid);
            continue; // identical duplicate, idempotent
        }
    }

    // build indices from the de-duplicated map; (timestamp, txid) order
    std::vector<const Transaction*> ordered;
    ordered.reserve(g.txs_.size());
    for (const auto& [txid, tx] : g.txs_) ordered.push_back(&tx);
    std::sort(ordered.begin(), ordered.end(), [](const Transaction* a, const Transaction* b) {
        return a->timestamp != b->timestamp ? a->timestamp < b->timestamp : a->txid < b->txid;
    });

    const auto touch = [&g](const std::string& address, std::int64_t ts) {
        auto [it, inserted] = g.first_seen_.try_emplace(address, ts);
        if (!inserted && ts < it->second) it->second = ts;
    };
    // repeated slots of one address inside a tx index it once
    for (const Transaction* tx : ordered) {
        for (const auto& slot : tx->inputs) {
            touch(slot.address, tx->timestamp);
            auto& v = g.spending_[slot.address];
            if (v.empty() || v.back() != tx->txid) v.push_back(tx->txid);
        }
        for (const auto& slot : tx->outputs) {
            touch(slot.address, tx->timestamp);
            auto& v = g.funding_[slot.address];
            if (v.empty() || v.back() != tx->txid) v.push_back(tx->txid);
        }
    }
    return g;
}

const Transaction& TxGraph::tx(const std::string& txid) const {
    auto it = txs_.find(txid);
    if (it == txs_.end()) throw data_error("unknown txid " + txid);
    return it->second;
}

bool TxGraph::contains_address(const std::string& address) const {
    return first_seen_.count(address) != 0;
}

const std::vector<std::string>& TxGraph::funding_txids(const std::string& address) const {
    static const std::vector<std::string> empty;
    auto it = funding_.find(address);
    return it == funding_.end() ? empty : it->second;
}

const std::vector<std::string>& TxGraph::spending_txids(const std::string& address) const {
    static const std::vector<std::string> empty;
    auto it = spending_.find(address);
    return it == spending_.end() ? empty : it->second;
}

std::int64_t TxGraph::first_seen(const std::string& address) const {
    auto it = first_seen_.find(address);
    if (it == first_seen_.end()) throw data_error("unknown address " + address);
    return it->second;
}

std::vector<std::string> TxGraph::addresses() const {
    std::vector<std::string> out;
    out.reserve(first_seen_.size());
    for (const auto& [address, ts] : first_seen_) out.push_back(address);
    return out;
}

std::int64_t received_total(const TxGraph& g, const std::string& address) {
    if (!g.contains_address(address)) throw data_error("unknown address " + address);
    std::int64_t total = 0;
    for (const auto& txid : g.funding_txids(address))
        for (const auto& slot : g.tx(txid).outputs)
            if (slot.address == address) total += slot.value_sats;
    return total;
}

Transaction parse_tx_record(const std::string& line, const std::string& where) {
    json rec;
    try {
        rec = json::parse(line);
    } catch (const json::exception& e) {
        throw data_error(where + ": bad JSON: " + e.what());
    }
    Transaction tx;
    try {
        tx.txid = rec.at("txid").get<std::string>();
        tx.timestamp = rec.at("time").get<std::int64_t>();
        tx.fee_sats = rec.at("fee_sats").get<std::int64_t>();
        for (const auto& slot : rec.at("inputs"))
            tx.inputs.push_back({slot.at("addr").get<std::string>(),
                                 slot.at("value_sats").get<std::int64_t>()});
        for (const auto& slot : rec.at("outputs"))
            tx.outputs.push_back({slot.at("addr").get<std::string>(),
                                  slot.at("value_sats").get<std::int64_t>()});
    } catch (const json::exception& e) {
        throw data_error(where + ": " + e.what());
    }
    check_record(tx, where);
    return tx;
}

std::vector<Transaction> parse_tx_stream(std::istream& in, const std::string& source_name) {
    std::vector<Transaction> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        out.push_back(parse_tx_record(line, source_name + ":" + std::to_string(lineno)));
    }
    return out;
}

std::vector<Transaction> read_tx_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open transaction file " + path.string());
    return parse_tx_stream(in, path.filename().string());
}

std::string format_tx_record(const Transaction& tx) {
    json rec;
    rec["txid"] = tx.txid;
    rec["time"] = tx.timestamp;
    rec["fee_sats"] = tx.fee_sats;
    rec["inputs"] = json::array();
    for (const auto& slot : tx.inputs)
        rec["inputs"].push_back({{"addr", slot.address}, {"value_sats", slot.value_sats}});
    rec["outputs"] = json::array();
    for (const auto& slot : tx.outputs)
        rec["outputs"].push_back({{"addr", slot.address}, {"value_sats", slot.value_sats}});
    return rec.dump();
}

void write_tx_file(const std::filesystem::path& path, const std::vector<Transaction>& txs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write transaction file " + path.string());
    for (const auto& tx : txs) out << format_tx_record(tx) << '\n';
}

} // namespace chaintrace::ledger
