#include "chaintrace/econ.hpp"

#include "chaintrace/csv.hpp"
#include "chaintrace/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace chaintrace::econ {

using labels::Category;
using labels::Source;
using valuation::Usd;

namespace {

// Sum of USD credits to an address valued at each transaction's date.
// Addresses absent from the graph contribute zero.
Usd received_usd(const std::string& address, const ledger::TxGraph& g,
                 const valuation::RateTable& rates, valuation::GapPolicy policy) {
    Usd total;
    if (!g.contains_address(address)) return total;
    for (const auto& txid : g.funding_txids(address)) {
        const ledger::Transaction& tx = g.tx(txid);
        std::int64_t credited = 0;
        for (const auto& slot : tx.outputs)
            if (slot.address == address) credited += slot.value_sats;
        total += valuation::usd_value(credited, tx.timestamp, rates, policy);
    }
    return total;
}

SummaryRow make_row(std::string name, const std::set<std::string>& addresses,
                    const ledger::TxGraph& g, const valuation::RateTable& rates,
                    valuation::GapPolicy policy) {
    SummaryRow row;
    row.name = std::move(name);
    row.address_count = addresses.size();
    for (const auto& a : addresses) row.usd += received_usd(a, g, rates, policy);
    return row;
}

std::set<std::string> to_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

} // namespace

EconomicSummary summarize(const labels::LabelStore& labels,
                          const std::vector<heur::RansomVerdict>& verdicts,
                          const ledger::TxGraph& g, const valuation::RateTable& rates,
                          valuation::GapPolicy policy) {
    EconomicSummary out;

    std::set<std::string> leak = to_set(labels.addresses_with(Category::RansomPayment, Source::LeakAnnotation));
    std::set<std::string> crowd = to_set(labels.addresses_with(Category::RansomPayment, Source::CrowdsourcedDataset));

    // dedupe across confirmation sources, leak wins
    for (const auto& a : leak) out.confirmed_overlap += crowd.erase(a);

    std::set<std::string> conti, ryuk;
    for (const auto& v : verdicts) {
        if (!v.positive() || leak.count(v.address) || crowd.count(v.address)) continue;
        (v.strain == heur::Strain::Ryuk ? ryuk : conti).insert(v.address);
    }

    out.income.push_back(make_row("ransom-payments-leak", leak, g, rates, policy));
    out.income.push_back(make_row("ransom-payments-crowdsourced", crowd, g, rates, policy));
    out.income.push_back(make_row("likely-ransom-conti", conti, g, rates, policy));
    out.income.push_back(make_row("likely-ransom-ryuk", ryuk, g, rates, policy));

    out.expenses.push_back(make_row("salary", to_set(labels.addresses_with(Category::Salary)), g,
                                    rates, policy));
    out.expenses.push_back(make_row("reimbursement/salary",
                                    to_set(labels.addresses_with(Category::ReimbursementSalary)),
                                    g, rates, policy));
    out.expenses.push_back(make_row("reimbursement",
                                    to_set(labels.addresses_with(Category::Reimbursement)), g,
                                    rates, policy));

    for (const auto& row : out.income) {
        out.income_total += row.usd;
        out.income_addresses += row.address_count;
    }
    for (const auto& row : out.expenses) {
        out.expense_total += row.usd;
        out.expense_addresses += row.address_count;
    }
    return out;
}

namespace {

// Apportions each funding transaction's USD value across input entities in
// proportion to input value; cents accumulate as doubles and round at the end.
void attribute_origins(const std::string& address, const ledger::TxGraph& g,
                       const labels::EntityStore& entities,
                       const cluster::CoSpendClusters* clusters,
                       const valuation::RateTable& rates, valuation::GapPolicy policy,
                       std::map<std::string, double>& cents_by_entity) {
    if (!g.contains_address(address)) return;
    for (const auto& txid : g.funding_txids(address)) {
        const ledger::Transaction& tx = g.tx(txid);
        std::int64_t credited = 0;
        for (const auto& slot : tx.outputs)
            if (slot.address == address) credited += slot.value_sats;
        if (credited == 0) continue;
        const double usd_cents = double(valuation::usd_value(credited, tx.timestamp, rates, policy).cents);

        const std::int64_t in_total = tx.input_total();
        if (tx.coinbase() || in_total == 0) {
            cents_by_entity[heur::kUnknownEntity] += usd_cents;
            continue;
        }
        for (const auto& slot : tx.inputs) {
            const auto rec = entities.resolve(slot.address, clusters);
            const std::string& key = rec ? rec->entity_name : heur::kUnknownEntity;
            cents_by_entity[key] += usd_cents * double(slot.value_sats) / double(in_total);
        }
    }
}

} // namespace

std::vector<OriginRow> origin_table(const std::vector<heur::RansomVerdict>& verdicts,
                                    const labels::LabelStore& labels, const ledger::TxGraph& g,
                                    const labels::EntityStore& entities,
                                    const cluster::CoSpendClusters* clusters,
                                    const valuation::RateTable& rates,
                                    valuation::GapPolicy policy) {
    std::set<std::string> confirmed =
        to_set(labels.addresses_with(Category::RansomPayment, Source::LeakAnnotation));
    for (const auto& a : labels.addresses_with(Category::RansomPayment, Source::CrowdsourcedDataset))
        confirmed.insert(a);

    std::map<std::string, double> confirmed_cents, likely_cents;
    for (const auto& a : confirmed)
        attribute_origins(a, g, entities, clusters, rates, policy, confirmed_cents);
    for (const auto& v : verdicts)
        if (v.positive() && !confirmed.count(v.address))
            attribute_origins(v.address, g, entities, clusters, rates, policy, likely_cents);

    std::set<std::string> names;
    for (const auto& [name, c] : confirmed_cents) names.insert(name);
    for (const auto& [name, c] : likely_cents) names.insert(name);

    std::vector<OriginRow> rows;
    for (const auto& name : names) {
        OriginRow row;
        row.entity = name;
        const auto c = confirmed_cents.find(name);
        const auto l = likely_cents.find(name);
        row.confirmed = Usd{c == confirmed_cents.end() ? 0 : std::llround(c->second)};
        row.likely = Usd{l == likely_cents.end() ? 0 : std::llround(l->second)};
        row.total = row.confirmed + row.likely;
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const OriginRow& a, const OriginRow& b) {
        return a.total != b.total ? a.total > b.total : a.entity < b.entity;
    });
    return rows;
}

std::vector<std::pair<std::string, Usd>> alias_earnings(const labels::LabelStore& labels,
                                                        const ledger::TxGraph& g,
                                                        const valuation::RateTable& rates,
                                                        valuation::GapPolicy policy) {
    std::map<std::string, std::set<std::string>> owned;
    for (const auto& rec : labels.records())
        if (rec.category == Category::ClaimedOwnership && !rec.owner_alias.empty())
            owned[rec.owner_alias].insert(rec.address);

    std::vector<std::pair<std::string, Usd>> rows;
    for (const auto& [alias, addresses] : owned) {
        Usd total;
        for (const auto& a : addresses) total += received_usd(a, g, rates, policy);
        rows.emplace_back(alias, total);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    return rows;
}

std::string flow_bucket(const labels::EntityRecord& rec) {
    if (rec.kind == labels::EntityKind::Exchange)
        return std::string("exchange:") + labels::to_string(rec.risk);
    return labels::to_string(rec.kind);
}

FlowReport flow_report(const labels::LabelStore& labels, const ledger::TxGraph& g,
                       const labels::EntityStore& entities,
                       const cluster::CoSpendClusters* clusters,
                       const valuation::RateTable& rates, valuation::GapPolicy policy) {
    // distinct (address, category) pairs; an address labeled under two
    // categories contributes its flows to both
    std::set<std::pair<std::string, Category>> labeled;
    for (const auto& rec : labels.records()) labeled.emplace(rec.address, rec.category);

    std::map<std::pair<std::string, std::string>, double> in_cents, out_cents;

    for (const auto& [address, category] : labeled) {
        if (!g.contains_address(address)) continue;
        const std::string category_name = labels::to_string(category);

        // funding side: value received, attributed across input entities
        for (const auto& txid : g.funding_txids(address)) {
            const ledger::Transaction& tx = g.tx(txid);
            std::int64_t credited = 0;
            for (const auto& slot : tx.outputs)
                if (slot.address == address) credited += slot.value_sats;
            if (credited == 0) continue;
            const double usd_cents =
                double(valuation::usd_value(credited, tx.timestamp, rates, policy).cents);
            const std::int64_t in_total = tx.input_total();
            if (tx.coinbase() || in_total == 0) continue; // unknown origin, excluded
            for (const auto& slot : tx.inputs) {
                const auto rec = entities.resolve(slot.address, clusters);
                if (!rec) continue; // unknown counterparty, excluded
                in_cents[{flow_bucket(*rec), category_name}] +=
                    usd_cents * double(slot.value_sats) / double(in_total);
            }
        }

        // spending side: this address's contribution, apportioned across
        // destinations (change back to the address excluded)
        for (const auto& txid : g.spending_txids(address)) {
            const ledger::Transaction& tx = g.tx(txid);
            std::int64_t contributed = 0;
            for (const auto& slot : tx.inputs)
                if (slot.address == address) contributed += slot.value_sats;
            if (contributed == 0) continue;
            std::map<std::string, std::int64_t> destinations;
            std::int64_t dest_total = 0;
            for (const auto& slot : tx.outputs) {
                if (slot.address == address) continue;
                destinations[slot.address] += slot.value_sats;
                dest_total += slot.value_sats;
            }
            if (dest_total == 0) continue;
            const double usd_cents =
                double(valuation::usd_value(contributed, tx.timestamp, rates, policy).cents);
            for (const auto& [dest, sats] : destinations) {
                const auto rec = entities.resolve(dest, clusters);
                if (!rec) continue; // unknown counterparty, excluded
                out_cents[{category_name, flow_bucket(*rec)}] +=
                    usd_cents * double(sats) / double(dest_total);
            }
        }
    }

    FlowReport report;
    for (const auto& [edge, cents] : in_cents)
        report.in_edges.push_back({edge.first, edge.second, Usd{std::llround(cents)}});
    for (const auto& [edge, cents] : out_cents)
        report.out_edges.push_back({edge.first, edge.second, Usd{std::llround(cents)}});
    return report;
}

void write_summary_csv(const EconomicSummary& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path.string());
    out << "group,row,usd,addresses\n";
    for (const auto& row : s.income)
        out << csv::join({"income", row.name, valuation::format_usd(row.usd),
                          std::to_string(row.address_count)})
            << '\n';
    out << csv::join({"income", "total", valuation::format_usd(s.income_total),
                      std::to_string(s.income_addresses)})
        << '\n';
    for (const auto& row : s.expenses)
        out << csv::join({"expense", row.name, valuation::format_usd(row.usd),
                          std::to_string(row.address_count)})
            << '\n';
    out << csv::join({"expense", "total", valuation::format_usd(s.expense_total),
                      std::to_string(s.expense_addresses)})
        << '\n';
    out << csv::join({"note", "confirmed-overlap", "", std::to_string(s.confirmed_overlap)}) << '\n';
}

void write_origins_csv(const std::vector<OriginRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path.string());
    out << "entity,confirmed_usd,likely_usd,total_usd\n";
    for (const auto& row : rows)
        out << csv::join({row.entity, valuation::format_usd(row.confirmed),
                          valuation::format_usd(row.likely), valuation::format_usd(row.total)})
            << '\n';
}

void write_aliases_csv(const std::vector<std::pair<std::string, Usd>>& rows,
                       const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path.string());
    out << "alias,usd\n";
    for (const auto& [alias, usd] : rows)
        out << csv::join({alias, valuation::format_usd(usd)}) << '\n';
}

void write_flows_csv(const FlowReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path.string());
    out << "side,source,target,usd\n";
    for (const auto& e : report.in_edges)
        out << csv::join({"in", e.source, e.target, valuation::format_usd(e.usd)}) << '\n';
    for (const auto& e : report.out_edges)
        out << csv::join({"out", e.source, e.target, valuation::format_usd(e.usd)}) << '\n';
}

void write_flows_graph_text(const FlowReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path.string());
    out << "digraph flows {\n  rankdir=LR;\n";
    for (const auto& e : report.in_edges)
        out << "  \"" << e.source << "\" -> \"" << e.target << "\" [label=\""
            << valuation::format_usd(e.usd) << "\"];\n";
    for (const auto& e : report.out_edges)
        out << "  \"" << e.source << "\" -> \"" << e.target << "\" [label=\""
            << valuation::format_usd(e.usd) << "\"];\n";
    out << "}\n";
}

} // namespace chaintrace::econ
