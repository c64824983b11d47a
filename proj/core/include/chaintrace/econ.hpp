#pragma once

#include "chaintrace/heuristics.hpp"
#include "chaintrace/labels.hpp"
#include "chaintrace/txgraph.hpp"
#include "chaintrace/valuation.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace chaintrace::econ {

// Income rows: ransom addresses from the leak, from the crowdsourced dataset,
// and strain-dated derived verdicts. Expense rows: the three payroll buckets.
// An address confirmed by several sources counts once, under the stronger
// source (leak > crowdsourced > derived); the overlap count is reported.
struct SummaryRow {
    std::string name;
    valuation::Usd usd;
    std::size_t address_count = 0;
};

struct EconomicSummary {
    std::vector<SummaryRow> income;
    std::vector<SummaryRow> expenses;
    valuation::Usd income_total;
    valuation::Usd expense_total;
    std::size_t income_addresses = 0;
    std::size_t expense_addresses = 0;
    std::size_t confirmed_overlap = 0; // addresses in both leak and crowdsourced sets
};

EconomicSummary summarize(const labels::LabelStore& labels,
                          const std::vector<heur::RansomVerdict>& verdicts,
                          const ledger::TxGraph& g, const valuation::RateTable& rates,
                          valuation::GapPolicy policy = valuation::GapPolicy::Strict);

// Origins of confirmed and likely ransom payments, one row per funding entity,
// descending by total. Unattributed value is reported under "unknown".
struct OriginRow {
    std::string entity;
    valuation::Usd confirmed;
    valuation::Usd likely;
    valuation::Usd total;
};

std::vector<OriginRow> origin_table(const std::vector<heur::RansomVerdict>& verdicts,
                                    const labels::LabelStore& labels, const ledger::TxGraph& g,
                                    const labels::EntityStore& entities,
                                    const cluster::CoSpendClusters* clusters,
                                    const valuation::RateTable& rates,
                                    valuation::GapPolicy policy = valuation::GapPolicy::Strict);

// Per-alias received USD over claimed-ownership addresses, descending.
std::vector<std::pair<std::string, valuation::Usd>> alias_earnings(
    const labels::LabelStore& labels, const ledger::TxGraph& g,
    const valuation::RateTable& rates, valuation::GapPolicy policy = valuation::GapPolicy::Strict);

// One-hop funding sources and spend destinations of labeled addresses,
// aggregated into entity-kind / risk buckets. Unknown counterparties excluded.
struct FlowEdge {
    std::string source;
    std::string target;
    valuation::Usd usd;
};

struct FlowReport {
    std::vector<FlowEdge> in_edges;  // bucket -> category
    std::vector<FlowEdge> out_edges; // category -> bucket
};

FlowReport flow_report(const labels::LabelStore& labels, const ledger::TxGraph& g,
                       const labels::EntityStore& entities,
                       const cluster::CoSpendClusters* clusters,
                       const valuation::RateTable& rates,
                       valuation::GapPolicy policy = valuation::GapPolicy::Strict);

// deterministic byte-for-byte writers
void write_summary_csv(const EconomicSummary& s, const std::filesystem::path& path);
void write_origins_csv(const std::vector<OriginRow>& rows, const std::filesystem::path& path);
void write_aliases_csv(const std::vector<std::pair<std::string, valuation::Usd>>& rows,
                       const std::filesystem::path& path);
void write_flows_csv(const FlowReport& report, const std::filesystem::path& path);
// plain digraph text consumable by standard diagram tools
void write_flows_graph_text(const FlowReport& report, const std::filesystem::path& path);

std::string flow_bucket(const labels::EntityRecord& rec); // e.g. "exchange:low"

} // namespace chaintrace::econ
