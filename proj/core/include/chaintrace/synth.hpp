#pragma once

#include "chaintrace/date.hpp"
#include "chaintrace/heuristics.hpp"
#include "chaintrace/labels.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace chaintrace::synth {

// A synthetic RaaS payment economy. Every planted positive satisfies the three
// detection criteria by construction; each near-miss negative violates exactly
// one named criterion. All randomness flows from the seed.
struct ScenarioConfig {
    int victims = 20;
    std::map<int, double> split_percents = {{20, 0.5}, {25, 0.3}, {30, 0.2}}; // percent -> prob
    int affiliates = 4;       // shared affiliate cash-out wallets
    int operators = 2;        // shared operator wallets paying salaries
    std::vector<std::pair<std::string, labels::Risk>> exchanges = {
        {"Gemini", labels::Risk::Low},
        {"Kraken", labels::Risk::Low},
        {"Garantex", labels::Risk::Sanctioned},
    };
    int unlabeled_cluster_wallets = 4;
    int noise_txs = 10;
    int fee_rate_min = 1, fee_rate_max = 50; // sats/vbyte, ~200 vbyte transactions
    CivilDate era_start{2019, 6, 1};
    CivilDate era_end{2021, 6, 1};
    std::uint64_t seed = 1;
    int near_miss_percent = 2; // split at an off-grid percent
    int near_miss_no_path = 2; // no route to a leak address
    int near_miss_dirty = 2;   // funded partly from a high-risk source
    int aliases = 6;           // payroll identities with claimed-ownership addresses
    int reimbursement_addresses = 4;
    int confirmed_leak = 2;         // confirmed ransom addresses annotated in the leak
    int confirmed_crowdsourced = 2; // confirmed ransom addresses from the crowdsourced set
    bool confirmed_overlap = true;  // one address annotated by both sources
};

ScenarioConfig load_scenario_config(const std::filesystem::path& path);

struct PlantedPositive {
    std::string address;
    int percent = 0; // the small, operator-kept side
    heur::Strain strain = heur::Strain::Conti;
    std::map<std::string, double> funding_fractions; // entity -> fraction
};

struct PlantedNegative {
    std::string address;
    std::string violated; // "split_ok" | "reaches_leak" | "source_ok"
};

struct GroundTruthManifest {
    std::uint64_t seed = 0;
    std::vector<PlantedPositive> positives;
    std::vector<PlantedNegative> near_misses;
    std::vector<std::string> confirmed; // labeled ransom addresses (not detector targets)
    std::vector<std::string> universe;  // every address in the transaction file, sorted
    std::vector<std::vector<std::string>> cospend_partition; // non-singleton clusters, sorted
    std::map<std::string, std::int64_t> alias_payroll_cents;
    std::map<std::string, std::int64_t> alias_payroll_sats;
    // planted ledger sums by economic-summary row name, usd cents / addresses
    std::map<std::string, std::int64_t> summary_cents;
    std::map<std::string, std::int64_t> summary_counts;
};

void save_manifest(const GroundTruthManifest& m, const std::filesystem::path& path);
GroundTruthManifest load_manifest(const std::filesystem::path& path);

struct GeneratedScenario {
    std::filesystem::path transactions; // transactions.jsonl
    std::filesystem::path labels;       // labels.csv
    std::filesystem::path entities;     // entities.csv
    std::filesystem::path rates;        // rates.csv
    std::filesystem::path leak_addresses; // leak_addresses.txt, one per line
    std::filesystem::path manifest;     // manifest.json
    GroundTruthManifest truth;
};

// Emits the five analysis inputs plus the manifest into out_dir. Outputs are
// byte-identical for a given config.
GeneratedScenario generate(const ScenarioConfig& config, const std::filesystem::path& out_dir);

struct ScoreReport {
    std::vector<std::string> true_positives;
    std::vector<std::string> false_positives;
    std::vector<std::string> false_negatives;
    double precision = 1.0; // 1.0 when nothing was flagged
    double recall = 1.0;    // 1.0 when nothing was planted
    std::map<std::string, std::size_t> fn_failed_criteria; // criterion -> count over FNs
};

// Exact set comparison of detector positives against manifest positives.
// Throws when the verdict file's address universe differs from the manifest's.
ScoreReport score(const std::vector<heur::RansomVerdict>& verdicts,
                  const GroundTruthManifest& manifest);

std::string format_score(const ScoreReport& report);

} // namespace chaintrace::synth
