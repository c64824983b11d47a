#pragma once

#include "chaintrace/cospend.hpp"
#include "chaintrace/labels.hpp"
#include "chaintrace/txgraph.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace chaintrace::heur {

// Evidence that received funds were divided between exactly two destinations.
// The fraction is the smaller side's share of the spend's output value after
// change back to the source is removed, so fraction_small + fraction_large == 1.
struct SplitEvent {
    std::string address;
    std::string spend_txid;
    std::int64_t small_sats = 0;
    std::int64_t total_sats = 0; // denominator: both destination values
    int matched_percent = 0;     // multiple of 5 in [5, 50]
    double residual_pp = 0.0;    // |fraction*100 - matched_percent|, percentage points
    std::string small_destination;
    std::string large_destination;

    double fraction_small() const { return double(small_sats) / double(total_sats); }
};

// Examines the first spending transaction of the address's received funds.
// Returns an event iff it pays exactly two distinct destinations (change back
// to the address excluded) and the smaller share is within tol_pp of a
// multiple of 5%.
std::optional<SplitEvent> detect_split(const std::string& address, const ledger::TxGraph& g,
                                       double tol_pp = 0.5);

// Forward breadth-first walk over spend outputs, true iff a leak address is
// reached within max_hops transaction hops. Labeled exchanges absorb funds and
// are not expanded. When hit, out_path receives the transaction hop sequence.
bool reaches_leak(const std::string& address, const std::set<std::string>& leak_set,
                  const ledger::TxGraph& g, int max_hops, const labels::EntityStore& entities,
                  const cluster::CoSpendClusters* clusters = nullptr,
                  std::vector<std::string>* out_path = nullptr);

// One-hop funding attribution: each incoming transaction's credited value is
// divided across its input addresses' entities in proportion to input value.
// Unattributed value lands in the reserved "unknown" bucket; fractions sum to 1.
//
// taint_depth > 1 switches on the recursive haircut mode: value from an
// unlabeled input is attributed to that input's own funding composition, up
// to taint_depth hops back. Depth 1 is the default one-hop rule.
extern const char* const kUnknownEntity;
std::map<std::string, double> source_attribution(const std::string& address,
                                                 const ledger::TxGraph& g,
                                                 const labels::EntityStore& entities,
                                                 const cluster::CoSpendClusters* clusters = nullptr,
                                                 int taint_depth = 1);

enum class Strain { Ryuk, Conti };

struct DetectorParams {
    double tol_pp = 0.5;
    int max_hops = 8;
    double source_threshold = 0.99;            // strictly-greater-than test
    std::int64_t era_cutoff = 1583020800;      // 2020-03-01T00:00:00Z
    int taint_depth = 1;                       // 1 = one-hop source attribution
};

struct RansomVerdict {
    std::string address;
    bool reaches_leak = false;
    bool split_ok = false;
    bool source_ok = false;
    std::optional<Strain> strain; // set only on positive verdicts
    std::optional<SplitEvent> split;
    double clean_fraction = 0.0; // low-risk exchange + unlabeled cluster share
    std::vector<std::string> leak_path; // tx hops, when reaches_leak
    std::string notes;

    bool positive() const { return reaches_leak && split_ok && source_ok; }
};

// The three-criterion likely-ransom classifier: (1) leak reachability,
// (2) two-way split at a multiple of 5%, (3) >threshold of funds from
// low-risk exchanges or the unlabeled cluster. Positive verdicts are dated
// Ryuk before the era cutoff, Conti after.
RansomVerdict classify_ransom(const std::string& address, const std::set<std::string>& leak_set,
                              const ledger::TxGraph& g, const labels::EntityStore& entities,
                              const cluster::CoSpendClusters* clusters,
                              const DetectorParams& params = {});

const char* to_string(Strain s) noexcept;
std::optional<Strain> strain_from_string(const std::string& text);

// Verdict rows: address,verdict,percent,strain,residual,evidence. The evidence
// column carries the criterion flags, clean fraction, split txid and leak path,
// so a verdict file round-trips everything scoring needs.
void write_verdicts_csv(const std::vector<RansomVerdict>& verdicts,
                        const std::filesystem::path& path);
std::vector<RansomVerdict> read_verdicts_csv(const std::filesystem::path& path);

} // namespace chaintrace::heur
