#include <benchmark/benchmark.h>

#include "chaintrace/address.hpp"
#include "chaintrace/cospend.hpp"
#include "chaintrace/heuristics.hpp"
#include "chaintrace/synth.hpp"
#include "chaintrace/txgraph.hpp"
#include "chaintrace/valuation.hpp"

#include <filesystem>
#include <random>
#include <set>

using namespace chaintrace;

namespace {

std::vector<std::string> minted_addresses(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::uint8_t> payload{0x00};
        for (int k = 0; k < 20; ++k) payload.push_back(std::uint8_t(rng()));
        out.push_back(addr::encode(addr::Encoding::Base58Check, payload));
    }
    return out;
}

std::vector<ledger::Transaction> random_transactions(std::size_t n, std::size_t wallets,
                                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto pool = minted_addresses(wallets, seed);
    std::vector<ledger::Transaction> txs;
    txs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ledger::Transaction tx;
        char buf[72];
        std::snprintf(buf, sizeof buf, "%064zx", i + 1);
        tx.txid = buf;
        tx.timestamp = std::int64_t(1'600'000'000 + i);
        const int nin = 1 + int(rng() % 3);
        std::int64_t total = 0;
        for (int k = 0; k < nin; ++k) {
            const std::int64_t v = std::int64_t(1'000'000 + rng() % 100'000'000);
            tx.inputs.push_back({pool[rng() % pool.size()], v});
            total += v;
        }
        tx.fee_sats = 1'000;
        tx.outputs.push_back({pool[rng() % pool.size()], total - tx.fee_sats});
        txs.push_back(std::move(tx));
    }
    return txs;
}

void BM_ValidateBase58(benchmark::State& state) {
    const auto pool = minted_addresses(256, 7);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(addr::validate(pool[i++ % pool.size()]));
    }
}
BENCHMARK(BM_ValidateBase58);

void BM_Ingest(benchmark::State& state) {
    const auto txs = random_transactions(std::size_t(state.range(0)), 500, 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ledger::ingest(txs));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Ingest)->Range(1'000, 32'000)->Complexity();

void BM_CospendClusters(benchmark::State& state) {
    const auto g = ledger::ingest(random_transactions(std::size_t(state.range(0)), 800, 13));
    for (auto _ : state) {
        benchmark::DoNotOptimize(cluster::cospend_clusters(g));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CospendClusters)->Range(1'000, 16'000)->Complexity();

void BM_UsdValue(benchmark::State& state) {
    valuation::RateTable rates;
    const std::int64_t base = days_from_civil({2020, 1, 1});
    for (int i = 0; i < 900; ++i)
        rates.insert(civil_from_days(base + i), {2'345'678, 2});
    std::mt19937_64 rng(17);
    for (auto _ : state) {
        const std::int64_t sats = std::int64_t(rng() % 10'000'000'000);
        const std::int64_t ts = (base + std::int64_t(rng() % 900)) * 86'400;
        benchmark::DoNotOptimize(valuation::usd_value(sats, ts, rates));
    }
}
BENCHMARK(BM_UsdValue);

// full detector pass over a generated economy
void BM_DetectEconomy(benchmark::State& state) {
    const auto dir = std::filesystem::temp_directory_path() / "chaintrace-bench-economy";
    std::filesystem::remove_all(dir);
    synth::ScenarioConfig cfg;
    cfg.victims = int(state.range(0));
    cfg.noise_txs = int(state.range(0));
    const auto scenario = synth::generate(cfg, dir);
    const auto g = ledger::ingest(ledger::read_tx_file(scenario.transactions));
    const auto entities = labels::load_entities(scenario.entities);
    const auto clusters = cluster::cospend_clusters(g);
    const auto label_store = labels::load_labels(scenario.labels);
    std::set<std::string> leak_set;
    for (const auto& rec : label_store.records())
        if (rec.source == labels::Source::LeakAnnotation) leak_set.insert(rec.address);

    for (auto _ : state) {
        std::size_t positives = 0;
        for (const auto& address : g.addresses())
            positives +=
                heur::classify_ransom(address, leak_set, g, entities, &clusters).positive();
        benchmark::DoNotOptimize(positives);
    }
    state.SetComplexityN(state.range(0));
    std::filesystem::remove_all(dir);
}
BENCHMARK(BM_DetectEconomy)->Range(25, 200)->Complexity();

} // namespace

BENCHMARK_MAIN();
