#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chaintrace/cospend.hpp"
#include "chaintrace/econ.hpp"
#include "chaintrace/error.hpp"
#include "chaintrace/synth.hpp"

#include "support/fixtures.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

using namespace chaintrace;
using namespace chaintrace::synth;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ScenarioConfig small_config(std::uint64_t seed = 7) {
    ScenarioConfig cfg;
    cfg.victims = 12;
    cfg.near_miss_percent = 2;
    cfg.near_miss_no_path = 2;
    cfg.near_miss_dirty = 2;
    cfg.noise_txs = 5;
    cfg.seed = seed;
    return cfg;
}

std::vector<heur::RansomVerdict> run_detector(const GeneratedScenario& scenario,
                                              heur::DetectorParams params = {}) {
    const auto g = ledger::ingest(ledger::read_tx_file(scenario.transactions));
    const auto entities = labels::load_entities(scenario.entities);
    const auto clusters = cluster::cospend_clusters(g);
    std::set<std::string> leak_set;
    {
        std::ifstream in(scenario.leak_addresses);
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) leak_set.insert(line);
    }
    std::vector<heur::RansomVerdict> verdicts;
    for (const auto& address : g.addresses())
        verdicts.push_back(heur::classify_ransom(address, leak_set, g, entities, &clusters, params));
    return verdicts;
}

} // namespace

TEST_CASE("generated files pass every loader and the manifest matches the graph") {
    fixtures::TempDir tmp("synth-loaders");
    const auto scenario = generate(small_config(), tmp.path());

    const auto g = ledger::ingest(ledger::read_tx_file(scenario.transactions));
    const auto label_store = labels::load_labels(scenario.labels);
    const auto entities = labels::load_entities(scenario.entities);
    const auto rates = valuation::load_rates(scenario.rates);

    CHECK(g.tx_count() > 0);
    CHECK(entities.unlabeled_cluster_name().has_value());
    CHECK(rates.gaps().empty());

    // manifest universe is exactly the set of graph addresses
    const auto addresses = g.addresses();
    CHECK(addresses == scenario.truth.universe);
    CHECK(scenario.truth.positives.size() == 12);
    CHECK(scenario.truth.near_misses.size() == 6);
    CHECK(scenario.truth.confirmed.size() == 4);

    // every planted address exists and has a valid strain per the era rule
    for (const auto& p : scenario.truth.positives) {
        CHECK(g.contains_address(p.address));
        const bool before = g.first_seen(p.address) < 1583020800;
        CHECK((p.strain == heur::Strain::Ryuk) == before);
        double total = 0;
        for (const auto& [entity, fraction] : p.funding_fractions) total += fraction;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }

    // rate coverage spans every transaction date
    for (const auto& [txid, tx] : g.transactions())
        CHECK_NOTHROW((void)valuation::usd_value(1, tx.timestamp, rates));
}

TEST_CASE("same seed: byte-identical outputs; different seed: different economy") {
    fixtures::TempDir tmp("synth-determinism");
    const auto a = generate(small_config(7), tmp.path() / "a");
    const auto b = generate(small_config(7), tmp.path() / "b");
    const auto c = generate(small_config(8), tmp.path() / "c");

    for (const char* name :
         {"transactions.jsonl", "labels.csv", "entities.csv", "rates.csv", "leak_addresses.txt",
          "manifest.json"}) {
        CHECK(slurp(tmp.path() / "a" / name) == slurp(tmp.path() / "b" / name));
    }
    CHECK(slurp(tmp.path() / "a" / "transactions.jsonl") !=
          slurp(tmp.path() / "c" / "transactions.jsonl"));
}

TEST_CASE("zero victims is a valid (payroll-only) economy") {
    fixtures::TempDir tmp("synth-empty");
    ScenarioConfig cfg = small_config();
    cfg.victims = 0;
    cfg.near_miss_percent = cfg.near_miss_no_path = cfg.near_miss_dirty = 0;
    cfg.confirmed_leak = cfg.confirmed_crowdsourced = 0;
    const auto scenario = generate(cfg, tmp.path());
    CHECK(scenario.truth.positives.empty());
    CHECK_NOTHROW((void)ledger::ingest(ledger::read_tx_file(scenario.transactions)));
    CHECK_NOTHROW((void)labels::load_labels(scenario.labels));

    const auto verdicts = run_detector(scenario);
    const auto report = score(verdicts, scenario.truth);
    CHECK(report.recall == 1.0); // nothing planted, nothing to miss
    CHECK(report.precision == 1.0);
    CHECK(report.false_positives.empty());
}

TEST_CASE("invalid configs are rejected") {
    fixtures::TempDir tmp("synth-invalid");
    ScenarioConfig cfg = small_config();
    cfg.split_percents = {{20, 0.5}, {25, 0.4}}; // sums to 0.9
    CHECK_THROWS_WITH_AS((void)generate(cfg, tmp.path()), doctest::Contains("sum to 1"), Error);
    cfg = small_config();
    cfg.split_percents = {{22, 1.0}}; // off the 5% grid
    CHECK_THROWS_WITH_AS((void)generate(cfg, tmp.path()), doctest::Contains("multiple of 5"),
                         Error);
    cfg = small_config();
    cfg.victims = -1;
    CHECK_THROWS_AS((void)generate(cfg, tmp.path()), Error);
    cfg = small_config();
    cfg.exchanges = {{"Garantex", labels::Risk::Sanctioned}};
    CHECK_THROWS_WITH_AS((void)generate(cfg, tmp.path()), doctest::Contains("low-risk"), Error);
}

TEST_CASE("the detector at defaults scores perfectly; near-misses fail their named criterion") {
    fixtures::TempDir tmp("synth-score");
    const auto scenario = generate(small_config(), tmp.path());
    const auto verdicts = run_detector(scenario);

    const auto report = score(verdicts, scenario.truth);
    CHECK(report.precision == 1.0);
    CHECK(report.recall == 1.0);
    CHECK(report.true_positives.size() == scenario.truth.positives.size());

    // each near-miss is negative, and its verdict fails exactly the violated criterion
    std::map<std::string, const heur::RansomVerdict*> by_address;
    for (const auto& v : verdicts) by_address.emplace(v.address, &v);
    for (const auto& miss : scenario.truth.near_misses) {
        const auto& v = *by_address.at(miss.address);
        CHECK_FALSE(v.positive());
        if (miss.violated == "split_ok") {
            CHECK_FALSE(v.split_ok);
            CHECK(v.reaches_leak);
            CHECK(v.source_ok);
        } else if (miss.violated == "reaches_leak") {
            CHECK_FALSE(v.reaches_leak);
            CHECK(v.split_ok);
            CHECK(v.source_ok);
        } else {
            CHECK_FALSE(v.source_ok);
            CHECK(v.split_ok);
            CHECK(v.reaches_leak);
        }
    }

    // confirmed addresses are not detector targets in this economy
    for (const auto& confirmed : scenario.truth.confirmed)
        CHECK_FALSE(by_address.at(confirmed)->positive());
}

TEST_CASE("score reports the failed criterion when the tolerance is zeroed") {
    fixtures::TempDir tmp("synth-tol0");
    const auto scenario = generate(small_config(), tmp.path());
    heur::DetectorParams zero_tol;
    zero_tol.tol_pp = 0.0;
    const auto report = score(run_detector(scenario, zero_tol), scenario.truth);
    CHECK(report.recall < 1.0); // fee perturbation guarantees nonzero residuals
    CHECK(report.precision == 1.0);
    CHECK(report.fn_failed_criteria.count("split_ok") == 1);
    CHECK(report.fn_failed_criteria.at("split_ok") == report.false_negatives.size());
    CHECK(report.fn_failed_criteria.count("reaches_leak") == 0);
}

TEST_CASE("score rejects a mismatched address universe") {
    fixtures::TempDir tmp("synth-mismatch");
    const auto scenario = generate(small_config(), tmp.path());
    auto verdicts = run_detector(scenario);
    verdicts.pop_back();
    CHECK_THROWS_WITH_AS((void)score(verdicts, scenario.truth),
                         doctest::Contains("universes differ"), Error);
}

TEST_CASE("manifest round-trips through json") {
    fixtures::TempDir tmp("synth-manifest");
    const auto scenario = generate(small_config(), tmp.path());
    const auto loaded = load_manifest(scenario.manifest);
    CHECK(loaded.seed == scenario.truth.seed);
    CHECK(loaded.universe == scenario.truth.universe);
    CHECK(loaded.confirmed == scenario.truth.confirmed);
    CHECK(loaded.cospend_partition == scenario.truth.cospend_partition);
    CHECK(loaded.alias_payroll_cents == scenario.truth.alias_payroll_cents);
    CHECK(loaded.summary_cents == scenario.truth.summary_cents);
    CHECK(loaded.summary_counts == scenario.truth.summary_counts);
    REQUIRE(loaded.positives.size() == scenario.truth.positives.size());
    for (std::size_t i = 0; i < loaded.positives.size(); ++i) {
        CHECK(loaded.positives[i].address == scenario.truth.positives[i].address);
        CHECK(loaded.positives[i].percent == scenario.truth.positives[i].percent);
        CHECK(loaded.positives[i].strain == scenario.truth.positives[i].strain);
    }
}

TEST_CASE("manifest oracles drive the cross-module checks") {
    fixtures::TempDir tmp("synth-oracles");
    const auto scenario = generate(small_config(), tmp.path());
    const auto g = ledger::ingest(ledger::read_tx_file(scenario.transactions));
    const auto rates = valuation::load_rates(scenario.rates);
    const auto label_store = labels::load_labels(scenario.labels);

    // co-spend ground truth equals the library partition's non-singletons
    const auto clusters = cluster::cospend_clusters(g);
    std::vector<std::vector<std::string>> nontrivial;
    for (const auto& [rep, members] : clusters.partition())
        if (members.size() > 1) nontrivial.push_back(members);
    CHECK(nontrivial == scenario.truth.cospend_partition);

    // alias earnings equal the manifest payroll sums to the cent
    const auto earnings = econ::alias_earnings(label_store, g, rates);
    CHECK(earnings.size() == scenario.truth.alias_payroll_cents.size());
    for (const auto& [alias, usd] : earnings)
        CHECK(usd.cents == scenario.truth.alias_payroll_cents.at(alias));

    // summary rows equal the planted ledger sums; verdicts come straight from
    // the manifest so this checks aggregation, not the detector
    std::vector<heur::RansomVerdict> truth_verdicts;
    for (const auto& p : scenario.truth.positives) {
        heur::RansomVerdict v;
        v.address = p.address;
        v.reaches_leak = v.split_ok = v.source_ok = true;
        v.strain = p.strain;
        truth_verdicts.push_back(std::move(v));
    }
    const auto summary = econ::summarize(label_store, truth_verdicts, g, rates);
    for (const auto& row : summary.income) {
        CHECK(row.usd.cents == scenario.truth.summary_cents.at(row.name));
        CHECK(std::int64_t(row.address_count) == scenario.truth.summary_counts.at(row.name));
    }
    for (const auto& row : summary.expenses) {
        CHECK(row.usd.cents == scenario.truth.summary_cents.at(row.name));
        CHECK(std::int64_t(row.address_count) == scenario.truth.summary_counts.at(row.name));
    }
    CHECK(summary.confirmed_overlap == 1);

    // per-entity funding fractions equal the attribution fractions
    const auto entities = labels::load_entities(scenario.entities);
    for (const auto& p : scenario.truth.positives) {
        const auto fractions = heur::source_attribution(p.address, g, entities, &clusters);
        for (const auto& [entity, fraction] : p.funding_fractions)
            CHECK(fractions.at(entity) == doctest::Approx(fraction).epsilon(1e-9));
    }

    // split percents recovered per manifest
    for (const auto& p : scenario.truth.positives) {
        const auto event = heur::detect_split(p.address, g);
        REQUIRE(event.has_value());
        CHECK(event->matched_percent == p.percent);
        CHECK(event->residual_pp > 0.0);
        CHECK(event->residual_pp <= 0.5);
    }

    // flow-report conservation: each category's inflow is bounded by that
    // category's total received value, outflow by its total spent value
    const auto flows = econ::flow_report(label_store, g, entities, &clusters, rates);
    std::map<std::string, std::int64_t> in_cents, out_cents, received_cents, spent_cents;
    for (const auto& e : flows.in_edges) in_cents[e.target] += e.usd.cents;
    for (const auto& e : flows.out_edges) out_cents[e.source] += e.usd.cents;
    for (const auto& rec : label_store.records()) {
        if (!g.contains_address(rec.address)) continue;
        const std::string category = labels::to_string(rec.category);
        for (const auto& txid : g.funding_txids(rec.address)) {
            const auto& tx = g.tx(txid);
            std::int64_t credited = 0;
            for (const auto& slot : tx.outputs)
                if (slot.address == rec.address) credited += slot.value_sats;
            received_cents[category] +=
                valuation::usd_value(credited, tx.timestamp, rates).cents;
        }
        for (const auto& txid : g.spending_txids(rec.address)) {
            const auto& tx = g.tx(txid);
            std::int64_t contributed = 0;
            for (const auto& slot : tx.inputs)
                if (slot.address == rec.address) contributed += slot.value_sats;
            spent_cents[category] += valuation::usd_value(contributed, tx.timestamp, rates).cents;
        }
    }
    for (const auto& [category, cents] : in_cents) {
        CHECK(cents >= 0);
        CHECK(cents <= received_cents.at(category) + 1); // rounding slack
    }
    for (const auto& [category, cents] : out_cents) {
        CHECK(cents >= 0);
        CHECK(cents <= spent_cents.at(category) + 1);
    }
}

TEST_CASE("planted percent histogram tracks the configured distribution") {
    fixtures::TempDir tmp("synth-histogram");
    ScenarioConfig cfg;
    cfg.victims = 100;
    cfg.split_percents = {{20, 0.5}, {25, 0.3}, {40, 0.2}};
    cfg.seed = 31337;
    const auto scenario = generate(cfg, tmp.path());

    std::map<int, int> histogram;
    for (const auto& p : scenario.truth.positives) ++histogram[p.percent];
    std::size_t total = 0;
    for (const auto& [percent, count] : histogram) {
        CHECK(cfg.split_percents.count(percent) == 1);
        total += std::size_t(count);
        // seed-fixed draw; 3-sigma multinomial band around n*p
        const double expected = 100.0 * cfg.split_percents.at(percent);
        const double sigma = std::sqrt(expected * (1.0 - cfg.split_percents.at(percent)));
        CHECK(std::abs(double(count) - expected) <= 3.0 * sigma);
    }
    CHECK(total == 100);
    CHECK(histogram.at(20) > histogram.at(40)); // the mode is the mode
}

TEST_CASE("scenario configs load from keyed text") {
    fixtures::TempDir tmp("synth-config");
    {
        std::ofstream out(tmp.path() / "scenario.conf");
        out << "# benchmark scenario\n"
               "victims: 100\n"
               "split_percents: 20:0.45, 25:0.25, 30:0.15, 35:0.10, 5:0.05\n"
               "exchanges: Gemini:low, Kraken:low, Coinbase:low, Garantex:sanctioned\n"
               "noise_txs: 40\n"
               "seed: 99\n"
               "era_start: 2019-01-01\n"
               "era_end: 2021-01-01\n";
    }
    const auto cfg = load_scenario_config(tmp.path() / "scenario.conf");
    CHECK(cfg.victims == 100);
    CHECK(cfg.split_percents.at(20) == doctest::Approx(0.45));
    CHECK(cfg.split_percents.at(5) == doctest::Approx(0.05));
    CHECK(cfg.exchanges.size() == 4);
    CHECK(cfg.seed == 99);
    CHECK(format_date(cfg.era_start) == "2019-01-01");

    {
        std::ofstream out(tmp.path() / "bad.conf");
        out << "victims 100\n";
    }
    CHECK_THROWS_AS((void)load_scenario_config(tmp.path() / "bad.conf"), Error);
    {
        std::ofstream out(tmp.path() / "unknown.conf");
        out << "villains: 3\n";
    }
    CHECK_THROWS_WITH_AS((void)load_scenario_config(tmp.path() / "unknown.conf"),
                         doctest::Contains("unknown key"), Error);
}
