#include "chaintrace/synth.hpp"

#include "chaintrace/address.hpp"
#include "chaintrace/csv.hpp"
#include "chaintrace/error.hpp"
#include "chaintrace/valuation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace chaintrace::synth {

using ledger::kSatsPerBtc;
using ledger::Transaction;
using ledger::TxSlot;
using nlohmann::json;

namespace {

constexpr std::int64_t kEraCutoff = 1583020800; // 2020-03-01T00:00:00Z
constexpr int kTxVbytes = 200;                  // flat fee model: rate * vbytes

// mt19937_64 raw output is pinned by the standard; the distribution adapters
// are not, so draws are reduced by hand
struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}

    std::uint64_t below(std::uint64_t n) { return engine() % n; }
    std::int64_t range(std::int64_t lo, std::int64_t hi) { // inclusive
        return lo + std::int64_t(below(std::uint64_t(hi - lo + 1)));
    }
    double unit() { return double(engine() >> 11) * 0x1.0p-53; }
};

class AddressMint {
public:
    explicit AddressMint(Rng& rng) : rng_(rng) {}

    std::string fresh() {
        ++count_;
        if (count_ % 7 == 0) {
            std::vector<std::uint8_t> program(20);
            for (auto& b : program) b = std::uint8_t(rng_.below(256));
            return addr::encode(addr::Encoding::Bech32, program);
        }
        std::vector<std::uint8_t> payload{0x00};
        for (int i = 0; i < 20; ++i) payload.push_back(std::uint8_t(rng_.below(256)));
        return addr::encode(addr::Encoding::Base58Check, payload);
    }

private:
    Rng& rng_;
    std::size_t count_ = 0;
};

std::string fresh_txid(Rng& rng, std::set<std::string>& used) {
    static const char* hex = "0123456789abcdef";
    for (;;) {
        std::string id(64, '0');
        for (auto& c : id) c = hex[rng.below(16)];
        if (used.insert(id).second) return id;
    }
}

void validate(const ScenarioConfig& c) {
    const auto bad = [](const std::string& why) { throw data_error("invalid scenario: " + why); };
    if (c.victims < 0 || c.near_miss_percent < 0 || c.near_miss_no_path < 0 ||
        c.near_miss_dirty < 0 || c.noise_txs < 0 || c.confirmed_leak < 0 ||
        c.confirmed_crowdsourced < 0 || c.reimbursement_addresses < 0)
        bad("negative count");
    if (c.aliases < 1 || c.operators < 1 || c.affiliates < 1) bad("needs aliases/operators/affiliates");
    if (c.unlabeled_cluster_wallets < 2) bad("unlabeled cluster needs at least 2 wallets");
    if (c.split_percents.empty()) bad("empty split distribution");
    double prob = 0.0;
    for (const auto& [percent, p] : c.split_percents) {
        if (percent < 5 || percent > 50 || percent % 5 != 0)
            bad("split percent " + std::to_string(percent) + " not a multiple of 5 in [5,50]");
        if (p < 0) bad("negative probability");
        prob += p;
    }
    if (std::abs(prob - 1.0) > 1e-9) bad("split probabilities must sum to 1");
    if (c.fee_rate_min < 1 || c.fee_rate_max < c.fee_rate_min) bad("bad fee rate range");
    if (days_from_civil(c.era_start) >= days_from_civil(c.era_end)) bad("era start not before end");
    bool has_low = false, has_risky = false;
    for (const auto& [name, risk] : c.exchanges) {
        if (name.empty()) bad("exchange with empty name");
        has_low |= risk == labels::Risk::Low;
        has_risky |= risk != labels::Risk::Low;
    }
    if (!has_low) bad("needs at least one low-risk exchange");
    if (c.near_miss_dirty > 0 && !has_risky) bad("dirty near-misses need a non-low-risk exchange");
}

int draw_percent(const ScenarioConfig& c, Rng& rng) {
    double x = rng.unit(), acc = 0.0;
    for (const auto& [percent, p] : c.split_percents) {
        acc += p;
        if (x < acc) return percent;
    }
    return c.split_percents.rbegin()->first;
}

struct Builder {
    const ScenarioConfig& cfg;
    Rng rng;
    AddressMint mint;
    std::set<std::string> txids;
    std::vector<Transaction> txs;
    valuation::RateTable rate_table;

    std::int64_t era_begin = 0, era_end = 0;

    explicit Builder(const ScenarioConfig& c) : cfg(c), rng(c.seed), mint(rng) {
        era_begin = timestamp_of_date(c.era_start);
        era_end = timestamp_of_date(c.era_end);
    }

    std::int64_t fee() { return rng.range(cfg.fee_rate_min, cfg.fee_rate_max) * kTxVbytes; }
    std::int64_t era_ts() { return rng.range(era_begin, era_end); }

    Transaction& emit(std::int64_t ts, std::vector<TxSlot> inputs, std::vector<TxSlot> outputs,
                      std::int64_t fee_sats) {
        Transaction tx;
        tx.txid = fresh_txid(rng, txids);
        tx.timestamp = ts;
        tx.inputs = std::move(inputs);
        tx.outputs = std::move(outputs);
        tx.fee_sats = fee_sats;
        txs.push_back(std::move(tx));
        return txs.back();
    }
};

} // namespace

GeneratedScenario generate(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    validate(cfg);
    std::filesystem::create_directories(out_dir);

    Builder b(cfg);

    // --- rate table: deterministic daily closes over the era plus margins ---
    std::ostringstream rates_csv;
    rates_csv << "date,close_usd\n";
    {
        const std::int64_t first = days_from_civil(cfg.era_start) - 30;
        const std::int64_t last = days_from_civil(cfg.era_end) + 45;
        for (std::int64_t d = first; d <= last; ++d) {
            const std::int64_t cents = 2'000'000 + 997 * ((d * 7919) % 3001);
            const CivilDate date = civil_from_days(d);
            rates_csv << format_date(date) << ',' << cents / 100 << '.';
            const int frac = int(cents % 100);
            rates_csv << char('0' + frac / 10) << char('0' + frac % 10) << '\n';
            b.rate_table.insert(date, valuation::Rate{cents, 2});
        }
    }

    // --- wallet universe ---
    struct Hot {
        std::string address;
        std::string entity;
        labels::Risk risk;
    };
    std::vector<Hot> low_risk_wallets, risky_wallets;
    std::vector<std::pair<std::string, std::string>> entity_rows; // key, "entity,kind,risk" tail
    for (const auto& [name, risk] : cfg.exchanges) {
        for (int i = 0; i < 2; ++i) {
            Hot hot{b.mint.fresh(), name, risk};
            entity_rows.emplace_back(hot.address, name + ",exchange," + labels::to_string(risk));
            (risk == labels::Risk::Low ? low_risk_wallets : risky_wallets).push_back(hot);
        }
    }

    std::vector<std::string> cluster_wallets;
    for (int i = 0; i < cfg.unlabeled_cluster_wallets; ++i)
        cluster_wallets.push_back(b.mint.fresh());
    const std::string cluster_rep = *std::min_element(cluster_wallets.begin(), cluster_wallets.end());
    static const char* kClusterEntity = "Unlabeled Cluster";
    entity_rows.emplace_back("cluster:" + cluster_rep,
                             std::string(kClusterEntity) + ",unlabeled-cluster,medium");

    // mint coinbases dwarf later change so no service wallet ever looks
    // cleanly funded
    const std::int64_t mint_ts = b.era_begin - 20 * 86400;
    {
        std::vector<TxSlot> outs;
        for (const auto& hot : low_risk_wallets) outs.push_back({hot.address, 100'000 * kSatsPerBtc});
        for (const auto& hot : risky_wallets) outs.push_back({hot.address, 100'000 * kSatsPerBtc});
        for (const auto& w : cluster_wallets) outs.push_back({w, 100'000 * kSatsPerBtc});
        b.emit(mint_ts, {}, std::move(outs), 0);
    }

    // payroll identities and the rest of the leaked annotation set
    struct SalaryAddr {
        std::string alias;
        std::string address;
    };
    std::vector<SalaryAddr> salaries;
    for (int i = 0; i < cfg.aliases; ++i) {
        char name[24];
        std::snprintf(name, sizeof name, "alias-%02d", i + 1);
        salaries.push_back({name, b.mint.fresh()});
    }
    std::vector<std::string> reimbursements;
    for (int i = 0; i < cfg.reimbursement_addresses; ++i) reimbursements.push_back(b.mint.fresh());

    std::vector<std::string> op_shared, aff_shared;
    for (int i = 0; i < cfg.operators; ++i) op_shared.push_back(b.mint.fresh());
    for (int i = 0; i < cfg.affiliates; ++i) aff_shared.push_back(b.mint.fresh());

    GroundTruthManifest truth;
    truth.seed = cfg.seed;
    for (const auto& s : salaries) {
        truth.alias_payroll_cents[s.alias] = 0;
        truth.alias_payroll_sats[s.alias] = 0;
    }
    for (const char* row : {"ransom-payments-leak", "ransom-payments-crowdsourced",
                            "likely-ransom-conti", "likely-ransom-ryuk", "salary",
                            "reimbursement", "reimbursement/salary"}) {
        truth.summary_cents[row] = 0;
        truth.summary_counts[row] = 0;
    }

    std::set<std::string> leak_set;
    for (const auto& s : salaries) leak_set.insert(s.address);
    for (const auto& r : reimbursements) leak_set.insert(r);

    // --- victims ---
    enum class Kind { Positive, OffPercent, NoPath, Dirty, ConfirmedLeak, ConfirmedCrowd };
    std::vector<Kind> plan;
    for (int i = 0; i < cfg.victims; ++i) plan.push_back(Kind::Positive);
    for (int i = 0; i < cfg.near_miss_percent; ++i) plan.push_back(Kind::OffPercent);
    for (int i = 0; i < cfg.near_miss_no_path; ++i) plan.push_back(Kind::NoPath);
    for (int i = 0; i < cfg.near_miss_dirty; ++i) plan.push_back(Kind::Dirty);
    for (int i = 0; i < cfg.confirmed_leak; ++i) plan.push_back(Kind::ConfirmedLeak);
    for (int i = 0; i < cfg.confirmed_crowdsourced; ++i) plan.push_back(Kind::ConfirmedCrowd);

    std::vector<std::pair<std::string, std::string>> label_rows; // address, tail
    std::size_t cluster_pair = 0;

    for (const Kind kind : plan) {
        const std::string payment = b.mint.fresh();
        const std::int64_t amount = b.rng.range(1, 30) * kSatsPerBtc + b.rng.range(0, kSatsPerBtc - 1);
        const std::int64_t funded_ts = b.era_ts();
        const std::int64_t change = b.rng.range(kSatsPerBtc / 10, 2 * kSatsPerBtc);
        const std::int64_t fund_fee = b.fee();
        const std::int64_t in_total = amount + change + fund_fee;
        const std::string internal_change = b.mint.fresh();

        std::map<std::string, double> fractions;
        std::vector<TxSlot> fund_inputs;
        if (kind == Kind::Dirty) {
            // roughly 60/40 between a low-risk wallet and a risky one
            const Hot& clean = low_risk_wallets[b.rng.below(low_risk_wallets.size())];
            const Hot& dirty = risky_wallets[b.rng.below(risky_wallets.size())];
            const std::int64_t clean_part = std::int64_t(std::llround(0.6 * double(in_total)));
            fund_inputs = {{clean.address, clean_part}, {dirty.address, in_total - clean_part}};
            fractions[clean.entity] += double(clean_part) / double(in_total);
            fractions[dirty.entity] += double(in_total - clean_part) / double(in_total);
        } else if (b.rng.unit() < 0.5) {
            // two cluster wallets co-spend; walking the pair index keeps the
            // whole cluster connected once enough victims exist
            const std::size_t i = cluster_pair++ % cluster_wallets.size();
            const std::size_t j = (i + 1) % cluster_wallets.size();
            const std::int64_t part = in_total / 2;
            fund_inputs = {{cluster_wallets[i], part}, {cluster_wallets[j], in_total - part}};
            fractions[kClusterEntity] = 1.0;
        } else {
            const Hot& hot = low_risk_wallets[b.rng.below(low_risk_wallets.size())];
            fund_inputs = {{hot.address, in_total}};
            fractions[hot.entity] = 1.0;
        }
        b.emit(funded_ts, std::move(fund_inputs),
               {{payment, amount}, {internal_change, change}}, fund_fee);

        const bool splits = kind != Kind::ConfirmedLeak && kind != Kind::ConfirmedCrowd;
        const std::int64_t spend_ts = funded_ts + b.rng.range(3600, 86400);
        const std::int64_t spend_fee = b.fee();
        const std::string op_entry = b.mint.fresh();
        std::int64_t op_side = amount - spend_fee; // whole amount for confirmed victims

        if (splits) {
            const int percent = draw_percent(cfg, b.rng);
            const double effective =
                kind == Kind::OffPercent ? double(percent) + 1.7 : double(percent);
            const std::int64_t small = std::int64_t(std::llround(double(amount) * effective / 100.0));
            op_side = small;
            const std::string affiliate = aff_shared[b.rng.below(aff_shared.size())];
            b.emit(spend_ts, {{payment, amount}},
                   {{op_entry, small}, {affiliate, amount - spend_fee - small}}, spend_fee);

            if (kind == Kind::Positive) {
                PlantedPositive pos;
                pos.address = payment;
                pos.percent = percent;
                pos.strain = funded_ts < kEraCutoff ? heur::Strain::Ryuk : heur::Strain::Conti;
                pos.funding_fractions = fractions;
                const char* row =
                    pos.strain == heur::Strain::Ryuk ? "likely-ransom-ryuk" : "likely-ransom-conti";
                truth.summary_cents[row] +=
                    valuation::usd_value(amount, funded_ts, b.rate_table).cents;
                ++truth.summary_counts[row];
                truth.positives.push_back(std::move(pos));
            } else if (kind == Kind::OffPercent) {
                truth.near_misses.push_back({payment, "split_ok"});
            } else if (kind == Kind::NoPath) {
                truth.near_misses.push_back({payment, "reaches_leak"});
            } else if (kind == Kind::Dirty) {
                truth.near_misses.push_back({payment, "source_ok"});
            }
        } else {
            // confirmed addresses forward everything in one piece
            b.emit(spend_ts, {{payment, amount}}, {{op_entry, amount - spend_fee}}, spend_fee);
            truth.confirmed.push_back(payment);
            const char* row = kind == Kind::ConfirmedLeak ? "ransom-payments-leak"
                                                          : "ransom-payments-crowdsourced";
            truth.summary_cents[row] += valuation::usd_value(amount, funded_ts, b.rate_table).cents;
            ++truth.summary_counts[row];
            if (kind == Kind::ConfirmedLeak) {
                label_rows.emplace_back(payment, "ransom-payment,,confirmed in leak,leak");
                leak_set.insert(payment);
            } else {
                label_rows.emplace_back(payment, "ransom-payment,,crowdsourced,crowdsourced");
            }
        }

        // operator-side chain: a few fresh hops, then a shared operator wallet
        // (which pays the leak addresses); no-path victims drain into an
        // exchange instead, which the traversal will not cross
        std::int64_t hop_value = op_side;
        std::int64_t hop_ts = spend_ts;
        const int intermediate_hops = int(b.rng.below(4));
        std::string current = op_entry;
        for (int h = 0; h < intermediate_hops; ++h) {
            const std::string next = b.mint.fresh();
            const std::int64_t hop_fee = b.fee();
            hop_ts += b.rng.range(600, 7200);
            b.emit(hop_ts, {{current, hop_value}}, {{next, hop_value - hop_fee}}, hop_fee);
            current = next;
            hop_value -= hop_fee;
        }
        const std::int64_t final_fee = b.fee();
        hop_ts += b.rng.range(600, 7200);
        if (kind == Kind::NoPath) {
            const Hot& sink = low_risk_wallets[b.rng.below(low_risk_wallets.size())];
            b.emit(hop_ts, {{current, hop_value}}, {{sink.address, hop_value - final_fee}},
                   final_fee);
        } else {
            const std::string& op = op_shared[b.rng.below(op_shared.size())];
            b.emit(hop_ts, {{current, hop_value}}, {{op, hop_value - final_fee}}, final_fee);
        }
    }

    // --- payroll: operator wallets fund the leaked salary and reimbursement
    // addresses; these credits are what the chains above eventually reach ---
    const auto pay_salary = [&](const SalaryAddr& s, const std::string& op) {
        const std::int64_t v = b.rng.range(kSatsPerBtc / 20, 2 * kSatsPerBtc);
        const std::int64_t ts = b.era_ts();
        const std::int64_t pay_fee = b.fee();
        b.emit(ts, {{op, v + pay_fee}}, {{s.address, v}}, pay_fee);
        truth.alias_payroll_sats[s.alias] += v;
        truth.alias_payroll_cents[s.alias] += valuation::usd_value(v, ts, b.rate_table).cents;
    };
    // every operator wallet must fund at least one leak address, or chains
    // routed through it would never reach the leak set
    for (std::size_t i = 0; i < op_shared.size(); ++i)
        pay_salary(salaries[i % salaries.size()], op_shared[i]);
    for (const auto& s : salaries) {
        const int extra = int(b.rng.below(2));
        for (int k = 0; k < extra; ++k) pay_salary(s, op_shared[b.rng.below(op_shared.size())]);
        label_rows.emplace_back(s.address, "salary,,monthly payout,leak");
        label_rows.emplace_back(s.address, "claimed-ownership," + s.alias + ",owns wallet,leak");
    }
    for (const auto& r : reimbursements) {
        const std::int64_t v = b.rng.range(kSatsPerBtc / 50, kSatsPerBtc);
        const std::int64_t ts = b.era_ts();
        const std::int64_t pay_fee = b.fee();
        b.emit(ts, {{op_shared[b.rng.below(op_shared.size())], v + pay_fee}}, {{r, v}}, pay_fee);
        truth.summary_cents["reimbursement"] += valuation::usd_value(v, ts, b.rate_table).cents;
        label_rows.emplace_back(r, "reimbursement,,tooling,leak");
    }
    truth.summary_counts["reimbursement"] = std::int64_t(reimbursements.size());
    for (const auto& [alias, cents] : truth.alias_payroll_cents)
        truth.summary_cents["salary"] += cents;
    truth.summary_counts["salary"] = std::int64_t(salaries.size());

    // overlap: one confirmed address annotated by both sources
    if (cfg.confirmed_overlap && cfg.confirmed_leak > 0) {
        for (const auto& [address, tail] : label_rows) {
            if (tail.rfind("ransom-payment,,confirmed in leak", 0) == 0) {
                label_rows.emplace_back(address, "ransom-payment,,also crowdsourced,crowdsourced");
                break;
            }
        }
    }

    // affiliates cash out at exchanges; the traversal stops there
    for (const auto& affiliate : aff_shared) {
        const std::int64_t v = b.rng.range(kSatsPerBtc, 10 * kSatsPerBtc);
        const std::int64_t cash_fee = b.fee();
        const Hot& sink = low_risk_wallets[b.rng.below(low_risk_wallets.size())];
        b.emit(b.era_ts(), {{affiliate, v}}, {{sink.address, v - cash_fee}}, cash_fee);
    }

    // co-spend pairs among salary addresses, cashing out to an exchange
    for (std::size_t i = 0; i + 1 < salaries.size() && i < 4; i += 2) {
        const std::int64_t part = b.rng.range(kSatsPerBtc / 100, kSatsPerBtc / 10);
        const std::int64_t cash_fee = b.fee();
        const Hot& sink = low_risk_wallets[b.rng.below(low_risk_wallets.size())];
        b.emit(b.era_end + std::int64_t(i + 1) * 3600,
               {{salaries[i].address, part}, {salaries[i + 1].address, part}},
               {{sink.address, 2 * part - cash_fee}}, cash_fee);
    }

    // sweep that keeps the unlabeled cluster one component
    {
        std::vector<TxSlot> ins;
        for (const auto& w : cluster_wallets) ins.push_back({w, kSatsPerBtc});
        const std::int64_t sweep_fee = b.fee();
        b.emit(b.era_end + 10 * 86400, std::move(ins),
               {{cluster_wallets.front(),
                 std::int64_t(cluster_wallets.size()) * kSatsPerBtc - sweep_fee}},
               sweep_fee);
    }

    // --- noise traffic in an isolated wallet pool ---
    if (cfg.noise_txs > 0) {
        std::vector<std::string> noise;
        for (int i = 0; i < cfg.noise_txs; ++i) noise.push_back(b.mint.fresh());
        std::vector<TxSlot> outs;
        for (const auto& w : noise) outs.push_back({w, 10 * kSatsPerBtc});
        b.emit(mint_ts + 600, {}, std::move(outs), 0);
        for (int i = 0; i < cfg.noise_txs; ++i) {
            const std::string next = b.mint.fresh();
            const std::int64_t v = b.rng.range(kSatsPerBtc / 10, 5 * kSatsPerBtc);
            const std::int64_t noise_fee = b.fee();
            b.emit(b.era_ts(), {{noise[std::size_t(i)], v}}, {{next, v - noise_fee}}, noise_fee);
        }
    }

    // --- write files ---
    std::stable_sort(b.txs.begin(), b.txs.end(), [](const Transaction& x, const Transaction& y) {
        return x.timestamp != y.timestamp ? x.timestamp < y.timestamp : x.txid < y.txid;
    });

    GeneratedScenario out;
    out.transactions = out_dir / "transactions.jsonl";
    out.labels = out_dir / "labels.csv";
    out.entities = out_dir / "entities.csv";
    out.rates = out_dir / "rates.csv";
    out.leak_addresses = out_dir / "leak_addresses.txt";
    out.manifest = out_dir / "manifest.json";

    // write-then-rename so consumers never see half a scenario
    const auto emit_text = [](const std::filesystem::path& path, const std::string& content) {
        const auto tmp = path.string() + ".tmp";
        {
            std::ofstream f(tmp, std::ios::binary);
            if (!f) throw data_error("cannot write " + tmp);
            f << content;
        }
        std::filesystem::rename(tmp, path);
    };

    {
        std::ostringstream txt;
        for (const auto& tx : b.txs) txt << ledger::format_tx_record(tx) << '\n';
        emit_text(out.transactions, txt.str());
    }
    {
        std::ostringstream txt;
        txt << "address,category,alias,note,source\n";
        for (const auto& [address, tail] : label_rows) txt << address << ',' << tail << '\n';
        emit_text(out.labels, txt.str());
    }
    {
        std::ostringstream txt;
        txt << "address_or_cluster,entity,kind,risk\n";
        for (const auto& [key, tail] : entity_rows) txt << key << ',' << tail << '\n';
        emit_text(out.entities, txt.str());
    }
    emit_text(out.rates, rates_csv.str());
    {
        std::ostringstream txt;
        for (const auto& a : leak_set) txt << a << '\n';
        emit_text(out.leak_addresses, txt.str());
    }

    // --- ground truth derived straight from the emitted transactions ---
    std::set<std::string> universe;
    for (const auto& tx : b.txs) {
        for (const auto& s : tx.inputs) universe.insert(s.address);
        for (const auto& s : tx.outputs) universe.insert(s.address);
    }
    truth.universe.assign(universe.begin(), universe.end());

    {
        // plain connected components over co-input pairs
        std::map<std::string, std::string> parent;
        const std::function<std::string(std::string)> find = [&](std::string x) {
            while (parent[x] != x) {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            return x;
        };
        for (const auto& a : truth.universe) parent[a] = a;
        for (const auto& tx : b.txs)
            for (std::size_t i = 1; i < tx.inputs.size(); ++i) {
                const std::string ra = find(tx.inputs[0].address);
                const std::string rb = find(tx.inputs[i].address);
                if (ra != rb) parent[rb < ra ? ra : rb] = rb < ra ? rb : ra;
            }
        std::map<std::string, std::vector<std::string>> groups;
        for (const auto& a : truth.universe) groups[find(a)].push_back(a);
        for (auto& [rep, members] : groups)
            if (members.size() > 1) truth.cospend_partition.push_back(members);
    }

    std::sort(truth.positives.begin(), truth.positives.end(),
              [](const PlantedPositive& x, const PlantedPositive& y) { return x.address < y.address; });
    std::sort(truth.near_misses.begin(), truth.near_misses.end(),
              [](const PlantedNegative& x, const PlantedNegative& y) { return x.address < y.address; });
    std::sort(truth.confirmed.begin(), truth.confirmed.end());

    out.truth = truth;
    save_manifest(truth, out.manifest);
    return out;
}

void save_manifest(const GroundTruthManifest& m, const std::filesystem::path& path) {
    json doc;
    doc["seed"] = m.seed;
    doc["positives"] = json::array();
    for (const auto& p : m.positives)
        doc["positives"].push_back({{"address", p.address},
                                    {"percent", p.percent},
                                    {"strain", heur::to_string(p.strain)},
                                    {"funding", p.funding_fractions}});
    doc["near_misses"] = json::array();
    for (const auto& n : m.near_misses)
        doc["near_misses"].push_back({{"address", n.address}, {"violated", n.violated}});
    doc["confirmed"] = m.confirmed;
    doc["universe"] = m.universe;
    doc["cospend_partition"] = m.cospend_partition;
    doc["alias_payroll_cents"] = m.alias_payroll_cents;
    doc["alias_payroll_sats"] = m.alias_payroll_sats;
    doc["summary_cents"] = m.summary_cents;
    doc["summary_counts"] = m.summary_counts;

    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw data_error("cannot write manifest " + tmp);
        f << doc.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

GroundTruthManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw data_error("cannot open manifest " + path.string());
    json doc;
    try {
        f >> doc;
    } catch (const json::exception& e) {
        throw data_error("bad manifest: " + std::string(e.what()));
    }
    GroundTruthManifest m;
    try {
        m.seed = doc.at("seed").get<std::uint64_t>();
        for (const auto& p : doc.at("positives")) {
            PlantedPositive pos;
            pos.address = p.at("address").get<std::string>();
            pos.percent = p.at("percent").get<int>();
            const auto strain = heur::strain_from_string(p.at("strain").get<std::string>());
            if (!strain) throw data_error("bad strain in manifest");
            pos.strain = *strain;
            pos.funding_fractions =
                p.at("funding").get<std::map<std::string, double>>();
            m.positives.push_back(std::move(pos));
        }
        for (const auto& n : doc.at("near_misses"))
            m.near_misses.push_back(
                {n.at("address").get<std::string>(), n.at("violated").get<std::string>()});
        m.confirmed = doc.at("confirmed").get<std::vector<std::string>>();
        m.universe = doc.at("universe").get<std::vector<std::string>>();
        m.cospend_partition =
            doc.at("cospend_partition").get<std::vector<std::vector<std::string>>>();
        m.alias_payroll_cents =
            doc.at("alias_payroll_cents").get<std::map<std::string, std::int64_t>>();
        m.alias_payroll_sats =
            doc.at("alias_payroll_sats").get<std::map<std::string, std::int64_t>>();
        m.summary_cents = doc.at("summary_cents").get<std::map<std::string, std::int64_t>>();
        m.summary_counts = doc.at("summary_counts").get<std::map<std::string, std::int64_t>>();
    } catch (const json::exception& e) {
        throw data_error("bad manifest: " + std::string(e.what()));
    }
    return m;
}

ScoreReport score(const std::vector<heur::RansomVerdict>& verdicts,
                  const GroundTruthManifest& manifest) {
    std::set<std::string> verdict_universe;
    std::map<std::string, const heur::RansomVerdict*> by_address;
    for (const auto& v : verdicts) {
        verdict_universe.insert(v.address);
        by_address.emplace(v.address, &v);
    }
    const std::set<std::string> manifest_universe(manifest.universe.begin(),
                                                  manifest.universe.end());
    if (verdict_universe != manifest_universe)
        throw data_error("manifest mismatch: verdict and manifest address universes differ (" +
                         std::to_string(verdict_universe.size()) + " vs " +
                         std::to_string(manifest_universe.size()) + ")");

    std::set<std::string> truth;
    for (const auto& p : manifest.positives) truth.insert(p.address);

    ScoreReport report;
    for (const auto& v : verdicts) {
        if (!v.positive()) continue;
        (truth.count(v.address) ? report.true_positives : report.false_positives)
            .push_back(v.address);
    }
    for (const auto& a : truth)
        if (!by_address.at(a)->positive()) report.false_negatives.push_back(a);

    const auto tp = double(report.true_positives.size());
    if (tp + double(report.false_positives.size()) > 0)
        report.precision = tp / (tp + double(report.false_positives.size()));
    if (!truth.empty()) report.recall = tp / double(truth.size());

    for (const auto& a : report.false_negatives) {
        const auto& v = *by_address.at(a);
        if (!v.reaches_leak) ++report.fn_failed_criteria["reaches_leak"];
        if (!v.split_ok) ++report.fn_failed_criteria["split_ok"];
        if (!v.source_ok) ++report.fn_failed_criteria["source_ok"];
    }
    std::sort(report.true_positives.begin(), report.true_positives.end());
    std::sort(report.false_positives.begin(), report.false_positives.end());
    std::sort(report.false_negatives.begin(), report.false_negatives.end());
    return report;
}

std::string format_score(const ScoreReport& r) {
    std::ostringstream out;
    out << "precision=" << r.precision << " recall=" << r.recall
        << " tp=" << r.true_positives.size() << " fp=" << r.false_positives.size()
        << " fn=" << r.false_negatives.size() << '\n';
    for (const auto& [criterion, count] : r.fn_failed_criteria)
        out << "  fn-criterion " << criterion << ": " << count << '\n';
    return out.str();
}

namespace {

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : value) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

} // namespace

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open scenario config " + path.string());
    ScenarioConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto colon = line.find(':');
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const std::string where = path.filename().string() + ":" + std::to_string(lineno);
        if (colon == std::string::npos) throw data_error(where + ": expected 'key: value'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, colon));
        const std::string value = trim(line.substr(colon + 1));
        try {
            if (key == "victims") cfg.victims = std::stoi(value);
            else if (key == "affiliates") cfg.affiliates = std::stoi(value);
            else if (key == "operators") cfg.operators = std::stoi(value);
            else if (key == "unlabeled_cluster_wallets") cfg.unlabeled_cluster_wallets = std::stoi(value);
            else if (key == "noise_txs") cfg.noise_txs = std::stoi(value);
            else if (key == "fee_rate_min") cfg.fee_rate_min = std::stoi(value);
            else if (key == "fee_rate_max") cfg.fee_rate_max = std::stoi(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "near_miss_percent") cfg.near_miss_percent = std::stoi(value);
            else if (key == "near_miss_no_path") cfg.near_miss_no_path = std::stoi(value);
            else if (key == "near_miss_dirty") cfg.near_miss_dirty = std::stoi(value);
            else if (key == "aliases") cfg.aliases = std::stoi(value);
            else if (key == "reimbursement_addresses") cfg.reimbursement_addresses = std::stoi(value);
            else if (key == "confirmed_leak") cfg.confirmed_leak = std::stoi(value);
            else if (key == "confirmed_crowdsourced") cfg.confirmed_crowdsourced = std::stoi(value);
            else if (key == "confirmed_overlap") cfg.confirmed_overlap = value == "true" || value == "1";
            else if (key == "era_start" || key == "era_end") {
                const auto date = parse_date(value);
                if (!date) throw data_error(where + ": bad date '" + value + "'");
                (key == "era_start" ? cfg.era_start : cfg.era_end) = *date;
            } else if (key == "split_percents") {
                cfg.split_percents.clear();
                for (const auto& item : split_list(value)) {
                    const auto sep = item.find(':');
                    if (sep == std::string::npos)
                        throw data_error(where + ": expected percent:prob");
                    cfg.split_percents[std::stoi(item.substr(0, sep))] =
                        std::stod(item.substr(sep + 1));
                }
            } else if (key == "exchanges") {
                cfg.exchanges.clear();
                for (const auto& item : split_list(value)) {
                    const auto sep = item.find(':');
                    if (sep == std::string::npos)
                        throw data_error(where + ": expected name:risk");
                    const auto risk = labels::risk_from_string(item.substr(sep + 1));
                    if (!risk) throw data_error(where + ": bad risk in '" + item + "'");
                    cfg.exchanges.emplace_back(item.substr(0, sep), *risk);
                }
            } else {
                throw data_error(where + ": unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw data_error(where + ": bad value '" + value + "'");
        } catch (const std::out_of_range&) {
            throw data_error(where + ": value out of range '" + value + "'");
        }
    }
    return cfg;
}

} // namespace chaintrace::synth
