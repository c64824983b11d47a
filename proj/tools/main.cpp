// chaintrace: transaction-graph forensics over chat-mentioned payment
// addresses. Subcommands cover the full pipeline: extract addresses from chat
// corpora, ingest and value transactions, detect likely ransom payments via
// split/reachability/funding criteria, cluster co-spending wallets, and emit
// income/expense and flow reports. Every run is appended to a run log with
// content digests of its inputs and outputs.

#include "chaintrace/chat.hpp"
#include "chaintrace/cospend.hpp"
#include "chaintrace/csv.hpp"
#include "chaintrace/econ.hpp"
#include "chaintrace/error.hpp"
#include "chaintrace/extract.hpp"
#include "chaintrace/fetch.hpp"
#include "chaintrace/heuristics.hpp"
#include "chaintrace/labels.hpp"
#include "chaintrace/runlog.hpp"
#include "chaintrace/synth.hpp"
#include "chaintrace/txgraph.hpp"
#include "chaintrace/valuation.hpp"
#include "chaintrace/worksheet.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <set>

namespace fs = std::filesystem;
using namespace chaintrace;

namespace {

struct RunContext {
    std::string subcommand;
    fs::path out_dir = "out";
    fs::path log_path; // defaults to <out>/run_log.jsonl
    std::uint64_t seed = 1;
    std::map<std::string, std::string> params;
    std::map<std::string, std::string> input_digests;
    std::map<std::string, std::string> output_digests;

    void note_param(const std::string& key, const std::string& value) { params[key] = value; }

    // digests are keyed by file name so two runs over the same inputs compare
    // equal regardless of where their output directories live
    static void note(std::map<std::string, std::string>& digests, const fs::path& path) {
        std::string key = path.filename().string();
        const std::string digest = run::file_digest(path);
        for (int n = 2; digests.count(key) && digests[key] != digest; ++n)
            key = path.filename().string() + "#" + std::to_string(n);
        digests[key] = digest;
    }

    void note_input(const fs::path& path) { note(input_digests, path); }
    void note_output(const fs::path& path) { note(output_digests, path); }

    std::string run_id() const {
        return run::compute_run_id(subcommand, params, input_digests);
    }

    void commit() {
        run::RunRecord rec;
        rec.run_id = run_id();
        rec.subcommand = subcommand;
        rec.params = params;
        rec.input_digests = input_digests;
        rec.output_digests = output_digests;
        rec.timestamp = std::chrono::duration_cast<std::chrono::seconds>(
                            std::chrono::system_clock::now().time_since_epoch())
                            .count();
        const fs::path log = log_path.empty() ? out_dir / "run_log.jsonl" : log_path;
        run::append_run_record(log, rec);
        std::cout << "run " << rec.run_id << " logged to " << log.string() << "\n";
    }
};

// outputs land under their final name only once fully written
template <typename WriteFn>
void emit_file(RunContext& ctx, const fs::path& path, WriteFn&& write) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    write(tmp);
    fs::rename(tmp, path);
    ctx.note_output(path);
}

std::vector<fs::path> to_paths(const std::vector<std::string>& names) {
    return {names.begin(), names.end()};
}

ledger::TxGraph load_graph(RunContext& ctx, const std::vector<std::string>& tx_files) {
    std::vector<ledger::Transaction> records;
    for (const auto& f : tx_files) {
        ctx.note_input(f);
        auto txs = ledger::read_tx_file(f);
        records.insert(records.end(), std::make_move_iterator(txs.begin()),
                       std::make_move_iterator(txs.end()));
    }
    return ledger::ingest(records);
}

std::set<std::string> load_address_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open address file " + path.string());
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.insert(line);
    }
    return out;
}

valuation::GapPolicy gap_policy_from(const std::string& name) {
    if (name == "strict") return valuation::GapPolicy::Strict;
    if (name == "carry") return valuation::GapPolicy::CarryForward;
    throw usage_error("unknown gap policy '" + name + "' (strict|carry)");
}

// ---------------------------------------------------------------- extract --

int cmd_extract(RunContext& ctx, const std::vector<std::string>& corpus_files) {
    for (const auto& f : corpus_files) ctx.note_input(f);
    const auto corpus = chat::load_corpus(to_paths(corpus_files));
    const auto candidates = addr::extract_candidates(corpus);
    const auto grouped = addr::dedupe(candidates);

    std::size_t valid_mentions = 0;
    for (const auto& [canonical, group] : grouped) valid_mentions += group.mentions.size();

    emit_file(ctx, ctx.out_dir / "candidates.csv", [&](const fs::path& p) {
        std::ofstream out(p, std::ios::binary);
        out << "address,message_id,begin,end\n";
        for (const auto& [canonical, group] : grouped)
            for (const auto& mention : group.mentions)
                out << csv::join({canonical, std::to_string(mention.span.message_id),
                                  std::to_string(mention.span.begin),
                                  std::to_string(mention.span.end)})
                    << '\n';
    });

    std::cout << "messages=" << corpus.size() << " candidates=" << candidates.size()
              << " valid_mentions=" << valid_mentions << " unique_addresses=" << grouped.size()
              << "\n";
    ctx.commit();
    return 0;
}

// --------------------------------------------------------------- validate --

int cmd_validate(RunContext& ctx, std::vector<std::string> addresses,
                 const std::string& addr_file) {
    if (!addr_file.empty()) {
        ctx.note_input(addr_file);
        for (const auto& a : load_address_lines(addr_file)) addresses.push_back(a);
    }
    if (addresses.empty()) throw usage_error("validate needs --addr or --addr-file");
    std::size_t ok = 0;
    for (const auto& a : addresses) {
        const auto result = addr::validate(a);
        if (addr::is_valid(result)) {
            const auto& address = std::get<addr::Address>(result);
            std::cout << a << " ok " << addr::to_string(address.script_kind) << "\n";
            ++ok;
        } else {
            const auto& failure = std::get<addr::ValidationFailure>(result);
            std::cout << a << " invalid " << addr::to_string(failure.rule) << " ("
                      << failure.detail << ")\n";
        }
    }
    std::cout << "valid=" << ok << " invalid=" << addresses.size() - ok << "\n";
    ctx.commit();
    return 0;
}

// ----------------------------------------------------------------- ingest --

int cmd_ingest(RunContext& ctx, const std::vector<std::string>& tx_files) {
    const auto graph = load_graph(ctx, tx_files);
    std::cout << "transactions=" << graph.tx_count() << " addresses=" << graph.addresses().size()
              << "\n";
    ctx.commit();
    return 0;
}

// ------------------------------------------------------------------ fetch --

int cmd_fetch(RunContext& ctx, const std::string& addr_file, const std::string& cache_dir,
              const std::string& endpoint, double rate) {
    ctx.note_input(addr_file);
    ledger::FetchClient client({endpoint, cache_dir, rate});
    std::size_t total = 0;
    for (const auto& a : load_address_lines(addr_file)) {
        const bool was_cached = client.cached(a);
        const auto txs = client.fetch_address_history(a);
        total += txs.size();
        std::cout << a << " txs=" << txs.size() << (was_cached ? " (cache)" : "") << "\n";
        ctx.note_output(fs::path(cache_dir) / (a + ".jsonl"));
    }
    std::cout << "fetched_transactions=" << total << "\n";
    ctx.commit();
    return 0;
}

// ----------------------------------------------------------------- detect --

int cmd_detect(RunContext& ctx, const std::vector<std::string>& tx_files,
               const std::string& leak_file, const std::string& entity_file, double tol_pp,
               int max_hops, double threshold, const std::string& cutoff, int taint_depth,
               const std::string& emit_labels) {
    const auto graph = load_graph(ctx, tx_files);
    ctx.note_input(leak_file);
    const auto leak_set = load_address_lines(leak_file);
    ctx.note_input(entity_file);
    const auto entities = labels::load_entities(entity_file);
    const auto clusters = cluster::cospend_clusters(graph);

    heur::DetectorParams params;
    params.tol_pp = tol_pp;
    params.max_hops = max_hops;
    params.source_threshold = threshold;
    params.taint_depth = taint_depth;
    const auto cutoff_ts = parse_timestamp(cutoff);
    if (!cutoff_ts) throw usage_error("bad --cutoff date '" + cutoff + "'");
    params.era_cutoff = *cutoff_ts;

    std::vector<heur::RansomVerdict> verdicts;
    std::size_t positives = 0;
    for (const auto& address : graph.addresses()) {
        verdicts.push_back(
            heur::classify_ransom(address, leak_set, graph, entities, &clusters, params));
        positives += verdicts.back().positive();
    }

    emit_file(ctx, ctx.out_dir / "verdicts.csv",
              [&](const fs::path& p) { heur::write_verdicts_csv(verdicts, p); });

    if (!emit_labels.empty()) {
        const std::string run_id = ctx.run_id();
        emit_file(ctx, emit_labels, [&](const fs::path& p) {
            labels::LabelStore derived;
            for (const auto& v : verdicts) {
                if (!v.positive()) continue;
                labels::LabelRecord rec;
                rec.address = v.address;
                rec.category = labels::Category::RansomPayment;
                rec.source = labels::Source::Derived;
                rec.note = std::string("likely ransom, ") + heur::to_string(*v.strain) + " era";
                rec.run_id = run_id;
                derived.append(std::move(rec));
            }
            labels::dump_labels(derived, p);
        });
    }

    std::cout << "evaluated=" << verdicts.size() << " positive=" << positives << "\n";
    ctx.commit();
    return 0;
}

// ---------------------------------------------------------------- cluster --

int cmd_cluster(RunContext& ctx, const std::vector<std::string>& tx_files) {
    const auto graph = load_graph(ctx, tx_files);
    const auto clusters = cluster::cospend_clusters(graph);
    const auto partition = clusters.partition();

    emit_file(ctx, ctx.out_dir / "clusters.csv", [&](const fs::path& p) {
        std::ofstream out(p, std::ios::binary);
        out << "address,representative\n";
        for (const auto& [rep, members] : partition)
            for (const auto& member : members) out << csv::join({member, rep}) << '\n';
    });

    std::size_t nontrivial = 0;
    for (const auto& [rep, members] : partition) nontrivial += members.size() > 1;
    std::cout << "addresses=" << clusters.address_count() << " clusters=" << partition.size()
              << " nontrivial=" << nontrivial << "\n";
    ctx.commit();
    return 0;
}

// ----------------------------------------------------------------- report --

struct ReportInputs {
    std::vector<std::string> tx_files;
    std::string labels_file;
    std::string entities_file;
    std::string rates_file;
    std::string verdicts_file;
    std::string gap_policy = "strict";
    std::string format = "csv";
    int tz_offset_min = 0; // civil-day boundary shift for close lookups
};

int cmd_report(RunContext& ctx, const std::string& which, const ReportInputs& in) {
    ctx.note_input(in.labels_file);
    const auto label_store = labels::load_labels(in.labels_file);

    if (which == "published") {
        emit_file(ctx, ctx.out_dir / "published_addresses.txt",
                  [&](const fs::path& p) { labels::export_published(label_store, p); });
        ctx.commit();
        return 0;
    }

    if (in.tx_files.empty()) throw usage_error("report " + which + " needs --txs");
    if (in.rates_file.empty()) throw usage_error("report " + which + " needs --rates");
    const auto graph = load_graph(ctx, in.tx_files);
    ctx.note_input(in.rates_file);
    auto rates = valuation::load_rates(in.rates_file);
    rates.set_utc_offset_minutes(in.tz_offset_min);
    const auto policy = gap_policy_from(in.gap_policy);

    std::vector<heur::RansomVerdict> verdicts;
    if (!in.verdicts_file.empty()) {
        ctx.note_input(in.verdicts_file);
        verdicts = heur::read_verdicts_csv(in.verdicts_file);
    }

    if (which == "summary") {
        const auto summary = econ::summarize(label_store, verdicts, graph, rates, policy);
        emit_file(ctx, ctx.out_dir / "summary.csv",
                  [&](const fs::path& p) { econ::write_summary_csv(summary, p); });
        std::cout << "income=" << valuation::format_usd(summary.income_total) << " ("
                  << summary.income_addresses << " addresses) expenses="
                  << valuation::format_usd(summary.expense_total) << " ("
                  << summary.expense_addresses << " addresses)\n";
    } else if (which == "aliases") {
        const auto rows = econ::alias_earnings(label_store, graph, rates, policy);
        emit_file(ctx, ctx.out_dir / "aliases.csv",
                  [&](const fs::path& p) { econ::write_aliases_csv(rows, p); });
        std::cout << "aliases=" << rows.size() << "\n";
    } else {
        if (in.entities_file.empty()) throw usage_error("report " + which + " needs --entities");
        ctx.note_input(in.entities_file);
        const auto entities = labels::load_entities(in.entities_file);
        const auto clusters = cluster::cospend_clusters(graph);
        if (which == "origins") {
            const auto rows =
                econ::origin_table(verdicts, label_store, graph, entities, &clusters, rates, policy);
            emit_file(ctx, ctx.out_dir / "origins.csv",
                      [&](const fs::path& p) { econ::write_origins_csv(rows, p); });
            std::cout << "origin_entities=" << rows.size() << "\n";
        } else { // flows
            const auto report = econ::flow_report(label_store, graph, entities, &clusters, rates, policy);
            if (in.format == "graph-text") {
                emit_file(ctx, ctx.out_dir / "flows.dot",
                          [&](const fs::path& p) { econ::write_flows_graph_text(report, p); });
            } else {
                emit_file(ctx, ctx.out_dir / "flows.csv",
                          [&](const fs::path& p) { econ::write_flows_csv(report, p); });
            }
            std::cout << "in_edges=" << report.in_edges.size()
                      << " out_edges=" << report.out_edges.size() << "\n";
        }
    }
    ctx.commit();
    return 0;
}

// ------------------------------------------------------------------- chat --

int cmd_chat_rank(RunContext& ctx, const std::vector<std::string>& corpus_files,
                  const std::string& server, std::size_t top) {
    for (const auto& f : corpus_files) ctx.note_input(f);
    const auto corpus = chat::load_corpus(to_paths(corpus_files));
    auto ranking = chat::degree_centrality(corpus, chat::server_from_string(server));
    if (ranking.size() > top) ranking.resize(top);

    emit_file(ctx, ctx.out_dir / "centrality.csv", [&](const fs::path& p) {
        std::ofstream out(p, std::ios::binary);
        out << "alias,degree\n";
        for (const auto& r : ranking)
            out << csv::join({r.alias, std::to_string(r.degree)}) << '\n';
    });
    for (const auto& r : ranking) std::cout << r.alias << " " << r.degree << "\n";
    ctx.commit();
    return 0;
}

int cmd_chat_kappa(RunContext& ctx, const std::vector<std::string>& worksheet_files) {
    std::vector<std::vector<chat::WorksheetRow>> sheets;
    for (const auto& f : worksheet_files) {
        ctx.note_input(f);
        sheets.push_back(chat::read_worksheet(f));
    }
    const double kappa = chat::fleiss_kappa(chat::matrix_from_worksheets(sheets));
    std::cout << "raters=" << sheets.size() << " items=" << sheets.front().size()
              << " fleiss_kappa=" << kappa << "\n";
    ctx.commit();
    return 0;
}

int cmd_chat_sample(RunContext& ctx, const std::vector<std::string>& corpus_files, std::size_t n,
                    std::uint64_t seed) {
    for (const auto& f : corpus_files) ctx.note_input(f);
    const auto corpus = chat::load_corpus(to_paths(corpus_files));
    const auto candidates = addr::extract_candidates(corpus);
    const auto rows = chat::sample_for_annotation(candidates, n, seed);
    emit_file(ctx, ctx.out_dir / "worksheet.csv",
              [&](const fs::path& p) { chat::write_worksheet(rows, p); });
    std::cout << "candidates=" << candidates.size() << " sampled=" << rows.size() << "\n";
    ctx.commit();
    return 0;
}

// ------------------------------------------------------------------ synth --

int cmd_synth_generate(RunContext& ctx, const std::string& config_file, bool seed_given) {
    synth::ScenarioConfig config;
    if (!config_file.empty()) {
        ctx.note_input(config_file);
        config = synth::load_scenario_config(config_file);
    }
    if (seed_given) config.seed = ctx.seed; // explicit --seed wins over the config file
    const auto scenario = synth::generate(config, ctx.out_dir);
    for (const auto& p : {scenario.transactions, scenario.labels, scenario.entities,
                          scenario.rates, scenario.leak_addresses, scenario.manifest})
        ctx.note_output(p);
    std::cout << "universe=" << scenario.truth.universe.size()
              << " positives=" << scenario.truth.positives.size()
              << " near_misses=" << scenario.truth.near_misses.size()
              << " confirmed=" << scenario.truth.confirmed.size() << "\n";
    ctx.commit();
    return 0;
}

int cmd_synth_score(RunContext& ctx, const std::string& verdict_file,
                    const std::string& manifest_file) {
    ctx.note_input(verdict_file);
    ctx.note_input(manifest_file);
    const auto verdicts = heur::read_verdicts_csv(verdict_file);
    const auto manifest = synth::load_manifest(manifest_file);
    const auto report = synth::score(verdicts, manifest);
    std::cout << synth::format_score(report);
    ctx.commit();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"transaction-graph forensics toolkit"};
    app.require_subcommand(1);

    RunContext ctx;
    std::string out_dir = "out", log_path;
    std::uint64_t seed = 1;
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--log", log_path, "run log path (default <out>/run_log.jsonl)");
    app.add_option("--seed", seed, "seed for randomized operations")->capture_default_str();

    // extract
    auto* extract = app.add_subcommand("extract", "extract candidate addresses from chat corpora");
    std::vector<std::string> corpus_files;
    extract->add_option("--corpus", corpus_files, "chat corpus files (jsonl)")->required();

    // validate
    auto* validate = app.add_subcommand("validate", "checksum-validate addresses");
    std::vector<std::string> validate_addrs;
    std::string validate_file;
    validate->add_option("--addr", validate_addrs, "addresses to validate");
    validate->add_option("--addr-file", validate_file, "file with one address per line");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "ingest transaction files into a graph");
    std::vector<std::string> ingest_txs;
    ingest->add_option("--txs", ingest_txs, "transaction files (jsonl)")->required();

    // fetch
    auto* fetch = app.add_subcommand("fetch", "fetch address histories into a local cache");
    std::string fetch_addr_file, fetch_cache = "cache", fetch_endpoint;
    double fetch_rate = 4.0;
    fetch->add_option("--addr-file", fetch_addr_file, "addresses to fetch")->required();
    fetch->add_option("--cache", fetch_cache, "cache directory")->capture_default_str();
    fetch->add_option("--endpoint", fetch_endpoint, "service base URL")->required();
    fetch->add_option("--rate", fetch_rate, "max requests per second")->capture_default_str();

    // detect
    auto* detect = app.add_subcommand("detect", "classify likely ransom payment addresses");
    std::vector<std::string> detect_txs;
    std::string detect_leaks, detect_entities, detect_cutoff = "2020-03-01", detect_emit_labels;
    double detect_tol = 0.5, detect_threshold = 0.99;
    int detect_hops = 8;
    detect->add_option("--txs", detect_txs, "transaction files")->required();
    detect->add_option("--leak-addrs", detect_leaks, "leaked-dataset addresses")->required();
    detect->add_option("--entities", detect_entities, "entity attribution file")->required();
    detect->add_option("--tol-pp", detect_tol, "split tolerance, percentage points")
        ->capture_default_str();
    detect->add_option("--max-hops", detect_hops, "max transaction hops to a leak address")
        ->capture_default_str();
    detect->add_option("--threshold", detect_threshold, "clean funding threshold")
        ->capture_default_str();
    detect->add_option("--cutoff", detect_cutoff, "era cutoff date (UTC)")->capture_default_str();
    int detect_taint_depth = 1;
    detect->add_option("--taint-depth", detect_taint_depth,
                       "funding attribution depth; >1 enables recursive haircut")
        ->capture_default_str();
    detect->add_option("--emit-labels", detect_emit_labels,
                       "write derived ransom-payment labels to this file");

    // cluster
    auto* cluster_cmd = app.add_subcommand("cluster", "co-spend clustering");
    std::vector<std::string> cluster_txs;
    cluster_cmd->add_option("--txs", cluster_txs, "transaction files")->required();

    // report
    auto* report = app.add_subcommand("report", "economic reports");
    report->require_subcommand(1);
    ReportInputs rin;
    std::vector<CLI::App*> report_subs;
    for (const char* name : {"summary", "origins", "aliases", "flows", "published"}) {
        auto* sub = report->add_subcommand(name);
        sub->add_option("--txs", rin.tx_files, "transaction files");
        sub->add_option("--labels", rin.labels_file, "label file")->required();
        sub->add_option("--entities", rin.entities_file, "entity file");
        sub->add_option("--rates", rin.rates_file, "daily close rates");
        sub->add_option("--verdicts", rin.verdicts_file, "detector verdicts (for likely rows)");
        sub->add_option("--gap-policy", rin.gap_policy, "strict|carry")->capture_default_str();
        sub->add_option("--format", rin.format, "csv|graph-text")->capture_default_str();
        sub->add_option("--tz-offset-min", rin.tz_offset_min,
                        "shift the close-lookup day boundary, minutes from UTC")
            ->capture_default_str();
        report_subs.push_back(sub);
    }

    // chat
    auto* chat_cmd = app.add_subcommand("chat", "chat-corpus analytics");
    chat_cmd->require_subcommand(1);
    auto* rank = chat_cmd->add_subcommand("rank", "alias degree centrality");
    std::vector<std::string> rank_corpus;
    std::string rank_server = "jabber";
    std::size_t rank_top = 50;
    rank->add_option("--corpus", rank_corpus, "chat corpus files")->required();
    rank->add_option("--server", rank_server, "jabber|rocketchat")->capture_default_str();
    rank->add_option("--top", rank_top, "rows to keep")->capture_default_str();
    auto* kappa = chat_cmd->add_subcommand("kappa", "inter-annotator agreement");
    std::vector<std::string> kappa_sheets;
    kappa->add_option("--worksheets", kappa_sheets, "filled worksheets, one per rater")
        ->required()
        ->expected(-2);
    auto* sample = chat_cmd->add_subcommand("sample", "draw a blind-annotation worksheet");
    std::vector<std::string> sample_corpus;
    std::size_t sample_n = 100;
    sample->add_option("--corpus", sample_corpus, "chat corpus files")->required();
    sample->add_option("-n,--count", sample_n, "sample size")->capture_default_str();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "synthetic economies with ground truth");
    synth_cmd->require_subcommand(1);
    auto* generate = synth_cmd->add_subcommand("generate", "generate a scenario");
    std::string synth_config;
    generate->add_option("--config", synth_config, "scenario config (keyed text)");
    auto* score = synth_cmd->add_subcommand("score", "score verdicts against a manifest");
    std::string score_verdicts, score_manifest;
    score->add_option("--verdicts", score_verdicts, "verdict csv")->required();
    score->add_option("--manifest", score_manifest, "ground-truth manifest")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        nlohmann::json err{{"error", "usage"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }

    ctx.out_dir = out_dir;
    ctx.log_path = log_path;
    ctx.seed = seed;
    ctx.note_param("seed", std::to_string(seed));

    try {
        if (app.got_subcommand(extract)) {
            ctx.subcommand = "extract";
            return cmd_extract(ctx, corpus_files);
        }
        if (app.got_subcommand(validate)) {
            ctx.subcommand = "validate";
            return cmd_validate(ctx, validate_addrs, validate_file);
        }
        if (app.got_subcommand(ingest)) {
            ctx.subcommand = "ingest";
            return cmd_ingest(ctx, ingest_txs);
        }
        if (app.got_subcommand(fetch)) {
            ctx.subcommand = "fetch";
            ctx.note_param("endpoint", fetch_endpoint);
            ctx.note_param("rate", std::to_string(fetch_rate));
            return cmd_fetch(ctx, fetch_addr_file, fetch_cache, fetch_endpoint, fetch_rate);
        }
        if (app.got_subcommand(detect)) {
            ctx.subcommand = "detect";
            ctx.note_param("tol_pp", std::to_string(detect_tol));
            ctx.note_param("max_hops", std::to_string(detect_hops));
            ctx.note_param("threshold", std::to_string(detect_threshold));
            ctx.note_param("cutoff", detect_cutoff);
            ctx.note_param("taint_depth", std::to_string(detect_taint_depth));
            return cmd_detect(ctx, detect_txs, detect_leaks, detect_entities, detect_tol,
                              detect_hops, detect_threshold, detect_cutoff, detect_taint_depth,
                              detect_emit_labels);
        }
        if (app.got_subcommand(cluster_cmd)) {
            ctx.subcommand = "cluster";
            return cmd_cluster(ctx, cluster_txs);
        }
        if (app.got_subcommand(report)) {
            static const char* names[] = {"summary", "origins", "aliases", "flows", "published"};
            for (std::size_t i = 0; i < report_subs.size(); ++i) {
                if (report->got_subcommand(report_subs[i])) {
                    ctx.subcommand = std::string("report-") + names[i];
                    ctx.note_param("gap_policy", rin.gap_policy);
                    ctx.note_param("format", rin.format);
                    return cmd_report(ctx, names[i], rin);
                }
            }
        }
        if (app.got_subcommand(chat_cmd)) {
            if (chat_cmd->got_subcommand(rank)) {
                ctx.subcommand = "chat-rank";
                ctx.note_param("server", rank_server);
                ctx.note_param("top", std::to_string(rank_top));
                return cmd_chat_rank(ctx, rank_corpus, rank_server, rank_top);
            }
            if (chat_cmd->got_subcommand(kappa)) {
                ctx.subcommand = "chat-kappa";
                return cmd_chat_kappa(ctx, kappa_sheets);
            }
            ctx.subcommand = "chat-sample";
            ctx.note_param("n", std::to_string(sample_n));
            return cmd_chat_sample(ctx, sample_corpus, sample_n, seed);
        }
        if (app.got_subcommand(synth_cmd)) {
            if (synth_cmd->got_subcommand(generate)) {
                ctx.subcommand = "synth-generate";
                return cmd_synth_generate(ctx, synth_config, app.count("--seed") > 0);
            }
            ctx.subcommand = "synth-score";
            return cmd_synth_score(ctx, score_verdicts, score_manifest);
        }
        throw usage_error("no subcommand");
    } catch (const Error& e) {
        nlohmann::json err{{"error", to_string(e.kind())}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        switch (e.kind()) {
        case ErrorKind::Usage: return 2;
        case ErrorKind::Internal: return 4;
        default: return 3;
        }
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", "internal"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 4;
    }
}
