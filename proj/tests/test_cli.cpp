#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Exit-code and output contracts of the command-line tool, driven through
// real subprocess invocations of the built binary.

#include "support/fixtures.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
    std::string stderr_text;
};

RunResult run_cli(const std::string& args, const fs::path& cwd) {
    const fs::path out = cwd / "stdout.txt";
    const fs::path err = cwd / "stderr.txt";
    const std::string cmd = "cd " + cwd.string() + " && " + CHAINTRACE_CLI + " " + args + " > " +
                            out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    result.stdout_text = slurp(out);
    result.stderr_text = slurp(err);
    return result;
}

} // namespace

TEST_CASE("missing required flags exit 2 with usage text") {
    fixtures::TempDir tmp("cli-usage");
    const auto result = run_cli("detect", tmp.path());
    CHECK(result.exit_code == 2);
    CHECK(result.stderr_text.find("\"error\":\"usage\"") != std::string::npos);

    const auto nocmd = run_cli("", tmp.path());
    CHECK(nocmd.exit_code == 2);

    const auto help = run_cli("--help", tmp.path());
    CHECK(help.exit_code == 0);
    CHECK(help.stdout_text.find("extract") != std::string::npos);
}

TEST_CASE("data errors exit 3 with a machine-readable report") {
    fixtures::TempDir tmp("cli-data");
    {
        std::ofstream out(tmp.path() / "bad.jsonl");
        out << "{\"txid\": 12}\n";
    }
    const auto result = run_cli("ingest --txs bad.jsonl", tmp.path());
    CHECK(result.exit_code == 3);
    CHECK(result.stderr_text.find("\"error\":\"data\"") != std::string::npos);

    const auto missing = run_cli("ingest --txs nope.jsonl", tmp.path());
    CHECK(missing.exit_code == 3);
}

TEST_CASE("validate reports per-address results and exits 0") {
    fixtures::TempDir tmp("cli-validate");
    const auto result = run_cli(
        "validate --addr 1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa --addr hello", tmp.path());
    CHECK(result.exit_code == 0);
    CHECK(result.stdout_text.find("1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa ok p2pkh") !=
          std::string::npos);
    CHECK(result.stdout_text.find("hello invalid") != std::string::npos);
    CHECK(result.stdout_text.find("valid=1 invalid=1") != std::string::npos);
}

TEST_CASE("the synth -> detect -> score pipeline runs through the binary") {
    fixtures::TempDir tmp("cli-pipeline");
    REQUIRE(run_cli("--out eco synth generate", tmp.path()).exit_code == 0);
    const auto detect = run_cli(
        "--out det detect --txs eco/transactions.jsonl --leak-addrs eco/leak_addresses.txt "
        "--entities eco/entities.csv --emit-labels det/derived_labels.csv",
        tmp.path());
    CHECK(detect.exit_code == 0);
    const auto score = run_cli("--out sc synth score --verdicts det/verdicts.csv "
                               "--manifest eco/manifest.json",
                               tmp.path());
    CHECK(score.exit_code == 0);
    CHECK(score.stdout_text.find("precision=1 recall=1") != std::string::npos);

    // derived labels carry the producing run id
    std::ifstream labels(tmp.path() / "det/derived_labels.csv");
    std::string header, first_row;
    std::getline(labels, header);
    std::getline(labels, first_row);
    CHECK(header.find("run_id") != std::string::npos);
    CHECK(first_row.find(",ransom-payment,") != std::string::npos);
    CHECK(first_row.find(",derived,") != std::string::npos);

    // the run log accumulated one record per invocation, none empty
    std::ifstream log(tmp.path() / "det/run_log.jsonl");
    std::string line;
    std::size_t records = 0;
    while (std::getline(log, line)) {
        ++records;
        CHECK(line.find("\"run_id\"") != std::string::npos);
        CHECK(line.find("\"outputs\"") != std::string::npos);
    }
    CHECK(records == 1);
}

TEST_CASE("cluster and report subcommands produce their files") {
    fixtures::TempDir tmp("cli-report");
    REQUIRE(run_cli("--out eco synth generate", tmp.path()).exit_code == 0);
    CHECK(run_cli("--out cl cluster --txs eco/transactions.jsonl", tmp.path()).exit_code == 0);
    CHECK(fs::exists(tmp.path() / "cl/clusters.csv"));

    const auto summary = run_cli(
        "--out rep report summary --txs eco/transactions.jsonl --labels eco/labels.csv "
        "--rates eco/rates.csv",
        tmp.path());
    CHECK(summary.exit_code == 0);
    CHECK(fs::exists(tmp.path() / "rep/summary.csv"));

    const auto flows = run_cli(
        "--out rep report flows --txs eco/transactions.jsonl --labels eco/labels.csv "
        "--rates eco/rates.csv --entities eco/entities.csv --format graph-text",
        tmp.path());
    CHECK(flows.exit_code == 0);
    CHECK(fs::exists(tmp.path() / "rep/flows.dot"));

    // aliases needs no entity file; flows without one is a usage error
    const auto aliases = run_cli(
        "--out rep report aliases --txs eco/transactions.jsonl --labels eco/labels.csv "
        "--rates eco/rates.csv",
        tmp.path());
    CHECK(aliases.exit_code == 0);
    CHECK(fs::exists(tmp.path() / "rep/aliases.csv"));
    const auto noent = run_cli(
        "--out rep report flows --txs eco/transactions.jsonl --labels eco/labels.csv "
        "--rates eco/rates.csv",
        tmp.path());
    CHECK(noent.exit_code == 2);

    const auto published = run_cli("--out rep report published --labels eco/labels.csv", tmp.path());
    CHECK(published.exit_code == 0);
    CHECK(fs::exists(tmp.path() / "rep/published_addresses.txt"));
}

TEST_CASE("chat subcommands: rank, sample, kappa") {
    fixtures::TempDir tmp("cli-chat");
    fixtures::Mint mint(91);
    {
        std::ofstream out(tmp.path() / "chat.jsonl");
        for (int i = 0; i < 20; ++i)
            out << "{\"ts\":\"2021-07-0" << 1 + i % 9 << "T0" << i % 10
                << ":00:00Z\",\"from\":\"mango\",\"to\":\"stern\",\"body\":\"wallet "
                << mint.next() << "\"}\n";
    }
    const auto rank = run_cli("--out c chat rank --corpus chat.jsonl --top 5", tmp.path());
    CHECK(rank.exit_code == 0);
    CHECK(rank.stdout_text.find("mango 20") != std::string::npos);

    const auto sample =
        run_cli("--out c --seed 5 chat sample --corpus chat.jsonl -n 6", tmp.path());
    CHECK(sample.exit_code == 0);
    CHECK(fs::exists(tmp.path() / "c/worksheet.csv"));

    // three raters fill the worksheet identically -> kappa 1
    for (const char* rater : {"r1.csv", "r2.csv", "r3.csv"}) {
        std::ifstream in(tmp.path() / "c/worksheet.csv");
        std::ofstream out(tmp.path() / rater);
        std::string line;
        std::getline(in, line);
        out << line << "\n";
        bool alternate = false;
        while (std::getline(in, line)) {
            REQUIRE(line.back() == ','); // category column is blank
            out << line << (alternate ? "salary" : "ransom") << "\n";
            alternate = !alternate;
        }
    }
    const auto kappa =
        run_cli("--out c chat kappa --worksheets r1.csv r2.csv r3.csv", tmp.path());
    CHECK(kappa.exit_code == 0);
    CHECK(kappa.stdout_text.find("fleiss_kappa=1") != std::string::npos);
}
