#include "chaintrace/runlog.hpp"

#include "chaintrace/error.hpp"
#include "chaintrace/sha256.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace chaintrace::run {

using nlohmann::json;

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open " + path.string() + " for digest");
    std::ostringstream buf;
    buf << in.rdbuf();
    return hex_digest(sha256(buf.str()));
}

std::string compute_run_id(const std::string& subcommand,
                           const std::map<std::string, std::string>& params,
                           const std::map<std::string, std::string>& input_digests) {
    std::string material = subcommand;
    for (const auto& [k, v] : params) material += '\x1f' + k + '\x1e' + v;
    for (const auto& [k, v] : input_digests) material += '\x1f' + k + '\x1e' + v;
    return hex_digest(sha256(material)).substr(0, 16);
}

void append_run_record(const std::filesystem::path& log_path, const RunRecord& record) {
    if (log_path.has_parent_path()) std::filesystem::create_directories(log_path.parent_path());
    std::ofstream out(log_path, std::ios::binary | std::ios::app);
    if (!out) throw data_error("cannot append to run log " + log_path.string());
    json rec;
    rec["run_id"] = record.run_id;
    rec["subcommand"] = record.subcommand;
    rec["params"] = record.params;
    rec["inputs"] = record.input_digests;
    rec["outputs"] = record.output_digests;
    rec["timestamp"] = record.timestamp;
    out << rec.dump() << '\n';
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw data_error("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

} // namespace chaintrace::run
