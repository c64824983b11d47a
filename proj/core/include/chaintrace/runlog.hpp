#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace chaintrace::run {

// Provenance record for one CLI invocation. The run id is a content hash of
// (subcommand, parameters, input digests), so identical runs share an id; the
// timestamp lives only here, never in report files.
struct RunRecord {
    std::string run_id;
    std::string subcommand;
    std::map<std::string, std::string> params;
    std::map<std::string, std::string> input_digests;  // label -> sha256 hex
    std::map<std::string, std::string> output_digests;
    std::int64_t timestamp = 0;
};

std::string file_digest(const std::filesystem::path& path); // sha256 hex of contents

std::string compute_run_id(const std::string& subcommand,
                           const std::map<std::string, std::string>& params,
                           const std::map<std::string, std::string>& input_digests);

// one JSON object per line
void append_run_record(const std::filesystem::path& log_path, const RunRecord& record);

// write-to-temp-then-rename, so readers never observe partial output
void write_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace chaintrace::run
