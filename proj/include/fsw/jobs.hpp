#pragma once

// Config ingestion and job orchestration behind the CLI: one subcommand per
// process, JSON in, JSON report plus CSV side-cars out. Reports are fully
// deterministic for a fixed config and seed; wall-clock timings go to a
// separate side-car file excluded from that guarantee.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace fsw {

using Json = nlohmann::ordered_json;

// malformed or inconsistent configuration (CLI exit code 1)
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parse with line/column diagnostics on failure.
Json parse_config_text(const std::string& text);
Json load_config_file(const std::string& path);

struct JobResult {
    Json report;
    int exit_code = 0;        // 0 pass/inconclusive, 2 validation failure
    std::string summary_line; // one human-readable line
    std::map<std::string, std::string> csv; // side-car name -> content
};

// Runs one subcommand of {validate, bands, eigs, certify, split-test,
// example} against the config. Throws ConfigError (exit 1) and
// ResourceCapError (exit 3); everything else is reported in the result.
JobResult execute(const std::string& command, const Json& config, std::uint64_t seed);

// execute + persist report.json, timings.json and CSVs into out_dir, then
// print the summary line. Returns the process exit code.
int run_command(const std::string& command, const Json& config, const std::string& out_dir,
                std::uint64_t seed, int threads);

} // namespace fsw
