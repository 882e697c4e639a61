#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_config.hpp"
#include "cli_ops.hpp"

namespace maxbv::cli {

/// An experiment threw; carries what is needed to reproduce it.
class ExperimentFailure : public std::runtime_error {
public:
    ExperimentFailure(const std::string& id, const SeedSpec& seed, const std::string& what)
        : std::runtime_error("experiment '" + id + "' (seed " + seed.str() + ") failed: " + what) {}
};

/// Input error in a manifest or report request; names the file.
class ReportError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string tool_version();

/// experiment,op,quantity,label,x,estimate,std_error,reference,tolerance,check,seed,fingerprint,note
std::string result_csv(const ExperimentConfig& e, const ExperimentOutput& out);

struct RunOutcome {
    nlohmann::json entry;  // the manifest record appended for this run
    bool passed = true;
    std::filesystem::path manifest;
    std::vector<std::filesystem::path> files;
};

/// Runs every experiment, writes result CSVs and appends to <out>/manifest.json.
RunOutcome execute_run(const RunConfig& cfg, std::ostream& log);

/// Appends one run record, creating the manifest if needed.
void append_manifest(const std::filesystem::path& path, const nlohmann::json& entry);

struct ReportOutcome {
    std::filesystem::path consolidated;
    std::vector<std::filesystem::path> series;
    std::size_t groups = 0;
    std::size_t runs = 0;
};

/// Merges results from manifests by parameter fingerprint and writes
/// report.csv plus series_<experiment>.csv files into out_dir.
ReportOutcome build_report(const std::vector<std::filesystem::path>& manifests, const std::filesystem::path& out_dir);

}  // namespace maxbv::cli
