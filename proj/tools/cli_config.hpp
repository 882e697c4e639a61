#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxbv/rng.hpp"

namespace maxbv::cli {

/// Invalid configuration; `field` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct ExperimentConfig {
    std::string id;
    std::string op;                             // "module.operation"
    std::map<std::string, std::string> params;  // canonical text, every key of the op present
    SeedSpec seed;

    /// op, sorted parameters and the generator identity; the seed is kept
    /// out so that runs differing only in seed can be pooled.
    std::string canonical() const;
    std::string fingerprint() const;
};

struct RunConfig {
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string out_dir = "results";
    std::vector<ExperimentConfig> experiments;

    std::string canonical() const;
    std::string fingerprint() const;
};

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& s);

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> out_dir;
};

/// INI text with a [run] section and one [experiment.NAME] section per
/// experiment. Overrides apply before seeds are derived.
RunConfig parse_config(const std::string& text, const Overrides& over = {});
RunConfig load_config(const std::filesystem::path& path, const Overrides& over = {});

}  // namespace maxbv::cli
