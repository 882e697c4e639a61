#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maxbv/rng.hpp"

namespace maxbv::cli {

enum class ParamKind { count, real, count_list, real_list, choice };

struct ParamSpec {
    std::string key;
    ParamKind kind;
    std::string default_value;  // empty: required
    double min = 0.0;           // inclusive bounds for numbers and list entries
    double max = 0.0;
    std::vector<std::string> choices;
    std::string help;
};

/// Typed, validated view of an experiment's parameters.
class Params {
public:
    explicit Params(const std::map<std::string, std::string>& values) : values_(values) {}
    std::size_t count(const std::string& key) const;
    double real(const std::string& key) const;
    std::vector<std::size_t> counts(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;
    const std::string& text(const std::string& key) const;

private:
    const std::map<std::string, std::string>& values_;
};

struct ResultRow {
    std::string quantity;
    std::string label;  // distinguishes rows of one quantity (e.g. a catalog function)
    std::optional<double> x;
    double estimate = 0.0;
    double std_error = 0.0;
    std::optional<double> reference;
    std::optional<double> tolerance;
    std::optional<bool> passed;
    std::string note;
};

struct ExperimentOutput {
    std::vector<ResultRow> rows;
    std::map<std::string, std::string> extra_csv;  // file suffix -> content
};

using OpRunner = std::function<ExperimentOutput(const Params&, SeedSpec, unsigned workers)>;

struct OpSpec {
    std::string name;
    std::string summary;
    std::vector<ParamSpec> params;
    OpRunner run;
};

const std::vector<OpSpec>& op_registry();
const OpSpec* find_op(const std::string& name);

/// Parses and range-checks one value; returns its canonical text.
std::string canonical_value(const ParamSpec& spec, const std::string& raw, const std::string& field);

}  // namespace maxbv::cli
