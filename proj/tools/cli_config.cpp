#include "cli_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cli_ops.hpp"

namespace maxbv::cli {

namespace pt = boost::property_tree;

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::uint64_t fnv1a(const std::string& s) { return std::stoull(fnv1a_hex(s), nullptr, 16); }

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

template <class T>
T parse_unsigned(const std::string& raw, const std::string& field, T lo, T hi) {
    const std::string v = trim(raw);
    T out{};
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || end != v.data() + v.size())
        throw ConfigError(field, "expected a non-negative integer, got '" + raw + "'");
    if (out < lo || out > hi)
        throw ConfigError(field, "value " + v + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return out;
}

ExperimentConfig parse_experiment(const std::string& id, const pt::ptree& section, std::uint64_t master) {
    const std::string base = "experiment." + id;
    if (id.empty()) throw ConfigError(base, "empty experiment id");
    if (id.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") != std::string::npos)
        throw ConfigError(base, "experiment ids use letters, digits, '_' and '-'");
    const auto op_node = section.get_optional<std::string>("op");
    if (!op_node) throw ConfigError(base + ".op", "missing");
    const std::string op_name = trim(*op_node);
    const OpSpec* op = find_op(op_name);
    if (!op) throw ConfigError(base + ".op", "unknown operation '" + op_name + "'");

    ExperimentConfig e;
    e.id = id;
    e.op = op_name;
    std::set<std::string> seen;
    for (const auto& [key, node] : section) {
        if (key == "op") continue;
        const std::string field = base + "." + key;
        if (!node.empty()) throw ConfigError(field, "nested keys are not allowed");
        const ParamSpec* spec = nullptr;
        for (const auto& p : op->params)
            if (p.key == key) spec = &p;
        if (!spec) throw ConfigError(field, "unknown key");
        e.params[key] = canonical_value(*spec, node.data(), field);
        seen.insert(key);
    }
    for (const auto& p : op->params) {
        if (seen.count(p.key)) continue;
        if (p.default_value.empty()) throw ConfigError(base + "." + p.key, "missing required parameter");
        e.params[p.key] = canonical_value(p, p.default_value, base + "." + p.key);
    }
    // The stream comes from the id so reordering sections does not move seeds.
    e.seed = SeedSpec{master, fnv1a(id)};
    return e;
}

}  // namespace

std::string ExperimentConfig::canonical() const {
    std::string s = "op=" + op;
    for (const auto& [k, v] : params) s += ";" + k + "=" + v;
    return s + ";rng=" + kRngFingerprint;
}

std::string ExperimentConfig::fingerprint() const { return fnv1a_hex(canonical()); }

std::string RunConfig::canonical() const {
    std::string s = "seed=" + std::to_string(seed);
    for (const auto& e : experiments) s += "\n[" + e.id + "] " + e.canonical();
    return s;
}

std::string RunConfig::fingerprint() const { return fnv1a_hex(canonical()); }

RunConfig parse_config(const std::string& text, const Overrides& over) {
    pt::ptree tree;
    try {
        std::istringstream is(text);
        pt::ini_parser::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()), e.message());
    }

    RunConfig cfg;
    std::vector<std::pair<std::string, const pt::ptree*>> sections;
    for (const auto& [name, node] : tree) {
        if (node.empty()) throw ConfigError(name, "unknown key (keys belong in a section)");
        if (name == "run") {
            for (const auto& [key, value] : node) {
                const std::string field = "run." + key;
                if (key == "seed")
                    cfg.seed = parse_unsigned<std::uint64_t>(value.data(), field, 0, UINT64_MAX);
                else if (key == "workers")
                    cfg.workers = parse_unsigned<unsigned>(value.data(), field, 1, 256);
                else if (key == "out") {
                    cfg.out_dir = trim(value.data());
                    if (cfg.out_dir.empty()) throw ConfigError(field, "empty path");
                } else
                    throw ConfigError(field, "unknown key");
            }
        } else if (name.rfind("experiment.", 0) == 0) {
            sections.emplace_back(name.substr(11), &node);
        } else {
            throw ConfigError(name, "unknown section");
        }
    }
    if (over.seed) cfg.seed = *over.seed;
    if (over.workers) {
        if (*over.workers < 1 || *over.workers > 256) throw ConfigError("run.workers", "outside [1, 256]");
        cfg.workers = *over.workers;
    }
    if (over.out_dir) cfg.out_dir = *over.out_dir;
    if (sections.empty()) throw ConfigError("experiment", "no experiments configured");
    for (const auto& [id, node] : sections) cfg.experiments.push_back(parse_experiment(id, *node, cfg.seed));
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const Overrides& over) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), over);
}

}  // namespace maxbv::cli
