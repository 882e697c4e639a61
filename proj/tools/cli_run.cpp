#include "cli_run.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "maxbv/csv.hpp"

#ifndef MAXBV_VERSION
#define MAXBV_VERSION "0.0.0"
#endif

namespace maxbv::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string tool_version() { return MAXBV_VERSION; }

namespace {

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }
std::string check_cell(const std::optional<bool>& v) { return v ? (*v ? "pass" : "fail") : ""; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    os << content;
    if (!os) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::string result_csv(const ExperimentConfig& e, const ExperimentOutput& out) {
    std::ostringstream os;
    CsvWriter w(os);
    w.row("experiment", "op", "quantity", "label", "x", "estimate", "std_error", "reference", "tolerance", "check",
          "seed", "fingerprint", "note");
    for (const auto& r : out.rows)
        w.row(std::vector<std::string>{e.id, e.op, r.quantity, r.label, opt_cell(r.x), format_double(r.estimate),
                                       format_double(r.std_error), opt_cell(r.reference), opt_cell(r.tolerance),
                                       check_cell(r.passed), e.seed.str(), e.fingerprint(), r.note});
    return os.str();
}

void append_manifest(const fs::path& path, const json& entry) {
    json doc = {{"runs", json::array()}};
    if (fs::exists(path)) {
        std::ifstream in(path);
        try {
            doc = json::parse(in);
        } catch (const json::exception& e) {
            throw std::runtime_error(path.string() + ": existing manifest does not parse: " + e.what());
        }
        if (!doc.is_object() || !doc.contains("runs") || !doc["runs"].is_array())
            throw std::runtime_error(path.string() + ": existing manifest has no runs array");
    }
    doc["runs"].push_back(entry);
    const fs::path tmp = path.string() + ".tmp";
    write_file(tmp, doc.dump(2) + "\n");
    fs::rename(tmp, path);
}

RunOutcome execute_run(const RunConfig& cfg, std::ostream& log) {
    const fs::path out_dir = cfg.out_dir;
    fs::create_directories(out_dir);
    RunOutcome outcome;
    json experiments = json::array();
    for (const auto& e : cfg.experiments) {
        const OpSpec* op = find_op(e.op);
        ExperimentOutput out;
        try {
            out = op->run(Params(e.params), e.seed, cfg.workers);
        } catch (const std::exception& ex) {
            throw ExperimentFailure(e.id, e.seed, ex.what());
        }

        const fs::path csv = out_dir / (e.id + ".csv");
        write_file(csv, result_csv(e, out));
        outcome.files.push_back(csv);
        json extras = json::array();
        for (const auto& [suffix, content] : out.extra_csv) {
            const fs::path p = out_dir / (e.id + "_" + suffix + ".csv");
            write_file(p, content);
            outcome.files.push_back(p);
            extras.push_back(p.filename().string());
        }

        bool passed = true;
        json rows = json::array();
        for (const auto& r : out.rows) {
            if (r.passed && !*r.passed) {
                passed = false;
                log << "FAIL " << e.id << ": " << r.quantity << (r.label.empty() ? "" : " [" + r.label + "]")
                    << (r.x ? " at x=" + format_double(*r.x) : "") << " observed " << format_double(r.estimate)
                    << " expected " << opt_cell(r.reference) << " tolerance " << opt_cell(r.tolerance)
                    << (r.note.empty() ? "" : " (" + r.note + ")") << "\n";
            }
            rows.push_back({{"quantity", r.quantity},
                            {"label", r.label},
                            {"x", opt_json(r.x)},
                            {"estimate", r.estimate},
                            {"std_error", r.std_error},
                            {"reference", opt_json(r.reference)},
                            {"tolerance", opt_json(r.tolerance)},
                            {"check", r.passed ? json(*r.passed) : json(nullptr)},
                            {"note", r.note}});
        }
        outcome.passed = outcome.passed && passed;
        log << (passed ? "ok   " : "FAIL ") << e.id << " (" << e.op << ", " << out.rows.size() << " rows) -> "
            << csv.string() << "\n";
        experiments.push_back({{"id", e.id},
                               {"op", e.op},
                               {"params", e.params},
                               {"seed", {{"master", e.seed.master_seed}, {"stream", e.seed.stream_index}}},
                               {"fingerprint", e.fingerprint()},
                               {"canonical", e.canonical()},
                               {"csv", csv.filename().string()},
                               {"extra_csv", extras},
                               {"passed", passed},
                               {"rows", rows}});
    }
    outcome.entry = {{"fingerprint", cfg.fingerprint()},
                     {"tool_version", tool_version()},
                     {"timestamp", utc_timestamp()},
                     {"rng", kRngFingerprint},
                     {"config", {{"seed", cfg.seed}, {"workers", cfg.workers}, {"canonical", cfg.canonical()}}},
                     {"experiments", experiments},
                     {"passed", outcome.passed}};
    outcome.manifest = out_dir / "manifest.json";
    append_manifest(outcome.manifest, outcome.entry);
    return outcome;
}

namespace {

struct Observation {
    double estimate = 0.0;
    double std_error = 0.0;
    std::string seed;
    std::optional<double> reference;
    std::optional<double> tolerance;
    std::optional<bool> passed;
};

struct Series {
    std::string quantity;
    std::string label;
    std::optional<double> x;
    std::vector<Observation> obs;
};

struct Group {
    std::string fingerprint;
    std::string canonical;
    std::string op;
    std::vector<std::string> ids;
    std::vector<Series> series;
    std::map<std::tuple<std::string, std::string, std::string>, std::size_t> index;
};

std::optional<double> opt_double(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json load_manifest(const fs::path& path) {
    if (!fs::exists(path)) throw ReportError(path.string() + ": no such file");
    std::ifstream in(path);
    if (!in) throw ReportError(path.string() + ": cannot open");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ReportError(path.string() + ": not a manifest: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("runs") || !doc["runs"].is_array())
        throw ReportError(path.string() + ": not a manifest: missing runs array");
    return doc;
}

struct Pooled {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t distinct = 0;
    std::string seeds;
};

/// Pools one observation per distinct seed: inverse-variance weights when every
/// standard error is positive, a plain mean otherwise (exact rows).
Pooled pool(const std::vector<Observation>& obs) {
    std::vector<const Observation*> uniq;
    std::set<std::string> seen;
    for (const auto& o : obs)
        if (seen.insert(o.seed).second) uniq.push_back(&o);
    Pooled p;
    p.distinct = uniq.size();
    for (const auto& s : seen) p.seeds += (p.seeds.empty() ? "" : ";") + s;
    bool weighted = true;
    for (auto* o : uniq) weighted = weighted && o->std_error > 0.0;
    if (weighted) {
        double w = 0.0;
        double wx = 0.0;
        for (auto* o : uniq) {
            const double wi = 1.0 / (o->std_error * o->std_error);
            w += wi;
            wx += wi * o->estimate;
        }
        p.estimate = wx / w;
        p.std_error = 1.0 / std::sqrt(w);
    } else {
        double sum = 0.0;
        double var = 0.0;
        for (auto* o : uniq) {
            sum += o->estimate;
            var += o->std_error * o->std_error;
        }
        const double k = static_cast<double>(uniq.size());
        p.estimate = sum / k;
        p.std_error = std::sqrt(var) / k;
    }
    return p;
}

std::string safe_name(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return out;
}

}  // namespace

ReportOutcome build_report(const std::vector<fs::path>& manifests, const fs::path& out_dir) {
    if (manifests.empty()) throw ReportError("no manifest files given");
    std::vector<Group> groups;
    std::map<std::string, std::size_t> by_fp;
    ReportOutcome outcome;
    for (const auto& path : manifests) {
        const json doc = load_manifest(path);
        for (const auto& run : doc["runs"]) {
            ++outcome.runs;
            for (const auto& e : run.at("experiments")) {
                const std::string fp = e.at("fingerprint");
                const std::string canonical = e.at("canonical");
                auto [it, fresh] = by_fp.emplace(fp, groups.size());
                if (fresh) groups.push_back(Group{fp, canonical, e.at("op"), {}, {}, {}});
                Group& g = groups[it->second];
                if (g.canonical != canonical)
                    throw ReportError(path.string() + ": fingerprint " + fp + " collides: '" + g.canonical +
                                      "' vs '" + canonical + "'");
                const std::string id = e.at("id");
                if (std::find(g.ids.begin(), g.ids.end(), id) == g.ids.end()) g.ids.push_back(id);
                const std::string seed = std::to_string(e.at("seed").at("master").get<std::uint64_t>()) + ":" +
                                         std::to_string(e.at("seed").at("stream").get<std::uint64_t>());
                for (const auto& r : e.at("rows")) {
                    const auto x = opt_double(r.at("x"));
                    const auto key = std::make_tuple(r.at("quantity").get<std::string>(),
                                                     r.at("label").get<std::string>(), x ? format_double(*x) : "");
                    auto [sit, new_series] = g.index.emplace(key, g.series.size());
                    if (new_series) g.series.push_back(Series{std::get<0>(key), std::get<1>(key), x, {}});
                    const auto& chk = r.at("check");
                    g.series[sit->second].obs.push_back(
                        {r.at("estimate").get<double>(), r.at("std_error").get<double>(), seed,
                         opt_double(r.at("reference")), opt_double(r.at("tolerance")),
                         chk.is_null() ? std::nullopt : std::optional<bool>(chk.get<bool>())});
                }
            }
        }
    }

    fs::create_directories(out_dir);
    std::ostringstream os;
    CsvWriter w(os);
    w.row("fingerprint", "experiment", "op", "quantity", "label", "x", "runs", "distinct_seeds", "seeds", "estimate",
          "std_error", "reference", "tolerance", "check");
    std::map<std::string, std::size_t> id_uses;
    for (const auto& g : groups) ++id_uses[g.ids.front()];
    for (const auto& g : groups) {
        std::string ids;
        for (const auto& id : g.ids) ids += (ids.empty() ? "" : ";") + id;
        std::ostringstream ss;
        CsvWriter sw(ss);
        sw.row("quantity", "label", "x", "runs", "estimate", "std_error", "reference");
        bool has_series = false;
        for (const auto& s : g.series) {
            const Pooled p = pool(s.obs);
            std::optional<bool> passed;
            for (const auto& o : s.obs)
                if (o.passed) passed = passed.value_or(true) && *o.passed;
            const auto& first = s.obs.front();
            w.row(std::vector<std::string>{g.fingerprint, ids, g.op, s.quantity, s.label, opt_cell(s.x),
                                           std::to_string(s.obs.size()), std::to_string(p.distinct), p.seeds,
                                           format_double(p.estimate), format_double(p.std_error),
                                           opt_cell(first.reference), opt_cell(first.tolerance), check_cell(passed)});
            if (s.x) {
                has_series = true;
                sw.row(std::vector<std::string>{s.quantity, s.label, format_double(*s.x), std::to_string(s.obs.size()),
                                                format_double(p.estimate), format_double(p.std_error),
                                                opt_cell(first.reference)});
            }
        }
        if (has_series) {
            std::string name = "series_" + safe_name(g.ids.front());
            if (id_uses[g.ids.front()] > 1) name += "_" + g.fingerprint.substr(0, 8);
            const fs::path p = out_dir / (name + ".csv");
            write_file(p, ss.str());
            outcome.series.push_back(p);
        }
    }
    outcome.groups = groups.size();
    outcome.consolidated = out_dir / "report.csv";
    write_file(outcome.consolidated, os.str());
    return outcome;
}

}  // namespace maxbv::cli
