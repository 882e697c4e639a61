#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cli_config.hpp"
#include "cli_run.hpp"
#include "maxbv/csv.hpp"

using namespace maxbv::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("maxbv_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string field_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

const char* kSmall = R"(
[run]
seed = 11

[experiment.andersen]
op = fluctuation.andersen_series_check
order = 16

[experiment.bridge]
op = fluctuation.bridge_stay_prob
ns = 2,5
samples = 4000
)";

}  // namespace

TEST(CliConfig, RejectsUnknownKeysWithFieldPath) {
    EXPECT_EQ(field_of("[experiment.limit]\nop = density-tv.limit_integral\norder = 3\n"), "experiment.limit.order");
    EXPECT_EQ(field_of("[run]\nseeds = 3\n[experiment.a]\nop = density-tv.limit_integral\n"), "run.seeds");
    EXPECT_EQ(field_of("[runs]\nseed = 1\n[experiment.a]\nop = density-tv.limit_integral\n"), "runs");
    EXPECT_EQ(field_of("[experiment.a]\nop = density-tv.nope\n"), "experiment.a.op");
    EXPECT_EQ(field_of("[experiment.a]\nn = 3\n"), "experiment.a.op");
}

TEST(CliConfig, RangeAndTypeValidation) {
    EXPECT_EQ(field_of("[experiment.b]\nop = fluctuation.bridge_stay_prob\nns = 1\n"), "experiment.b.ns");
    EXPECT_EQ(field_of("[experiment.b]\nop = fluctuation.bridge_stay_prob\nsamples = lots\n"), "experiment.b.samples");
    EXPECT_EQ(field_of("[experiment.k]\nop = malliavin-fd.cross_check\nkernel = box\n"), "experiment.k.kernel");
    EXPECT_EQ(field_of("[experiment.a]\nop = fluctuation.andersen_series_check\norder = 1,2\n"),
              "experiment.a.order");
    EXPECT_EQ(field_of("[run]\nworkers = 0\n[experiment.a]\nop = density-tv.limit_integral\n"), "run.workers");
}

TEST(CliConfig, EmptyExperimentListIsAnError) {
    EXPECT_EQ(field_of("[run]\nseed = 1\n"), "experiment");
    EXPECT_EQ(field_of(""), "experiment");
}

TEST(CliConfig, DefaultsFilledAndCanonicalised) {
    const auto cfg = parse_config("[experiment.x]\nop = malliavin-fd.tied_peak\neps = 0x1p-10\n");
    ASSERT_EQ(cfg.experiments.size(), 1u);
    EXPECT_EQ(cfg.experiments[0].params.at("eps"), "0.0009765625");
    EXPECT_EQ(cfg.experiments[0].params.at("halvings"), "2");
}

TEST(CliConfig, FingerprintIgnoresSeedAndSectionOrder) {
    const auto a = parse_config(kSmall);
    const auto b = parse_config(kSmall, Overrides{99, 4, "elsewhere"});
    ASSERT_EQ(a.experiments.size(), 2u);
    EXPECT_EQ(a.experiments[0].fingerprint(), b.experiments[0].fingerprint());
    EXPECT_NE(a.experiments[0].seed, b.experiments[0].seed);
    EXPECT_EQ(b.workers, 4u);
    EXPECT_EQ(b.out_dir, "elsewhere");

    const auto swapped = parse_config(
        "[experiment.bridge]\nop = fluctuation.bridge_stay_prob\nsamples = 4000\nns = 2, 5\n"
        "[experiment.andersen]\nop = fluctuation.andersen_series_check\norder = 16\n[run]\nseed = 11\n");
    EXPECT_EQ(swapped.experiments[0].fingerprint(), a.experiments[1].fingerprint());
    EXPECT_EQ(swapped.experiments[0].seed, a.experiments[1].seed);
}

TEST(CliConfig, FnvKnownValues) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(CliRun, AndersenAndLimitRows) {
    const auto cfg = parse_config(
        "[experiment.a]\nop = fluctuation.andersen_series_check\norder = 64\n"
        "[experiment.l]\nop = density-tv.limit_integral\n");
    const auto andersen = find_op("fluctuation.andersen_series_check")
                              ->run(Params(cfg.experiments[0].params), cfg.experiments[0].seed, 1);
    EXPECT_EQ(andersen.rows.back().note, "exact match: true");
    EXPECT_TRUE(*andersen.rows.back().passed);
    const auto limit =
        find_op("density-tv.limit_integral")->run(Params(cfg.experiments[1].params), cfg.experiments[1].seed, 1);
    ASSERT_EQ(limit.rows.size(), 1u);
    EXPECT_LT(std::abs(limit.rows[0].estimate - 2.0 * std::numbers::pi), 1e-6);
}

TEST(CliRun, ByteIdenticalCsvAndAppendOnlyManifest) {
    const auto dir = scratch("repro");
    auto cfg = parse_config(kSmall, Overrides{std::nullopt, std::nullopt, (dir / "a").string()});
    std::ostringstream log;
    const auto first = execute_run(cfg, log);
    EXPECT_TRUE(first.passed);
    cfg.out_dir = (dir / "b").string();
    cfg.workers = 3;
    execute_run(cfg, log);
    for (const char* f : {"andersen.csv", "bridge.csv"}) EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;

    cfg.out_dir = (dir / "a").string();
    execute_run(cfg, log);
    const auto doc = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    ASSERT_EQ(doc["runs"].size(), 2u);
    EXPECT_EQ(doc["runs"][0]["experiments"], doc["runs"][1]["experiments"]);
    for (const auto& e : doc["runs"][0]["experiments"])
        for (const auto& r : e["rows"]) EXPECT_TRUE(r.contains("estimate"));
}

TEST(CliRun, RuntimeFailureNamesExperimentAndSeed) {
    const auto dir = scratch("failure");
    const auto cfg = parse_config("[experiment.split]\nop = density-tv.delta_density\nn = 2\nt = 0.01\nsamples = 10\n",
                                  Overrides{5, std::nullopt, dir.string()});
    std::ostringstream log;
    try {
        execute_run(cfg, log);
        FAIL() << "expected failure";
    } catch (const ExperimentFailure& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("'split'"), std::string::npos);
        EXPECT_NE(what.find(cfg.experiments[0].seed.str()), std::string::npos);
    }
}

TEST(CliReport, PoolsDistinctSeedsByInverseVariance) {
    const auto dir = scratch("pool");
    auto cfg = parse_config(kSmall, Overrides{1, std::nullopt, (dir / "r1").string()});
    std::ostringstream log;
    const auto r1 = execute_run(cfg, log);
    cfg = parse_config(kSmall, Overrides{2, std::nullopt, (dir / "r2").string()});
    const auto r2 = execute_run(cfg, log);
    execute_run(cfg, log);  // repeated seed: counted as a run, pooled once

    const auto rep = build_report({r1.manifest, r2.manifest}, dir / "rep");
    EXPECT_EQ(rep.runs, 3u);
    EXPECT_EQ(rep.groups, 2u);

    // Oracle: read the two per-seed rows back and pool by hand.
    auto bridge_row = [](const fs::path& csv, const std::string& x) {
        std::istringstream is(slurp(csv));
        std::string line;
        while (std::getline(is, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto f = maxbv::csv_split(line);
            if (f[4] == x && f[2] == "P(bridge stays <= 0)") return std::make_pair(std::stod(f[5]), std::stod(f[6]));
        }
        return std::make_pair(0.0, 0.0);
    };
    const auto [e1, s1] = bridge_row(dir / "r1" / "bridge.csv", "5");
    const auto [e2, s2] = bridge_row(dir / "r2" / "bridge.csv", "5");
    const double w1 = 1 / (s1 * s1), w2 = 1 / (s2 * s2);
    const double pooled = (w1 * e1 + w2 * e2) / (w1 + w2);
    const double pooled_se = 1 / std::sqrt(w1 + w2);

    std::istringstream is(slurp(rep.consolidated));
    std::string line;
    bool found = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto f = maxbv::csv_split(line);
        if (f[1] != "bridge" || f[5] != "5") continue;
        found = true;
        EXPECT_EQ(f[6], "3");
        EXPECT_EQ(f[7], "2");
        EXPECT_NEAR(std::stod(f[9]), pooled, 1e-15);
        EXPECT_NEAR(std::stod(f[10]), pooled_se, 1e-15);
    }
    EXPECT_TRUE(found);
    EXPECT_TRUE(fs::exists(dir / "rep" / "series_bridge.csv"));
    EXPECT_TRUE(fs::exists(dir / "rep" / "series_andersen.csv"));
}

TEST(CliReport, DisjointExperimentsConcatenate) {
    const auto dir = scratch("disjoint");
    std::ostringstream log;
    const auto a = execute_run(parse_config("[experiment.l]\nop = density-tv.limit_integral\n",
                                            Overrides{1, std::nullopt, (dir / "a").string()}),
                               log);
    const auto b = execute_run(parse_config("[experiment.t]\nop = density-tv.tv_bound\nns = 10,20\n",
                                            Overrides{1, std::nullopt, (dir / "b").string()}),
                               log);
    const auto rep = build_report({a.manifest, b.manifest}, dir / "rep");
    EXPECT_EQ(rep.groups, 2u);
    const std::string text = slurp(rep.consolidated);
    EXPECT_LT(text.find(",l,"), text.find(",t,"));
}

TEST(CliReport, RejectsCollisionsAndMissingFiles) {
    const auto dir = scratch("collide");
    std::ostringstream log;
    const auto a = execute_run(parse_config("[experiment.l]\nop = density-tv.limit_integral\n",
                                            Overrides{1, std::nullopt, dir.string()}),
                               log);
    auto doc = nlohmann::json::parse(slurp(a.manifest));
    auto forged = doc["runs"][0];
    forged["experiments"][0]["canonical"] = "op=density-tv.limit_integral;tampered=1";
    doc["runs"].push_back(forged);
    std::ofstream(dir / "forged.json") << doc.dump();
    EXPECT_THROW(build_report({dir / "forged.json"}, dir / "rep"), ReportError);

    try {
        build_report({a.manifest, dir / "missing.json"}, dir / "rep");
        FAIL() << "expected failure";
    } catch (const ReportError& e) {
        EXPECT_NE(std::string(e.what()).find("missing.json"), std::string::npos);
    }
}
