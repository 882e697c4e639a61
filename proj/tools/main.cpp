#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "cli_config.hpp"
#include "cli_run.hpp"
#include "maxbv/csv.hpp"
#include "maxbv/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kRuntime = 3;

std::optional<std::string> env_out_dir() {
    if (const char* v = std::getenv("MAXBV_OUT_DIR"); v && *v) return std::string(v);
    return std::nullopt;
}

int cmd_run(const std::string& config, const std::optional<std::string>& out, const std::optional<std::uint64_t>& seed,
            const std::optional<unsigned>& workers) {
    using namespace maxbv::cli;
    Overrides over{seed, workers, out ? out : env_out_dir()};
    RunConfig cfg;
    try {
        cfg = load_config(config, over);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    }
    try {
        const auto outcome = execute_run(cfg, std::cout);
        std::cout << "manifest: " << outcome.manifest.string() << " (run " << cfg.fingerprint() << ")\n";
        std::cout << (outcome.passed ? "all checks passed" : "some checks failed") << "\n";
        return outcome.passed ? kOk : kCheckFailed;
    } catch (const ExperimentFailure& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kRuntime;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kRuntime;
    }
}

int cmd_report(const std::vector<std::string>& manifests, const std::optional<std::string>& out) {
    using namespace maxbv::cli;
    std::vector<std::filesystem::path> paths(manifests.begin(), manifests.end());
    try {
        const auto r = build_report(paths, out.value_or(env_out_dir().value_or("report")));
        std::cout << "merged " << r.runs << " runs into " << r.groups << " experiment groups\n";
        std::cout << "report: " << r.consolidated.string() << "\n";
        for (const auto& s : r.series) std::cout << "series: " << s.string() << "\n";
        return kOk;
    } catch (const ReportError& e) {
        std::cerr << "report error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "report error: " << e.what() << "\n";
        return kRuntime;
    }
}

int cmd_verify(const std::string& preset_name, const std::optional<std::string>& out, std::uint64_t seed,
               unsigned workers, const std::string& fault) {
    maxbv::Preset preset;
    try {
        preset = maxbv::parse_preset(preset_name);
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    }
    maxbv::VerifyOptions opt;
    opt.seed = seed;
    opt.workers = workers;
    opt.corrupt_halfline = fault == "halfline_prob_exact";
    std::vector<maxbv::CheckResult> checks;
    try {
        checks = maxbv::run_preset(preset, opt);
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kRuntime;
    }
    const std::filesystem::path dir = out ? *out : env_out_dir().value_or("verify");
    std::filesystem::create_directories(dir);
    {
        std::ofstream os(dir / "checks.csv", std::ios::binary);
        maxbv::write_checks_csv(os, checks);
    }
    std::size_t failed = 0;
    for (const auto& c : checks) {
        if (c.passed) continue;
        ++failed;
        std::cout << "FAIL [" << c.criterion << "] " << c.name << ": observed " << maxbv::format_double(c.observed)
                  << " expected " << maxbv::format_double(c.expected) << " tolerance "
                  << maxbv::format_double(c.tolerance) << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
    }
    std::cout << checks.size() - failed << "/" << checks.size() << " checks passed; results in "
              << (dir / "checks.csv").string() << "\n";
    return failed ? kCheckFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Brownian maximum experiments: run configs, merge reports, verify the build"};
    app.set_version_flag("--version", maxbv::cli::tool_version());
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run the experiments of a config file");
    std::string config;
    std::optional<std::string> run_out;
    std::optional<std::uint64_t> run_seed;
    std::optional<unsigned> run_workers;
    run->add_option("--config", config, "INI config path")->required();
    run->add_option("--out", run_out, "output directory (overrides MAXBV_OUT_DIR and the config)");
    run->add_option("--seed", run_seed, "master seed (overrides the config)");
    run->add_option("--workers", run_workers, "OpenMP workers (overrides the config)");

    auto* report = app.add_subcommand("report", "merge run manifests into CSV tables");
    std::vector<std::string> manifests;
    std::optional<std::string> report_out;
    report->add_option("manifests", manifests, "manifest.json files")->required();
    report->add_option("--out", report_out, "output directory (default: MAXBV_OUT_DIR or ./report)");

    auto* verify = app.add_subcommand("verify", "run the built-in verification suite");
    std::string preset = "quick";
    std::optional<std::string> verify_out;
    std::uint64_t verify_seed = maxbv::VerifyOptions{}.seed;
    unsigned verify_workers = 1;
    std::string fault;
    verify->add_option("--preset", preset, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    verify->add_option("--out", verify_out, "output directory for checks.csv");
    verify->add_option("--seed", verify_seed, "master seed");
    verify->add_option("--workers", verify_workers, "OpenMP workers")->check(CLI::Range(1u, 256u));
    verify->add_option("--inject-fault", fault)->check(CLI::IsMember({"halfline_prob_exact"}))->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    if (*run) return cmd_run(config, run_out, run_seed, run_workers);
    if (*report) return cmd_report(manifests, report_out);
    return cmd_verify(preset, verify_out, verify_seed, verify_workers, fault);
}
