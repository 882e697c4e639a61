// Runs every acceptance criterion at full size; one PASS/FAIL line each.
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "maxbv/csv.hpp"
#include "maxbv/verify.hpp"

int main(int argc, char** argv) {
    maxbv::VerifyOptions opt;
    if (argc > 1) opt.seed = std::strtoull(argv[1], nullptr, 10);
    int failed = 0;
    for (int c = 1; c <= maxbv::kCriterionCount; ++c) {
        const auto start = std::chrono::steady_clock::now();
        std::vector<maxbv::CheckResult> checks;
        std::string error;
        try {
            checks = maxbv::run_criterion(c, opt);
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool ok = error.empty() && !checks.empty() && maxbv::all_passed(checks);
        failed += ok ? 0 : 1;
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << std::setw(2) << c << ": "
                  << maxbv::criterion_title(c) << " (" << checks.size() << " checks, " << std::fixed
                  << std::setprecision(1) << secs << " s)\n"
                  << std::defaultfloat;
        if (!error.empty()) std::cout << "    error: " << error << "\n";
        for (const auto& k : checks) {
            if (k.passed) continue;
            std::cout << "    " << k.name << ": observed " << maxbv::format_double(k.observed) << " expected "
                      << maxbv::format_double(k.expected) << " tolerance " << maxbv::format_double(k.tolerance)
                      << (k.detail.empty() ? "" : " (" + k.detail + ")") << "\n";
        }
        std::cout.flush();
    }
    std::cout << (maxbv::kCriterionCount - failed) << "/" << maxbv::kCriterionCount << " criteria passed\n";
    return failed ? 1 : 0;
}
