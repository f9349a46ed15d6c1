// Acceptance suite: one PASS/FAIL line per criterion, with wall time and budget.
// Exit status is non-zero when any criterion fails or overruns its budget.

#include "mtphase/sweep.hpp"
#include "mtphase/verification.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    using namespace mtphase;
    std::uint64_t seed = 20261015;
    if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);

    std::vector<int> ids;
    for (const auto& info : criteria_catalog()) ids.push_back(info.id);
    const VerifyContext ctx{seed, resolve_workers(std::nullopt)};
    const auto results = run_verification(ids, ctx);

    int failures = 0;
    for (const auto& r : results) {
        const bool ok = r.passed && r.within_budget();
        failures += ok ? 0 : 1;
        std::printf("[%s] criterion %2d %-32s %9.3f s (budget %g s)%s%s%s\n", ok ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.seconds, r.budget_seconds, r.within_budget() ? "" : " OVER BUDGET",
                    r.note.empty() ? "" : "  -- ", r.note.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures, results.size());
    std::fflush(stdout);
    return failures == 0 ? 0 : 1;
}
