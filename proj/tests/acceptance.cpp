// Runs the twelve acceptance recipes and prints one line per criterion.
#include "besselharm/experiments.hpp"

#include <chrono>
#include <cstdio>

int main() {
    int failed = 0, seen = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& info : bh::list_recipes()) {
        if (!info.acceptance) continue;
        ++seen;
        const auto start = std::chrono::steady_clock::now();
        const auto rows = bh::run_recipe(bh::builtin_recipe(info.id));
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = !rows.empty();
        double worst = 0.0;
        for (const auto& r : rows) {
            pass = pass && r.pass;
            if (r.tolerance > 0.0) worst = std::max(worst, r.residual / r.tolerance);
        }
        std::printf("criterion %2d %-4s %-24s rows=%-3zu max residual/tol=%.3g (%.1fs)\n", info.criterion,
                    pass ? "PASS" : "FAIL", info.id.c_str(), rows.size(), worst, s);
        for (const auto& r : rows)
            if (!r.pass)
                std::printf("    failed row %s residual=%g tol=%g %s\n", r.param_json.c_str(), r.residual, r.tolerance,
                            r.reason.c_str());
        std::fflush(stdout);
        failed += !pass;
    }
    if (seen != 12) {
        std::printf("expected 12 acceptance recipes, found %d\n", seen);
        return 1;
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d of 12 criteria passed (%.1fs)\n", 12 - failed, total);
    return failed == 0 ? 0 : 1;
}
