// Acceptance binary: one line per criterion, exit status 1 if any criterion fails.
// Tolerances live in the suite itself and are pinned at scale 1.
#include "kahler/verify.hpp"

#include <cstdio>
#include <iostream>

int main() {
    kahler::VerifyOptions opt;
    opt.tolerance_scale = 1.0;
    const auto results = kahler::run_suite(opt);
    bool ok = true;
    for (const auto& r : results) {
        std::printf("criterion %2d %-18s %s\n", r.id, r.tag.c_str(), r.pass() ? "PASS" : "FAIL");
        ok = ok && r.pass();
    }
    std::cout << "\n" << kahler::suite_summary(results);
    return ok ? 0 : 1;
}
