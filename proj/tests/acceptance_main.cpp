// Runs the full acceptance suite single-threaded and reports one line per
// criterion. Exit status 0 only if every criterion passes.

#include "wquant/harness.hpp"

#include <cstdio>

int main() {
    wquant::AcceptanceResult res = wquant::run_acceptance(1);
    for (const wquant::CriterionResult& c : res.criteria)
        std::printf("[%s] %2d %-44s %s\n", c.pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), c.detail.c_str());
    std::printf("%s\n", res.all_pass ? "acceptance: all criteria pass"
                                     : "acceptance: FAILURES present");
    return res.all_pass ? 0 : 1;
}
