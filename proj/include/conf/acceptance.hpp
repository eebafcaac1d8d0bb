#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace conf {

struct CriterionResult {
    int index = 0;
    std::string title;
    bool passed = false;
    std::string detail;
};

/// Runs the full acceptance checklist (the end-to-end checks backing the
/// library's headline claims) and returns one result per criterion.
std::vector<CriterionResult> run_acceptance();

/// Prints "PASS|FAIL <index>. <title>: <detail>" per criterion and returns
/// the number of failures.
int report_acceptance(const std::vector<CriterionResult>& results, std::ostream& out);

}  // namespace conf
