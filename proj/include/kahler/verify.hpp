#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace kahler {

/// One measured quantity and the rule it was held to.
struct Check {
    std::string name;
    double value = 0.0;
    std::string rule;
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string tag;
    std::string title;
    std::vector<Check> checks;
    std::string note;      // error messages and derived values worth reporting
    double seconds = 0.0;  // wall time; kept out of the CSV
    bool pass() const;
};

struct VerifyOptions {
    std::uint64_t seed = 20261016;
    /// Multiplies every error tolerance; values below 1 tighten the suite.
    double tolerance_scale = 1.0;
    /// Tags or numeric ids to run; empty runs everything.
    std::set<std::string> select;
    /// Criterion 13 runs criteria 1-12 a second time and compares the CSV bytes.
    bool determinism = true;
};

/// Tags in criterion order.
const std::vector<std::string>& criterion_tags();

std::vector<CriterionResult> run_suite(const VerifyOptions& opt);

/// criterion,tag,check,value,rule,pass
std::string suite_csv(const std::vector<CriterionResult>& results);

/// "[PASS] 3 kappa0  ...  (0.41 s)" lines.
std::string suite_summary(const std::vector<CriterionResult>& results);

}  // namespace kahler
