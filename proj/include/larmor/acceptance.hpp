#pragma once

#include <string>
#include <vector>

namespace larmor::acceptance {

struct Options {
    double tol = 1e-12;  // integrator tolerance for every scenario
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct Report {
    std::vector<CriterionResult> criteria;
    double seconds = 0.0;
    double budget_seconds = 60.0;

    bool all_pass() const;
    bool within_budget() const { return seconds < budget_seconds; }
};

/// Runs criteria 1-10; results are ordered by id.
Report run(const Options& options = {});

/// "PASS  3  bogoliubov identity  (...)"
std::string format_line(const CriterionResult& r);
std::string format_runtime_line(const Report& report);

}  // namespace larmor::acceptance
