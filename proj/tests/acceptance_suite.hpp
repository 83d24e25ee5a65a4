#pragma once

#include <string>

namespace tbp::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
    double budget = 0;  // seconds; 0 when unbounded
};

constexpr int kCriteria = 13;

CriterionResult run_criterion(int id);
// "[PASS] 3 regularization correspondence: ... (1.2 s)"
std::string format_line(const CriterionResult& r);

}  // namespace tbp::acceptance
