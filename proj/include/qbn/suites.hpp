#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qbn {

struct SuiteResult {
    std::string name;
    bool pass = false;
    double worst = 0;  // worst violation / residual seen
    std::string detail;
};

// Classical identities/inequalities on random small nets plus quantum
// inequalities on random density matrices.
std::vector<SuiteResult> run_table1_suite(int trials, uint64_t seed);

// Data-processing inequalities on random 3- and 4-node chains, including the
// time-reversal construction.
std::vector<SuiteResult> run_dp_suite(int trials, uint64_t seed);

// Every protocol fixture, rebuilt and re-verified.
std::vector<SuiteResult> run_protocol_suite(uint64_t seed);

bool all_pass(const std::vector<SuiteResult>& results);

}  // namespace qbn
