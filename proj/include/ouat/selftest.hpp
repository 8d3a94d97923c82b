#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ouat {

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Short randomized runs of the library invariants (Young and Hoelder
/// inequalities, L^p consistency, gauge-norm axioms, ReLU gadgets, register
/// and clip constructions, change of measure, additive-family axioms).
std::vector<SuiteResult> run_selftest(std::uint64_t seed = 2024);

} // namespace ouat
