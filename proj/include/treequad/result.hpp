#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "treequad/geometry.hpp"

namespace treequad {

struct LeafContribution {
    std::uint64_t leaf_id = 0;
    Box bounds;
    double contribution = 0.0;
    std::size_t samples = 0;
};

/// Estimate of Z plus the evaluation ledger that produced it.
struct IntegralResult {
    double value = 0.0;
    /// Tree methods only.
    std::vector<LeafContribution> contributions;
    std::size_t evals_sampling = 0;
    std::size_t evals_active = 0;
    std::size_t evals_leaf_integration = 0;
    std::string method;
    std::uint64_t seed = 0;
    /// Standard error when the method provides one.
    double std_error = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> warnings;

    std::size_t total_evals() const noexcept {
        return evals_sampling + evals_active + evals_leaf_integration;
    }
};

}  // namespace treequad
