#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gwca {

struct CheckOptions {
    std::uint64_t seed = 1;
    std::size_t trials = 200;
    /// Negates K_Sigma1 before the kernel identities are checked. Test hook.
    bool inject_fault = false;
    /// Where failing instances are written; empty disables writing.
    std::filesystem::path failure_dir;
};

struct PropertyResult {
    std::string name;
    bool passed = true;
    std::size_t instances = 0;
    double worst = 0.0;  ///< largest observed violation measure
    double tolerance = 0.0;
    double seconds = 0.0;
    nlohmann::json failing_instance;  ///< null when passed
};

/// Runs the numerical invariant suite on self-generated instances:
/// filter equivalence, kernel identities, the Cauchy step, bound dominance,
/// metric axioms and solver eigen-residuals.
std::vector<PropertyResult> run_checks(const CheckOptions& opts);

}  // namespace gwca
