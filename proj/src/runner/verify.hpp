#pragma once

// Release gate: every closed form against its independent oracle.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace igchaos::runner {

struct VerifyOptions {
    std::uint64_t rng_seed = 12345;
    /// Test hook: flip the sign of Gamma^sigma_{mu mu} before comparing it
    /// with the finite-difference connection.
    bool perturb_christoffel_sign = false;
};

struct Check {
    std::string name;
    std::string component;  // module/operation under test
    double tolerance;
    double measured;
    bool passed;
};

struct VerifyReport {
    std::vector<Check> checks;

    bool all_passed() const;
    std::vector<std::string> failed_components() const;
    nlohmann::json to_json() const;
    std::string text() const;
};

VerifyReport run_verification(const VerifyOptions& options = {});

}  // namespace igchaos::runner
