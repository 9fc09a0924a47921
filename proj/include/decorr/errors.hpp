#pragma once

#include <stdexcept>
#include <string>

namespace decorr {

// Bad configuration: unknown keys, out-of-range values, unknown env ids.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg)
        : std::runtime_error("config error: " + msg) {}
};

// API misuse: stepping a finished episode, dimension mismatches, missing
// forward cache. These are programming errors, not runtime conditions.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& msg)
        : std::logic_error("contract violation: " + msg) {}
};

// Stale rollout data fed to an update (policy_version mismatch).
class OnPolicyViolation : public ContractViolation {
public:
    explicit OnPolicyViolation(const std::string& msg)
        : ContractViolation("on-policy: " + msg) {}
};

// Non-finite loss, gradient, or parameter during training.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& msg)
        : std::runtime_error("divergence error: " + msg) {}
};

// compare_runs called on runs with mismatched env or checkpoint schedule.
class ComparisonError : public std::runtime_error {
public:
    explicit ComparisonError(const std::string& msg)
        : std::runtime_error("comparison error: " + msg) {}
};

}  // namespace decorr
