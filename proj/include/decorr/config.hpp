#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "decorr/ppo.hpp"

namespace decorr {

// One multi-seed experiment: environment, PPO settings, seed list, eval
// cadence, output location.
struct ExperimentSpec {
    std::string name;  // defaults to the config file's stem
    std::string env_id = "cartpole";
    PpoConfig ppo;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    long eval_interval_steps = 10000;
    int eval_episodes = 5;
    std::string output_dir = "runs";

    void validate() const;
};

// Plain-text config: [section] headers, key = value lines, # comments
// (full-line or trailing). Sections: [experiment] and [ppo]. Unknown keys or
// sections are rejected with the offending line number; missing keys fall
// back to the defaults above (Pure-PPO CartPole settings). An empty file is a
// valid spec.
ExperimentSpec load_config(const std::string& path);

// Same grammar from an in-memory string (used by tests).
ExperimentSpec parse_config(const std::string& text, const std::string& name);

// Stable content hash over every field that affects a run.
std::uint64_t spec_hash(const ExperimentSpec& spec);

std::string method_name(Method m);
std::string optimizer_name(OptKind k);

}  // namespace decorr
