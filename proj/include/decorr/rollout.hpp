#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "decorr/actor_critic.hpp"
#include "decorr/env.hpp"

namespace decorr {

// One stored step. value/next_value are the critic's outputs at collection
// time and are never recomputed after an update (on-policy contract).
// terminated/truncated split one done flag so bootstrapping can differ.
struct Transition {
    Eigen::VectorXd state;
    int action = 0;
    double log_prob = 0.0;
    double reward = 0.0;
    Eigen::VectorXd next_state;
    bool terminated = false;
    bool truncated = false;
    double value = 0.0;
    double next_value = 0.0;
    int episode_id = 0;
    long raw_index = 0;

    bool done() const { return terminated || truncated; }
};

struct RolloutBuffer {
    std::vector<Transition> transitions;
    int policy_version = 0;
    long raw_steps = 0;  // env steps consumed to build this buffer

    int size() const { return static_cast<int>(transitions.size()); }
};

// Runs the policy for exactly T env steps, auto-resetting on episode end.
// `state` carries the environment across calls (an empty or done state
// triggers a reset); actions are sampled stochastically unless argmax is set.
RolloutBuffer collect_rollout(const Env& env, EnvState& state,
                              const ActorCritic& ac, int T, Rng& env_rng,
                              Rng& action_rng, bool argmax = false);

// Fresh-state convenience form: derives env and action streams from rng.
RolloutBuffer collect_rollout(const Env& env, const ActorCritic& ac, int T,
                              Rng& rng, bool argmax = false);

// Debug/oracle dump: index, action, reward, done, value, log_prob, then
// observation components (17 significant digits).
std::string dump_buffer_csv(const RolloutBuffer& buffer);

}  // namespace decorr
