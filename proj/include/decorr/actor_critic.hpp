#pragma once

#include <string>

#include "decorr/net.hpp"
#include "decorr/optimizer.hpp"

namespace decorr {

// Policy and value networks with their optimizer state. policy_version
// increments on every update; rollout buffers remember the version that
// collected them so stale data is rejected.
struct ActorCritic {
    std::string env_id;
    DenseNet actor;
    DenseNet critic;
    OptimizerState opt_actor;
    OptimizerState opt_critic;
    int policy_version = 0;
};

// 2x128 tanh trunks; orthogonal init (gain sqrt(2) hidden, 0.01 policy head,
// 1.0 value head), zero biases. Draws actor weights first, then critic.
ActorCritic make_actor_critic(const std::string& env_id, OptKind optimizer,
                              double actor_lr, double critic_lr, Rng& init_rng);

// Plain-text checkpoint: header lines with layer dimensions, then one value
// per line (%.17g) in flat parameter order, actor first. Optimizer state is
// not serialized (mid-run restarts are out of scope).
void save_checkpoint(const ActorCritic& ac, const std::string& path);
ActorCritic load_checkpoint(const std::string& path);

}  // namespace decorr
