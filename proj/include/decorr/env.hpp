#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>

#include "decorr/rng.hpp"

namespace decorr {

// One environment state. `internal` is the simulator's own coordinates
// (equal to the observation for CartPole; the 4 joint angles/velocities for
// Acrobot, whose observation is the 6-dim cos/sin embedding).
struct EnvState {
    Eigen::VectorXd observation;
    Eigen::VectorXd internal;
    int step_count = 0;
    bool terminated = false;
    bool truncated = false;

    bool done() const { return terminated || truncated; }
};

struct StepOutcome {
    EnvState next_state;
    double reward = 0.0;
    bool done = false;
};

// Stateless dynamics objects: reset/step are pure given (state, action, rng),
// so instances are trivially shareable across threads.
class Env {
public:
    virtual ~Env() = default;
    virtual const std::string& id() const = 0;
    virtual int obs_dim() const = 0;
    virtual int num_actions() const = 0;
    virtual EnvState reset(Rng& rng) const = 0;
    virtual StepOutcome step(const EnvState& state, int action) const = 0;
    int max_episode_steps() const { return 500; }
};

class CartpoleEnv final : public Env {
public:
    const std::string& id() const override;
    int obs_dim() const override { return 4; }
    int num_actions() const override { return 2; }
    EnvState reset(Rng& rng) const override;
    StepOutcome step(const EnvState& state, int action) const override;
};

class AcrobotEnv final : public Env {
public:
    const std::string& id() const override;
    int obs_dim() const override { return 6; }
    int num_actions() const override { return 3; }
    EnvState reset(Rng& rng) const override;
    StepOutcome step(const EnvState& state, int action) const override;
};

// Accepts "cartpole"/"acrobot" and the versioned aliases "CartPole-v1"/
// "Acrobot-v1"; anything else is a ConfigError.
std::string canonical_env_id(const std::string& env_id);
std::unique_ptr<Env> make_env(const std::string& env_id);

EnvState reset(const std::string& env_id, std::uint64_t seed);

StepOutcome step_cartpole(const EnvState& state, int action);
StepOutcome step_acrobot(const EnvState& state, int action);

}  // namespace decorr
