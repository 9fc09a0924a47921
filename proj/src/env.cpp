#include "decorr/env.hpp"
#include "decorr/errors.hpp"

namespace decorr {

std::string canonical_env_id(const std::string& env_id) {
    if (env_id == "cartpole" || env_id == "CartPole-v1") return "cartpole";
    if (env_id == "acrobot" || env_id == "Acrobot-v1") return "acrobot";
    throw ConfigError("unknown env id '" + env_id +
                      "' (expected cartpole or acrobot)");
}

std::unique_ptr<Env> make_env(const std::string& env_id) {
    const std::string id = canonical_env_id(env_id);
    if (id == "cartpole") return std::make_unique<CartpoleEnv>();
    return std::make_unique<AcrobotEnv>();
}

EnvState reset(const std::string& env_id, std::uint64_t seed) {
    auto env = make_env(env_id);
    Rng rng(seed);
    return env->reset(rng);
}

}  // namespace decorr
