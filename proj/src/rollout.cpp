#include "decorr/rollout.hpp"

#include <sstream>

#include "decorr/errors.hpp"
#include "decorr/format.hpp"

namespace decorr {

namespace {

int argmax_logit(const Eigen::VectorXd& logits) {
    Eigen::Index best = 0;
    logits.maxCoeff(&best);
    return static_cast<int>(best);
}

}  // namespace

RolloutBuffer collect_rollout(const Env& env, EnvState& state,
                              const ActorCritic& ac, int T, Rng& env_rng,
                              Rng& action_rng, bool argmax) {
    if (T < 1) throw ContractViolation("collect_rollout: T must be >= 1");

    RolloutBuffer buffer;
    buffer.policy_version = ac.policy_version;
    buffer.transitions.reserve(static_cast<std::size_t>(T));

    int episode_id = 0;
    bool have_value = false;
    double value_of_state = 0.0;

    for (int t = 0; t < T; ++t) {
        if (state.observation.size() == 0 || state.done()) {
            state = env.reset(env_rng);
            have_value = false;
        }

        const PolicyOutput po = forward_policy(ac.actor, state.observation);
        const int action = argmax ? argmax_logit(po.logits)
                                  : sample_categorical(po.log_probs, action_rng);
        StepOutcome out = env.step(state, action);

        Transition tr;
        tr.state = state.observation;
        tr.action = action;
        tr.log_prob = po.log_probs[action];
        tr.reward = out.reward;
        tr.next_state = out.next_state.observation;
        tr.terminated = out.next_state.terminated;
        tr.truncated = out.next_state.truncated;
        tr.value = have_value ? value_of_state
                              : forward_value(ac.critic, state.observation);
        tr.next_value = forward_value(ac.critic, out.next_state.observation);
        tr.episode_id = episode_id;
        tr.raw_index = t;
        buffer.transitions.push_back(std::move(tr));

        value_of_state = buffer.transitions.back().next_value;
        have_value = true;
        if (out.done) ++episode_id;
        state = std::move(out.next_state);
    }

    buffer.raw_steps = T;
    return buffer;
}

RolloutBuffer collect_rollout(const Env& env, const ActorCritic& ac, int T,
                              Rng& rng, bool argmax) {
    Rng env_rng = rng.derive(Stream::env);
    Rng action_rng = rng.derive(Stream::actions);
    EnvState state;
    return collect_rollout(env, state, ac, T, env_rng, action_rng, argmax);
}

std::string dump_buffer_csv(const RolloutBuffer& buffer) {
    std::ostringstream out;
    out << "index,action,reward,done,value,log_prob";
    const int obs_dim =
        buffer.transitions.empty()
            ? 0
            : static_cast<int>(buffer.transitions.front().state.size());
    for (int i = 0; i < obs_dim; ++i) out << ",obs_" << i;
    out << "\n";
    for (int t = 0; t < buffer.size(); ++t) {
        const Transition& tr = buffer.transitions[static_cast<std::size_t>(t)];
        out << t << "," << tr.action << "," << fmt17(tr.reward) << ","
            << (tr.done() ? 1 : 0) << "," << fmt17(tr.value) << ","
            << fmt17(tr.log_prob);
        for (Eigen::Index i = 0; i < tr.state.size(); ++i)
            out << "," << fmt17(tr.state[i]);
        out << "\n";
    }
    return out.str();
}

}  // namespace decorr
