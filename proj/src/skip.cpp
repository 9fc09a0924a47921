#include "decorr/skip.hpp"

#include "decorr/errors.hpp"

namespace decorr {

RolloutBuffer apply_skip(const RolloutBuffer& raw, SkipSampler& sampler,
                         Rng* rng) {
    if (sampler.base_k < 1)
        throw ContractViolation("skip: base_k must be >= 1");
    if (sampler.mode == SkipSampler::Mode::random_adaptive && rng == nullptr)
        throw ContractViolation("skip: random mode needs an rng");

    RolloutBuffer out;
    out.policy_version = raw.policy_version;
    out.raw_steps = raw.raw_steps;

    long in_episode = 0;    // raw index within the current episode
    long next_store = 0;    // episode-relative index of the next store
    int last_stored = -1;   // index into out for this episode, -1 if none
    sampler.pending_reward = 0.0;

    for (int t = 0; t < raw.size(); ++t) {
        const Transition& tr = raw.transitions[static_cast<std::size_t>(t)];
        const bool new_episode =
            t == 0 || tr.episode_id !=
                          raw.transitions[static_cast<std::size_t>(t) - 1].episode_id;
        if (new_episode) {
            in_episode = 0;
            next_store = 0;
            last_stored = -1;
            sampler.pending_reward = 0.0;
        }

        sampler.pending_reward += tr.reward;

        if (in_episode == next_store) {
            Transition stored = tr;
            stored.reward = sampler.pending_reward;
            sampler.pending_reward = 0.0;
            out.transitions.push_back(std::move(stored));
            last_stored = out.size() - 1;

            int gap = sampler.base_k;
            if (sampler.mode == SkipSampler::Mode::random_adaptive)
                gap = rng->normal() > 0.0 ? sampler.base_k : sampler.base_k + 1;
            next_store += gap;
        } else if (tr.done()) {
            // Episode ended between stores: flush the tail rewards into the
            // episode's last stored transition and mark it as the boundary.
            Transition& last = out.transitions[static_cast<std::size_t>(last_stored)];
            last.reward += sampler.pending_reward;
            sampler.pending_reward = 0.0;
            last.terminated = tr.terminated;
            last.truncated = tr.truncated;
        }

        ++in_episode;
    }

    sampler.pending_reward = 0.0;
    return out;
}

RolloutBuffer skip_fixed_k(const RolloutBuffer& raw, int k) {
    SkipSampler sampler{k, SkipSampler::Mode::fixed, 0.0};
    return apply_skip(raw, sampler, nullptr);
}

RolloutBuffer skip_random_k(const RolloutBuffer& raw, int k, Rng& rng) {
    SkipSampler sampler{k, SkipSampler::Mode::random_adaptive, 0.0};
    return apply_skip(raw, sampler, &rng);
}

}  // namespace decorr
