#pragma once

#include "decorr/rng.hpp"
#include "decorr/rollout.hpp"

namespace decorr {

// State machine for Methods 1 and 2. The schedule restarts on every episode:
// an episode's first raw step is always stored, then every gap-th step after
// it. In fixed mode the gap is always base_k; in random_adaptive mode each
// gap is drawn as k' = base_k if N(0,1) > 0 else base_k + 1.
struct SkipSampler {
    enum class Mode { fixed, random_adaptive };
    int base_k = 2;
    Mode mode = Mode::fixed;
    double pending_reward = 0.0;
};

// Filters a raw rollout into a skip buffer. Skipped steps' rewards accumulate
// into the next stored transition; if an episode ends between stores, the
// tail rewards flush into the episode's last stored transition, which also
// inherits the episode-end flags. Rewards of a trailing unfinished fragment
// at the buffer edge are dropped with it. next_state stays the immediate
// successor of the stored step. rng is only consulted in random mode.
RolloutBuffer apply_skip(const RolloutBuffer& raw, SkipSampler& sampler,
                         Rng* rng);

RolloutBuffer skip_fixed_k(const RolloutBuffer& raw, int k);
RolloutBuffer skip_random_k(const RolloutBuffer& raw, int k, Rng& rng);

}  // namespace decorr
