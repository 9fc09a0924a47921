#pragma once

#include <vector>

#include "decorr/rng.hpp"

namespace decorr {

// floor(p*T) distinct indices into [0, T). `indices` keeps the draw order,
// which doubles as the first epoch's minibatch order.
struct IndexSet {
    std::vector<int> indices;
    double fraction = 1.0;
};

// Uniform without replacement via Fisher-Yates partial shuffle. p = 1 returns
// 0..T-1 in natural order and consumes no rng draws (vanilla PPO).
IndexSet subsample_indices(int T, double p, Rng& rng);

}  // namespace decorr
