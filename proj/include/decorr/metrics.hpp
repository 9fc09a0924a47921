#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "decorr/actor_critic.hpp"
#include "decorr/rollout.hpp"

namespace decorr {

// One logged checkpoint row.
struct MetricsRecord {
    long global_step = 0;
    double eval_reward = 0.0;
    double approx_kl = 0.0;
    double entropy = 0.0;
    double explained_variance = 0.0;
    double value_bias = 0.0;
    double critic_loss = 0.0;
    double clip_fraction = 0.0;
    double grad_collinearity = 0.0;
    bool has_collinearity = false;
};

// Stable CSV schema shared by per-seed and aggregate readers.
const std::vector<std::string>& metrics_csv_fields();
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& r);

// 1 - Var(returns - predicted) / Var(returns); 0 when Var(returns) < 1e-12.
double explained_variance(const Eigen::VectorXd& predicted,
                          const Eigen::VectorXd& returns);

// Signed mean of (predicted - returns).
double value_bias(const Eigen::VectorXd& predicted,
                  const Eigen::VectorXd& returns);

struct EvalResult {
    std::vector<double> episode_returns;
    double mean_return = 0.0;
};

// Runs n full episodes sampling actions stochastically from the current
// policy; per-episode rng derives as hash64(seed, episode). Never mutates ac.
EvalResult evaluate(const ActorCritic& ac, const std::string& env_id,
                    int n_episodes, std::uint64_t seed);

struct CollinearityReport {
    double consecutive_mean = 0.0;  // mean cosine over same-episode (t, t+1)
    double random_mean = 0.0;       // mean cosine over non-adjacent pairs
    double difference = 0.0;        // consecutive - random
    int pairs_used = 0;
};

// Mean cosine similarity over the given index pairs of per-transition
// policy gradients grad log pi(a_t|s_t) * A_t.
double mean_pairwise_cosine(const std::vector<Eigen::VectorXd>& vectors,
                            const std::vector<std::pair<int, int>>& pairs);

// Compares gradient alignment of consecutive same-episode transition pairs
// against random non-adjacent pairs; positive difference means neighbors'
// gradients are the more parallel ones.
CollinearityReport grad_collinearity(const ActorCritic& ac,
                                     const RolloutBuffer& buffer,
                                     const Eigen::VectorXd& advantages,
                                     int max_pairs, std::uint64_t seed);

}  // namespace decorr
