#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "decorr/actor_critic.hpp"
#include "decorr/advantage.hpp"
#include "decorr/rollout.hpp"
#include "decorr/subsample.hpp"

namespace decorr {

enum class Method { vanilla, fixed_k, random_k, subsample };

struct PpoConfig {
    double clip_epsilon = 0.2;
    double gamma = 0.99;
    double gae_lambda = 0.98;
    double subsample_p = 1.0;
    Method method = Method::vanilla;
    int base_k = 2;
    int rollout_steps = 1400;
    int epochs_per_update = 1;
    int minibatch_size = 0;  // 0 = one full-batch step over all selected indices
    double actor_lr = 3e-4;
    double critic_lr = 5e-4;
    double entropy_coeff = 0.01;
    double max_grad_norm_actor = 0.0;   // 0 = clipping off
    double max_grad_norm_critic = 0.0;  // 0 = clipping off
    long max_training_steps = 500000;
    std::uint64_t seed = 1;
    OptKind optimizer = OptKind::adamw;

    void validate() const;
};

struct UpdateReport {
    double clip_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double approx_kl = 0.0;
    double clip_fraction = 0.0;
    double grad_norm_actor = 0.0;
    double grad_norm_critic = 0.0;
    int samples_used = 0;
};

// rho = exp(new_log_prob - old_log_prob); throws DivergenceError if the
// result is not finite.
double probability_ratio(double new_log_prob, double old_log_prob);

// Mean over the batch of min(rho*A, clip(rho, 1-eps, 1+eps)*A). Maximized.
double clipped_surrogate(const Eigen::VectorXd& ratios,
                         const Eigen::VectorXd& advantages, double clip_epsilon);

// Mean squared error between predictions and returns.
double value_loss(const Eigen::VectorXd& values, const Eigen::VectorXd& returns);

// One full Algorithm pass: draw the index set (size floor(p*T)), then for
// each epoch partition it into minibatches (epoch 1 keeps the drawn order,
// later epochs reshuffle) and take clipped-surrogate ascent steps on the
// actor plus value-MSE descent steps on the critic, with an entropy bonus on
// the actor objective. Increments the policy version, invalidating `buffer`.
UpdateReport ppo_update(ActorCritic& ac, const RolloutBuffer& buffer,
                        const AdvantageBatch& advantages, const PpoConfig& config,
                        Rng& rng);

}  // namespace decorr
