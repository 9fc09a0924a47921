#include "decorr/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "decorr/errors.hpp"

namespace decorr {

void PpoConfig::validate() const {
    if (!(clip_epsilon > 0.0))
        throw ConfigError("clip_epsilon must be > 0");
    if (!(gamma > 0.0) || gamma > 1.0)
        throw ConfigError("gamma must be in (0, 1]");
    if (gae_lambda < 0.0 || gae_lambda > 1.0)
        throw ConfigError("gae_lambda must be in [0, 1]");
    if (!(subsample_p > 0.0) || subsample_p > 1.0)
        throw ConfigError("subsample_p must be in (0, 1]");
    if (method == Method::vanilla && subsample_p != 1.0)
        throw ConfigError("subsample_p: method=vanilla forces subsample_p = 1");
    if (base_k < 1) throw ConfigError("base_k must be >= 1");
    if (rollout_steps < 1) throw ConfigError("rollout_steps must be >= 1");
    if (epochs_per_update < 1) throw ConfigError("epochs_per_update must be >= 1");
    if (minibatch_size < 0) throw ConfigError("minibatch_size must be >= 0");
    if (!(actor_lr > 0.0)) throw ConfigError("actor_lr must be > 0");
    if (!(critic_lr > 0.0)) throw ConfigError("critic_lr must be > 0");
    if (entropy_coeff < 0.0) throw ConfigError("entropy_coeff must be >= 0");
    if (max_grad_norm_actor < 0.0)
        throw ConfigError("max_grad_norm_actor must be >= 0");
    if (max_grad_norm_critic < 0.0)
        throw ConfigError("max_grad_norm_critic must be >= 0");
    if (max_training_steps < 1)
        throw ConfigError("max_training_steps must be >= 1");
}

double probability_ratio(double new_log_prob, double old_log_prob) {
    const double rho = std::exp(new_log_prob - old_log_prob);
    if (!std::isfinite(rho))
        throw DivergenceError("non-finite probability ratio");
    return rho;
}

double clipped_surrogate(const Eigen::VectorXd& ratios,
                         const Eigen::VectorXd& advantages, double clip_epsilon) {
    if (ratios.size() != advantages.size())
        throw ContractViolation("clipped_surrogate: array lengths differ");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < ratios.size(); ++i) {
        const double clipped =
            std::clamp(ratios[i], 1.0 - clip_epsilon, 1.0 + clip_epsilon);
        sum += std::min(ratios[i] * advantages[i], clipped * advantages[i]);
    }
    return sum / static_cast<double>(ratios.size());
}

double value_loss(const Eigen::VectorXd& values, const Eigen::VectorXd& returns) {
    if (values.size() != returns.size())
        throw ContractViolation("value_loss: array lengths differ");
    return (values - returns).squaredNorm() / static_cast<double>(values.size());
}

namespace {

void shuffle_in_place(std::vector<int>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j =
            static_cast<std::size_t>(rng.uniform_int(static_cast<std::uint64_t>(i)));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace

UpdateReport ppo_update(ActorCritic& ac, const RolloutBuffer& buffer,
                        const AdvantageBatch& advantages, const PpoConfig& config,
                        Rng& rng) {
    config.validate();
    if (buffer.policy_version != ac.policy_version)
        throw OnPolicyViolation(
            "buffer collected by policy version " +
            std::to_string(buffer.policy_version) + " but current version is " +
            std::to_string(ac.policy_version) + "; on-policy data must be fresh");
    const int T = buffer.size();
    if (T < 1) throw ContractViolation("ppo_update: empty buffer");
    if (advantages.advantages.size() != T || advantages.returns.size() != T)
        throw ContractViolation("ppo_update: advantage batch not aligned to buffer");
    if (!advantages.normalized)
        throw ContractViolation("ppo_update: advantages must be normalized");

    const double p_effective =
        config.method == Method::subsample ? config.subsample_p : 1.0;
    IndexSet index_set = subsample_indices(T, p_effective, rng);
    if (index_set.indices.empty())
        throw ConfigError("subsample_p produced an empty index set");

    const int n_selected = static_cast<int>(index_set.indices.size());
    const int mb_size =
        config.minibatch_size == 0 ? n_selected : config.minibatch_size;

    Eigen::VectorXd actor_grad =
        Eigen::VectorXd::Zero(ac.actor.parameter_count());
    Eigen::VectorXd critic_grad =
        Eigen::VectorXd::Zero(ac.critic.parameter_count());
    ForwardCache actor_cache, critic_cache;
    Eigen::VectorXd logit_grad;
    Eigen::VectorXd value_upstream(1);

    UpdateReport report;
    double kl_sum = 0.0, ent_sum = 0.0, surr_sum = 0.0, vloss_sum = 0.0;
    double actor_norm_sum = 0.0, critic_norm_sum = 0.0;
    long clip_hits = 0, total_samples = 0;
    int minibatches_done = 0;

    std::vector<int> order = index_set.indices;
    for (int epoch = 0; epoch < config.epochs_per_update; ++epoch) {
        if (epoch > 0) shuffle_in_place(order, rng);

        for (int start = 0; start < n_selected; start += mb_size) {
            const int count = std::min(mb_size, n_selected - start);
            const double inv = 1.0 / static_cast<double>(count);
            actor_grad.setZero();
            critic_grad.setZero();

            for (int i = 0; i < count; ++i) {
                const int idx = order[static_cast<std::size_t>(start + i)];
                const Transition& tr =
                    buffer.transitions[static_cast<std::size_t>(idx)];
                const double adv = advantages.advantages[idx];
                const double ret = advantages.returns[idx];

                const Eigen::VectorXd logits =
                    ac.actor.forward_cached(tr.state, actor_cache);
                const Eigen::VectorXd log_probs = log_softmax(logits);
                const double entropy = entropy_from_log_probs(log_probs);
                const double rho =
                    probability_ratio(log_probs[tr.action], tr.log_prob);

                const double unclipped = rho * adv;
                const double clipped =
                    std::clamp(rho, 1.0 - config.clip_epsilon,
                               1.0 + config.clip_epsilon) *
                    adv;
                const bool use_unclipped = unclipped <= clipped;

                // d(objective)/dlogits: surrogate term flows only through the
                // unclipped branch of min; entropy bonus always flows.
                const Eigen::ArrayXd probs = log_probs.array().exp();
                logit_grad = Eigen::VectorXd::Zero(logits.size());
                if (use_unclipped) {
                    logit_grad = (-unclipped * probs).matrix();
                    logit_grad[tr.action] += unclipped;
                }
                logit_grad.array() -= config.entropy_coeff * probs *
                                      (log_probs.array() + entropy);
                ac.actor.backward_into(actor_cache, logit_grad, inv, actor_grad);

                const double v = ac.critic.forward_cached(tr.state, critic_cache)[0];
                value_upstream[0] = 2.0 * (v - ret);
                ac.critic.backward_into(critic_cache, value_upstream, inv,
                                        critic_grad);

                kl_sum += tr.log_prob - log_probs[tr.action];
                ent_sum += entropy;
                surr_sum += std::min(unclipped, clipped);
                vloss_sum += (v - ret) * (v - ret);
                if (std::abs(rho - 1.0) > config.clip_epsilon) ++clip_hits;
                ++total_samples;
            }

            if (!std::isfinite(surr_sum) || !std::isfinite(vloss_sum))
                throw DivergenceError("non-finite loss in ppo_update");

            double actor_norm;
            if (config.max_grad_norm_actor > 0.0)
                actor_norm = clip_grad_norm(actor_grad, config.max_grad_norm_actor);
            else if (!actor_grad.allFinite())
                throw DivergenceError("non-finite actor gradient");
            else
                actor_norm = actor_grad.norm();

            double critic_norm;
            if (config.max_grad_norm_critic > 0.0)
                critic_norm =
                    clip_grad_norm(critic_grad, config.max_grad_norm_critic);
            else if (!critic_grad.allFinite())
                throw DivergenceError("non-finite critic gradient");
            else
                critic_norm = critic_grad.norm();

            apply_update(ac.actor, ac.opt_actor, actor_grad, true);
            apply_update(ac.critic, ac.opt_critic, critic_grad, false);

            actor_norm_sum += actor_norm;
            critic_norm_sum += critic_norm;
            ++minibatches_done;
        }
    }

    ac.policy_version += 1;

    const double n = static_cast<double>(total_samples);
    report.clip_loss = surr_sum / n;
    report.value_loss = vloss_sum / n;
    report.entropy = ent_sum / n;
    report.approx_kl = kl_sum / n;
    report.clip_fraction = static_cast<double>(clip_hits) / n;
    report.grad_norm_actor = actor_norm_sum / minibatches_done;
    report.grad_norm_critic = critic_norm_sum / minibatches_done;
    report.samples_used = n_selected;
    return report;
}

}  // namespace decorr
