#include "decorr/metrics.hpp"

#include <cmath>
#include <sstream>

#include "decorr/env.hpp"
#include "decorr/errors.hpp"
#include "decorr/format.hpp"

namespace decorr {

const std::vector<std::string>& metrics_csv_fields() {
    static const std::vector<std::string> kFields = {
        "global_step",   "eval_reward",        "approx_kl",
        "entropy",       "explained_variance", "value_bias",
        "critic_loss",   "clip_fraction",      "grad_collinearity"};
    return kFields;
}

std::string metrics_csv_header() {
    std::ostringstream out;
    const auto& fields = metrics_csv_fields();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ",";
        out << fields[i];
    }
    return out.str();
}

std::string metrics_csv_row(const MetricsRecord& r) {
    std::ostringstream out;
    out << r.global_step << "," << fmt17(r.eval_reward) << ","
        << fmt17(r.approx_kl) << "," << fmt17(r.entropy) << ","
        << fmt17(r.explained_variance) << "," << fmt17(r.value_bias) << ","
        << fmt17(r.critic_loss) << "," << fmt17(r.clip_fraction) << ","
        << (r.has_collinearity ? fmt17(r.grad_collinearity) : std::string("nan"));
    return out.str();
}

double explained_variance(const Eigen::VectorXd& predicted,
                          const Eigen::VectorXd& returns) {
    if (predicted.size() != returns.size())
        throw ContractViolation("explained_variance: array lengths differ");
    if (predicted.size() < 2)
        throw ContractViolation("explained_variance needs at least 2 values");
    const double ret_mean = returns.mean();
    const double ret_var = (returns.array() - ret_mean).square().mean();
    if (ret_var < 1e-12) return 0.0;
    const Eigen::ArrayXd residual = (returns - predicted).array();
    const double res_mean = residual.mean();
    const double res_var = (residual - res_mean).square().mean();
    return 1.0 - res_var / ret_var;
}

double value_bias(const Eigen::VectorXd& predicted,
                  const Eigen::VectorXd& returns) {
    if (predicted.size() != returns.size())
        throw ContractViolation("value_bias: array lengths differ");
    return (predicted - returns).mean();
}

EvalResult evaluate(const ActorCritic& ac, const std::string& env_id,
                    int n_episodes, std::uint64_t seed) {
    if (n_episodes < 1)
        throw ContractViolation("evaluate: n_episodes must be >= 1");
    auto env = make_env(env_id);

    EvalResult result;
    result.episode_returns.reserve(static_cast<std::size_t>(n_episodes));
    for (int ep = 0; ep < n_episodes; ++ep) {
        Rng rng(hash64(seed, static_cast<std::uint64_t>(ep)));
        EnvState state = env->reset(rng);
        double ep_return = 0.0;
        while (!state.done()) {
            const PolicyOutput po = forward_policy(ac.actor, state.observation);
            const int action = sample_categorical(po.log_probs, rng);
            StepOutcome out = env->step(state, action);
            ep_return += out.reward;
            state = std::move(out.next_state);
        }
        result.episode_returns.push_back(ep_return);
        result.mean_return += ep_return;
    }
    result.mean_return /= static_cast<double>(n_episodes);
    return result;
}

double mean_pairwise_cosine(const std::vector<Eigen::VectorXd>& vectors,
                            const std::vector<std::pair<int, int>>& pairs) {
    if (pairs.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [a, b] : pairs) {
        const Eigen::VectorXd& va = vectors[static_cast<std::size_t>(a)];
        const Eigen::VectorXd& vb = vectors[static_cast<std::size_t>(b)];
        const double na = va.norm();
        const double nb = vb.norm();
        sum += na > 0.0 && nb > 0.0 ? va.dot(vb) / (na * nb) : 0.0;
    }
    return sum / static_cast<double>(pairs.size());
}

CollinearityReport grad_collinearity(const ActorCritic& ac,
                                     const RolloutBuffer& buffer,
                                     const Eigen::VectorXd& advantages,
                                     int max_pairs, std::uint64_t seed) {
    const int T = buffer.size();
    if (T < 2)
        throw ContractViolation("grad_collinearity needs at least 2 transitions");
    if (advantages.size() != T)
        throw ContractViolation("grad_collinearity: advantages not aligned");

    std::vector<std::pair<int, int>> consecutive;
    for (int t = 0; t + 1 < T; ++t) {
        const auto& a = buffer.transitions[static_cast<std::size_t>(t)];
        const auto& b = buffer.transitions[static_cast<std::size_t>(t) + 1];
        if (a.episode_id == b.episode_id) consecutive.emplace_back(t, t + 1);
    }

    Rng rng(hash64(seed, 0x70616972ULL));
    if (max_pairs > 0 && static_cast<int>(consecutive.size()) > max_pairs) {
        // Uniform subset via partial Fisher-Yates.
        for (int i = 0; i < max_pairs; ++i) {
            const int j = i + static_cast<int>(rng.uniform_int(
                                  consecutive.size() - static_cast<std::size_t>(i)));
            std::swap(consecutive[static_cast<std::size_t>(i)],
                      consecutive[static_cast<std::size_t>(j)]);
        }
        consecutive.resize(static_cast<std::size_t>(max_pairs));
    }

    std::vector<std::pair<int, int>> random_pairs;
    if (T >= 4) {
        while (random_pairs.size() < consecutive.size()) {
            const int i =
                static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(T)));
            const int j =
                static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(T)));
            if (std::abs(i - j) > 1) random_pairs.emplace_back(i, j);
        }
    }

    // Gradients only for indices a pair actually touches.
    std::vector<Eigen::VectorXd> grads(static_cast<std::size_t>(T));
    std::vector<bool> have(static_cast<std::size_t>(T), false);
    ForwardCache cache;
    auto ensure_grad = [&](int t) {
        if (have[static_cast<std::size_t>(t)]) return;
        const Transition& tr = buffer.transitions[static_cast<std::size_t>(t)];
        const Eigen::VectorXd logits = ac.actor.forward_cached(tr.state, cache);
        const Eigen::VectorXd log_probs = log_softmax(logits);
        // d(log pi(a|s))/dlogits = e_a - p, scaled by the advantage.
        Eigen::VectorXd upstream = (-log_probs.array().exp()).matrix();
        upstream[tr.action] += 1.0;
        upstream *= advantages[t];
        grads[static_cast<std::size_t>(t)] = ac.actor.backward(cache, upstream);
        have[static_cast<std::size_t>(t)] = true;
    };
    for (const auto& [a, b] : consecutive) {
        ensure_grad(a);
        ensure_grad(b);
    }
    for (const auto& [a, b] : random_pairs) {
        ensure_grad(a);
        ensure_grad(b);
    }

    CollinearityReport report;
    report.consecutive_mean = mean_pairwise_cosine(grads, consecutive);
    report.random_mean = mean_pairwise_cosine(grads, random_pairs);
    report.difference = report.consecutive_mean - report.random_mean;
    report.pairs_used = static_cast<int>(consecutive.size());
    return report;
}

}  // namespace decorr
