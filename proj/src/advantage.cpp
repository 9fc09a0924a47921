#include "decorr/advantage.hpp"

#include <cmath>

#include "decorr/errors.hpp"

namespace decorr {

Eigen::VectorXd td_residuals(const RolloutBuffer& buffer, double gamma) {
    if (!(gamma > 0.0) || gamma > 1.0)
        throw ConfigError("gamma must be in (0, 1], got " + std::to_string(gamma));
    const int T = buffer.size();
    Eigen::VectorXd deltas(T);
    for (int t = 0; t < T; ++t) {
        const Transition& tr = buffer.transitions[static_cast<std::size_t>(t)];
        const double mask = tr.terminated ? 0.0 : 1.0;
        deltas[t] = tr.reward + gamma * mask * tr.next_value - tr.value;
    }
    return deltas;
}

Eigen::VectorXd td_residuals(const RolloutBuffer& buffer, const DenseNet& critic,
                             double gamma) {
    if (!(gamma > 0.0) || gamma > 1.0)
        throw ConfigError("gamma must be in (0, 1], got " + std::to_string(gamma));
    const int T = buffer.size();
    Eigen::VectorXd deltas(T);
    for (int t = 0; t < T; ++t) {
        const Transition& tr = buffer.transitions[static_cast<std::size_t>(t)];
        const double mask = tr.terminated ? 0.0 : 1.0;
        deltas[t] = tr.reward + gamma * mask * forward_value(critic, tr.next_state) -
                    forward_value(critic, tr.state);
    }
    return deltas;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gae(
    const Eigen::VectorXd& deltas, double gamma, double lambda,
    const std::vector<std::uint8_t>& done, const Eigen::VectorXd& values) {
    if (lambda < 0.0 || lambda > 1.0)
        throw ConfigError("gae_lambda must be in [0, 1], got " +
                          std::to_string(lambda));
    const Eigen::Index T = deltas.size();
    if (static_cast<Eigen::Index>(done.size()) != T || values.size() != T)
        throw ContractViolation("gae: array lengths do not match");

    Eigen::VectorXd advantages(T);
    double carry = 0.0;
    for (Eigen::Index t = T - 1; t >= 0; --t) {
        const double mask = done[static_cast<std::size_t>(t)] ? 0.0 : 1.0;
        carry = deltas[t] + gamma * lambda * mask * carry;
        advantages[t] = carry;
    }
    Eigen::VectorXd returns = advantages + values;
    return {std::move(advantages), std::move(returns)};
}

std::pair<double, double> normalize_advantages(Eigen::VectorXd& advantages) {
    if (advantages.size() < 2)
        throw ConfigError("normalize_advantages needs at least 2 values");
    const double mean = advantages.mean();
    const double var = (advantages.array() - mean).square().mean();
    const double std = std::sqrt(var);
    advantages = ((advantages.array() - mean) / (std + 1e-8)).matrix();
    return {mean, std};
}

AdvantageBatch compute_advantages(const RolloutBuffer& buffer, double gamma,
                                  double lambda) {
    AdvantageBatch batch;
    batch.deltas = td_residuals(buffer, gamma);
    std::vector<std::uint8_t> done(static_cast<std::size_t>(buffer.size()));
    Eigen::VectorXd values(buffer.size());
    for (int t = 0; t < buffer.size(); ++t) {
        done[static_cast<std::size_t>(t)] =
            buffer.transitions[static_cast<std::size_t>(t)].done() ? 1 : 0;
        values[t] = buffer.transitions[static_cast<std::size_t>(t)].value;
    }
    auto [adv, ret] = gae(batch.deltas, gamma, lambda, done, values);
    batch.advantages = std::move(adv);
    batch.returns = std::move(ret);
    auto [mean, std] = normalize_advantages(batch.advantages);
    batch.norm_mean = mean;
    batch.norm_std = std;
    batch.normalized = true;
    return batch;
}

}  // namespace decorr
