#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "decorr/net.hpp"
#include "decorr/rollout.hpp"

namespace decorr {

// TD residuals, GAE advantages, and returns aligned with one RolloutBuffer.
// Always computed over the complete buffer before any index subsampling.
struct AdvantageBatch {
    Eigen::VectorXd deltas;
    Eigen::VectorXd advantages;
    Eigen::VectorXd returns;
    bool normalized = false;
    double norm_mean = 0.0;
    double norm_std = 0.0;
};

// delta_t = r_t + gamma * (1 - terminated_t) * V(s_{t+1}) - V(s_t).
// Truncated steps still bootstrap from the successor value; only true
// termination masks it. Uses the collection-time values stored in the buffer.
Eigen::VectorXd td_residuals(const RolloutBuffer& buffer, double gamma);

// Same formula with V(s_{t+1}) recomputed through the given critic. Identical
// to the stored-value form as long as the critic has not been updated since
// collection; exists so tests can assert exactly that.
Eigen::VectorXd td_residuals(const RolloutBuffer& buffer, const DenseNet& critic,
                             double gamma);

// Backward recursion A_t = delta_t + gamma*lambda*(1 - done_t)*A_{t+1} with
// the carry reset at every episode boundary (terminated or truncated), plus
// returns R_t = A_t + V(s_t). done flags must mark boundaries of any kind.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gae(
    const Eigen::VectorXd& deltas, double gamma, double lambda,
    const std::vector<std::uint8_t>& done, const Eigen::VectorXd& values);

// In-place (A - mean) / (population std + 1e-8); returns (mean, std).
std::pair<double, double> normalize_advantages(Eigen::VectorXd& advantages);

// Full pipeline over a buffer: residuals, GAE, returns, then normalization.
AdvantageBatch compute_advantages(const RolloutBuffer& buffer, double gamma,
                                  double lambda);

}  // namespace decorr
