#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "decorr/net.hpp"

namespace decorr {

enum class OptKind { adam, adamw };

struct OptimizerState {
    OptKind kind = OptKind::adam;
    std::int64_t step = 0;
    Eigen::VectorXd first_moment;
    Eigen::VectorXd second_moment;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;  // AdamW only, decoupled, weights not biases
};

OptimizerState make_optimizer(OptKind kind, int parameter_count,
                              double learning_rate);

// One Adam/AdamW step in place. maximize negates the gradient (ascent).
// Throws DivergenceError if any parameter leaves the finite range.
void apply_update(DenseNet& net, OptimizerState& state,
                  const Eigen::VectorXd& gradients, bool maximize);

// Scales gradients to max_norm if their global L2 norm exceeds it; returns
// the pre-clip norm. Throws DivergenceError on non-finite input.
double clip_grad_norm(Eigen::VectorXd& gradients, double max_norm);

}  // namespace decorr
