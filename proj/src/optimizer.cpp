#include "decorr/optimizer.hpp"

#include <cmath>

#include "decorr/errors.hpp"

namespace decorr {

OptimizerState make_optimizer(OptKind kind, int parameter_count,
                              double learning_rate) {
    OptimizerState st;
    st.kind = kind;
    st.learning_rate = learning_rate;
    st.first_moment = Eigen::VectorXd::Zero(parameter_count);
    st.second_moment = Eigen::VectorXd::Zero(parameter_count);
    st.weight_decay = kind == OptKind::adamw ? 0.01 : 0.0;
    return st;
}

void apply_update(DenseNet& net, OptimizerState& state,
                  const Eigen::VectorXd& gradients, bool maximize) {
    if (gradients.size() != net.parameter_count())
        throw ContractViolation("optimizer: gradient shape mismatch");
    if (state.first_moment.size() != gradients.size())
        throw ContractViolation("optimizer: state shape mismatch");

    const Eigen::VectorXd g = maximize ? (-gradients).eval() : gradients;

    state.step += 1;
    Eigen::VectorXd params = net.params_flat();

    if (state.kind == OptKind::adamw && state.weight_decay != 0.0) {
        params.array() *=
            1.0 - state.learning_rate * state.weight_decay *
                      net.weight_decay_mask().array();
    }

    state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * g;
    state.second_moment =
        state.beta2 * state.second_moment +
        (1.0 - state.beta2) * g.array().square().matrix();

    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    params.array() -= state.learning_rate *
                      (state.first_moment.array() / bc1) /
                      ((state.second_moment.array() / bc2).sqrt() + state.eps);

    if (!params.allFinite())
        throw DivergenceError("non-finite parameter after optimizer step");
    net.set_params_flat(params);
}

double clip_grad_norm(Eigen::VectorXd& gradients, double max_norm) {
    if (max_norm <= 0.0)
        throw ContractViolation("clip_grad_norm: max_norm must be positive");
    if (!gradients.allFinite())
        throw DivergenceError("non-finite gradient");
    const double norm = gradients.norm();
    if (norm > max_norm) gradients *= max_norm / norm;
    return norm;
}

}  // namespace decorr
