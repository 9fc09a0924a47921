#pragma once

#include <Eigen/Core>
#include <vector>

#include "decorr/rng.hpp"

namespace decorr {

enum class Activation { tanh, identity };

struct Layer {
    Eigen::MatrixXd W;  // out x in
    Eigen::VectorXd b;
    Activation act = Activation::identity;
};

// Per-layer activations saved by forward_cached for the backward pass.
struct ForwardCache {
    Eigen::VectorXd input;
    std::vector<Eigen::VectorXd> post;  // activation outputs, one per layer
    bool valid = false;
};

// Dense feed-forward net in 64-bit floats with exact reverse-mode gradients.
// Parameters flatten per layer as W (column-major) then b; this order is the
// contract for optimizer state, checkpoints, and gradient checks.
class DenseNet {
public:
    DenseNet() = default;
    explicit DenseNet(std::vector<Layer> layers);

    int input_dim() const;
    int output_dim() const;
    int parameter_count() const { return param_count_; }
    const std::vector<Layer>& layers() const { return layers_; }

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    Eigen::VectorXd forward_cached(const Eigen::VectorXd& x, ForwardCache& cache) const;

    // Accumulates scale * dL/dparam into grad (flat, parameter order above)
    // given dL/doutput. grad must already be parameter_count() long.
    void backward_into(const ForwardCache& cache, const Eigen::VectorXd& upstream,
                       double scale, Eigen::VectorXd& grad) const;
    Eigen::VectorXd backward(const ForwardCache& cache,
                             const Eigen::VectorXd& upstream) const;

    Eigen::VectorXd params_flat() const;
    void set_params_flat(const Eigen::VectorXd& flat);

    // 1.0 for weight-matrix entries, 0.0 for biases (AdamW decay mask).
    const Eigen::VectorXd& weight_decay_mask() const { return decay_mask_; }

private:
    void rebuild_metadata();

    std::vector<Layer> layers_;
    Eigen::VectorXd decay_mask_;
    int param_count_ = 0;
};

// Two tanh hidden layers; orthogonal init (hidden gain sqrt(2), given head
// gain), zero biases. Draws from rng in layer order, column-major.
DenseNet make_mlp(int input_dim, const std::vector<int>& hidden, int output_dim,
                  double head_gain, Rng& rng);

void orthogonal_init(Eigen::MatrixXd& W, double gain, Rng& rng);

struct PolicyOutput {
    Eigen::VectorXd logits;
    Eigen::VectorXd log_probs;
    double entropy = 0.0;
};

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits);
double entropy_from_log_probs(const Eigen::VectorXd& log_probs);
int sample_categorical(const Eigen::VectorXd& log_probs, Rng& rng);

PolicyOutput forward_policy(const DenseNet& net, const Eigen::VectorXd& observation);
double forward_value(const DenseNet& net, const Eigen::VectorXd& observation);

}  // namespace decorr
