#include "decorr/net.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "decorr/errors.hpp"

namespace decorr {

DenseNet::DenseNet(std::vector<Layer> layers) : layers_(std::move(layers)) {
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
        if (layers_[i].W.rows() != layers_[i + 1].W.cols())
            throw ContractViolation("net: layer dimensions do not chain");
    }
    for (const Layer& l : layers_) {
        if (l.b.size() != l.W.rows())
            throw ContractViolation("net: bias size does not match layer rows");
    }
    rebuild_metadata();
}

void DenseNet::rebuild_metadata() {
    param_count_ = 0;
    for (const Layer& l : layers_)
        param_count_ += static_cast<int>(l.W.size() + l.b.size());
    decay_mask_.resize(param_count_);
    int off = 0;
    for (const Layer& l : layers_) {
        decay_mask_.segment(off, l.W.size()).setOnes();
        off += static_cast<int>(l.W.size());
        decay_mask_.segment(off, l.b.size()).setZero();
        off += static_cast<int>(l.b.size());
    }
}

int DenseNet::input_dim() const {
    return layers_.empty() ? 0 : static_cast<int>(layers_.front().W.cols());
}

int DenseNet::output_dim() const {
    return layers_.empty() ? 0 : static_cast<int>(layers_.back().W.rows());
}

Eigen::VectorXd DenseNet::forward(const Eigen::VectorXd& x) const {
    // Shares forward_cached's exact arithmetic so collection-time and
    // update-time outputs are bitwise identical.
    ForwardCache cache;
    return forward_cached(x, cache);
}

Eigen::VectorXd DenseNet::forward_cached(const Eigen::VectorXd& x,
                                         ForwardCache& cache) const {
    if (x.size() != input_dim())
        throw ContractViolation("net: observation length does not match input layer");
    cache.input = x;
    cache.post.resize(layers_.size());
    const Eigen::VectorXd* h = &cache.input;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Layer& l = layers_[i];
        cache.post[i].noalias() = l.W * (*h);
        cache.post[i] += l.b;
        if (l.act == Activation::tanh)
            cache.post[i] = cache.post[i].array().tanh();
        h = &cache.post[i];
    }
    cache.valid = true;
    return *h;
}

void DenseNet::backward_into(const ForwardCache& cache,
                             const Eigen::VectorXd& upstream, double scale,
                             Eigen::VectorXd& grad) const {
    if (!cache.valid || cache.post.size() != layers_.size())
        throw ContractViolation("net: backward without a cached forward pass");
    if (grad.size() != param_count_)
        throw ContractViolation("net: gradient accumulator has wrong length");

    // Parameter offsets are cumulative in layer order.
    std::vector<int> offsets(layers_.size());
    int off = 0;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        offsets[i] = off;
        off += static_cast<int>(layers_[i].W.size() + layers_[i].b.size());
    }

    Eigen::VectorXd delta = upstream;
    for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
        const Layer& l = layers_[i];
        if (l.act == Activation::tanh)
            delta.array() *= 1.0 - cache.post[i].array().square();

        const Eigen::VectorXd& in =
            i == 0 ? cache.input : cache.post[static_cast<std::size_t>(i) - 1];

        auto w_grad = Eigen::Map<Eigen::MatrixXd>(
            grad.data() + offsets[i], l.W.rows(), l.W.cols());
        w_grad.noalias() += scale * (delta * in.transpose());
        grad.segment(offsets[i] + l.W.size(), l.b.size()) += scale * delta;

        if (i > 0) delta = l.W.transpose() * delta;
    }
}

Eigen::VectorXd DenseNet::backward(const ForwardCache& cache,
                                   const Eigen::VectorXd& upstream) const {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(param_count_);
    backward_into(cache, upstream, 1.0, grad);
    return grad;
}

Eigen::VectorXd DenseNet::params_flat() const {
    Eigen::VectorXd flat(param_count_);
    int off = 0;
    for (const Layer& l : layers_) {
        flat.segment(off, l.W.size()) =
            Eigen::Map<const Eigen::VectorXd>(l.W.data(), l.W.size());
        off += static_cast<int>(l.W.size());
        flat.segment(off, l.b.size()) = l.b;
        off += static_cast<int>(l.b.size());
    }
    return flat;
}

void DenseNet::set_params_flat(const Eigen::VectorXd& flat) {
    if (flat.size() != param_count_)
        throw ContractViolation("net: flat parameter vector has wrong length");
    int off = 0;
    for (Layer& l : layers_) {
        Eigen::Map<Eigen::VectorXd>(l.W.data(), l.W.size()) =
            flat.segment(off, l.W.size());
        off += static_cast<int>(l.W.size());
        l.b = flat.segment(off, l.b.size());
        off += static_cast<int>(l.b.size());
    }
}

void orthogonal_init(Eigen::MatrixXd& W, double gain, Rng& rng) {
    const auto rows = W.rows();
    const auto cols = W.cols();
    const bool transpose = rows < cols;
    Eigen::MatrixXd G(transpose ? cols : rows, transpose ? rows : cols);
    for (Eigen::Index j = 0; j < G.cols(); ++j)
        for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, j) = rng.normal();

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(G.rows(), G.cols());
    const Eigen::MatrixXd R = qr.matrixQR().topRows(G.cols()).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < G.cols(); ++j)
        if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);

    if (transpose)
        W = gain * Q.transpose();
    else
        W = gain * Q;
}

DenseNet make_mlp(int input_dim, const std::vector<int>& hidden, int output_dim,
                  double head_gain, Rng& rng) {
    std::vector<Layer> layers;
    int in = input_dim;
    for (int h : hidden) {
        Layer l;
        l.W.resize(h, in);
        orthogonal_init(l.W, std::sqrt(2.0), rng);
        l.b = Eigen::VectorXd::Zero(h);
        l.act = Activation::tanh;
        layers.push_back(std::move(l));
        in = h;
    }
    Layer head;
    head.W.resize(output_dim, in);
    orthogonal_init(head.W, head_gain, rng);
    head.b = Eigen::VectorXd::Zero(output_dim);
    head.act = Activation::identity;
    layers.push_back(std::move(head));
    return DenseNet(std::move(layers));
}

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    const Eigen::ArrayXd shifted = logits.array() - m;
    const double lse = std::log(shifted.exp().sum());
    return (shifted - lse).matrix();
}

double entropy_from_log_probs(const Eigen::VectorXd& log_probs) {
    const double h = -(log_probs.array().exp() * log_probs.array()).sum();
    const double max_h = std::log(static_cast<double>(log_probs.size()));
    return std::min(std::max(h, 0.0), max_h);
}

int sample_categorical(const Eigen::VectorXd& log_probs, Rng& rng) {
    const double u = rng.uniform();
    double cdf = 0.0;
    for (Eigen::Index i = 0; i < log_probs.size(); ++i) {
        cdf += std::exp(log_probs[i]);
        if (u < cdf) return static_cast<int>(i);
    }
    return static_cast<int>(log_probs.size() - 1);
}

PolicyOutput forward_policy(const DenseNet& net, const Eigen::VectorXd& observation) {
    PolicyOutput out;
    out.logits = net.forward(observation);
    out.log_probs = log_softmax(out.logits);
    out.entropy = entropy_from_log_probs(out.log_probs);
    return out;
}

double forward_value(const DenseNet& net, const Eigen::VectorXd& observation) {
    const Eigen::VectorXd v = net.forward(observation);
    if (v.size() != 1)
        throw ContractViolation("net: value head must be scalar");
    return v[0];
}

}  // namespace decorr
