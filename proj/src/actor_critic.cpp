#include "decorr/actor_critic.hpp"

#include <fstream>
#include <sstream>

#include "decorr/env.hpp"
#include "decorr/errors.hpp"
#include "decorr/format.hpp"

namespace decorr {

ActorCritic make_actor_critic(const std::string& env_id, OptKind optimizer,
                              double actor_lr, double critic_lr, Rng& init_rng) {
    auto env = make_env(env_id);
    ActorCritic ac;
    ac.env_id = env->id();
    ac.actor = make_mlp(env->obs_dim(), {128, 128}, env->num_actions(), 0.01,
                        init_rng);
    ac.critic = make_mlp(env->obs_dim(), {128, 128}, 1, 1.0, init_rng);
    ac.opt_actor = make_optimizer(optimizer, ac.actor.parameter_count(), actor_lr);
    ac.opt_critic = make_optimizer(optimizer, ac.critic.parameter_count(), critic_lr);
    return ac;
}

namespace {

const char* act_name(Activation a) {
    return a == Activation::tanh ? "tanh" : "identity";
}

Activation act_from_name(const std::string& name) {
    if (name == "tanh") return Activation::tanh;
    if (name == "identity") return Activation::identity;
    throw ConfigError("checkpoint: unknown activation '" + name + "'");
}

void write_net_header(std::ofstream& out, const char* tag, const DenseNet& net) {
    out << tag << "_layers " << net.layers().size() << "\n";
    for (const Layer& l : net.layers())
        out << tag << "_layer " << l.W.rows() << " " << l.W.cols() << " "
            << act_name(l.act) << "\n";
}

DenseNet read_net(std::istream& in, const char* tag) {
    std::string key;
    std::size_t n_layers = 0;
    in >> key >> n_layers;
    if (key != std::string(tag) + "_layers" || !in)
        throw ConfigError("checkpoint: malformed header (expected " +
                          std::string(tag) + "_layers)");
    std::vector<Layer> layers;
    for (std::size_t i = 0; i < n_layers; ++i) {
        long rows = 0, cols = 0;
        std::string act;
        in >> key >> rows >> cols >> act;
        if (key != std::string(tag) + "_layer" || !in || rows <= 0 || cols <= 0)
            throw ConfigError("checkpoint: malformed layer line");
        Layer l;
        l.W = Eigen::MatrixXd::Zero(rows, cols);
        l.b = Eigen::VectorXd::Zero(rows);
        l.act = act_from_name(act);
        layers.push_back(std::move(l));
    }
    return DenseNet(std::move(layers));
}

}  // namespace

void save_checkpoint(const ActorCritic& ac, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write checkpoint: " + path);
    out << "decorr-checkpoint v1\n";
    out << "env " << ac.env_id << "\n";
    write_net_header(out, "actor", ac.actor);
    write_net_header(out, "critic", ac.critic);
    const Eigen::VectorXd a = ac.actor.params_flat();
    const Eigen::VectorXd c = ac.critic.params_flat();
    out << "values " << a.size() + c.size() << "\n";
    for (Eigen::Index i = 0; i < a.size(); ++i) out << fmt17(a[i]) << "\n";
    for (Eigen::Index i = 0; i < c.size(); ++i) out << fmt17(c[i]) << "\n";
    if (!out) throw ConfigError("failed while writing checkpoint: " + path);
}

ActorCritic load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read checkpoint: " + path);
    std::string magic, version;
    in >> magic >> version;
    if (magic != "decorr-checkpoint" || version != "v1")
        throw ConfigError("not a checkpoint file: " + path);

    ActorCritic ac;
    std::string key;
    in >> key >> ac.env_id;
    if (key != "env") throw ConfigError("checkpoint: missing env line");

    ac.actor = read_net(in, "actor");
    ac.critic = read_net(in, "critic");

    long n_values = 0;
    in >> key >> n_values;
    if (key != "values" ||
        n_values != ac.actor.parameter_count() + ac.critic.parameter_count())
        throw ConfigError("checkpoint: value count does not match layer dims");

    Eigen::VectorXd a(ac.actor.parameter_count());
    Eigen::VectorXd c(ac.critic.parameter_count());
    for (Eigen::Index i = 0; i < a.size(); ++i) in >> a[i];
    for (Eigen::Index i = 0; i < c.size(); ++i) in >> c[i];
    if (!in) throw ConfigError("checkpoint: truncated value section");
    ac.actor.set_params_flat(a);
    ac.critic.set_params_flat(c);

    ac.opt_actor = make_optimizer(OptKind::adamw, ac.actor.parameter_count(), 3e-4);
    ac.opt_critic = make_optimizer(OptKind::adamw, ac.critic.parameter_count(), 5e-4);
    return ac;
}

}  // namespace decorr
