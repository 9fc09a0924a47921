#include "decorr/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "decorr/advantage.hpp"
#include "decorr/env.hpp"
#include "decorr/errors.hpp"
#include "decorr/format.hpp"
#include "decorr/skip.hpp"

namespace decorr {

namespace {

namespace fs = std::filesystem;

std::string hash_to_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

double mean_policy_entropy(const ActorCritic& ac, const RolloutBuffer& buffer) {
    double sum = 0.0;
    for (const Transition& tr : buffer.transitions)
        sum += forward_policy(ac.actor, tr.state).entropy;
    return sum / static_cast<double>(buffer.size());
}

void run_one_seed(const ExperimentSpec& spec, std::uint64_t seed,
                  const std::string& run_dir, SeedRunResult& result) {
    result.seed = seed;
    result.csv_path = run_dir + "/seed_" + std::to_string(seed) + ".csv";
    result.checkpoint_path =
        run_dir + "/checkpoint_seed_" + std::to_string(seed) + ".txt";

    PpoConfig cfg = spec.ppo;
    cfg.seed = seed;

    Rng env_rng(hash64(seed, static_cast<std::uint64_t>(Stream::env)));
    Rng init_rng(hash64(seed, static_cast<std::uint64_t>(Stream::init)));
    Rng action_rng(hash64(seed, static_cast<std::uint64_t>(Stream::actions)));
    Rng update_rng(hash64(seed, static_cast<std::uint64_t>(Stream::update)));
    Rng skip_rng(hash64(seed, static_cast<std::uint64_t>(Stream::skip)));

    ActorCritic ac = make_actor_critic(spec.env_id, cfg.optimizer, cfg.actor_lr,
                                       cfg.critic_lr, init_rng);
    auto env = make_env(spec.env_id);
    EnvState state;

    std::ofstream csv(result.csv_path);
    if (!csv) throw ConfigError("cannot write " + result.csv_path);
    csv << metrics_csv_header() << "\n";
    csv.flush();

    long global_step = 0;
    long next_eval = spec.eval_interval_steps;
    long checkpoint_index = 0;

    try {
        while (global_step < cfg.max_training_steps) {
            RolloutBuffer raw = collect_rollout(*env, state, ac, cfg.rollout_steps,
                                                env_rng, action_rng);
            RolloutBuffer buffer;
            switch (cfg.method) {
                case Method::fixed_k:
                    buffer = skip_fixed_k(raw, cfg.base_k);
                    break;
                case Method::random_k:
                    buffer = skip_random_k(raw, cfg.base_k, skip_rng);
                    break;
                default:
                    buffer = std::move(raw);
                    break;
            }

            const AdvantageBatch batch =
                compute_advantages(buffer, cfg.gamma, cfg.gae_lambda);
            const UpdateReport report = ppo_update(ac, buffer, batch, cfg,
                                                   update_rng);
            global_step += buffer.raw_steps;

            const bool finished = global_step >= cfg.max_training_steps;
            if (global_step >= next_eval || finished) {
                Eigen::VectorXd values(buffer.size());
                for (int t = 0; t < buffer.size(); ++t)
                    values[t] =
                        buffer.transitions[static_cast<std::size_t>(t)].value;

                const EvalResult eval = evaluate(
                    ac, spec.env_id, spec.eval_episodes,
                    hash64(seed, static_cast<std::uint64_t>(Stream::eval),
                           static_cast<std::uint64_t>(checkpoint_index)));
                const CollinearityReport collin = grad_collinearity(
                    ac, buffer, batch.advantages, 32,
                    hash64(seed, 7, static_cast<std::uint64_t>(checkpoint_index)));

                MetricsRecord rec;
                rec.global_step = global_step;
                rec.eval_reward = eval.mean_return;
                rec.approx_kl = report.approx_kl;
                rec.entropy = mean_policy_entropy(ac, buffer);
                rec.explained_variance = explained_variance(values, batch.returns);
                rec.value_bias = value_bias(values, batch.returns);
                rec.critic_loss = report.value_loss;
                rec.clip_fraction = report.clip_fraction;
                rec.grad_collinearity = collin.difference;
                rec.has_collinearity = true;

                csv << metrics_csv_row(rec) << "\n";
                csv.flush();
                result.records.push_back(rec);
                ++checkpoint_index;
                while (next_eval <= global_step)
                    next_eval += spec.eval_interval_steps;
            }
        }
    } catch (const DivergenceError& e) {
        result.diverged = true;
        result.diverged_at_step = global_step;
        result.error = e.what();
    }

    save_checkpoint(ac, result.checkpoint_path);
}

void write_aggregate(const std::string& path,
                     const std::vector<SeedRunResult>& seeds) {
    std::size_t common = 0;
    if (!seeds.empty()) {
        common = seeds.front().records.size();
        for (const SeedRunResult& s : seeds)
            common = std::min(common, s.records.size());
    }

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);

    const auto& fields = metrics_csv_fields();
    out << "global_step";
    for (std::size_t f = 1; f < fields.size(); ++f)
        out << "," << fields[f] << "_mean," << fields[f] << "_std";
    out << "\n";

    const double n = static_cast<double>(seeds.size());
    for (std::size_t row = 0; row < common; ++row) {
        const long step = seeds.front().records[row].global_step;
        for (const SeedRunResult& s : seeds) {
            if (s.records[row].global_step != step)
                throw ComparisonError(
                    "checkpoint schedules differ across seeds");
        }
        out << step;

        auto emit = [&](auto getter) {
            double mean = 0.0;
            for (const SeedRunResult& s : seeds) mean += getter(s.records[row]);
            mean /= n;
            double var = 0.0;
            for (const SeedRunResult& s : seeds) {
                const double d = getter(s.records[row]) - mean;
                var += d * d;
            }
            var /= n;
            out << "," << fmt17(mean) << "," << fmt17(std::sqrt(var));
        };
        emit([](const MetricsRecord& r) { return r.eval_reward; });
        emit([](const MetricsRecord& r) { return r.approx_kl; });
        emit([](const MetricsRecord& r) { return r.entropy; });
        emit([](const MetricsRecord& r) { return r.explained_variance; });
        emit([](const MetricsRecord& r) { return r.value_bias; });
        emit([](const MetricsRecord& r) { return r.critic_loss; });
        emit([](const MetricsRecord& r) { return r.clip_fraction; });
        emit([](const MetricsRecord& r) { return r.grad_collinearity; });
        out << "\n";
    }
}

void write_manifest(const std::string& path, const ExperimentSpec& spec,
                    const std::string& hash,
                    const std::vector<SeedRunResult>& seeds) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "name " << spec.name << "\n";
    out << "env " << spec.env_id << "\n";
    out << "spec_hash " << hash << "\n";
    out << "method " << method_name(spec.ppo.method) << "\n";
    out << "rollout_steps " << spec.ppo.rollout_steps << "\n";
    out << "max_training_steps " << spec.ppo.max_training_steps << "\n";
    out << "eval_interval_steps " << spec.eval_interval_steps << "\n";
    for (const SeedRunResult& s : seeds) {
        out << "seed " << s.seed << " "
            << (s.diverged ? "diverged_at_" + std::to_string(s.diverged_at_step)
                           : std::string("completed"))
            << "\n";
    }
}

}  // namespace

RunArtifact run_experiment(const ExperimentSpec& spec) {
    spec.validate();

    RunArtifact artifact;
    artifact.name = spec.name;
    artifact.env_id = canonical_env_id(spec.env_id);
    artifact.dir = spec.output_dir + "/" + spec.name;
    artifact.spec_hash = hash_to_hex(spec_hash(spec));
    fs::create_directories(artifact.dir);

    artifact.seeds.resize(spec.seeds.size());

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (hw > 1 && spec.seeds.size() > 1) {
        std::vector<std::thread> workers;
        workers.reserve(spec.seeds.size());
        std::vector<std::string> errors(spec.seeds.size());
        for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
            workers.emplace_back([&, i] {
                try {
                    run_one_seed(spec, spec.seeds[i], artifact.dir,
                                 artifact.seeds[i]);
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            });
        }
        for (auto& w : workers) w.join();
        for (const std::string& e : errors)
            if (!e.empty()) throw ConfigError("seed worker failed: " + e);
    } else {
        for (std::size_t i = 0; i < spec.seeds.size(); ++i)
            run_one_seed(spec, spec.seeds[i], artifact.dir, artifact.seeds[i]);
    }

    artifact.aggregate_csv_path = artifact.dir + "/aggregate.csv";
    write_aggregate(artifact.aggregate_csv_path, artifact.seeds);
    artifact.manifest_path = artifact.dir + "/manifest.txt";
    write_manifest(artifact.manifest_path, spec, artifact.spec_hash,
                   artifact.seeds);
    return artifact;
}

RunArtifact load_artifact(const std::string& dir) {
    RunArtifact artifact;
    artifact.dir = dir;
    artifact.manifest_path = dir + "/manifest.txt";
    artifact.aggregate_csv_path = dir + "/aggregate.csv";

    std::ifstream manifest(artifact.manifest_path);
    if (!manifest)
        throw ConfigError("not a run artifact (missing manifest): " + dir);
    std::string key;
    while (manifest >> key) {
        if (key == "name") manifest >> artifact.name;
        else if (key == "env") manifest >> artifact.env_id;
        else if (key == "spec_hash") manifest >> artifact.spec_hash;
        else if (key == "seed") {
            SeedRunResult s;
            std::string status;
            manifest >> s.seed >> status;
            s.diverged = status.rfind("diverged", 0) == 0;
            s.csv_path = dir + "/seed_" + std::to_string(s.seed) + ".csv";
            s.checkpoint_path =
                dir + "/checkpoint_seed_" + std::to_string(s.seed) + ".txt";
            artifact.seeds.push_back(std::move(s));
        } else {
            std::string rest;
            std::getline(manifest, rest);
        }
    }
    if (!fs::exists(artifact.aggregate_csv_path))
        throw ConfigError("not a run artifact (missing aggregate.csv): " + dir);
    return artifact;
}

}  // namespace decorr
