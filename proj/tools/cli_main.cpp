#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "decorr/advantage.hpp"
#include "decorr/compare.hpp"
#include "decorr/config.hpp"
#include "decorr/env.hpp"
#include "decorr/errors.hpp"
#include "decorr/experiment.hpp"
#include "decorr/metrics.hpp"
#include "decorr/rollout.hpp"

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t comma = csv.find(',', pos);
        if (comma == std::string::npos) comma = csv.size();
        const std::string item = csv.substr(pos, comma - pos);
        if (item.empty())
            throw decorr::ConfigError("empty entry in --seeds list");
        try {
            seeds.push_back(std::stoull(item));
        } catch (const std::exception&) {
            throw decorr::ConfigError("bad seed '" + item + "' in --seeds");
        }
        pos = comma + 1;
        if (comma == csv.size()) break;
    }
    return seeds;
}

int do_train(const std::string& config_path, const std::string& seeds_csv,
             const std::string& out_dir) {
    decorr::ExperimentSpec spec = decorr::load_config(config_path);
    if (!seeds_csv.empty()) spec.seeds = parse_seed_list(seeds_csv);
    if (!out_dir.empty()) spec.output_dir = out_dir;
    spec.validate();

    std::cout << "training " << spec.name << " (" << spec.env_id << ", "
              << decorr::method_name(spec.ppo.method) << ", "
              << spec.seeds.size() << " seeds, "
              << spec.ppo.max_training_steps << " steps)\n";
    const decorr::RunArtifact artifact = decorr::run_experiment(spec);

    std::cout << "run directory: " << artifact.dir << "\n";
    std::cout << "spec hash: " << artifact.spec_hash << "\n";
    for (const decorr::SeedRunResult& s : artifact.seeds) {
        std::cout << "seed " << s.seed << ": ";
        if (s.diverged) {
            std::cout << "diverged at step " << s.diverged_at_step;
        } else {
            std::cout << "completed";
            if (!s.records.empty())
                std::cout << ", final eval reward "
                          << s.records.back().eval_reward;
        }
        std::cout << "\n";
    }
    std::cout << "aggregate: " << artifact.aggregate_csv_path << "\n";
    return 0;
}

int do_eval(const std::string& checkpoint, const std::string& env_id,
            int episodes, std::uint64_t seed) {
    const decorr::ActorCritic ac = decorr::load_checkpoint(checkpoint);
    const std::string requested = decorr::canonical_env_id(env_id);
    if (requested != ac.env_id)
        throw decorr::ConfigError("checkpoint was trained on '" + ac.env_id +
                                  "', not '" + requested + "'");
    const decorr::EvalResult result =
        decorr::evaluate(ac, requested, episodes, seed);
    for (std::size_t i = 0; i < result.episode_returns.size(); ++i)
        std::cout << "episode " << i + 1 << ": " << result.episode_returns[i]
                  << "\n";
    std::cout << "mean return over " << episodes
              << " episodes: " << result.mean_return << "\n";
    return 0;
}

int do_compare(const std::vector<std::string>& dirs, const std::string& metric,
               const std::string& svg_path) {
    std::vector<decorr::RunArtifact> artifacts;
    artifacts.reserve(dirs.size());
    for (const std::string& d : dirs)
        artifacts.push_back(decorr::load_artifact(d));
    const decorr::Comparison cmp = decorr::compare_runs(artifacts, metric);
    std::cout << decorr::format_comparison_table(cmp);
    if (!svg_path.empty()) {
        decorr::write_comparison_svg(cmp, svg_path);
        std::cout << "svg written: " << svg_path << "\n";
    }
    return 0;
}

int do_probe(const std::string& checkpoint, const std::string& env_id,
             int steps, std::uint64_t seed) {
    const decorr::ActorCritic ac = decorr::load_checkpoint(checkpoint);
    const std::string requested = decorr::canonical_env_id(env_id);
    if (requested != ac.env_id)
        throw decorr::ConfigError("checkpoint was trained on '" + ac.env_id +
                                  "', not '" + requested + "'");

    auto env = decorr::make_env(requested);
    decorr::Rng rng(decorr::hash64(seed, 7));
    const decorr::RolloutBuffer buffer =
        decorr::collect_rollout(*env, ac, steps, rng);
    const decorr::AdvantageBatch batch =
        decorr::compute_advantages(buffer, 0.99, 0.98);
    const decorr::CollinearityReport report = decorr::grad_collinearity(
        ac, buffer, batch.advantages, 64, decorr::hash64(seed, 7, 1));

    std::cout << "collinearity probe (" << requested << ", " << steps
              << " steps)\n";
    std::cout << "consecutive-pair mean cosine: " << report.consecutive_mean
              << "\n";
    std::cout << "random-pair mean cosine:      " << report.random_mean << "\n";
    std::cout << "difference:                   " << report.difference << "\n";
    std::cout << "pairs per group:              " << report.pairs_used << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PPO training harness with rollout-decorrelation methods"};
    app.require_subcommand(1);

    auto* train = app.add_subcommand("train", "Run a multi-seed experiment");
    std::string config_path;
    std::string seeds_csv;
    std::string out_dir;
    train->add_option("config", config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    train->add_option("--seeds", seeds_csv, "comma-separated seed override");
    train->add_option("--out", out_dir, "output directory override");

    auto* eval_cmd =
        app.add_subcommand("eval", "Evaluate a checkpoint's policy");
    std::string eval_ckpt;
    std::string eval_env;
    int eval_episodes = 5;
    std::uint64_t eval_seed = 0;
    eval_cmd->add_option("checkpoint", eval_ckpt, "checkpoint file")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--env", eval_env, "environment id")->required();
    eval_cmd->add_option("--episodes", eval_episodes, "episode count")
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--seed", eval_seed, "evaluation seed");

    auto* cmp = app.add_subcommand("compare", "Compare run artifacts");
    std::vector<std::string> cmp_dirs;
    std::string cmp_metric;
    std::string cmp_svg;
    cmp->add_option("dirs", cmp_dirs, "run artifact directories")
        ->required()
        ->expected(-1);
    cmp->add_option("--metric", cmp_metric, "metric column to compare")
        ->required();
    cmp->add_option("--svg", cmp_svg, "write an SVG plot to this path");

    auto* probe = app.add_subcommand(
        "probe-collinearity",
        "Measure gradient alignment of adjacent transitions");
    std::string probe_ckpt;
    std::string probe_env;
    int probe_steps = 512;
    std::uint64_t probe_seed = 0;
    probe->add_option("checkpoint", probe_ckpt, "checkpoint file")
        ->required()
        ->check(CLI::ExistingFile);
    probe->add_option("--env", probe_env, "environment id")->required();
    probe->add_option("--steps", probe_steps, "rollout length for the probe")
        ->check(CLI::PositiveNumber);
    probe->add_option("--seed", probe_seed, "probe seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
    }

    try {
        if (*train) return do_train(config_path, seeds_csv, out_dir);
        if (*eval_cmd)
            return do_eval(eval_ckpt, eval_env, eval_episodes, eval_seed);
        if (*cmp) return do_compare(cmp_dirs, cmp_metric, cmp_svg);
        if (*probe)
            return do_probe(probe_ckpt, probe_env, probe_steps, probe_seed);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
