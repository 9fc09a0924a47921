#include "decorr/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "decorr/env.hpp"
#include "decorr/errors.hpp"
#include "decorr/format.hpp"

namespace decorr {

void ExperimentSpec::validate() const {
    canonical_env_id(env_id);
    ppo.validate();
    if (seeds.empty()) throw ConfigError("seeds must be non-empty");
    std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
    if (unique.size() != seeds.size())
        throw ConfigError("seeds must be distinct");
    if (eval_interval_steps < 1)
        throw ConfigError("eval_interval_steps must be >= 1");
    if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
    if (output_dir.empty()) throw ConfigError("output_dir must be non-empty");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::vanilla: return "vanilla";
        case Method::fixed_k: return "fixed_k";
        case Method::random_k: return "random_k";
        case Method::subsample: return "subsample";
    }
    return "vanilla";
}

std::string optimizer_name(OptKind k) {
    return k == OptKind::adam ? "adam" : "adamw";
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& value, const std::string& key, int line) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        fail(line, key + ": not a number: '" + value + "'");
    return v;
}

long parse_long(const std::string& value, const std::string& key, int line) {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        fail(line, key + ": not an integer: '" + value + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key,
                        int line) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE ||
        value.find('-') != std::string::npos)
        fail(line, key + ": not an unsigned integer: '" + value + "'");
    return static_cast<std::uint64_t>(v);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& value,
                                           const std::string& key, int line) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(line, key + ": empty seed entry");
        seeds.push_back(parse_u64(item, key, line));
    }
    if (seeds.empty()) fail(line, key + ": empty seed list");
    return seeds;
}

}  // namespace

ExperimentSpec parse_config(const std::string& text, const std::string& name) {
    ExperimentSpec spec;
    spec.name = name;

    std::istringstream in(text);
    std::string raw_line;
    std::string section;
    int line_no = 0;
    bool saw_subsample_p = false;

    while (std::getline(in, raw_line)) {
        ++line_no;
        std::string line = raw_line;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "experiment" && section != "ppo")
                fail(line_no, "unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(line_no, "expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "missing key");
        if (value.empty()) fail(line_no, key + ": missing value");
        if (section.empty())
            fail(line_no, "key '" + key + "' before any [section] header");

        if (section == "experiment") {
            if (key == "name") {
                spec.name = value;
            } else if (key == "env") {
                try {
                    spec.env_id = canonical_env_id(value);
                } catch (const ConfigError&) {
                    fail(line_no, "env: unknown environment '" + value + "'");
                }
            } else if (key == "seeds") {
                spec.seeds = parse_seed_list(value, key, line_no);
            } else if (key == "eval_interval_steps") {
                spec.eval_interval_steps = parse_long(value, key, line_no);
            } else if (key == "eval_episodes") {
                spec.eval_episodes =
                    static_cast<int>(parse_long(value, key, line_no));
            } else if (key == "output_dir") {
                spec.output_dir = value;
            } else {
                fail(line_no, "unknown key '" + key + "' in [experiment]");
            }
        } else {
            PpoConfig& ppo = spec.ppo;
            if (key == "method") {
                if (value == "vanilla") ppo.method = Method::vanilla;
                else if (value == "fixed_k") ppo.method = Method::fixed_k;
                else if (value == "random_k") ppo.method = Method::random_k;
                else if (value == "subsample") ppo.method = Method::subsample;
                else fail(line_no, "method: expected vanilla, fixed_k, random_k, "
                                   "or subsample, got '" + value + "'");
            } else if (key == "subsample_p") {
                ppo.subsample_p = parse_double(value, key, line_no);
                saw_subsample_p = true;
            } else if (key == "base_k") {
                ppo.base_k = static_cast<int>(parse_long(value, key, line_no));
            } else if (key == "clip_epsilon") {
                ppo.clip_epsilon = parse_double(value, key, line_no);
            } else if (key == "gamma") {
                ppo.gamma = parse_double(value, key, line_no);
            } else if (key == "gae_lambda") {
                ppo.gae_lambda = parse_double(value, key, line_no);
            } else if (key == "rollout_steps") {
                ppo.rollout_steps =
                    static_cast<int>(parse_long(value, key, line_no));
            } else if (key == "epochs_per_update") {
                ppo.epochs_per_update =
                    static_cast<int>(parse_long(value, key, line_no));
            } else if (key == "minibatch_size") {
                ppo.minibatch_size =
                    static_cast<int>(parse_long(value, key, line_no));
            } else if (key == "actor_lr") {
                ppo.actor_lr = parse_double(value, key, line_no);
            } else if (key == "critic_lr") {
                ppo.critic_lr = parse_double(value, key, line_no);
            } else if (key == "entropy_coeff") {
                ppo.entropy_coeff = parse_double(value, key, line_no);
            } else if (key == "optimizer") {
                if (value == "adam") ppo.optimizer = OptKind::adam;
                else if (value == "adamw") ppo.optimizer = OptKind::adamw;
                else fail(line_no,
                          "optimizer: expected adam or adamw, got '" + value + "'");
            } else if (key == "max_grad_norm_actor") {
                ppo.max_grad_norm_actor = parse_double(value, key, line_no);
            } else if (key == "max_grad_norm_critic") {
                ppo.max_grad_norm_critic = parse_double(value, key, line_no);
            } else if (key == "max_training_steps") {
                ppo.max_training_steps = parse_long(value, key, line_no);
            } else {
                fail(line_no, "unknown key '" + key + "' in [ppo]");
            }
        }
    }

    if (spec.ppo.method == Method::vanilla && saw_subsample_p &&
        spec.ppo.subsample_p != 1.0)
        throw ConfigError(
            "subsample_p: method=vanilla forces subsample_p = 1, got " +
            fmt17(spec.ppo.subsample_p));

    spec.validate();
    return spec;
}

ExperimentSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();

    // Default name: file stem.
    std::string stem = path;
    const auto slash = stem.find_last_of('/');
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    const auto dot = stem.find_last_of('.');
    if (dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
    if (stem.empty()) stem = "experiment";

    return parse_config(text.str(), stem);
}

std::uint64_t spec_hash(const ExperimentSpec& spec) {
    std::ostringstream out;
    out << spec.name << "|" << spec.env_id << "|" << method_name(spec.ppo.method)
        << "|" << optimizer_name(spec.ppo.optimizer) << "|"
        << fmt17(spec.ppo.clip_epsilon) << "|" << fmt17(spec.ppo.gamma) << "|"
        << fmt17(spec.ppo.gae_lambda) << "|" << fmt17(spec.ppo.subsample_p) << "|"
        << spec.ppo.base_k << "|" << spec.ppo.rollout_steps << "|"
        << spec.ppo.epochs_per_update << "|" << spec.ppo.minibatch_size << "|"
        << fmt17(spec.ppo.actor_lr) << "|" << fmt17(spec.ppo.critic_lr) << "|"
        << fmt17(spec.ppo.entropy_coeff) << "|"
        << fmt17(spec.ppo.max_grad_norm_actor) << "|"
        << fmt17(spec.ppo.max_grad_norm_critic) << "|"
        << spec.ppo.max_training_steps << "|" << spec.eval_interval_steps << "|"
        << spec.eval_episodes;
    for (std::uint64_t s : spec.seeds) out << "|" << s;

    const std::string bytes = out.str();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace decorr
