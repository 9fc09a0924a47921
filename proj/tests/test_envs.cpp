#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "decorr/env.hpp"
#include "decorr/errors.hpp"

using namespace decorr;

namespace {

struct GoldenStep {
    int action = 0;
    std::vector<double> obs;
    double reward = 0.0;
};

struct GoldenTrajectory {
    std::string env;
    std::vector<double> initial_internal;
    bool terminal = false;
    std::vector<GoldenStep> steps;
};

GoldenTrajectory load_golden(const std::string& name) {
    const std::string path = std::string(DECORR_TEST_DATA_DIR) + "/" + name;
    std::ifstream in(path);
    REQUIRE_MESSAGE(bool(in), "missing golden file ", path);

    GoldenTrajectory g;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# env: ", 0) == 0) {
            g.env = line.substr(7);
        } else if (line.rfind("# initial_internal_state: ", 0) == 0) {
            std::istringstream ss(line.substr(26));
            double v;
            while (ss >> v) g.initial_internal.push_back(v);
        } else if (line.rfind("# terminal: ", 0) == 0) {
            g.terminal = line.substr(12) == "1";
        } else if (!line.empty() && line.rfind("step_index", 0) != 0) {
            std::istringstream ss(line);
            std::string cell;
            GoldenStep step;
            std::getline(ss, cell, ',');  // step_index, implicit by order
            std::getline(ss, cell, ',');
            step.action = std::stoi(cell);
            std::vector<double> nums;
            while (std::getline(ss, cell, ',')) nums.push_back(std::stod(cell));
            REQUIRE(nums.size() >= 2);
            step.reward = nums.back();
            nums.pop_back();
            step.obs = nums;
            g.steps.push_back(std::move(step));
        }
    }
    REQUIRE(!g.steps.empty());
    return g;
}

EnvState state_from_internal(const std::string& env, const std::vector<double>& v) {
    EnvState s;
    s.internal = Eigen::Map<const Eigen::VectorXd>(v.data(),
                                                   static_cast<long>(v.size()));
    if (env == "cartpole") {
        s.observation = s.internal;
    } else {
        s.observation.resize(6);
        s.observation << std::cos(v[0]), std::sin(v[0]), std::cos(v[1]),
            std::sin(v[1]), v[2], v[3];
    }
    return s;
}

void replay_golden(const std::string& file) {
    const GoldenTrajectory g = load_golden(file);
    EnvState state = state_from_internal(g.env, g.initial_internal);
    const bool is_cartpole = g.env == "cartpole";

    for (std::size_t t = 0; t < g.steps.size(); ++t) {
        const GoldenStep& step = g.steps[t];
        const StepOutcome out = is_cartpole ? step_cartpole(state, step.action)
                                            : step_acrobot(state, step.action);
        REQUIRE(out.next_state.observation.size() ==
                static_cast<long>(step.obs.size()));
        for (std::size_t i = 0; i < step.obs.size(); ++i) {
            INFO("file ", file, " step ", t, " component ", i);
            REQUIRE(std::abs(out.next_state.observation[static_cast<long>(i)] -
                             step.obs[i]) < 1e-10);
        }
        REQUIRE(out.reward == step.reward);
        state = out.next_state;
        if (t + 1 < g.steps.size()) REQUIRE(!state.done());
    }
    CHECK(state.terminated == g.terminal);
}

}  // namespace

TEST_CASE("golden trajectory: cartpole random actions to termination") {
    replay_golden("golden_cartpole.csv");
}

TEST_CASE("golden trajectory: cartpole balanced 50 steps") {
    replay_golden("golden_cartpole_long.csv");
}

TEST_CASE("golden trajectory: acrobot 50 fixed actions") {
    replay_golden("golden_acrobot.csv");
}

TEST_CASE("reset is deterministic and respects init bounds") {
    const EnvState a = reset("cartpole", 42);
    const EnvState b = reset("cartpole", 42);
    REQUIRE(a.observation.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(a.observation[i] == b.observation[i]);
        CHECK(a.observation[i] >= -0.05);
        CHECK(a.observation[i] < 0.05);
    }
    CHECK(a.step_count == 0);
    CHECK(!a.done());

    for (std::uint64_t seed : {0ULL, 1ULL, 99ULL, 123456789ULL}) {
        const EnvState s = reset("cartpole", seed);
        for (int i = 0; i < 4; ++i) {
            CHECK(s.observation[i] >= -0.05);
            CHECK(s.observation[i] < 0.05);
        }
    }
}

TEST_CASE("acrobot reset embeds small angles as near-unit cosines") {
    for (std::uint64_t seed : {0ULL, 5ULL, 77ULL}) {
        const EnvState s = reset("acrobot", seed);
        REQUIRE(s.observation.size() == 6);
        CHECK(s.observation[0] > 0.995);  // cos of angle in [-0.1, 0.1]
        CHECK(s.observation[0] <= 1.0);
        CHECK(s.observation[2] > 0.995);
        CHECK(s.observation[2] <= 1.0);
        CHECK(std::abs(s.observation[1]) < 0.1);  // sin of the same
        CHECK(std::abs(s.observation[3]) < 0.1);
        for (int i = 0; i < 4; ++i) {
            CHECK(s.observation[i] >= -1.0);
            CHECK(s.observation[i] <= 1.0);
        }
        CHECK(std::abs(s.internal[2]) <= 0.1);
        CHECK(std::abs(s.internal[3]) <= 0.1);
    }
}

TEST_CASE("unknown environment id is a config error") {
    CHECK_THROWS_AS(reset("mountaincar", 1), ConfigError);
    CHECK_THROWS_AS(make_env("lunarlander"), ConfigError);
    CHECK_NOTHROW(make_env("CartPole-v1"));
    CHECK_NOTHROW(make_env("Acrobot-v1"));
    CHECK(canonical_env_id("CartPole-v1") == "cartpole");
    CHECK(canonical_env_id("Acrobot-v1") == "acrobot");
}

TEST_CASE("cartpole one step from rest, push right") {
    EnvState zeros;
    zeros.observation = Eigen::VectorXd::Zero(4);
    zeros.internal = zeros.observation;
    const StepOutcome out = step_cartpole(zeros, 1);
    // Hand-evaluated explicit-Euler dynamics at the origin with force +10:
    // xdd = 9.7560975..., thetadd = -14.6341463...
    CHECK(out.next_state.observation[0] == 0.0);
    CHECK(out.next_state.observation[1] ==
          doctest::Approx(0.1951219512195122).epsilon(1e-12));
    CHECK(out.next_state.observation[2] == 0.0);
    CHECK(out.next_state.observation[3] ==
          doctest::Approx(-0.2926829268292683).epsilon(1e-12));
    CHECK(out.reward == 1.0);
    CHECK(!out.done);
    CHECK(out.next_state.step_count == 1);
}

TEST_CASE("stepping a finished state is rejected") {
    EnvState tilted;
    tilted.observation.resize(4);
    tilted.observation << 0.0, 0.0, 0.22, 0.0;  // past the 12-degree line
    tilted.internal = tilted.observation;
    tilted.terminated = true;  // as the env marks any state it produces there
    CHECK_THROWS_AS(step_cartpole(tilted, 0), ContractViolation);

    EnvState timed_out;
    timed_out.observation = Eigen::VectorXd::Zero(4);
    timed_out.internal = timed_out.observation;
    timed_out.step_count = 500;
    timed_out.truncated = true;
    CHECK_THROWS_AS(step_cartpole(timed_out, 0), ContractViolation);
}

TEST_CASE("bad actions are rejected") {
    EnvState s = reset("cartpole", 3);
    CHECK_THROWS_AS(step_cartpole(s, 2), ContractViolation);
    CHECK_THROWS_AS(step_cartpole(s, -1), ContractViolation);
    EnvState a = reset("acrobot", 3);
    CHECK_THROWS_AS(step_acrobot(a, 3), ContractViolation);
}

TEST_CASE("a controller that balances reaches the 500-step truncation") {
    EnvState s = reset("cartpole", 0);
    double total = 0.0;
    int steps = 0;
    while (!s.done()) {
        const int action = s.observation[2] + 0.5 * s.observation[3] > 0 ? 1 : 0;
        const StepOutcome out = step_cartpole(s, action);
        total += out.reward;
        ++steps;
        s = out.next_state;
    }
    CHECK(steps == 500);
    CHECK(s.truncated);
    CHECK(!s.terminated);
    CHECK(total == 500.0);
}

TEST_CASE("cartpole per-step reward is exactly 1 so return equals length") {
    Rng rng(21);
    for (int episode = 0; episode < 5; ++episode) {
        EnvState s = reset("cartpole", 100 + static_cast<std::uint64_t>(episode));
        double total = 0.0;
        int steps = 0;
        while (!s.done()) {
            const int action = static_cast<int>(rng.uniform_int(2));
            const StepOutcome out = step_cartpole(s, action);
            REQUIRE(out.reward == 1.0);
            total += out.reward;
            ++steps;
            s = out.next_state;
        }
        CHECK(total == static_cast<double>(steps));
    }
}

TEST_CASE("acrobot equilibrium: zero torque at hanging rest is a fixed point") {
    EnvState s;
    s.internal = Eigen::VectorXd::Zero(4);
    s.observation.resize(6);
    s.observation << 1.0, 0.0, 1.0, 0.0, 0.0, 0.0;
    const StepOutcome one = step_acrobot(s, 1);
    CHECK(one.reward == -1.0);
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(one.next_state.internal[i]) < 1e-12);
}

namespace {

double acrobot_energy(const Eigen::VectorXd& s) {
    const double t1 = s[0], t2 = s[1], w1 = s[2], w2 = s[3];
    const double m1 = 1.0, m2 = 1.0, l1 = 1.0, lc1 = 0.5, lc2 = 0.5;
    const double I1 = 1.0, I2 = 1.0, g = 9.8;
    const double d1 = m1 * lc1 * lc1 +
                      m2 * (l1 * l1 + lc2 * lc2 + 2 * l1 * lc2 * std::cos(t2)) +
                      I1 + I2;
    const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(t2)) + I2;
    const double ke = 0.5 * d1 * w1 * w1 + d2 * w1 * w2 +
                      0.5 * (m2 * lc2 * lc2 + I2) * w2 * w2;
    const double pe = -m1 * g * lc1 * std::cos(t1) -
                      m2 * g * (l1 * std::cos(t1) + lc2 * std::cos(t1 + t2));
    return ke + pe;
}

}  // namespace

TEST_CASE("acrobot energy is conserved under zero torque") {
    // From exact hanging rest nothing moves, so drift is at round-off level.
    EnvState rest;
    rest.internal = Eigen::VectorXd::Zero(4);
    rest.observation.resize(6);
    rest.observation << 1.0, 0.0, 1.0, 0.0, 0.0, 0.0;
    const double e_rest = acrobot_energy(rest.internal);
    EnvState s = rest;
    for (int i = 0; i < 100; ++i) s = step_acrobot(s, 1).next_state;
    CHECK(std::abs(acrobot_energy(s.internal) - e_rest) / std::abs(e_rest) <
          1e-6);

    // A displaced free swing exposes the integrator's real truncation error;
    // RK4 at dt = 0.2 holds it to ~1e-4 relative over 100 steps.
    EnvState d;
    d.internal.resize(4);
    d.internal << 0.1, -0.05, 0.0, 0.0;
    d.observation.resize(6);
    d.observation << std::cos(0.1), std::sin(0.1), std::cos(-0.05),
        std::sin(-0.05), 0.0, 0.0;
    const double e0 = acrobot_energy(d.internal);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        d = step_acrobot(d, 1).next_state;
        worst = std::max(worst,
                         std::abs(acrobot_energy(d.internal) - e0) /
                             std::abs(e0));
    }
    CHECK(worst < 5e-4);
}

TEST_CASE("acrobot velocities stay inside the clip bounds") {
    Rng rng(31);
    EnvState s = reset("acrobot", 8);
    for (int i = 0; i < 2000; ++i) {
        if (s.done()) s = reset("acrobot", 8 + static_cast<std::uint64_t>(i));
        s = step_acrobot(s, static_cast<int>(rng.uniform_int(3))).next_state;
        CHECK(std::abs(s.internal[2]) <= 4.0 * 3.14159265358979323846);
        CHECK(std::abs(s.internal[3]) <= 9.0 * 3.14159265358979323846);
        CHECK(std::abs(s.observation[0]) <= 1.0);
        CHECK(std::abs(s.observation[2]) <= 1.0);
    }
}

TEST_CASE("acrobot return identity on success and truncation") {
    // Deterministic swing-up: torque follows the lead joint's velocity.
    EnvState s;
    s.internal = Eigen::VectorXd::Zero(4);
    s.observation.resize(6);
    s.observation << 1.0, 0.0, 1.0, 0.0, 0.0, 0.0;
    double total = 0.0;
    int steps = 0;
    while (!s.done()) {
        const int action = s.internal[2] + 0.3 * s.internal[3] > 0 ? 2 : 0;
        const StepOutcome out = step_acrobot(s, action);
        total += out.reward;
        ++steps;
        s = out.next_state;
    }
    REQUIRE(s.terminated);
    CHECK(steps == 219);
    CHECK(total == -static_cast<double>(steps - 1));  // final step rewards 0

    // The height condition holds on the terminal state.
    const double t1 = s.internal[0], t2 = s.internal[1];
    CHECK(-std::cos(t1) - std::cos(t1 + t2) > 1.0);

    // A policy that never swings up runs into the 500-step cap at -500.
    EnvState idle;
    idle.internal = Eigen::VectorXd::Zero(4);
    idle.observation.resize(6);
    idle.observation << 1.0, 0.0, 1.0, 0.0, 0.0, 0.0;
    double idle_total = 0.0;
    int idle_steps = 0;
    while (!idle.done()) {
        const StepOutcome out = step_acrobot(idle, 1);
        idle_total += out.reward;
        ++idle_steps;
        idle = out.next_state;
    }
    CHECK(idle.truncated);
    CHECK(idle_steps == 500);
    CHECK(idle_total == -500.0);
}

TEST_CASE("identical seed and action sequence gives bitwise-equal paths") {
    for (const std::string env : {std::string("cartpole"), std::string("acrobot")}) {
        Rng actions_a(55), actions_b(55);
        auto e = make_env(env);
        Rng ra(91), rb(91);
        EnvState a = e->reset(ra);
        EnvState b = e->reset(rb);
        for (int i = 0; i < 400; ++i) {
            if (a.done()) {
                REQUIRE(b.done());
                a = e->reset(ra);
                b = e->reset(rb);
            }
            const int act = static_cast<int>(
                actions_a.uniform_int(static_cast<std::uint64_t>(e->num_actions())));
            REQUIRE(act == static_cast<int>(actions_b.uniform_int(
                               static_cast<std::uint64_t>(e->num_actions()))));
            a = e->step(a, act).next_state;
            b = e->step(b, act).next_state;
            for (int c = 0; c < e->obs_dim(); ++c)
                REQUIRE(a.observation[c] == b.observation[c]);
        }
    }
}
