#include <cmath>

#include "decorr/env.hpp"
#include "decorr/errors.hpp"

namespace decorr {

namespace {

constexpr double kGravity = 9.8;
constexpr double kMassCart = 1.0;
constexpr double kMassPole = 0.1;
constexpr double kTotalMass = kMassPole + kMassCart;
constexpr double kLength = 0.5;  // half the pole's length
constexpr double kPoleMassLength = kMassPole * kLength;
constexpr double kForceMag = 10.0;
constexpr double kTau = 0.02;
constexpr double kThetaThreshold = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
constexpr double kXThreshold = 2.4;

}  // namespace

const std::string& CartpoleEnv::id() const {
    static const std::string kId = "cartpole";
    return kId;
}

EnvState CartpoleEnv::reset(Rng& rng) const {
    EnvState s;
    s.internal.resize(4);
    for (int i = 0; i < 4; ++i) s.internal[i] = rng.uniform(-0.05, 0.05);
    s.observation = s.internal;
    return s;
}

StepOutcome CartpoleEnv::step(const EnvState& state, int action) const {
    if (state.done())
        throw ContractViolation("cartpole: step() after episode end");
    if (action != 0 && action != 1)
        throw ContractViolation("cartpole: action must be 0 or 1");

    double x = state.internal[0];
    double x_dot = state.internal[1];
    double theta = state.internal[2];
    double theta_dot = state.internal[3];

    const double force = action == 1 ? kForceMag : -kForceMag;
    const double costheta = std::cos(theta);
    const double sintheta = std::sin(theta);

    const double temp =
        (force + kPoleMassLength * theta_dot * theta_dot * sintheta) / kTotalMass;
    const double thetaacc =
        (kGravity * sintheta - costheta * temp) /
        (kLength * (4.0 / 3.0 - kMassPole * costheta * costheta / kTotalMass));
    const double xacc = temp - kPoleMassLength * thetaacc * costheta / kTotalMass;

    // Reference default integrator: position advances with the old velocity.
    x = x + kTau * x_dot;
    x_dot = x_dot + kTau * xacc;
    theta = theta + kTau * theta_dot;
    theta_dot = theta_dot + kTau * thetaacc;

    StepOutcome out;
    out.next_state.internal.resize(4);
    out.next_state.internal << x, x_dot, theta, theta_dot;
    out.next_state.observation = out.next_state.internal;
    out.next_state.step_count = state.step_count + 1;
    out.next_state.terminated = x < -kXThreshold || x > kXThreshold ||
                                theta < -kThetaThreshold || theta > kThetaThreshold;
    out.next_state.truncated =
        !out.next_state.terminated && out.next_state.step_count >= 500;
    out.reward = 1.0;
    out.done = out.next_state.done();
    return out;
}

StepOutcome step_cartpole(const EnvState& state, int action) {
    static const CartpoleEnv env;
    return env.step(state, action);
}

}  // namespace decorr
