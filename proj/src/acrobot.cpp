#include <cmath>

#include "decorr/env.hpp"
#include "decorr/errors.hpp"

namespace decorr {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDt = 0.2;
constexpr double kLinkLength1 = 1.0;
constexpr double kLinkMass1 = 1.0;
constexpr double kLinkMass2 = 1.0;
constexpr double kLinkCom1 = 0.5;
constexpr double kLinkCom2 = 0.5;
constexpr double kLinkMoi = 1.0;
constexpr double kMaxVel1 = 4.0 * kPi;
constexpr double kMaxVel2 = 9.0 * kPi;
constexpr double kTorque[3] = {-1.0, 0.0, 1.0};

double wrap(double x, double m, double M) {
    const double diff = M - m;
    while (x > M) x = x - diff;
    while (x < m) x = x + diff;
    return x;
}

double bound(double x, double m, double M) {
    return std::min(std::max(x, m), M);
}

using Vec5 = Eigen::Matrix<double, 5, 1>;

// "Book" equations of motion; the fifth component carries the torque and has
// zero derivative.
Vec5 dsdt(const Vec5& s_augmented) {
    const double m1 = kLinkMass1;
    const double m2 = kLinkMass2;
    const double l1 = kLinkLength1;
    const double lc1 = kLinkCom1;
    const double lc2 = kLinkCom2;
    const double I1 = kLinkMoi;
    const double I2 = kLinkMoi;
    const double g = 9.8;
    const double a = s_augmented[4];
    const double theta1 = s_augmented[0];
    const double theta2 = s_augmented[1];
    const double dtheta1 = s_augmented[2];
    const double dtheta2 = s_augmented[3];

    const double d1 =
        m1 * lc1 * lc1 +
        m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(theta2)) + I1 + I2;
    const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + I2;
    const double phi2 = m2 * lc2 * g * std::cos(theta1 + theta2 - kPi / 2.0);
    const double phi1 =
        -m2 * l1 * lc2 * dtheta2 * dtheta2 * std::sin(theta2) -
        2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * std::sin(theta2) +
        (m1 * lc1 + m2 * l1) * g * std::cos(theta1 - kPi / 2.0) + phi2;
    const double ddtheta2 =
        (a + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * std::sin(theta2) -
         phi2) /
        (m2 * lc2 * lc2 + I2 - d2 * d2 / d1);
    const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;

    Vec5 out;
    out << dtheta1, dtheta2, ddtheta1, ddtheta2, 0.0;
    return out;
}

Vec5 rk4_step(const Vec5& y0, double dt) {
    const double dt2 = dt / 2.0;
    const Vec5 k1 = dsdt(y0);
    const Vec5 k2 = dsdt(y0 + dt2 * k1);
    const Vec5 k3 = dsdt(y0 + dt2 * k2);
    const Vec5 k4 = dsdt(y0 + dt * k3);
    return y0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd observe(const Eigen::VectorXd& internal) {
    Eigen::VectorXd obs(6);
    obs << std::cos(internal[0]), std::sin(internal[0]), std::cos(internal[1]),
        std::sin(internal[1]), internal[2], internal[3];
    return obs;
}

}  // namespace

const std::string& AcrobotEnv::id() const {
    static const std::string kId = "acrobot";
    return kId;
}

EnvState AcrobotEnv::reset(Rng& rng) const {
    EnvState s;
    s.internal.resize(4);
    for (int i = 0; i < 4; ++i) s.internal[i] = rng.uniform(-0.1, 0.1);
    s.observation = observe(s.internal);
    return s;
}

StepOutcome AcrobotEnv::step(const EnvState& state, int action) const {
    if (state.done())
        throw ContractViolation("acrobot: step() after episode end");
    if (action < 0 || action > 2)
        throw ContractViolation("acrobot: action must be 0, 1, or 2");

    Vec5 s_augmented;
    s_augmented << state.internal[0], state.internal[1], state.internal[2],
        state.internal[3], kTorque[action];

    Vec5 ns = rk4_step(s_augmented, kDt);
    ns[0] = wrap(ns[0], -kPi, kPi);
    ns[1] = wrap(ns[1], -kPi, kPi);
    ns[2] = bound(ns[2], -kMaxVel1, kMaxVel1);
    ns[3] = bound(ns[3], -kMaxVel2, kMaxVel2);

    StepOutcome out;
    out.next_state.internal.resize(4);
    out.next_state.internal << ns[0], ns[1], ns[2], ns[3];
    out.next_state.observation = observe(out.next_state.internal);
    out.next_state.step_count = state.step_count + 1;
    out.next_state.terminated =
        -std::cos(ns[0]) - std::cos(ns[1] + ns[0]) > 1.0;
    out.next_state.truncated =
        !out.next_state.terminated && out.next_state.step_count >= 500;
    out.reward = out.next_state.terminated ? 0.0 : -1.0;
    out.done = out.next_state.done();
    return out;
}

StepOutcome step_acrobot(const EnvState& state, int action) {
    static const AcrobotEnv env;
    return env.step(state, action);
}

}  // namespace decorr
