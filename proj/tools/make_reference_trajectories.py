#!/usr/bin/env python3
"""Generate reference trajectory CSVs for the built-in environments.

Dynamics are a line-by-line float64 port of the Gymnasium 1.x classic-control
reference environments (CartPole-v1 with the default "euler" integrator,
Acrobot-v1 with the "book" equations of motion). The resulting files pin the
environment semantics the C++ implementations must reproduce.

Usage: python3 tools/make_reference_trajectories.py <output_dir>
"""

import sys
from math import cos, sin, pi

import numpy as np


def fmt(x):
    return "%.17g" % float(x)


# ---------------------------------------------------------------- cartpole

GRAVITY = 9.8
MASSCART = 1.0
MASSPOLE = 0.1
TOTAL_MASS = MASSPOLE + MASSCART
LENGTH = 0.5  # half the pole's length
POLEMASS_LENGTH = MASSPOLE * LENGTH
FORCE_MAG = 10.0
TAU = 0.02
THETA_THRESHOLD = 12 * 2 * pi / 360
X_THRESHOLD = 2.4


def cartpole_step(state, action):
    x, x_dot, theta, theta_dot = state
    force = FORCE_MAG if action == 1 else -FORCE_MAG
    costheta = cos(theta)
    sintheta = sin(theta)

    temp = (force + POLEMASS_LENGTH * theta_dot**2 * sintheta) / TOTAL_MASS
    thetaacc = (GRAVITY * sintheta - costheta * temp) / (
        LENGTH * (4.0 / 3.0 - MASSPOLE * costheta**2 / TOTAL_MASS)
    )
    xacc = temp - POLEMASS_LENGTH * thetaacc * costheta / TOTAL_MASS

    # default "euler" kinematics integrator
    x = x + TAU * x_dot
    x_dot = x_dot + TAU * xacc
    theta = theta + TAU * theta_dot
    theta_dot = theta_dot + TAU * thetaacc

    state = (x, x_dot, theta, theta_dot)
    terminated = bool(
        x < -X_THRESHOLD
        or x > X_THRESHOLD
        or theta < -THETA_THRESHOLD
        or theta > THETA_THRESHOLD
    )
    return state, 1.0, terminated


# ----------------------------------------------------------------- acrobot

DT = 0.2
LINK_LENGTH_1 = 1.0
LINK_LENGTH_2 = 1.0
LINK_MASS_1 = 1.0
LINK_MASS_2 = 1.0
LINK_COM_POS_1 = 0.5
LINK_COM_POS_2 = 0.5
LINK_MOI = 1.0
MAX_VEL_1 = 4 * pi
MAX_VEL_2 = 9 * pi
AVAIL_TORQUE = [-1.0, 0.0, 1.0]


def wrap(x, m, M):
    diff = M - m
    while x > M:
        x = x - diff
    while x < m:
        x = x + diff
    return x


def bound(x, m, M):
    return min(max(x, m), M)


def dsdt(s_augmented):
    m1 = LINK_MASS_1
    m2 = LINK_MASS_2
    l1 = LINK_LENGTH_1
    lc1 = LINK_COM_POS_1
    lc2 = LINK_COM_POS_2
    I1 = LINK_MOI
    I2 = LINK_MOI
    g = 9.8
    a = s_augmented[-1]
    s = s_augmented[:-1]
    theta1, theta2, dtheta1, dtheta2 = s[0], s[1], s[2], s[3]

    d1 = m1 * lc1**2 + m2 * (l1**2 + lc2**2 + 2 * l1 * lc2 * cos(theta2)) + I1 + I2
    d2 = m2 * (lc2**2 + l1 * lc2 * cos(theta2)) + I2
    phi2 = m2 * lc2 * g * cos(theta1 + theta2 - pi / 2.0)
    phi1 = (
        -m2 * l1 * lc2 * dtheta2**2 * sin(theta2)
        - 2 * m2 * l1 * lc2 * dtheta2 * dtheta1 * sin(theta2)
        + (m1 * lc1 + m2 * l1) * g * cos(theta1 - pi / 2)
        + phi2
    )
    # "book" variant of the equations of motion
    ddtheta2 = (
        a + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1**2 * sin(theta2) - phi2
    ) / (m2 * lc2**2 + I2 - d2**2 / d1)
    ddtheta1 = -(d2 * ddtheta2 + phi1) / d1
    return np.array([dtheta1, dtheta2, ddtheta1, ddtheta2, 0.0])


def rk4_step(y0, dt):
    dt2 = dt / 2.0
    k1 = dsdt(y0)
    k2 = dsdt(y0 + dt2 * k1)
    k3 = dsdt(y0 + dt2 * k2)
    k4 = dsdt(y0 + dt * k3)
    return y0 + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def acrobot_step(state, action):
    torque = AVAIL_TORQUE[action]
    s_augmented = np.append(np.asarray(state, dtype=np.float64), torque)
    ns = rk4_step(s_augmented, DT)[:4]
    ns[0] = wrap(ns[0], -pi, pi)
    ns[1] = wrap(ns[1], -pi, pi)
    ns[2] = bound(ns[2], -MAX_VEL_1, MAX_VEL_1)
    ns[3] = bound(ns[3], -MAX_VEL_2, MAX_VEL_2)
    terminated = bool(-cos(ns[0]) - cos(ns[1] + ns[0]) > 1.0)
    reward = -1.0 if not terminated else 0.0
    return tuple(ns), reward, terminated


def acrobot_obs(state):
    t1, t2, w1, w2 = state
    return [cos(t1), sin(t1), cos(t2), sin(t2), w1, w2]


# ------------------------------------------------------------------ driver

def write_trajectory(path, env_id, init_state, actions, step_fn, obs_fn):
    state = tuple(float(v) for v in init_state)
    rows = []
    terminal = False
    for i, a in enumerate(actions):
        state, reward, terminated = step_fn(state, int(a))
        row = [str(i), str(int(a))]
        row += [fmt(v) for v in obs_fn(state)]
        row.append(fmt(reward))
        rows.append(",".join(row))
        if terminated:
            terminal = True
            break

    init = tuple(float(v) for v in init_state)
    obs_dim = len(obs_fn(init))
    header = ["step_index", "action"]
    header += ["obs_%d" % i for i in range(obs_dim)]
    header.append("reward")

    lines = []
    lines.append("# env: %s" % env_id)
    lines.append("# initial_internal_state: " + " ".join(fmt(v) for v in init))
    lines.append("# terminal: %d" % (1 if terminal else 0))
    lines.append(",".join(header))
    lines += rows
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
    print("wrote %s (%d steps, terminal=%d)" % (path, len(rows), terminal))


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "tests/data"

    rng = np.random.default_rng(7)

    cp_init = rng.uniform(-0.05, 0.05, size=4)
    cp_actions = rng.integers(0, 2, size=50)
    write_trajectory(
        out + "/golden_cartpole.csv",
        "cartpole",
        cp_init,
        cp_actions,
        cartpole_step,
        lambda s: list(s),
    )

    # a simple balancing rule keeps the pole up for the full horizon
    long_actions = []
    s = tuple(float(v) for v in cp_init)
    for _ in range(50):
        a = 1 if (s[2] + 0.5 * s[3]) > 0 else 0
        long_actions.append(a)
        s, _, term = cartpole_step(s, a)
        if term:
            break
    write_trajectory(
        out + "/golden_cartpole_long.csv",
        "cartpole",
        cp_init,
        long_actions,
        cartpole_step,
        lambda s: list(s),
    )

    ab_init = rng.uniform(-0.1, 0.1, size=4)
    ab_actions = rng.integers(0, 3, size=50)
    write_trajectory(
        out + "/golden_acrobot.csv",
        "acrobot",
        ab_init,
        ab_actions,
        acrobot_step,
        acrobot_obs,
    )


if __name__ == "__main__":
    main()
