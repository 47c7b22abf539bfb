"""
Initial-value integration of the equations of motion on S^2,

    m_i q_i'' = dU/dq_i - m_i |q_i'|^2 q_i,

and the checks used to certify that a sampled loop is a genuine solution.
"""

from dataclasses import dataclass

import numpy as np

from .action import cyclic_derivative, cyclic_second_derivative, loop_velocities
from .choreography import build_choreography, shift_samples
from .geometry import CollisionError, potential, potential_gradient, tangent_project

_STATE_TOL = 1e-10


@dataclass(frozen=True)
class PhaseState:
    """Positions on S^2 and tangent velocities for n bodies, each of shape (n, 3)."""

    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        q = np.array(self.positions, dtype=float)
        v = np.array(self.velocities, dtype=float)
        if q.shape != v.shape or q.ndim != 2 or q.shape[1] != 3:
            raise ValueError(f"positions and velocities must both be (n, 3), got {q.shape} and {v.shape}")
        if np.max(np.abs(np.linalg.norm(q, axis=1) - 1.0)) > _STATE_TOL:
            raise ValueError("positions must lie on the unit sphere")
        if np.max(np.abs(np.sum(q * v, axis=1))) > _STATE_TOL:
            raise ValueError("velocities must be tangent to the sphere")
        q.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "positions", q)
        object.__setattr__(self, "velocities", v)

    @property
    def n(self):
        return self.positions.shape[0]


@dataclass(frozen=True)
class Trajectory:
    """Uniform-step solution; ``positions``/``velocities`` have shape (steps + 1, n, 3)."""

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    step: float
    energy_drift: float

    def state(self, k):
        return PhaseState(self.positions[k], self.velocities[k])

    @property
    def states(self):
        return [self.state(k) for k in range(len(self.times))]


def accelerations(state, masses=None):
    """Right-hand side q_i'' = (1/m_i) dU/dq_i - |q_i'|^2 q_i, shape (n, 3)."""
    q, v = state.positions, state.velocities
    m = np.ones(q.shape[0]) if masses is None else np.asarray(masses, dtype=float)
    return _accel(q, v, m)


def _accel(q, v, m):
    return potential_gradient(q, m) / m[:, None] - np.sum(v * v, axis=-1, keepdims=True) * q


def energy(state, masses=None):
    """Kinetic energy minus the force function; conserved along solutions."""
    m = np.ones(state.n) if masses is None else np.asarray(masses, dtype=float)
    v = state.velocities
    return 0.5 * float(np.sum(m * np.sum(v * v, axis=-1))) - potential(state.positions, m)


def _rk4(q, v, m, h, project=True):
    a1 = _accel(q, v, m)
    q2, v2 = q + 0.5 * h * v, v + 0.5 * h * a1
    a2 = _accel(q2, v2, m)
    q3, v3 = q + 0.5 * h * v2, v + 0.5 * h * a2
    a3 = _accel(q3, v3, m)
    q4, v4 = q + h * v3, v + h * a3
    a4 = _accel(q4, v4, m)
    q = q + h / 6.0 * (v + 2 * v2 + 2 * v3 + v4)
    v = v + h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4)
    if not project:
        return q, v
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    return q, tangent_project(q, v)


def step_rk4(state, masses, h, project=True):
    """One classical Runge-Kutta step followed by projection back onto the constraint.

    ``project=False`` returns the raw stage combination as arrays (q, v),
    which is how the constraint drift of a single step is measured.
    """
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    m = np.ones(state.n) if masses is None else np.asarray(masses, dtype=float)
    if not project:
        return _rk4(state.positions, state.velocities, m, h, project=False)
    return PhaseState(*_rk4(state.positions, state.velocities, m, h))


def integrate(state0, masses, T, h):
    """Fixed-step projected RK4 from t = 0 to t = T.

    Raises ValueError if h does not divide T, and CollisionError (with
    ``.time`` set) if two bodies meet or a step overflows near an encounter.
    """
    if not (T > 0 and h > 0):
        raise ValueError("T and h must be positive")
    steps = int(round(T / h))
    if steps < 1 or abs(steps * h - T) > 1e-9 * T:
        raise ValueError(f"step {h} does not divide the horizon {T}")
    m = np.ones(state0.n) if masses is None else np.asarray(masses, dtype=float)
    qs = np.empty((steps + 1, state0.n, 3))
    vs = np.empty_like(qs)
    qs[0], vs[0] = state0.positions, state0.velocities
    q, v = qs[0], vs[0]
    for k in range(steps):
        try:
            # a stage that lands inside a close approach overflows rather than
            # failing the distance check; treat that as a collision too
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                q, v = _rk4(q, v, m, h)
            if not (np.all(np.isfinite(q)) and np.all(np.isfinite(v))):
                raise CollisionError(f"state became non-finite during step {k}")
        except CollisionError as err:
            err.time = k * h
            raise
        qs[k + 1], vs[k + 1] = q, v
    times = np.arange(steps + 1) * h
    drift = _energy_drift(qs, vs, m)
    return Trajectory(times, qs, vs, h, drift)


def _energy_drift(qs, vs, m):
    kin = 0.5 * np.sum(m * np.sum(vs * vs, axis=-1), axis=-1)
    e = kin - potential(np.moveaxis(qs, 1, 0), m)
    return float(np.max(np.abs(e - e[0])))


def initial_state(loop, system):
    """State at t = 0 of the choreography generated by ``loop``."""
    q = build_choreography(loop, system)[:, 0]
    vel = loop_velocities(loop)
    v = np.stack([shift_samples(vel, k)[0] for k in system.offsets])
    return PhaseState(q, tangent_project(q, v))


def path_el_residual(paths, masses=None):
    """Sup-norm of m_i q_i'' - dU/dq_i + m_i |q_i'|^2 q_i for sampled periodic paths (n, N, 3)."""
    q = np.asarray(paths, dtype=float)
    m = np.ones(q.shape[0]) if masses is None else np.asarray(masses, dtype=float)
    qd = cyclic_derivative(q)
    qdd = cyclic_second_derivative(q)
    mm = m[:, None, None]
    r = mm * qdd - potential_gradient(q, m) + mm * np.sum(qd * qd, axis=-1, keepdims=True) * q
    return float(np.max(np.linalg.norm(r, axis=-1)))


def el_residual(loop, system):
    """Euler-Lagrange defect of the choreography generated by ``loop``; zero on solutions."""
    return path_el_residual(build_choreography(loop, system), system.mass_array)


def closure_error(loop, system, T=1.0, h=1e-4):
    """Sup-norm gap between the state after integrating one period and the start."""
    s0 = initial_state(loop, system)
    traj = integrate(s0, system.mass_array, T, h)
    gap = max(np.max(np.abs(traj.positions[-1] - s0.positions)),
              np.max(np.abs(traj.velocities[-1] - s0.velocities)))
    return float(gap), traj
