"""
Discrete Lagrangian action of sampled periodic paths and its exact gradient.

The action of n paths over one period is

    f(q) = int_0^1 ( 1/2 sum_i m_i |q_i'|^2 + U(q) ) dt,

discretized with the rectangle rule on N uniform samples and fourth-order
cyclic central differences for the velocities.  Both choices keep the
discrete gradient the exact gradient of the discrete action.
"""

from dataclasses import dataclass

import numpy as np

from .choreography import build_choreography, exact_shifts, shift_samples
from .geometry import potential, potential_gradient, tangent_project

#: Action of half a period of the collinear Kepler ejection-collision orbit,
#: imported as a constant for the binary-collision bound.
HALF_PERIOD_BINARY_ACTION = (12 * np.pi) ** (2.0 / 3.0) / 2.0


@dataclass(frozen=True)
class ActionBreakdown:
    kinetic: float
    potential_integral: float
    total: float

    def __post_init__(self):
        if abs(self.kinetic + self.potential_integral - self.total) > 1e-12 * max(1.0, abs(self.total)):
            raise ValueError("total must equal kinetic + potential_integral")


def cyclic_derivative(x):
    """Fourth-order central difference d/dt of period-1 samples along axis -2."""
    N = x.shape[-2]
    # differences first, so constant signals give exactly zero
    d1 = np.roll(x, -1, axis=-2) - np.roll(x, 1, axis=-2)
    d2 = np.roll(x, -2, axis=-2) - np.roll(x, 2, axis=-2)
    return (8 * d1 - d2) * (N / 12.0)


def cyclic_second_derivative(x):
    """Fourth-order central difference d^2/dt^2 of period-1 samples along axis -2."""
    N = x.shape[-2]
    s1 = (np.roll(x, -1, axis=-2) - x) + (np.roll(x, 1, axis=-2) - x)
    s2 = (np.roll(x, -2, axis=-2) - x) + (np.roll(x, 2, axis=-2) - x)
    return (16 * s1 - s2) * (N * N / 12.0)


def _check_resolution(N, n):
    if N < max(8 * n, 5):
        raise ValueError(f"need at least 8 samples per body, got N={N} for n={n}")


def loop_velocities(loop):
    """Velocity at every sample of the loop (period 1), shape (N, 3)."""
    return cyclic_derivative(loop.samples)


def path_action(paths, masses=None):
    """Action of arbitrary sampled periodic paths of shape (n, N, 3)."""
    q = np.asarray(paths, dtype=float)
    m = np.ones(q.shape[0]) if masses is None else np.asarray(masses, dtype=float)
    v = cyclic_derivative(q)
    kinetic = float(0.5 * np.sum(m * np.mean(np.sum(v * v, axis=-1), axis=-1)))
    pot = float(np.mean(potential(q, m)))
    return ActionBreakdown(kinetic, pot, kinetic + pot)


def action(loop, system):
    """Action of the choreography generated by ``loop``.

    All bodies traverse the same loop, so the kinetic part is
    1/2 (sum m_i) int |Q'|^2 dt; the potential part is averaged over the
    induced configurations.  Raises CollisionError naming pair and sample.
    """
    _check_resolution(loop.N, system.n)
    v = loop_velocities(loop)
    kinetic = float(0.5 * system.total_mass * np.mean(np.sum(v * v, axis=-1)))
    pot = float(np.mean(potential(build_choreography(loop, system), system.mass_array)))
    return ActionBreakdown(kinetic, pot, kinetic + pot)


def action_gradient(loop, system, project=True):
    """Gradient of ``action`` with respect to each loop sample, shape (N, 3).

    The kinetic term contributes the adjoint of the difference stencil; the
    potential term collects the force on every body that visits a sample,
    shifted back by its phase.  Projected to the tangent planes unless
    ``project=False``.
    """
    _check_resolution(loop.N, system.n)
    Q = loop.samples
    N = loop.N
    # the stencil is antisymmetric, so its adjoint is its negative
    grad = -system.total_mass / N * cyclic_derivative(cyclic_derivative(Q))
    exact = exact_shifts(N, system)
    raw = np.stack([shift_samples(Q, k) for k in system.offsets])
    norms = np.linalg.norm(raw, axis=-1, keepdims=True)
    bodies = raw if exact else raw / norms
    force = potential_gradient(bodies, system.mass_array)
    if not exact:
        force = force / norms
    for k, f in zip(system.offsets, force):
        grad = grad + shift_samples(f, -k) / N
    return tangent_project(Q, grad) if project else grad


def collision_bound():
    """Lower bound on the action of a periodic binary-collision path of three unit masses."""
    return 3 * HALF_PERIOD_BINARY_ACTION - 3.0


def velocity_identity_residual(velocities):
    """|sum_{i<j} |v_i - v_j|^2 + |sum_i v_i|^2 - n sum_i |v_i|^2| for n velocities."""
    v = np.asarray(velocities, dtype=float)
    n = v.shape[0]
    lhs = sum(float(np.sum((v[i] - v[j]) ** 2)) for i in range(n) for j in range(i + 1, n))
    lhs += float(np.sum(np.sum(v, axis=0) ** 2))
    return abs(lhs - n * float(np.sum(v * v)))
