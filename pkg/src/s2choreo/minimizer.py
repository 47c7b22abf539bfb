"""
Descent of the discrete action over symmetric choreography loops.

Each iteration takes a step along minus the (preconditioned) tangent
gradient, retracts every sample to the sphere by normalization, and
projects the loop back onto the E2/E3-symmetric subspace.  A backtracking
line search accepts only steps that lower the action and keep every pair of
bodies at least ``min_separation`` apart.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .action import action, action_gradient, collision_bound
from .choreography import DiscreteLoop, min_pair_separation, symmetrize_samples
from .geometry import EPS_COLL, CollisionError, tangent_project

logger = logging.getLogger(__name__)


class CollisionGuardError(RuntimeError):
    """No step keeps the bodies at least ``min_separation`` apart."""


class NonFiniteActionError(FloatingPointError):
    pass


@dataclass(frozen=True)
class MinimizeOptions:
    max_iters: int = 100_000
    grad_tol: float = 1e-8
    min_separation: float = 1e-3
    step_init: float = 1e-2
    step_shrink: float = 0.5
    N: int = 512
    symmetric: bool = True
    # "kinetic" divides each Fourier mode by the kinetic Hessian plus a shift; None is plain descent
    preconditioner: str = "kinetic"
    precond_shift: float = 40.0
    seed: int = None
    perturbation: float = 0.0

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if not self.min_separation >= 10 * EPS_COLL:
            raise ValueError(f"min_separation must be at least {10 * EPS_COLL}")
        if not 0 < self.step_shrink < 1:
            raise ValueError("step_shrink must lie in (0, 1)")
        if not self.step_init > 0:
            raise ValueError("step_init must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")
        if self.preconditioner not in (None, "kinetic"):
            raise ValueError(f"unknown preconditioner {self.preconditioner!r}")


@dataclass
class MinimizeReport:
    iterations: int
    action_history: list
    final_action: float
    final_grad_norm: float
    final_min_separation: float
    below_collision_bound: bool
    reason: str
    grad_norm_history: list = field(default_factory=list)

    @property
    def converged(self):
        return self.reason == "converged"

    def as_dict(self):
        return {
            "iterations": self.iterations,
            "reason": self.reason,
            "final_action": self.final_action,
            "final_grad_norm": self.final_grad_norm,
            "final_min_separation": self.final_min_separation,
            "collision_bound": collision_bound(),
            "below_collision_bound": self.below_collision_bound,
            "action_history": list(self.action_history),
            "grad_norm_history": list(self.grad_norm_history),
        }


def grad_sup_norm(grad):
    return float(np.max(np.linalg.norm(grad, axis=-1)))


def kinetic_preconditioner(grad, total_mass, shift=40.0):
    """Apply (M/N (D^T D + shift))^{-1} mode by mode, D the velocity stencil."""
    N = grad.shape[0]
    theta = 2 * np.pi * np.arange(N // 2 + 1) / N
    symbol = (N * (8 * np.sin(theta) - np.sin(2 * theta)) / 6.0) ** 2
    scale = total_mass / N * (symbol + shift)
    return np.fft.irfft(np.fft.rfft(grad, axis=0) / scale[:, None], n=N, axis=0)


def descent_step(loop, gradient, step, symmetric=True):
    """Retract Q_j - step * g_j onto the sphere, then symmetrize."""
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    moved = loop.samples - step * np.asarray(gradient)
    r = np.linalg.norm(moved, axis=-1)
    if np.any(r < 1e-6):
        raise ValueError(f"degenerate retraction at sample {int(np.argmin(r))}")
    moved = moved / r[:, None]
    return DiscreteLoop(symmetrize_samples(moved) if symmetric else moved)


def _direction(loop, grad, system, opts):
    if opts.preconditioner == "kinetic":
        d = kinetic_preconditioner(grad, system.total_mass, opts.precond_shift)
        return tangent_project(loop.samples, d)
    return grad


def _evaluate(loop, system, opts):
    """Action of ``loop`` or None when it breaks the separation guard."""
    try:
        if min_pair_separation(loop, system) < opts.min_separation:
            return None
        f = action(loop, system).total
    except CollisionError:
        return None
    if not np.isfinite(f):
        raise NonFiniteActionError(f"non-finite action {f}")
    return f


def minimize(loop0, system, opts=None):
    """Minimize the choreography action starting from ``loop0``.

    Returns the final loop and a MinimizeReport.  The report's ``reason`` is
    "converged", "max_iters" or "step_underflow".  Raises CollisionGuardError
    when the start, or every trial step, violates the separation guard.
    """
    opts = MinimizeOptions() if opts is None else opts
    if opts.symmetric and system.n != 3:
        raise ValueError("symmetric minimization is defined for three bodies only")
    loop = loop0
    if opts.seed is not None and opts.perturbation > 0:
        rng = np.random.default_rng(opts.seed)
        noise = tangent_project(loop.samples, rng.normal(scale=opts.perturbation, size=loop.samples.shape))
        loop = DiscreteLoop.from_ambient(loop.samples + noise)
    if opts.symmetric:
        loop = DiscreteLoop(symmetrize_samples(loop.samples))

    f = _evaluate(loop, system, opts)
    if f is None:
        raise CollisionGuardError(
            f"starting loop violates the separation guard {opts.min_separation:g} rad")
    grad = action_gradient(loop, system)
    gnorm = grad_sup_norm(grad)
    history, ghistory = [f], [gnorm]
    step = opts.step_init
    reason = "max_iters"
    it = 0
    while True:
        if gnorm < opts.grad_tol:
            reason = "converged"
            break
        if it >= opts.max_iters:
            break
        direction = _direction(loop, grad, system, opts)
        trial = step / opts.step_shrink
        guard_hit = False
        while True:
            candidate = descent_step(loop, direction, trial, opts.symmetric)
            fc = _evaluate(candidate, system, opts)
            if fc is not None and fc < f:
                break
            guard_hit = fc is None
            trial *= opts.step_shrink
            if trial < 1e-16 * opts.step_init:
                candidate = None
                break
        if candidate is None:
            # the guard still binds at vanishing step: the iterate sits on the guard
            if guard_hit:
                raise CollisionGuardError("no step satisfies the separation guard")
            reason = "step_underflow"
            break
        loop, f, step = candidate, fc, trial
        grad = action_gradient(loop, system)
        gnorm = grad_sup_norm(grad)
        history.append(f)
        ghistory.append(gnorm)
        it += 1
        if it % 100 == 0:
            logger.info("iteration %d: action %.12g, |grad| %.3e", it, f, gnorm)

    report = MinimizeReport(
        iterations=it,
        action_history=history,
        final_action=f,
        final_grad_norm=gnorm,
        final_min_separation=min_pair_separation(loop, system),
        below_collision_bound=f < collision_bound(),
        reason=reason,
        grad_norm_history=ghistory,
    )
    return loop, report
