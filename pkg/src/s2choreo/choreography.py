"""
Sampled periodic loops on S^2 and the choreography construction.

A loop Q: R/Z -> S^2 is stored as N equally spaced samples Q(j/N).  In a
choreography every body runs along the same loop with a phase offset,
q_i(t) = Q(t + k_i).  When k_i * N is an integer the offset is an exact
index shift; otherwise the shifted samples are obtained by band-limited
(trigonometric) interpolation and pushed back onto the sphere.

The symmetry group used for the three-body figure-eight is generated by

    (E2)  Q(t) -> B Q(t + 1/2),   B = diag(1, -1, 1)
    (E3)  Q(t) -> C Q(-t),        C = diag(-1, -1, 1)

and ``symmetrize`` projects a loop onto its fixed-point set.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .geometry import geodesic_distance, unit_point

B = np.diag([1.0, -1.0, 1.0])
C = np.diag([-1.0, -1.0, 1.0])

TEST_LOOP_AMPLITUDES = (0.15, 0.2275)


@dataclass(frozen=True)
class DiscreteLoop:
    """N uniform samples of a period-1 loop on the unit sphere."""

    samples: np.ndarray

    def __post_init__(self):
        q = unit_point(np.array(self.samples, dtype=float))
        if q.ndim != 2 or q.shape[0] < 5:
            raise ValueError(f"a loop needs shape (N, 3) with N >= 5, got {q.shape}")
        q.setflags(write=False)
        object.__setattr__(self, "samples", q)

    @classmethod
    def from_ambient(cls, samples):
        """Build a loop by normalizing arbitrary nonzero 3-vectors onto the sphere."""
        return cls(unit_point(samples, normalize=True))

    @property
    def N(self):
        return self.samples.shape[0]

    @property
    def times(self):
        return np.arange(self.N) / self.N

    def sample(self, j):
        return self.samples[j % self.N]

    def __len__(self):
        return self.N


@dataclass(frozen=True)
class BodySystem:
    """Body count, masses and phase offsets k_i (0 = k_1 < ... < k_n < 1)."""

    n: int
    masses: tuple = None
    offsets: tuple = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"body count must be a positive integer, got {self.n}")
        masses = (1.0,) * self.n if self.masses is None else tuple(float(m) for m in self.masses)
        offsets = (tuple(Fraction(i, self.n) for i in range(self.n)) if self.offsets is None
                   else tuple(Fraction(k).limit_denominator(10**9) if isinstance(k, float) else Fraction(k)
                              for k in self.offsets))
        if len(masses) != self.n or len(offsets) != self.n:
            raise ValueError("need one mass and one offset per body")
        if any(not m > 0 for m in masses):
            raise ValueError(f"masses must be positive, got {masses}")
        if offsets[0] != 0 or any(a >= b for a, b in zip(offsets, offsets[1:])) or offsets[-1] >= 1:
            raise ValueError(f"offsets must satisfy 0 = k_1 < ... < k_n < 1, got {offsets}")
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "offsets", offsets)

    @property
    def mass_array(self):
        return np.array(self.masses)

    @property
    def total_mass(self):
        return float(sum(self.masses))

    @property
    def uniform(self):
        return all(k == Fraction(i, self.n) for i, k in enumerate(self.offsets))


def shift_samples(samples, offset):
    """Samples of t -> X(t + offset) for a periodic sampled signal X (axis 0).

    Exact index shift when offset * N is an integer, band-limited
    interpolation otherwise.  The interpolating shift by ``-offset`` is the
    adjoint of the shift by ``offset``.
    """
    x = np.asarray(samples, dtype=float)
    N = x.shape[0]
    offset = Fraction(offset) if not isinstance(offset, float) else offset
    steps = offset * N
    if isinstance(steps, Fraction) and steps.denominator == 1:
        return np.roll(x, -int(steps), axis=0)
    s = float(offset)
    k = np.arange(N // 2 + 1)
    phase = np.exp(2j * np.pi * k * s)
    if N % 2 == 0:
        # Nyquist mode is real on the grid; its shift keeps only the cosine part
        phase[-1] = np.cos(np.pi * N * s)
    phase = phase.reshape((-1,) + (1,) * (x.ndim - 1))
    return np.fft.irfft(np.fft.rfft(x, axis=0) * phase, n=N, axis=0)


def _phase_copies(samples, system):
    return np.stack([shift_samples(samples, k) for k in system.offsets])


def build_choreography(loop, system):
    """Body trajectories q_i(t_j) = Q(t_j + k_i), shape (n, N, 3)."""
    copies = _phase_copies(loop.samples, system)
    if exact_shifts(loop.N, system):
        return copies
    return copies / np.linalg.norm(copies, axis=-1, keepdims=True)


def exact_shifts(N, system):
    """True when every phase offset is a whole number of samples."""
    return all((k * N).denominator == 1 for k in system.offsets)


@dataclass(frozen=True)
class SymmetryElement:
    """Loop map Q(t) -> M Q(sigma t + shift), sigma = -1 for time reversal."""

    shift: Fraction = Fraction(0)
    matrix: np.ndarray = field(default_factory=lambda: np.eye(3))
    time_reversal: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (3, 3) or np.any(m != np.diag(np.diag(m))) or np.any(np.abs(np.diag(m)) != 1):
            raise ValueError("symmetry matrix must be diagonal with entries +-1")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "shift", Fraction(self.shift) % 1)

    def index_map(self, N):
        steps = self.shift * N
        if steps.denominator != 1:
            raise ValueError(f"shift {self.shift} is not a whole number of samples for N={N}")
        j = np.arange(N)
        return ((-j if self.time_reversal else j) + int(steps)) % N

    def apply(self, samples):
        q = np.asarray(samples)
        return q[self.index_map(q.shape[0])] @ self.matrix.T

    def __matmul__(self, other):
        # (self o other)(Q)(t) = M1 M2 Q(s2 (s1 t + a1) + a2)
        sign = -1 if other.time_reversal else 1
        return SymmetryElement(shift=sign * self.shift + other.shift,
                               matrix=self.matrix @ other.matrix,
                               time_reversal=self.time_reversal != other.time_reversal)


IDENTITY = SymmetryElement()
E2 = SymmetryElement(shift=Fraction(1, 2), matrix=B)
E3 = SymmetryElement(matrix=C, time_reversal=True)
SYMMETRY_GROUP = (IDENTITY, E2, E3, E2 @ E3)


def _require_even(N):
    if N % 2:
        raise ValueError(f"half-period symmetries need an even sample count, got N={N}")


def apply_E2(loop):
    """The loop t -> B Q(t + 1/2)."""
    _require_even(loop.N)
    return DiscreteLoop(E2.apply(loop.samples))


def apply_E3(loop):
    """The loop t -> C Q(-t)."""
    return DiscreteLoop(E3.apply(loop.samples))


def symmetrize_samples(samples, renormalize=True):
    """Average of the four group images of ``samples``; optionally pushed back to S^2."""
    q = np.asarray(samples, dtype=float)
    if q.shape[0] % 4:
        raise ValueError(f"symmetrization needs N divisible by 4, got N={q.shape[0]}")
    avg = sum(g.apply(q) for g in SYMMETRY_GROUP) / 4.0
    if not renormalize:
        return avg
    r = np.linalg.norm(avg, axis=-1)
    if np.any(r < 1e-6):
        j = int(np.argmin(r))
        raise ValueError(f"degenerate group average at sample {j} (norm {r[j]:.2e})")
    return avg / r[:, None]


def symmetrize(loop):
    """Project ``loop`` onto the loops fixed by both E2 and E3."""
    return DiscreteLoop(symmetrize_samples(loop.samples))


def symmetry_residuals(loop):
    """Sup-norm distances (|E2 L - L|, |E3 L - L|)."""
    q = loop.samples
    return (float(np.max(np.abs(E2.apply(q) - q))), float(np.max(np.abs(E3.apply(q) - q))))


def test_loop(N, amplitudes=TEST_LOOP_AMPLITUDES):
    """The comparison loop x = a sin(4 pi t), y = b sin(2 pi t), z = sqrt(1 - x^2 - y^2)."""
    if N % 4:
        raise ValueError(f"test loop needs N divisible by 4, got N={N}")
    a, b = amplitudes
    t = np.arange(N) / N
    x = a * np.sin(4 * np.pi * t)
    y = b * np.sin(2 * np.pi * t)
    return DiscreteLoop(np.stack([x, y, np.sqrt(1.0 - x * x - y * y)], axis=1))


test_loop.__test__ = False


def constant_loop(N, point=(0.0, 0.0, 1.0)):
    return DiscreteLoop(np.tile(unit_point(point, normalize=True), (N, 1)))


def great_circle_loop(N, winding=1):
    t = np.arange(N) / N
    w = 2 * np.pi * winding * t
    return DiscreteLoop(np.stack([np.cos(w), np.sin(w), np.zeros(N)], axis=1))


def min_pair_separation(loop, system):
    """Smallest geodesic distance between two distinct bodies over all samples."""
    if system.n < 2:
        return float(np.pi)
    q = build_choreography(loop, system)
    return float(min(np.min(geodesic_distance(q[i], q[j]))
                     for i in range(system.n) for j in range(i + 1, system.n)))
