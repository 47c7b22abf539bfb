"""
Pointwise geometry on the unit sphere and the cotangent force function.

Positions are plain numpy arrays whose last axis has length 3.  Every
function here broadcasts over leading axes, so a single pair, a whole
configuration of shape (n, 3), or a sampled trajectory of shape (n, N, 3)
can be passed without copying.

The force function is

    U = sum_{i<j} m_i m_j cot(d(q_i, q_j)),

where d is the great-circle distance.  It plays the role of minus the
potential energy: bodies accelerate along +grad U.
"""

from functools import lru_cache

import numpy as np

#: Pairs closer than this (radians) are treated as collisions.
EPS_COLL = 1e-8

_UNIT_TOL = 1e-12


class CollisionError(ValueError):
    """Two bodies coincide (or are antipodal) where the force function is singular."""

    def __init__(self, message, pair=None, sample=None, time=None):
        super().__init__(message)
        self.pair = pair
        self.sample = sample
        self.time = time


class AntipodalError(CollisionError):
    pass


def unit_point(v, normalize=False):
    """Return ``v`` as a float array on S^2.

    With ``normalize=False`` the input must already have unit norm to 1e-12;
    otherwise it is scaled onto the sphere (zero vectors are rejected).
    """
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != 3:
        raise ValueError(f"expected 3-vectors, got shape {v.shape}")
    r = np.linalg.norm(v, axis=-1)
    if normalize:
        if np.any(r < 1e-300):
            raise ValueError("cannot normalize a zero vector onto the sphere")
        return v / r[..., None]
    if np.any(np.abs(r - 1.0) > _UNIT_TOL):
        raise ValueError(f"point(s) off the unit sphere: max | |v|-1 | = {np.max(np.abs(r - 1.0)):.3e}")
    return v


def tangent_project(base, v):
    """Remove the component of ``v`` normal to the sphere at ``base``."""
    base = np.asarray(base, dtype=float)
    v = np.asarray(v, dtype=float)
    return v - np.sum(base * v, axis=-1, keepdims=True) * base


def _cos_sin(a, b):
    # sin from the cross product stays accurate near 0 and pi, where 1 - c^2 cancels
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    c = a0 * b0 + a1 * b1 + a2 * b2
    s = np.sqrt((a1 * b2 - a2 * b1) ** 2 + (a2 * b0 - a0 * b2) ** 2 + (a0 * b1 - a1 * b0) ** 2)
    return c, s


@lru_cache(maxsize=None)
def _pairs(n):
    i, j = np.triu_indices(n, k=1)
    i.setflags(write=False)
    j.setflags(write=False)
    return i, j


def geodesic_distance(a, b):
    """Great-circle distance in radians, in [0, pi].

    Same value as arccos(clip(a.b, -1, 1)), computed with atan2 so that nearly
    coincident and nearly antipodal pairs keep full relative precision.
    """
    c, s = _cos_sin(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    return np.arctan2(s, c)


def chordal_distance(a, b):
    """Straight-line (Euclidean) distance between two points of S^2."""
    return np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), axis=-1)


def _check_admissible(c, s, pair=None):
    d = np.arctan2(s, c)
    for bad, cls, what in ((d < EPS_COLL, CollisionError, "collision"),
                           (d > np.pi - EPS_COLL, AntipodalError, "antipodal pair")):
        if np.any(bad):
            sample = None
            if np.ndim(bad):
                sample = tuple(int(k) for k in np.argwhere(bad)[0])
                sample = sample[0] if len(sample) == 1 else sample
            where = f" between bodies {pair}" if pair else ""
            at = f" at sample {sample}" if sample is not None else ""
            raise cls(f"{what}{where}{at}", pair=pair, sample=sample)


def cot_pair(a, b):
    """cot of the geodesic distance between ``a`` and ``b``.

    Raises CollisionError (AntipodalError) when the pair is within EPS_COLL
    of coinciding (of being antipodal).
    """
    c, s = _cos_sin(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    _check_admissible(c, s)
    out = c / s
    return out if out.ndim else float(out)


def cot_chordal(r):
    """Force-function pair term written in the chordal distance r = |a - b|."""
    r = np.asarray(r, dtype=float)
    return (1.0 - r * r / 2.0) / (r * np.sqrt(1.0 - r * r / 4.0))


def cot_bounds(r):
    """Bracket (1/r - 1, 1/r) for the pair term at chordal distance ``r`` in (0, 2).

    Accepts a scalar (returns floats) or an array of distances.
    The upper bound holds on the whole range.  The lower bound only holds
    for r below about 1.6539 (geodesic distance about 1.9473 rad); for
    wider pairs cot(d) drops under 1/r - 1.
    """
    r = np.asarray(r, dtype=float)
    if not np.all((r > 0.0) & (r < 2.0)):
        raise ValueError(f"chordal distance must lie in (0, 2), got {r}")
    if r.ndim == 0:
        r = float(r)
    return 1.0 / r - 1.0, 1.0 / r


def _pair_terms(q, m):
    i, j = _pairs(q.shape[0])
    c, s = _cos_sin(q[i], q[j])
    d = np.arctan2(s, c)
    if np.any(d < EPS_COLL) or np.any(d > np.pi - EPS_COLL):
        for p in range(len(i)):
            _check_admissible(c[p], s[p], pair=(int(i[p]), int(j[p])))
    return i, j, c, s, (m[i] * m[j]).reshape((-1,) + (1,) * (c.ndim - 1))


def potential(positions, masses=None):
    """Force function U for a configuration of shape (n, 3) or paths (n, ..., 3).

    Pairs are summed in ascending (i, j) order so results are reproducible
    bit for bit.
    """
    q = np.asarray(positions, dtype=float)
    m = np.ones(q.shape[0]) if masses is None else np.asarray(masses, dtype=float)
    _, _, c, s, mm = _pair_terms(q, m)
    terms = mm * c / s
    total = np.zeros(q.shape[1:-1])
    for t in terms:
        total = total + t
    return total if total.ndim else float(total)


def potential_gradient(positions, masses=None):
    """Tangential gradient dU/dq_i for every body; same shape as ``positions``.

    For body i this is sum_{j != i} m_i m_j (q_j - (q_i.q_j) q_i) / (1 - (q_i.q_j)^2)^{3/2},
    which is automatically tangent at q_i.
    """
    q = np.asarray(positions, dtype=float)
    m = np.ones(q.shape[0]) if masses is None else np.asarray(masses, dtype=float)
    i, j, c, s, mm = _pair_terms(q, m)
    w = (mm / s**3)[..., None]
    c = c[..., None]
    to_j = w * (q[j] - c * q[i])
    to_i = w * (q[i] - c * q[j])
    grad = np.zeros_like(q)
    for p in range(len(i)):
        grad[i[p]] += to_j[p]
        grad[j[p]] += to_i[p]
    return grad
