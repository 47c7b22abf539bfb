from fractions import Fraction

import numpy as np
import pytest

from s2choreo.choreography import (B, C, E2, E3, IDENTITY, BodySystem, DiscreteLoop, SymmetryElement,
                                   apply_E2, apply_E3, build_choreography, constant_loop, exact_shifts,
                                   min_pair_separation, shift_samples, symmetrize, symmetry_residuals,
                                   test_loop)

from .oracles import random_unit


def perturbed_test_loop(rng, N=96, scale=0.02):
    q = test_loop(N).samples
    return DiscreteLoop.from_ambient(q + scale * rng.normal(size=q.shape))


def test_loop_rejects_off_sphere_and_short():
    with pytest.raises(ValueError):
        DiscreteLoop(np.ones((8, 3)))
    with pytest.raises(ValueError):
        DiscreteLoop(np.tile([0.0, 0.0, 1.0], (4, 1)))


def test_loop_cyclic_indexing():
    L = test_loop(12)
    np.testing.assert_array_equal(L.sample(13), L.sample(1))
    np.testing.assert_array_equal(L.sample(-1), L.sample(11))


def test_body_system_defaults_and_validation():
    s = BodySystem(3)
    assert s.masses == (1.0, 1.0, 1.0)
    assert s.offsets == (0, Fraction(1, 3), Fraction(2, 3))
    assert s.uniform
    with pytest.raises(ValueError):
        BodySystem(3, masses=(1, -1, 1))
    with pytest.raises(ValueError):
        BodySystem(3, offsets=(0.1, 0.2, 0.3))
    with pytest.raises(ValueError):
        BodySystem(3, offsets=(0, 0.5, 0.4))


def test_choreography_single_body_is_loop():
    L = test_loop(12)
    np.testing.assert_array_equal(build_choreography(L, BodySystem(1))[0], L.samples)


def test_choreography_index_shift():
    L = test_loop(12)
    q = build_choreography(L, BodySystem(3))
    np.testing.assert_array_equal(q[1, 0], L.samples[4])
    np.testing.assert_array_equal(q[2, 0], L.samples[8])


def test_choreography_satisfies_cyclic_relation_exactly():
    L = test_loop(24)
    q = build_choreography(L, BodySystem(3))
    # q_i(t) = q_{i-1}(t + 1/n), q_1(t) = q_n(t + 1/n)
    np.testing.assert_array_equal(q[1], np.roll(q[0], -8, axis=0))
    np.testing.assert_array_equal(q[2], np.roll(q[1], -8, axis=0))
    np.testing.assert_array_equal(q[0], np.roll(q[2], -8, axis=0))


def test_interpolated_shift_matches_closed_form():
    # N = 512 is not divisible by 3: offsets 1/3, 2/3 go through band-limited interpolation
    L = test_loop(512)
    s = BodySystem(3)
    assert not exact_shifts(512, s)
    q = build_choreography(L, s)
    t = np.arange(512) / 512 + 1 / 3
    x, y = 0.15 * np.sin(4 * np.pi * t), 0.2275 * np.sin(2 * np.pi * t)
    ref = np.stack([x, y, np.sqrt(1 - x * x - y * y)], axis=1)
    assert np.max(np.abs(q[1] - ref)) < 1e-12
    np.testing.assert_allclose(np.linalg.norm(q, axis=-1), 1.0, atol=1e-15)


def test_shift_adjoint(rng):
    x, y = rng.normal(size=(2, 60, 3))
    for k in (Fraction(1, 3), Fraction(1, 7), 0.123):
        lhs = np.sum(shift_samples(x, k) * y)
        rhs = np.sum(x * shift_samples(y, -k))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_test_loop_anchor_points():
    L = test_loop(12)
    np.testing.assert_array_equal(L.samples[0], [0.0, 0.0, 1.0])
    np.testing.assert_allclose(L.samples[6], [0.0, 0.0, 1.0], atol=1e-15)
    L8 = test_loop(16)
    np.testing.assert_allclose(L8.samples[2][:2], [0.15, 0.2275 * np.sin(np.pi / 4)], atol=1e-15)
    assert np.max(np.abs(np.linalg.norm(test_loop(1024).samples, axis=1) - 1)) < 1e-14


def test_test_loop_is_collision_free():
    assert min_pair_separation(test_loop(516), BodySystem(3)) > 0.2


def test_test_loop_fixed_by_E2_and_E3():
    L = test_loop(96)
    np.testing.assert_allclose(apply_E2(L).samples, L.samples, atol=1e-15)
    np.testing.assert_allclose(apply_E3(L).samples, L.samples, atol=1e-15)
    assert max(symmetry_residuals(L)) < 1e-12


def test_north_pole_constant_loop_fixed():
    L = constant_loop(16)
    np.testing.assert_array_equal(apply_E2(L).samples, L.samples)
    np.testing.assert_array_equal(apply_E3(L).samples, L.samples)


def test_E2_E3_are_involutions(rng):
    L = DiscreteLoop(random_unit(rng, 40))
    np.testing.assert_array_equal(apply_E2(apply_E2(L)).samples, L.samples)
    np.testing.assert_array_equal(apply_E3(apply_E3(L)).samples, L.samples)


def test_E2_definition(rng):
    L = DiscreteLoop(random_unit(rng, 40))
    out = apply_E2(L).samples
    for j in (0, 3, 25):
        np.testing.assert_array_equal(out[j], B @ L.samples[(j + 20) % 40])
    out = apply_E3(L).samples
    for j in (0, 3, 25):
        np.testing.assert_array_equal(out[j], C @ L.samples[(-j) % 40])


def test_group_composition():
    N = 40
    q = random_unit(np.random.default_rng(1), N)
    np.testing.assert_array_equal((E2 @ E3).apply(q), E2.apply(E3.apply(q)))
    np.testing.assert_array_equal((E3 @ E2).apply(q), E3.apply(E2.apply(q)))
    np.testing.assert_array_equal((E2 @ E2).apply(q), IDENTITY.apply(q))
    with pytest.raises(ValueError):
        SymmetryElement(matrix=np.diag([1.0, 2.0, 1.0]))
    with pytest.raises(ValueError):
        E2.index_map(41)


def test_symmetrize_fixes_test_loop():
    L = test_loop(96)
    np.testing.assert_allclose(symmetrize(L).samples, L.samples, atol=1e-12)


def test_symmetrize_projection(rng):
    L = perturbed_test_loop(rng)
    S = symmetrize(L)
    assert max(symmetry_residuals(S)) < 1e-12
    np.testing.assert_allclose(symmetrize(S).samples, S.samples, atol=1e-12)
    # E2 and E3 together pin samples 0 and N/2 to the z axis
    for j in (0, len(S) // 2):
        assert np.max(np.abs(S.samples[j][:2])) < 1e-10


def test_symmetrize_degenerate_and_divisibility():
    L = DiscreteLoop(np.tile([1.0, 0.0, 0.0], (8, 1)))
    with pytest.raises(ValueError, match="degenerate"):
        symmetrize(L)
    with pytest.raises(ValueError):
        symmetrize(test_loop(12).__class__(np.tile([0.0, 0.0, 1.0], (10, 1))))


def test_min_pair_separation_collisions():
    s = BodySystem(3)
    assert min_pair_separation(constant_loop(24), s) == 0.0
    q = test_loop(24).samples.copy()
    q[8] = q[0]
    assert min_pair_separation(DiscreteLoop(q), s) == 0.0
