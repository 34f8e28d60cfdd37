import itertools
import math

import numpy as np
import pytest

from conftest import close, binary4_context, random_contexts
from liftcuts.concave_core import NegExp, NegQuadratic
from liftcuts.cutgen import single_phase_cut
from liftcuts.lifting import InstanceX, LiftContext
from liftcuts.polyoracle import (
    affine_rank,
    bound_face_dimension,
    check_validity,
    enumerate_points,
    face_dimension,
    face_dimension_on,
    lift_bruteforce,
    optimum_bruteforce,
    point_arrays,
    tight_points,
)
from liftcuts.problems import EUMInstance, WTAInstance
from liftcuts.seed import Cut, Instance1D, seed_inequality


def test_enumeration_counts():
    assert len(enumerate_points(InstanceX.create([1.0], [3], NegExp(0.0)))) == 4
    assert len(enumerate_points(binary4_context().inst)) == 16
    pts = enumerate_points(InstanceX.create([1.0, 2.0, 0.5], [2, 3, 1], NegExp(0.0)))
    assert len(pts) == 24
    assert len(set(x for _, x in pts)) == 24
    for w, x in pts:
        assert close(w, NegExp(0.0)(x[0] + 2 * x[1] + 0.5 * x[2]), 1e-14)


def test_enumeration_uses_input_coordinates():
    inst = InstanceX.create([1.0, -2.0], [1, 2], NegExp(1.0))
    for w, x in enumerate_points(inst):
        assert close(w, inst.raw_f(x[0] - 2 * x[1]), 1e-14)


def test_enumeration_limit():
    with pytest.raises(ValueError, match="limit"):
        enumerate_points(InstanceX.create([1.0] * 8, [9] * 8, NegExp(0.0)))


def test_validity_detects_violations():
    inst = InstanceX.create([1.0, 2.0], [2, 1], NegQuadratic(0.0))
    v = check_validity(Cut(inst.value([0, 0]) - 1.0, (0.0, 0.0)), inst)
    assert not v.ok and v.x == (0, 0) and close(v.amount, 1.0)
    c = LiftContext(inst, 0, 1, [1], [])
    cut = single_phase_cut(c)
    assert check_validity(cut, inst).ok
    bad = Cut(cut.alpha0 - 1e-3, cut.alpha)
    assert not check_validity(bad, inst).ok


def test_validity_dimension_mismatch():
    with pytest.raises(ValueError):
        check_validity(Cut(0.0, (1.0,)), binary4_context().inst)


def test_face_dimension_examples():
    c = binary4_context()
    cut = single_phase_cut(c)
    assert face_dimension(cut, c.inst) == 4
    T = tight_points(cut, c.inst)
    assert len(T) == 5 and affine_rank(T) == 5
    inst1 = InstanceX.create([1.0], [3], NegExp(0.0))
    assert face_dimension(seed_inequality(Instance1D(1.0, 3, NegExp(0.0)), 2), inst1) == 1
    with pytest.raises(ValueError):
        face_dimension(Cut(-5.0, (0.0,) * 4), c.inst)


def test_bound_faces_are_facets():
    inst = InstanceX.create([1.0, 2.0, 1.5], [2, 1, 3], NegExp(1.0))
    for i in range(3):
        assert bound_face_dimension(inst, i, True) == 3
        assert bound_face_dimension(inst, i, False) == 3


def test_affine_rank_basics():
    assert affine_rank(np.zeros((0, 3))) == 0
    assert affine_rank(np.ones((1, 3))) == 1
    assert affine_rank(np.array([[0, 0], [1, 1], [2, 2]])) == 2
    assert affine_rank(np.array([[0, 0], [1, 0], [0, 1], [1, 1]])) == 3


def test_affine_rank_stable_under_shuffles(nprng):
    for _ in range(30):
        d = int(nprng.integers(2, 6))
        r = int(nprng.integers(1, d + 1))
        basis = nprng.normal(size=(r, d))
        P = nprng.normal(size=(12, r)) @ basis + nprng.normal(size=d)
        base = affine_rank(P)
        assert base == r + 1
        for _ in range(5):
            assert affine_rank(P[nprng.permutation(len(P))]) == base


def test_face_dimension_independent_of_order(nprng):
    for c in random_contexts(20, seed=17):
        cut = single_phase_cut(c)
        W, X = point_arrays(c.inst)
        perm = nprng.permutation(len(W))
        assert face_dimension_on(cut, W[perm], X[perm]) == face_dimension(cut, c.inst)


def test_lift_bruteforce_examples():
    c = binary4_context()
    assert lift_bruteforce(c, 0.0, "zeta") == 0.0
    assert close(lift_bruteforce(c, -1.0, "zeta"), math.exp(-1) - 1)
    with pytest.raises(ValueError):
        lift_bruteforce(c, 1.0, "eta")
    with pytest.raises(ValueError):
        lift_bruteforce(c, -1.0, "phi")
    with pytest.raises(ValueError):
        lift_bruteforce(c, 0.0, "psi")


def test_lift_bruteforce_eta_is_max_over_box():
    inst = InstanceX.create([1.0, 2.0, 3.0], [2, 1, 1], NegExp(2.0))
    c = LiftContext(inst, 0, 1, [1], [2])
    for d in (-0.5, -2.0, -4.5):
        best = max(
            c.g(d + 2 * y + c.a_s * xs) - c.zeta(2.0) * y - c.rho * (xs - c.k) - c.gk
            for y in (0, 1)
            for xs in range(3)
        )
        assert close(lift_bruteforce(c, d, "eta"), best, 1e-12)


def test_optimum_small_cases():
    w = WTAInstance(np.array([[0.3]]), np.array([10.0]), np.array([1]))
    z, x = optimum_bruteforce(w)
    assert close(z, 3.0) and x.tolist() == [[1]]
    e = EUMInstance(np.array([1.5, 2.0]), np.array([0.5, 0.5]), np.array([[1.0, 2.0], [0.5, 0.1]]), 1.0)
    z, x = optimum_bruteforce(e)
    assert z == 0.0 and x.tolist() == [0, 0]


def test_optimum_matches_manual_enumeration():
    rng = np.random.default_rng(3)
    w = WTAInstance(rng.uniform(0.05, 0.9, (2, 3)), rng.integers(1, 50, 3).astype(float), np.array([2, 1]))
    best = -1.0
    for x in itertools.product(range(3), repeat=6):
        X = np.array(x).reshape(2, 3)
        if w.feasible(X):
            best = max(best, w.objective(X))
    z, x = optimum_bruteforce(w)
    assert close(z, best, 1e-12) and w.feasible(x) and close(w.objective(x), z, 1e-12)


def test_optimum_size_guard():
    w = WTAInstance(np.full((12, 12), 0.5), np.ones(12), np.full(12, 2))
    with pytest.raises(ValueError):
        optimum_bruteforce(w)
    with pytest.raises(TypeError):
        optimum_bruteforce("not a problem")
