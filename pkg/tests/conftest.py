import math
import random

import numpy as np
import pytest

from liftcuts.concave_core import (
    ExpUtility,
    MinLinear,
    NegAbs,
    NegExp,
    NegQuadratic,
    PiecewiseLinear,
)
from liftcuts.lifting import InstanceX, LiftContext

E = math.e

MIXED_FNS = [
    NegExp(2.0),
    ExpUtility(1.5, 0.5),
    NegQuadratic(4.0),
    NegAbs(3.0),
    MinLinear(5.5),
    PiecewiseLinear((0.0, 2.0, 5.0, 9.0), (0.0, 3.0, 4.0, 3.5)),
]

WEIGHT_CHOICES = [0, 0.5, 1, 1.5, 2, 2.5, 3, 4, -1, -2]


def close(x, y, tol=1e-9):
    """Scaled comparison used across the suite: |x - y| <= tol * max(1, |x|, |y|)."""
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def random_context(rng: random.Random, n_max=4, mu_max=3, fns=MIXED_FNS, weights=WEIGHT_CHOICES):
    n = rng.randint(1, n_max)
    a = [rng.choice(weights) for _ in range(n)]
    mu = [rng.randint(1, mu_max) for _ in range(n)]
    nz = [i for i in range(n) if a[i] != 0]
    if not nz:
        a[0] = 1
        nz = [0]
    s = rng.choice(nz)
    inst = InstanceX.create(a, mu, rng.choice(fns))
    k = rng.randint(1, mu[s])
    rest = [i for i in range(n) if i != s]
    S1 = [i for i in rest if rng.random() < 0.5]
    S0 = [i for i in rest if i not in S1]
    return LiftContext(inst, s, k, S0, S1)


def random_contexts(count, seed, **kw):
    rng = random.Random(seed)
    return [random_context(rng, **kw) for _ in range(count)]


def binary4_context(c=3.0):
    """Binary instance a = (1, 2, 2, 3), s = 0, k = 1, S0 = {1, 2}, S1 = {3}."""
    inst = InstanceX.create([1, 2, 2, 3], [1, 1, 1, 1], NegExp(c))
    return LiftContext(inst, 0, 1, [1, 2], [3])


def eta_example_context():
    """Binary instance a = (1, 2, 2, 6), g(z) = -exp(-z)."""
    inst = InstanceX.create([1, 2, 2, 6], [1, 1, 1, 1], NegExp(6.0))
    return LiftContext(inst, 0, 1, [1, 2], [3])


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def nprng():
    return np.random.default_rng(12345)


def random_params(rng: random.Random, tail=True):
    """Random SubadditiveParams satisfying the sequence conditions.

    b is nonincreasing and nonnegative; c_i = b_(i+1) + v_i is nondecreasing.
    """
    from liftcuts.subadditive_family import SubadditiveParams

    M = rng.randint(1, 5)
    tau = rng.randint(1, 4)
    eps = rng.choice([0.5, 1.0, 1.5])
    b = sorted((round(rng.uniform(0, 3), 2) for _ in range(M)), reverse=True)
    c = sorted(round(rng.uniform(-3, 1), 2) for _ in range(M))
    v = [ci - bi for ci, bi in zip(c, b)]
    base = rng.choice([NegQuadratic(rng.uniform(-2, 2)), NegExp(rng.uniform(-1, 1)), ExpUtility(2.0), NegAbs(0.5)])
    return SubadditiveParams(eps, tau, b, v, rng.randint(1, M), rng.randint(0, tau - 1), base, tail=tail)


# -- acceptance reporting --------------------------------------------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    cid, title = mark.args
    entry = _CRITERIA.setdefault(cid, {"title": title, "ok": True})
    entry["ok"] &= not rep.failed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_CRITERIA, key=lambda c: int(c)):
        e = _CRITERIA[cid]
        terminalreporter.write_line(f"criterion {cid}: {'PASS' if e['ok'] else 'FAIL'}  {e['title']}")
