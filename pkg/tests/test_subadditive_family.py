import random

import numpy as np
import pytest

from conftest import close, random_contexts, random_params
from liftcuts.concave_core import MinLinear, NegQuadratic, reflect
from liftcuts.subadditive_family import (
    SubadditiveParams,
    chi,
    chi_at_A,
    chi_bar,
    omega,
    omega_bar,
    params_from_context,
)

PARAMS = [random_params(random.Random(100 + i)) for i in range(20)]


def _h(p):
    return reflect(p.base, 0.0)


def test_validation_names_condition():
    g = NegQuadratic(0.0)
    with pytest.raises(ValueError, match="b_i >= 0"):
        SubadditiveParams(1.0, 1, [-1.0], [0.0], 1, 0, g)
    with pytest.raises(ValueError, match=r"b_i >= b_\(i\+1\)"):
        SubadditiveParams(1.0, 1, [1.0, 2.0], [0.0, 0.0], 1, 0, g)
    with pytest.raises(ValueError, match=r"b_\(i\+2\) \+ v_\(i\+1\)"):
        SubadditiveParams(1.0, 1, [2.0, 1.0], [0.0, -5.0], 1, 0, g)
    with pytest.raises(ValueError, match="epsilon = 0"):
        SubadditiveParams(0.0, 2, [1.0], [0.0], 1, 0, g)
    with pytest.raises(ValueError, match="gamma"):
        SubadditiveParams(1.0, 2, [1.0], [0.0], 1, 2, g)
    with pytest.raises(ValueError, match="tau"):
        SubadditiveParams(1.0, 0, [1.0], [0.0], 1, 0, g)


def test_derived_quantities():
    p = SubadditiveParams(0.5, 3, [2.0, 1.0], [-2.5, -1.5], 2, 1, NegQuadratic(0.0))
    assert p.a_(1) == 3.5 and p.a_(2) == 2.5
    assert p.A(0) == 0 and p.A(2) == 6.0
    assert p.B(2) == 3.5 + 1.0
    # tail rule
    assert p.b_(3) == 0.0 and p.v_(2) == 1.0 - 1.5
    assert close(p.psi(0), NegQuadratic(0.0)(-2.0 + 2.5 - 0.5) - NegQuadratic(0.0)(-2.0 + 2.5))


def test_omega_zero_and_domain():
    for p in PARAMS:
        assert omega(p, 0.0) == 0.0 or abs(omega(p, 0.0)) < 1e-12
        assert abs(chi(p, 0.0)) < 1e-12
    with pytest.raises(ValueError):
        omega(PARAMS[0], 1.0)
    with pytest.raises(ValueError):
        chi(PARAMS[0], -1.0)


def test_coverage_error_without_tail():
    p = SubadditiveParams(1.0, 1, [1.0], [-1.5], 1, 0, NegQuadratic(0.0), tail=False)
    with pytest.raises(ValueError):
        omega(p, -50.0)


def test_chi_reflects_omega():
    for p in PARAMS:
        for x in np.linspace(0, p.A(p.m + 2) + 3, 41):
            assert close(chi(p, x), omega(p, -x), 1e-12)
            assert close(chi_bar(p, x), omega_bar(p, -x), 1e-12)


def test_chi_at_breakpoints_closed_form():
    for p in PARAMS:
        h = _h(p)
        for i in range(0, p.m + 3):
            assert close(chi(p, p.A(i)), chi_at_A(p, i), 1e-11)
            expected = sum(
                p.tau * (h(p.b_(j) + p.v_(j - 1) + p.epsilon) - h(p.b_(j) + p.v_(j - 1)))
                + h(p.b_(j) + p.v_(j - 1)) - h(p.v_(j - 1))
                for j in range(1, i + 1)
            )
            assert close(chi_at_A(p, i), expected, 1e-12)


def test_continuity_at_breakpoints():
    for p in PARAMS:
        pts = [p.A(i) for i in range(p.m + 2)]
        pts += [p.B(i + 1) + l * p.epsilon for i in range(p.m + 1) for l in range(p.tau + 1)]
        for x in pts:
            if x < 1e-6:
                continue
            for fn in (chi, chi_bar):
                l, r = fn(p, x - 1e-10), fn(p, x + 1e-10)
                assert abs(l - r) <= 1e-8 * max(1.0, abs(l)), (fn.__name__, x)


def _knapsack_params(sigma, eps, tau, M):
    b = [round(3.0 - 0.4 * i, 3) for i in range(M)]
    v = [-sigma - bi for bi in b]
    return SubadditiveParams(eps, tau, b, v, M, tau - 1, reflect(MinLinear(0.0), 0.0))


@pytest.mark.parametrize("sigma,eps,tau", [(0.3, 1.0, 2), (0.0, 0.5, 3), (0.5, 0.5, 1), (0.2, 1.5, 4)])
def test_knapsack_reduction(sigma, eps, tau):
    p = _knapsack_params(sigma, eps, tau, 6)
    for i in range(0, 7):
        assert close(chi(p, p.A(i)), -i * tau * (eps - sigma), 1e-12)
    # piecewise closed form on (A_i, A_{i+1}]
    for x in np.linspace(1e-6, p.A(6), 400):
        i = max(j for j in range(7) if p.A(j) < x)
        B = p.B(i + 1)
        if x <= B:
            want = -i * tau * (eps - sigma)
        else:
            l = min(int((x - B) // eps), tau - 1)
            if x <= B + l * eps + sigma:
                want = -(i * tau + l) * (eps - sigma)
            else:
                want = -i * tau * (eps - sigma) - x + B + (l + 1) * sigma
        assert close(chi(p, x), want, 1e-9), (x, i)
    # chi_bar follows chi up to A_m then falls with slope -1
    Am = p.A(p.m)
    for x in np.linspace(0, Am + 5, 200):
        want = chi(p, x) if x <= Am else -x + Am + chi(p, Am)
        assert close(chi_bar(p, x), want, 1e-9)


def test_unit_tau_reduction():
    rng = random.Random(7)
    for _ in range(10):
        p = random_params(rng)
        p = SubadditiveParams(p.epsilon, 1, p.b, p.v, p.m, 0, p.base)
        h = _h(p)
        for x in np.linspace(1e-6, p.A(p.m + 2), 120):
            i = max(j for j in range(p.m + 3) if p.A(j) < x)
            want = h(x - p.A(i) + p.v_(i)) + chi(p, p.A(i)) - h(p.v_(i))
            assert close(chi(p, x), want, 1e-9)
            if x <= p.A(p.m):
                assert close(chi_bar(p, x), want, 1e-9)
            else:
                j = p.m - 1
                tail = h(x - p.A(j) + p.v_(j)) + chi(p, p.A(j)) - h(p.v_(j))
                assert close(chi_bar(p, x), tail, 1e-9)


def test_chi_bar_below_chi_past_threshold():
    # the closure b_i = 0, v_(i-1) = b_m + v_(m-1) must start right after m
    for q in PARAMS:
        p = SubadditiveParams(q.epsilon, q.tau, q.b[: q.m], q.v[: q.m], q.m, q.gamma, q.base)
        start = p.B(p.m) + (p.gamma + 1) * p.epsilon
        for x in np.linspace(start, start + 10, 30):
            assert chi_bar(p, x) <= chi(p, x) + 1e-9 * max(1.0, abs(chi(p, x)))


@pytest.mark.parametrize("idx", range(5))
def test_subadditive_random_pairs(idx):
    p = PARAMS[idx]
    rng = np.random.default_rng(idx)
    span = p.A(p.m + 2) + 2
    xy = rng.uniform(0, span, size=(2000, 2))
    for fn in (chi, chi_bar):
        for x, y in xy:
            lhs, rhs = fn(p, x) + fn(p, y), fn(p, x + y)
            assert lhs >= rhs - 1e-9 * max(1.0, abs(lhs), abs(rhs))


def test_context_parameters_reproduce_second_phase():
    for c in random_contexts(150, seed=77):
        pl = params_from_context(c)
        pu = params_from_context(c, upper=True)
        for d in np.linspace(-15, 0, 31):
            assert close(omega_bar(pl, d), c.eta_lower(d), 1e-9)
            assert close(omega(pu, d), c.eta_upper(d), 1e-9)
