"""Parametric subadditive functions omega, omega_bar (on R_-) and chi, chi_bar (on R_+).

The functions are built from a step ``epsilon``, a repeat count ``tau`` and
two sequences ``b`` (1-indexed: b_1, b_2, ...) and ``v`` (0-indexed: v_0,
v_1, ...).  With a_i = b_i + tau*epsilon, A_i = a_1 + ... + a_i and
B_i = A_{i-1} + b_i, omega on [-A_{i+1}, -A_i) starts with the concave piece
g(delta + A_i - v_i) + omega(-A_i) - g(-v_i) down to -B_{i+1} and continues
with tau shifted copies, each ``epsilon`` wide.  The barred variants switch
to a single concave tail below -B_m - (gamma+1) epsilon.

Only a finite prefix of b and v is stored.  Past it the default tail rule
b_i = 0, v_{i-1} = b_M + v_{M-1} applies (M = stored length), which repeats
an item of width tau*epsilon forever.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .concave_core import ConcaveFn, TOL, reflect
from .lifting import LiftContext, ceil_div, _eps

# hard stop for walking the sequence (guards epsilon = 0 with an endless tail)
MAX_TERMS = 1_000_000


@dataclass(frozen=True)
class SubadditiveParams:
    epsilon: float
    tau: int
    b: tuple[float, ...]  # b_1 .. b_M
    v: tuple[float, ...]  # v_0 .. v_{M-1}
    m: int
    gamma: int
    base: ConcaveFn  # g for omega; chi reflects it internally
    tail: bool = True

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        object.__setattr__(self, "v", tuple(float(x) for x in self.v))
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be nonnegative")
        if int(self.tau) != self.tau or self.tau < 1:
            raise ValueError("tau must be a positive integer")
        if self.epsilon == 0 and self.tau != 1:
            raise ValueError("epsilon = 0 is only allowed with tau = 1")
        if len(self.b) != len(self.v) or not self.b:
            raise ValueError("b and v must be nonempty and of equal length")
        if int(self.m) != self.m or not (1 <= self.m <= len(self.b)):
            raise ValueError("m must be an integer in [1, len(b)]")
        if int(self.gamma) != self.gamma or not (0 <= self.gamma <= self.tau - 1):
            raise ValueError("gamma must be an integer in [0, tau-1]")
        last = len(self.b) + (2 if self.tail else 0)
        for i in range(1, last + 1):
            if self.b_(i) < 0:
                raise ValueError(f"sequence b violates b_i >= 0 at i={i}")
        for i in range(1, last):
            bi = self.b_(i)
            if self.b_(i + 1) > bi + TOL * max(1.0, abs(bi)):
                raise ValueError(f"sequence b violates b_i >= b_(i+1) at i={i}")
        for i in range(0, last - 1):
            lhs = self.b_(i + 2) + self.v_(i + 1)
            rhs = self.b_(i + 1) + self.v_(i)
            if lhs < rhs - TOL * max(1.0, abs(lhs), abs(rhs)):
                raise ValueError(f"sequences violate b_(i+2) + v_(i+1) >= b_(i+1) + v_i at i={i}")

    # -- sequence access with tail rule --------------------------------------
    def b_(self, i: int) -> float:
        if 1 <= i <= len(self.b):
            return self.b[i - 1]
        if self.tail and i > len(self.b):
            return 0.0
        raise IndexError(f"b_{i} is not materialized")

    def v_(self, i: int) -> float:
        if 0 <= i < len(self.v):
            return self.v[i]
        if self.tail and i >= len(self.v):
            return self.b[-1] + self.v[-1]
        raise IndexError(f"v_{i} is not materialized")

    def a_(self, i: int) -> float:
        return self.b_(i) + self.tau * self.epsilon

    def psi(self, i: int, base: ConcaveFn = None) -> float:
        g = self.base if base is None else base
        z = -self.b_(i + 1) - self.v_(i)
        return g(z - self.epsilon) - g(z)

    def A(self, i: int) -> float:
        return sum(self.a_(j) for j in range(1, i + 1))

    def B(self, i: int) -> float:
        return self.A(i - 1) + self.b_(i)


def _omega_core(p: SubadditiveParams, g: ConcaveFn, x: float, stop: int | None = None):
    """omega(-x) for x >= 0 with base g; when ``stop`` is set, returns
    (A_stop, omega(-A_stop)) instead of evaluating."""
    A = 0.0
    om = 0.0
    i = 0
    while True:
        if stop is not None and i == stop:
            return A, om
        if i > MAX_TERMS:
            raise ValueError("insufficient sequence coverage for this argument")
        try:
            b1 = p.b_(i + 1)
            vi = p.v_(i)
        except IndexError:
            raise ValueError("insufficient sequence coverage for this argument") from None
        a1 = b1 + p.tau * p.epsilon
        nxt = A + a1
        if stop is None and x <= nxt + _eps(nxt):
            break
        if a1 <= 0:
            raise ValueError("insufficient sequence coverage: zero-width items past the prefix")
        psi = g(-b1 - vi - p.epsilon) - g(-b1 - vi)
        om = om + p.tau * psi + g(-b1 - vi) - g(-vi)
        A = nxt
        i += 1
    if x <= A:
        return om
    B = A + b1
    gvi = g(-vi)
    if x <= B + _eps(B) or p.epsilon == 0:
        return g(-x + A - vi) + om - gvi
    ell = ceil_div(x - B, p.epsilon) - 1
    ell = min(max(ell, 0), p.tau - 1)
    psi = g(-b1 - vi - p.epsilon) - g(-b1 - vi)
    return g(-x + A + ell * p.epsilon - vi) + om + ell * psi - gvi


def _check_nonpos(delta):
    if delta > _eps(delta):
        raise ValueError(f"argument must be <= 0, got {delta}")


def omega(p: SubadditiveParams, delta: float) -> float:
    _check_nonpos(delta)
    return _omega_core(p, p.base, max(-delta, 0.0))


def _bar_switch(p: SubadditiveParams, x: float) -> bool:
    thr = p.B(p.m) + (p.gamma + 1) * p.epsilon
    return x > thr + _eps(thr)


def omega_bar(p: SubadditiveParams, delta: float) -> float:
    _check_nonpos(delta)
    x = max(-delta, 0.0)
    if not _bar_switch(p, x):
        return omega(p, delta)
    g = p.base
    A, om = _omega_core(p, g, 0.0, stop=p.m - 1)
    vm = p.v_(p.m - 1)
    return g(delta + A + p.gamma * p.epsilon - vm) + om + p.gamma * p.psi(p.m - 1) - g(-vm)


def chi(p: SubadditiveParams, delta: float) -> float:
    """Mirror family on R_+ written with h(z) = base(-z)."""
    if delta < -_eps(delta):
        raise ValueError(f"argument must be >= 0, got {delta}")
    h = reflect(p.base, 0.0)
    x = max(delta, 0.0)
    A = 0.0
    val = 0.0
    i = 0
    while True:
        if i > MAX_TERMS:
            raise ValueError("insufficient sequence coverage for this argument")
        try:
            b1, vi = p.b_(i + 1), p.v_(i)
        except IndexError:
            raise ValueError("insufficient sequence coverage for this argument") from None
        a1 = b1 + p.tau * p.epsilon
        if x <= A + a1 + _eps(A + a1):
            break
        if a1 <= 0:
            raise ValueError("insufficient sequence coverage: zero-width items past the prefix")
        val += p.tau * (h(b1 + vi + p.epsilon) - h(b1 + vi)) + h(b1 + vi) - h(vi)
        A += a1
        i += 1
    if x <= A:
        return val
    B = A + b1
    if x <= B + _eps(B) or p.epsilon == 0:
        return h(x - A + vi) + val - h(vi)
    ell = min(max(ceil_div(x - B, p.epsilon) - 1, 0), p.tau - 1)
    psi = h(b1 + vi + p.epsilon) - h(b1 + vi)
    return h(x - A - ell * p.epsilon + vi) + val + ell * psi - h(vi)


def chi_bar(p: SubadditiveParams, delta: float) -> float:
    if delta < -_eps(delta):
        raise ValueError(f"argument must be >= 0, got {delta}")
    if not _bar_switch(p, delta):
        return chi(p, delta)
    h = reflect(p.base, 0.0)
    A = p.A(p.m - 1)
    val = chi(p, A)
    vm = p.v_(p.m - 1)
    bm = p.b_(p.m)
    psi = h(bm + vm + p.epsilon) - h(bm + vm)
    return h(delta - A - p.gamma * p.epsilon + vm) + val + p.gamma * psi - h(vm)


def chi_at_A(p: SubadditiveParams, i: int) -> float:
    """Closed form of chi at the breakpoint A_i."""
    h = reflect(p.base, 0.0)
    tot = 0.0
    for j in range(1, i + 1):
        bj, vj = p.b_(j), p.v_(j - 1)
        tot += p.tau * (h(bj + vj + p.epsilon) - h(bj + vj)) + h(bj + vj) - h(vj)
    return tot


def params_from_context(ctx: LiftContext, upper: bool = False) -> SubadditiveParams:
    """Parameters under which omega_bar reproduces eta_lower (or, with
    ``upper``, omega reproduces eta_upper) of the context.

    Each large S0 item contributes mu_i unit copies, followed by copies of an
    item of weight k a_s; epsilon = a_s, tau = k, b_i = a_i - k a_s,
    v_{i-1} = -a_i.
    """
    k, a_s, mu_s = ctx.k, ctx.a_s, ctx.mu_s
    units: list[float] = []
    for w, m in zip(ctx.S0plus.weights, ctx.S0plus.mult):
        units.extend([w] * m)
    if upper:
        if not units:
            units = [k * a_s]
        b = [u - k * a_s for u in units]
        v = [-u for u in units]
        return SubadditiveParams(a_s, k, b, v, len(units), 0, ctx.g, tail=True)
    rbar = math.ceil((mu_s - k + 1) / k)
    kappa = mu_s - k + 1 - (rbar - 1) * k
    units = units + [k * a_s] * rbar
    b = [u - k * a_s for u in units]
    v = [-u for u in units]
    return SubadditiveParams(a_s, k, b, v, len(units), kappa - 1, ctx.g, tail=False)
