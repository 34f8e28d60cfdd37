"""Lifting functions for w <= f(a^T x), 0 <= x <= mu, x integer.

A lifting context fixes a pivot variable ``s`` with seed index ``k`` and
splits the remaining variables into ``S0`` (fixed at 0) and ``S1`` (fixed at
their upper bound).  Everything here is expressed through
g(z) = f(z + sum_{S1} mu_i a_i) and rho = g(k a_s) - g((k-1) a_s).

Exact lifting functions (zeta, eta, phi) and their subadditive
approximations (Z, eta upper/lower, phi upper) are closed forms driven by
floor arithmetic on a_s and by prefix sums over the large items of S0 or S1.
Indices are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

from .concave_core import ConcaveFn, from_json, reflect, shift
from .seed import Cut

# breakpoint snapping: a delta within SNAP (relative) of a breakpoint is put on
# the closed side of the interval
SNAP = 1e-12


def _eps(x: float) -> float:
    return SNAP * max(1.0, abs(x))


def floor_div(delta: float, a: float) -> int:
    """floor(delta / a), robust to representation error just below an integer."""
    return math.floor((delta + _eps(delta)) / a)


def ceil_div(delta: float, a: float) -> int:
    """ceil(delta / a), robust to representation error just above an integer."""
    return math.ceil((delta - _eps(delta)) / a)


@dataclass(frozen=True, eq=False)
class InstanceX:
    """The set {(w, x): w <= f(a^T x), 0 <= x <= mu, x integer}.

    ``a`` and ``f`` are the internal data with a >= 0.  Variables whose input
    weight was negative are complemented (x_i -> mu_i - x_i); their indices are
    kept in ``flipped`` and the input data in ``raw_a`` / ``raw_f``.
    """

    a: tuple[float, ...]
    mu: tuple[int, ...]
    f: ConcaveFn
    flipped: tuple[int, ...] = ()
    raw_a: tuple[float, ...] = ()
    raw_f: Optional[ConcaveFn] = None

    @staticmethod
    def create(a: Sequence[float], mu: Sequence[int], f: ConcaveFn) -> "InstanceX":
        a = tuple(float(v) for v in a)
        mu = tuple(int(m) for m in mu)
        if len(a) != len(mu):
            raise ValueError("a and mu must have the same length")
        if any(m < 1 for m in mu):
            raise ValueError("every bound mu_i must be a positive integer")
        if any(not math.isfinite(v) for v in a):
            raise ValueError("weights must be finite")
        flipped = tuple(i for i, v in enumerate(a) if v < 0)
        if not flipped:
            return InstanceX(a, mu, f, (), a, f)
        offset = sum(a[i] * mu[i] for i in flipped)
        return InstanceX(tuple(abs(v) for v in a), mu, shift(f, offset), flipped, a, f)

    @property
    def n(self) -> int:
        return len(self.a)

    def value(self, x) -> float:
        """f(a^T x) at an original-coordinate point."""
        return self.raw_f(sum(ai * xi for ai, xi in zip(self.raw_a, x)))

    def to_internal(self, x) -> list:
        x = list(x)
        for i in self.flipped:
            x[i] = self.mu[i] - x[i]
        return x

    def cut_to_original(self, cut: Cut) -> Cut:
        """Rewrite a cut stated in internal variables in the input variables."""
        if not self.flipped:
            return cut
        return cut.complemented(self.mu, self.flipped)

    def to_json(self) -> dict[str, Any]:
        return {"a": list(self.raw_a), "mu": list(self.mu), "f": self.raw_f.to_json()}

    @staticmethod
    def from_json(d: dict[str, Any]) -> "InstanceX":
        return InstanceX.create(d["a"], d["mu"], from_json(d["f"]))


@dataclass(frozen=True)
class _Prefix:
    """Large items sorted by weight (descending, index ascending) with the
    running sums needed by A_{iq} = sum_{j<i} mu_j a_j + q a_i."""

    items: tuple[int, ...]
    weights: tuple[float, ...]
    mult: tuple[int, ...]
    start: tuple[float, ...]  # A_{i0}
    zstart: tuple[float, ...]  # sum_{j<i} mu_j * lift(a_j)
    unit_start: tuple[int, ...]  # sum_{j<i} mu_j
    lifts: tuple[float, ...]  # lift value of one unit of item i
    total: float
    ztotal: float
    units: int

    @staticmethod
    def build(items: Iterable[int], a, mu, lift) -> "_Prefix":
        order = sorted(items, key=lambda i: (-a[i], i))
        weights = tuple(a[i] for i in order)
        mult = tuple(mu[i] for i in order)
        lifts = tuple(lift(a[i]) for i in order)
        start, zstart, ustart = [], [], []
        acc = zacc = 0.0
        u = 0
        for w, m, z in zip(weights, mult, lifts):
            start.append(acc)
            zstart.append(zacc)
            ustart.append(u)
            acc += m * w
            zacc += m * z
            u += m
        return _Prefix(tuple(order), weights, mult, tuple(start), tuple(zstart), tuple(ustart), lifts, acc, zacc, u)

    def locate_desc(self, delta: float):
        """Find (i, q) with -A_{iq} < delta <= -A_{i(q-1)}; None past the end."""
        x = -delta
        for i, w in enumerate(self.weights):
            end = self.start[i] + self.mult[i] * w
            if x < end - _eps(end):
                q = math.floor((x - self.start[i] + _eps(x)) / w) + 1
                return i, min(max(q, 1), self.mult[i])
        return None

    def locate_asc(self, delta: float):
        """Find (i, q) with A_{i(q-1)} <= delta < A_{iq}; None past the end."""
        for i, w in enumerate(self.weights):
            end = self.start[i] + self.mult[i] * w
            if delta < end - _eps(end):
                q = math.floor((delta - self.start[i] + _eps(delta)) / w) + 1
                return i, min(max(q, 1), self.mult[i])
        return None

    def partial(self, loc):
        """(A, sum of lifts, unit count) for the prefix ending at loc."""
        if loc is None:
            return self.total, self.ztotal, self.units
        i, q = loc
        return (
            self.start[i] + q * self.weights[i],
            self.zstart[i] + q * self.lifts[i],
            self.unit_start[i] + q,
        )


class LiftContext:
    """Partition (s, k, S0, S1) of an instance together with derived data.

    Immutable after construction.
    """

    def __init__(self, inst: InstanceX, s: int, k: int, S0: Iterable[int], S1: Iterable[int]):
        S0 = tuple(sorted(int(i) for i in S0))
        S1 = tuple(sorted(int(i) for i in S1))
        n = inst.n
        if not (0 <= s < n):
            raise ValueError(f"pivot index {s} out of range")
        seen = sorted((s,) + S0 + S1)
        if seen != list(range(n)):
            raise ValueError("{s}, S0 and S1 must partition the variable indices")
        a_s = inst.a[s]
        if not a_s > 0:
            raise ValueError("the pivot variable needs a positive weight")
        mu_s = inst.mu[s]
        if int(k) != k or not (1 <= k <= mu_s):
            raise ValueError(f"k must be an integer in [1, {mu_s}]")
        self.inst = inst
        self.s = int(s)
        self.k = int(k)
        self.S0 = S0
        self.S1 = S1
        self.a_s = a_s
        self.mu_s = mu_s
        self.offset = sum(inst.mu[i] * inst.a[i] for i in S1)
        self.g = shift(inst.f, self.offset)
        self.gk = self.g(self.k * a_s)
        self.rho = self.gk - self.g((self.k - 1) * a_s)
        a, mu = inst.a, inst.mu
        self.S0plus = _Prefix.build([i for i in S0 if a[i] >= self.k * a_s], a, mu, self.zeta)
        self.S1plus = _Prefix.build(
            [i for i in S1 if a[i] >= (mu_s - self.k + 1) * a_s], a, mu, lambda w: self.zeta(-w)
        )
        self._k1 = None
        self._comp = None

    # -- serialization -------------------------------------------------
    def to_json(self) -> dict[str, Any]:
        return {"s": self.s, "k": self.k, "S0": list(self.S0), "S1": list(self.S1)}

    @staticmethod
    def from_json(inst: InstanceX, d: dict[str, Any]) -> "LiftContext":
        return LiftContext(inst, int(d["s"]), int(d["k"]), d["S0"], d["S1"])

    def __repr__(self):
        return f"LiftContext(s={self.s}, k={self.k}, S0={self.S0}, S1={self.S1})"

    # -- first phase ---------------------------------------------------
    def p(self, delta: float, xs: int) -> float:
        """Objective of the one-variable lifting problem at x_s = xs."""
        return self.g(delta + self.a_s * xs) - self.rho * (xs - self.k) - self.gk

    def zeta(self, delta: float) -> float:
        xs = self.k - 1 - floor_div(delta, self.a_s)
        return self.p(delta, min(max(xs, 0), self.mu_s))

    def z_approx(self, delta: float) -> float:
        return self.p(delta, self.k - 1 - floor_div(delta, self.a_s))

    # -- second phase, Type I --------------------------------------------
    def gamma_opt(self, a_lambda: float, delta: float, cap: Optional[int] = None) -> int:
        cap = self.mu_s if cap is None else cap
        t = self.k - ceil_div(delta + a_lambda, self.a_s)
        t = max(t, 0)
        return t if cap < 0 else min(t, cap)

    def h(self, a_lambda: float, zsum: float, gamma: int, delta: float) -> float:
        return (
            self.g(delta + a_lambda + gamma * self.a_s)
            - zsum
            + (self.k - gamma) * self.rho
            - self.gk
        )

    def _eta_prefix(self, delta: float, cap: int) -> float:
        _check_nonpos(delta)
        A, zs, _ = self.S0plus.partial(self.S0plus.locate_desc(delta))
        return self.h(A, zs, self.gamma_opt(A, delta, cap), delta)

    def eta_lower(self, delta: float) -> float:
        return self._eta_prefix(delta, self.mu_s)

    def eta_upper(self, delta: float) -> float:
        return self._eta_prefix(delta, -1)

    def opt_prefix(self, delta: float) -> int:
        """Number of leading unit copies of the large S0 items in an optimal
        solution of the restricted second-phase problem."""
        _check_nonpos(delta)
        return self.S0plus.partial(self.S0plus.locate_desc(delta))[2]

    @property
    def s0_is_large(self) -> bool:
        """True when every S0 item with positive weight is a large item."""
        big = set(self.S0plus.items)
        return all(i in big or self.inst.a[i] == 0 for i in self.S0)

    @property
    def s1_is_large(self) -> bool:
        big = set(self.S1plus.items)
        return all(i in big or self.inst.a[i] == 0 for i in self.S1)

    def k1_context(self) -> "LiftContext":
        """For k = 1: the pivot moved to the lightest positive item of S0 + {s}."""
        if self._k1 is None:
            a = self.inst.a
            pool = [i for i in self.S0 + (self.s,) if a[i] > 0]
            sbar = min(pool, key=lambda i: (a[i], i))
            S0 = [i for i in self.S0 + (self.s,) if i != sbar]
            self._k1 = LiftContext(self.inst, sbar, 1, S0, self.S1)
        return self._k1

    def eta_exact(self, delta: float) -> Optional[float]:
        """Exact second-phase lifting function, or None when no closed form applies."""
        if self.s0_is_large:
            return self.eta_lower(delta)
        if self.k == 1:
            return self.k1_context().eta_lower(delta)
        return None

    @property
    def eta_exact_available(self) -> bool:
        return self.s0_is_large or self.k == 1

    # -- second phase, Type II -------------------------------------------
    def complement(self) -> "LiftContext":
        """Context on the complemented instance y = mu - x.

        The complemented function is z -> f(-z + a^T mu); S0 and S1 swap and
        k becomes mu_s - k + 1.
        """
        if self._comp is None:
            inst = self.inst
            total = sum(ai * mi for ai, mi in zip(inst.a, inst.mu))
            cinst = InstanceX(inst.a, inst.mu, reflect(inst.f, total), (), inst.a, reflect(inst.f, total))
            self._comp = LiftContext(cinst, self.s, self.mu_s - self.k + 1, self.S1, self.S0)
        return self._comp

    def _phi_prefix(self, delta: float, cap: int) -> float:
        _check_nonneg(delta)
        pre = self.S1plus
        A, zs, _ = pre.partial(pre.locate_asc(delta))
        ell = floor_div(delta - A, self.a_s) - self.k + self.mu_s + 1
        ell = max(ell, 0)
        if cap >= 0:
            ell = min(ell, cap)
        return (
            self.g(delta + (self.mu_s - ell) * self.a_s - A)
            - zs
            + (self.k - self.mu_s + ell) * self.rho
            - self.gk
        )

    def phi_upper(self, delta: float) -> float:
        return self._phi_prefix(delta, -1)

    def phi_exact(self, delta: float) -> Optional[float]:
        if self.s1_is_large:
            return self._phi_prefix(delta, self.mu_s)
        if self.k == self.mu_s:
            return self.complement().eta_exact(-delta)
        return None

    @property
    def phi_exact_available(self) -> bool:
        return self.s1_is_large or self.k == self.mu_s


def _check_nonpos(delta):
    if delta > _eps(delta):
        raise ValueError(f"argument must be <= 0, got {delta}")


def _check_nonneg(delta):
    if delta < -_eps(delta):
        raise ValueError(f"argument must be >= 0, got {delta}")


def make_context(inst: InstanceX, s: int, k: int, S0: Iterable[int], S1: Optional[Iterable[int]] = None) -> LiftContext:
    """Build a context; S1 defaults to every index outside {s} and S0."""
    S0 = list(S0)
    if S1 is None:
        S1 = [i for i in range(inst.n) if i != s and i not in set(S0)]
    return LiftContext(inst, s, k, S0, S1)


# functional aliases -----------------------------------------------------

def zeta(ctx: LiftContext, delta: float) -> float:
    return ctx.zeta(delta)


def z_approx(ctx: LiftContext, delta: float) -> float:
    return ctx.z_approx(delta)


def gamma_opt(ctx: LiftContext, a_lambda: float, delta: float) -> int:
    return ctx.gamma_opt(a_lambda, delta)


def eta_lower(ctx: LiftContext, delta: float) -> float:
    return ctx.eta_lower(delta)


def eta_upper(ctx: LiftContext, delta: float) -> float:
    return ctx.eta_upper(delta)


def eta_exact(ctx: LiftContext, delta: float) -> Optional[float]:
    return ctx.eta_exact(delta)


def phi_upper(ctx: LiftContext, delta: float) -> float:
    return ctx.phi_upper(delta)


def phi_exact(ctx: LiftContext, delta: float) -> Optional[float]:
    return ctx.phi_exact(delta)


def opt_prefix(ctx: LiftContext, delta: float) -> int:
    return ctx.opt_prefix(delta)
