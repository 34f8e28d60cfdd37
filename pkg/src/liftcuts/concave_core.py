"""Closed-form concave functions of one real variable.

Every function used by the cut machinery is a member of a small closed family
so that instances serialize exactly to JSON.  Evaluation accepts scalars and
numpy arrays alike.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

# Single tolerance for inequality checks throughout the package.
TOL = 1e-9


def _out(v):
    if isinstance(v, np.ndarray) and v.ndim == 0:
        return float(v)
    if isinstance(v, np.generic):
        return float(v)
    return v


class ConcaveFn:
    """Base class; subclasses are frozen dataclasses."""

    kind: str = ""

    def __call__(self, z):
        raise NotImplementedError

    def slope(self, z: float) -> float:
        """A supergradient at ``z`` (the derivative where it exists)."""
        raise NotImplementedError

    def to_json(self) -> dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class ExpUtility(ConcaveFn):
    """z -> 1 - exp(-(z - c) / lam)."""

    lam: float
    c: float = 0.0
    kind = "exp_utility"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("ExpUtility needs lam > 0")

    def __call__(self, z):
        if isinstance(z, (float, int)):
            return 1.0 - math.exp(-(z - self.c) / self.lam)
        return _out(1.0 - np.exp(-(np.asarray(z, dtype=float) - self.c) / self.lam))

    def slope(self, z):
        return math.exp(-(z - self.c) / self.lam) / self.lam

    def to_json(self):
        return {"kind": self.kind, "lam": self.lam, "c": self.c}


@dataclass(frozen=True)
class NegExp(ConcaveFn):
    """z -> -exp(-(z - c))."""

    c: float = 0.0
    kind = "neg_exp"

    def __call__(self, z):
        if isinstance(z, (float, int)):
            return -math.exp(-(z - self.c))
        return _out(-np.exp(-(np.asarray(z, dtype=float) - self.c)))

    def slope(self, z):
        return math.exp(-(z - self.c))

    def to_json(self):
        return {"kind": self.kind, "c": self.c}


@dataclass(frozen=True)
class MinLinear(ConcaveFn):
    """z -> min{0, b - z}, the knapsack shape."""

    b: float = 0.0
    kind = "min_linear"

    def __call__(self, z):
        if isinstance(z, (float, int)):
            return min(0.0, self.b - z)
        return _out(np.minimum(0.0, self.b - np.asarray(z, dtype=float)))

    def slope(self, z):
        return 0.0 if z < self.b else -1.0

    def to_json(self):
        return {"kind": self.kind, "b": self.b}


@dataclass(frozen=True)
class NegAbs(ConcaveFn):
    """z -> -|b - z|."""

    b: float = 0.0
    kind = "neg_abs"

    def __call__(self, z):
        if isinstance(z, (float, int)):
            return -abs(self.b - z)
        return _out(-np.abs(self.b - np.asarray(z, dtype=float)))

    def slope(self, z):
        return 1.0 if z < self.b else -1.0

    def to_json(self):
        return {"kind": self.kind, "b": self.b}


@dataclass(frozen=True)
class NegQuadratic(ConcaveFn):
    """z -> -(z - c)^2."""

    c: float = 0.0
    kind = "neg_quadratic"

    def __call__(self, z):
        if isinstance(z, (float, int)):
            d = z - self.c
        else:
            d = np.asarray(z, dtype=float) - self.c
        return _out(-(d * d))

    def slope(self, z):
        return -2.0 * (z - self.c)

    def to_json(self):
        return {"kind": self.kind, "c": self.c}


@dataclass(frozen=True)
class Shifted(ConcaveFn):
    """z -> inner(z + c)."""

    inner: ConcaveFn
    c: float
    kind = "shifted"

    def __call__(self, z):
        if isinstance(z, (float, int)):
            return self.inner(z + self.c)
        return self.inner(np.asarray(z, dtype=float) + self.c)

    def slope(self, z):
        return self.inner.slope(z + self.c)

    def to_json(self):
        return {"kind": self.kind, "inner": self.inner.to_json(), "c": self.c}


@dataclass(frozen=True)
class Reflected(ConcaveFn):
    """z -> inner(-z + c)."""

    inner: ConcaveFn
    c: float
    kind = "reflected"

    def __call__(self, z):
        if isinstance(z, (float, int)):
            return self.inner(-z + self.c)
        return self.inner(-np.asarray(z, dtype=float) + self.c)

    def slope(self, z):
        return -self.inner.slope(-z + self.c)

    def to_json(self):
        return {"kind": self.kind, "inner": self.inner.to_json(), "c": self.c}


@dataclass(frozen=True)
class PiecewiseLinear(ConcaveFn):
    """Concave interpolant through (x[i], y[i]), extended linearly at both ends.

    Covers shapes outside the closed-form variants.
    """

    x: tuple[float, ...]
    y: tuple[float, ...]
    kind = "piecewise_linear"

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if len(self.x) != len(self.y) or len(self.x) < 2:
            raise ValueError("piecewise_linear needs at least two matching breakpoints")
        if any(b <= a for a, b in zip(self.x, self.x[1:])):
            raise ValueError("piecewise_linear breakpoints must be strictly increasing")
        s = self._slopes()
        if any(s2 > s1 + TOL * max(1.0, abs(s1)) for s1, s2 in zip(s, s[1:])):
            raise ValueError("piecewise_linear slopes must be nonincreasing (concavity)")

    def _slopes(self):
        return [(y2 - y1) / (x2 - x1) for x1, x2, y1, y2 in zip(self.x, self.x[1:], self.y, self.y[1:])]

    def __call__(self, z):
        zz = np.asarray(z, dtype=float)
        xs, ys = np.array(self.x), np.array(self.y)
        s = np.array(self._slopes())
        # concave: minimum of the affine pieces
        vals = ys[:-1, None] + s[:, None] * (zz.reshape(-1)[None, :] - xs[:-1, None])
        return _out(vals.min(axis=0).reshape(zz.shape))

    def slope(self, z):
        s = self._slopes()
        for xi, si in zip(self.x[1:], s):
            if z < xi:
                return si
        return s[-1]

    def to_json(self):
        return {"kind": self.kind, "x": list(self.x), "y": list(self.y)}


_SIMPLE = {
    "exp_utility": lambda d: ExpUtility(float(d["lam"]), float(d.get("c", 0.0))),
    "neg_exp": lambda d: NegExp(float(d.get("c", 0.0))),
    "min_linear": lambda d: MinLinear(float(d.get("b", 0.0))),
    "neg_abs": lambda d: NegAbs(float(d.get("b", 0.0))),
    "neg_quadratic": lambda d: NegQuadratic(float(d.get("c", 0.0))),
    "piecewise_linear": lambda d: PiecewiseLinear(tuple(d["x"]), tuple(d["y"])),
}


def from_json(d: dict[str, Any]) -> ConcaveFn:
    kind = d.get("kind")
    if kind in _SIMPLE:
        return _SIMPLE[kind](d)
    if kind == "shifted":
        return Shifted(from_json(d["inner"]), float(d["c"]))
    if kind == "reflected":
        return Reflected(from_json(d["inner"]), float(d["c"]))
    raise ValueError(f"unknown concave function kind: {kind!r}")


def evaluate(f: ConcaveFn, z):
    return f(z)


def shift(f: ConcaveFn, c: float) -> ConcaveFn:
    """Return z -> f(z + c)."""
    if c == 0:
        return f
    return Shifted(f, float(c))


def reflect(f: ConcaveFn, c: float) -> ConcaveFn:
    """Return z -> f(-z + c)."""
    return Reflected(f, float(c))


def _scaled_ge(lhs: float, rhs: float) -> bool:
    return lhs >= rhs - TOL * max(1.0, abs(lhs), abs(rhs))


def check_slope(f: ConcaveFn, a1: float, a2: float, b1: float, b2: float) -> bool:
    """Compare secant slopes of f over [a1, b1] and the later interval [a2, b2].

    Requires a1 <= b1, a2 <= b2, a1 <= a2 and b1 <= b2.  Returns whether
    (b2 - a2)(f(b1) - f(a1)) >= (b1 - a1)(f(b2) - f(a2)) up to tolerance.
    """
    if not (a1 <= b1 and a2 <= b2 and a1 <= a2 and b1 <= b2):
        raise ValueError(
            f"check_slope precondition violated: need a1<=b1, a2<=b2, a1<=a2, b1<=b2; "
            f"got a1={a1}, a2={a2}, b1={b1}, b2={b2}"
        )
    lhs = (b2 - a2) * (f(b1) - f(a1))
    rhs = (b1 - a1) * (f(b2) - f(a2))
    return _scaled_ge(lhs, rhs)


Term = tuple[float, float, float]


def check_regrouped_sum(f: ConcaveFn, plus: Sequence[Term], minus: Sequence[Term]) -> bool:
    """Evaluate H = sum_plus k(f(b)-f(a)) - sum_minus k(f(b)-f(a)) and test H >= 0.

    Each term is ``(k, a, b)``.  The grouping must satisfy k >= 0 and a <= b
    for every term, every nontrivial plus-interval must lie left of every
    nontrivial minus-interval (in both endpoints), and the weighted lengths
    of the two groups must balance.  A violated condition raises ValueError
    naming it.
    """
    for side, terms in (("plus", plus), ("minus", minus)):
        for k, a, b in terms:
            if k < 0:
                raise ValueError(f"condition (i) failed: negative weight k={k} in {side} group")
            if a > b:
                raise ValueError(f"condition (i) failed: a={a} > b={b} in {side} group")
    live_p = [t for t in plus if t[0] > 0 and t[1] < t[2]]
    live_m = [t for t in minus if t[0] > 0 and t[1] < t[2]]
    if live_p and live_m:
        if max(t[2] for t in live_p) > min(t[2] for t in live_m):
            raise ValueError("condition (ii) failed: max right end of plus group exceeds min of minus group")
        if max(t[1] for t in live_p) > min(t[1] for t in live_m):
            raise ValueError("condition (ii) failed: max left end of plus group exceeds min of minus group")
    len_p = sum(k * (b - a) for k, a, b in plus)
    len_m = sum(k * (b - a) for k, a, b in minus)
    if abs(len_p - len_m) > TOL * max(1.0, abs(len_p), abs(len_m)):
        raise ValueError(f"balance condition failed: weighted lengths {len_p} vs {len_m}")
    hp = sum(k * (f(b) - f(a)) for k, a, b in plus)
    hm = sum(k * (f(b) - f(a)) for k, a, b in minus)
    return _scaled_ge(hp, hm)
