"""One-variable restriction w <= g(a x), 0 <= x <= mu, x integer, and its hull."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .concave_core import ConcaveFn, from_json

# coefficients smaller than this are emitted as exact zeros
COEF_SNAP = 1e-11


@dataclass(frozen=True)
class Cut:
    """Affine inequality w <= alpha0 + sum_i alpha[i] * x[i]."""

    alpha0: float
    alpha: tuple[float, ...]
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha0", float(self.alpha0))
        object.__setattr__(self, "alpha", tuple(float(v) for v in self.alpha))

    @property
    def n(self) -> int:
        return len(self.alpha)

    def rhs(self, x) -> float:
        return self.alpha0 + float(np.dot(self.alpha, np.asarray(x, dtype=float)))

    def violation(self, w: float, x) -> float:
        return w - self.rhs(x)

    def snapped(self) -> "Cut":
        a = tuple(0.0 if abs(v) < COEF_SNAP else v for v in self.alpha)
        a0 = 0.0 if abs(self.alpha0) < COEF_SNAP else self.alpha0
        return Cut(a0, a, dict(self.meta))

    def complemented(self, mu: Sequence[int], indices=None) -> "Cut":
        """Substitute x_i -> mu_i - x_i for the given indices (all by default)."""
        idx = range(self.n) if indices is None else indices
        a = list(self.alpha)
        a0 = self.alpha0
        for i in idx:
            a0 += a[i] * mu[i]
            a[i] = -a[i]
        return Cut(a0, tuple(a), dict(self.meta))

    def with_meta(self, **kw) -> "Cut":
        m = dict(self.meta)
        m.update(kw)
        return Cut(self.alpha0, self.alpha, m)

    def to_json(self) -> dict[str, Any]:
        return {"alpha0": self.alpha0, "alpha": list(self.alpha), "meta": self.meta}

    @staticmethod
    def from_json(d: dict[str, Any]) -> "Cut":
        return Cut(float(d["alpha0"]), tuple(float(v) for v in d["alpha"]), dict(d.get("meta", {})))


@dataclass(frozen=True)
class Instance1D:
    a: float
    mu: int
    g: ConcaveFn

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("Instance1D needs a > 0")
        if int(self.mu) != self.mu or self.mu < 1:
            raise ValueError("Instance1D needs integer mu >= 1")

    @staticmethod
    def from_json(d):
        return Instance1D(float(d["a"]), int(d["mu"]), from_json(d["g"]))


def seed_inequality(inst: Instance1D, k: int) -> Cut:
    """Secant of g(a x) between x = k-1 and x = k, as a cut in x."""
    if not (1 <= k <= inst.mu) or int(k) != k:
        raise ValueError(f"k must be an integer in [1, {inst.mu}], got {k}")
    g, a = inst.g, inst.a
    gk = g(k * a)
    rho = gk - g((k - 1) * a)
    return Cut(gk - rho * k, (rho,), {"family": "seed", "k": int(k)}).snapped()


def hull_1d(inst: Instance1D) -> tuple[list[Cut], tuple[float, float]]:
    """All seed cuts (k = 1..mu, in order) and the bounds (0, mu).

    Together they describe the convex hull of the one-variable set.
    """
    cuts = [seed_inequality(inst, k) for k in range(1, inst.mu + 1)]
    return cuts, (0.0, float(inst.mu))


def hull_value(cuts: Sequence[Cut], x: float) -> float:
    """Largest w allowed by the cut system at x."""
    return min(c.rhs([x]) for c in cuts)
