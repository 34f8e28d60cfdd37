"""Brute-force ground truth for small instances.

Enumerates the integer box, checks cuts against every point, measures the
dimension of the face a cut defines, solves lifting problems by enumeration
and computes exact optima of small benchmark problems.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .concave_core import TOL
from .lifting import InstanceX, LiftContext
from .problems import EUMInstance, WTAInstance
from .seed import Cut

MAX_POINTS = 2_000_000
MAX_ASSIGNMENTS = 20_000_000
TIGHT_TOL = 1e-7
RANK_TOL = 1e-8


def _box(mu: Sequence[int]) -> np.ndarray:
    size = math.prod(m + 1 for m in mu)
    if size > MAX_POINTS:
        raise ValueError(f"box has {size} points, more than the limit {MAX_POINTS}")
    if not mu:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(m + 1) for m in mu], indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1)


def point_arrays(inst: InstanceX) -> tuple[np.ndarray, np.ndarray]:
    """(W, X): every integer x in the box (rows of X) and w = f(a^T x)."""
    X = _box(inst.mu)
    W = np.asarray(inst.raw_f(X @ np.asarray(inst.raw_a, dtype=float)), dtype=float).reshape(-1)
    return W, X


def enumerate_points(inst: InstanceX) -> list[tuple[float, tuple[int, ...]]]:
    W, X = point_arrays(inst)
    return [(float(w), tuple(int(v) for v in x)) for w, x in zip(W, X)]


@dataclass(frozen=True)
class Validity:
    ok: bool
    x: Optional[tuple[int, ...]] = None
    amount: float = 0.0

    def to_json(self):
        return {"ok": self.ok, "x": None if self.x is None else list(self.x), "amount": self.amount}


def _rhs(cut: Cut, X: np.ndarray) -> np.ndarray:
    return cut.alpha0 + X @ np.asarray(cut.alpha, dtype=float)


def check_validity(cut: Cut, inst: InstanceX, tol: float = TOL) -> Validity:
    """Ok iff rhs(x) >= f(a^T x) - tol*max(1, |f|) at every box point."""
    if cut.n != inst.n:
        raise ValueError("cut and instance dimensions differ")
    W, X = point_arrays(inst)
    excess = W - _rhs(cut, X)
    scaled = excess - tol * np.maximum(1.0, np.abs(W))
    if np.any(scaled > 0):
        j = int(np.argmax(np.where(scaled > 0, excess, -np.inf)))
        return Validity(False, tuple(int(v) for v in X[j]), float(excess[j]))
    return Validity(True)


def affine_rank(P: np.ndarray, tol: float = RANK_TOL) -> int:
    """Affine rank of the rows of P, by Gaussian elimination with complete pivoting."""
    P = np.asarray(P, dtype=float)
    if len(P) == 0:
        return 0
    M = P[1:] - P[0]
    if M.size == 0:
        return 1
    scale = np.max(np.abs(M), axis=0)
    scale[scale == 0] = 1.0
    M = M / scale
    rank = 0
    rows, cols = M.shape
    for _ in range(min(rows, cols)):
        sub = np.abs(M[rank:, rank:])
        if sub.size == 0:
            break
        flat = int(np.argmax(sub))
        pi, pj = divmod(flat, sub.shape[1])
        if sub[pi, pj] <= tol:
            break
        pi += rank
        pj += rank
        M[[rank, pi]] = M[[pi, rank]]
        M[:, [rank, pj]] = M[:, [pj, rank]]
        piv = M[rank, rank]
        M[rank + 1 :] -= np.outer(M[rank + 1 :, rank] / piv, M[rank])
        rank += 1
    return rank + 1


def tight_points(cut: Cut, inst: InstanceX, tol: float = TIGHT_TOL) -> np.ndarray:
    W, X = point_arrays(inst)
    mask = np.abs(_rhs(cut, X) - W) <= tol * np.maximum(1.0, np.abs(W))
    return np.column_stack([W[mask], X[mask]])


def face_dimension(cut: Cut, inst: InstanceX) -> int:
    """Dimension of the face of conv(X) defined by the cut (n means facet)."""
    v = check_validity(cut, inst)
    if not v.ok:
        raise ValueError(f"cut is not valid: violated by {v.amount} at x={v.x}")
    return affine_rank(tight_points(cut, inst)) - 1


def bound_face_dimension(inst: InstanceX, i: int, upper: bool) -> int:
    """Dimension of the face x_i = mu_i (or x_i = 0); the face contains the
    downward ray in w, so shifted copies of its points are included."""
    W, X = point_arrays(inst)
    mask = X[:, i] == (inst.mu[i] if upper else 0)
    P = np.column_stack([W[mask], X[mask]])
    P = np.vstack([P, P - np.eye(1, P.shape[1], 0)])
    return affine_rank(P) - 1


def face_dimension_on(cut: Cut, W: np.ndarray, X: np.ndarray) -> int:
    """Face dimension for a cut against an explicit point list (w_j, x_j)."""
    rhs = _rhs(cut, X)
    if np.any(W - rhs > TOL * np.maximum(1.0, np.abs(W))):
        raise ValueError("cut is not valid on the given points")
    mask = np.abs(rhs - W) <= TIGHT_TOL * np.maximum(1.0, np.abs(W))
    return affine_rank(np.column_stack([W[mask], X[mask]])) - 1


# ---------------------------------------------------------------------------
# lifting problems by enumeration


def _zeta_bf(ctx: LiftContext, delta: float) -> float:
    xs = np.arange(ctx.mu_s + 1)
    vals = ctx.g(delta + ctx.a_s * xs) - ctx.rho * (xs - ctx.k) - ctx.gk
    return float(np.max(vals))


def _second_phase(ctx: LiftContext, delta: float, group: Sequence[int], sign: float, xs_range: np.ndarray) -> tuple[float, np.ndarray]:
    """max over y in the box of ``group`` and x_s in xs_range of
    g(delta + sign * sum a_i y_i + a_s x_s) - sum zeta(sign a_i) y_i - rho (x_s - k) - g(k a_s).

    Returns the overall maximum and the maximum for each x_s value.
    """
    a, mu = ctx.inst.a, ctx.inst.mu
    Y = _box([mu[i] for i in group])
    w = np.array([a[i] for i in group], dtype=float)
    lifts = np.array([_zeta_bf(ctx, sign * a[i]) for i in group], dtype=float)
    base = sign * (Y @ w) if len(group) else np.zeros(1)
    pen = Y @ lifts if len(group) else np.zeros(1)
    per = np.empty(len(xs_range))
    for t, xs in enumerate(xs_range):
        vals = ctx.g(delta + base + ctx.a_s * xs) - pen - ctx.rho * (xs - ctx.k) - ctx.gk
        per[t] = np.max(vals)
    return float(np.max(per)), per


def lift_bruteforce(ctx: LiftContext, delta: float, which: str) -> float:
    """Optimal value of a lifting problem, by enumeration.

    which = "zeta": one-variable problem over x_s in [0, mu_s].
    which = "eta": lift S1 after S0, x_s in [0, mu_s] (delta <= 0).
    which = "eta_relaxed": as "eta" with the upper bound on x_s dropped.
    which = "phi": lift S0 after S1 (delta >= 0).
    which = "phi_relaxed": as "phi" with the lower bound on x_s dropped.
    """
    if which == "zeta":
        return _zeta_bf(ctx, delta)
    if which in ("eta", "eta_relaxed"):
        if delta > 1e-12 * max(1.0, abs(delta)):
            raise ValueError("eta lifting needs delta <= 0")
        if which == "eta":
            return _second_phase(ctx, delta, ctx.S0, 1.0, np.arange(ctx.mu_s + 1))[0]
        cap = max(ctx.mu_s, ctx.k + math.ceil(abs(delta) / ctx.a_s) + 1)
        best, per = _second_phase(ctx, delta, ctx.S0, 1.0, np.arange(cap + 1))
        head = float(np.max(per[:-2])) if len(per) > 2 else -np.inf
        if max(per[-1], per[-2]) > head + 1e-9 * max(1.0, abs(head)) and len(per) > 2:
            raise AssertionError("relaxed lifting cap too small: objective still improving")
        return best
    if which in ("phi", "phi_relaxed"):
        if delta < -1e-12 * max(1.0, abs(delta)):
            raise ValueError("phi lifting needs delta >= 0")
        if which == "phi":
            return _second_phase(ctx, delta, ctx.S1, -1.0, np.arange(ctx.mu_s + 1))[0]
        low = min(0, ctx.k - ctx.mu_s - math.ceil(abs(delta) / ctx.a_s) - 1)
        xs = np.arange(ctx.mu_s, low - 1, -1)
        best, per = _second_phase(ctx, delta, ctx.S1, -1.0, xs)
        head = float(np.max(per[:-2])) if len(per) > 2 else -np.inf
        if max(per[-1], per[-2]) > head + 1e-9 * max(1.0, abs(head)) and len(per) > 2:
            raise AssertionError("relaxed lifting cap too small: objective still improving")
        return best
    raise ValueError(f"unknown lifting problem {which!r}")


# ---------------------------------------------------------------------------
# exact optima of benchmark problems


def optimum_bruteforce(problem) -> tuple[float, np.ndarray]:
    """Exact optimum (objective, x) by enumeration; ties go to the first
    assignment in lexicographic order."""
    if isinstance(problem, EUMInstance):
        n = problem.n
        if 2**n > MAX_ASSIGNMENTS:
            raise ValueError("EUM instance too large for enumeration")
        X = _box([1] * n).astype(float)
        X = X[X @ problem.a <= 1.0 + 1e-12]
        Z = X @ problem.v.T
        obj = (1.0 - np.exp(-Z / problem.lam)) @ problem.pi
        j = int(np.argmax(obj))
        return float(obj[j]), X[j].astype(int)
    if isinstance(problem, WTAInstance):
        n, m = problem.n, problem.m
        A = problem.weights
        allocs = []
        total = 1
        for i in range(n):
            opts = [c for c in itertools.product(range(int(problem.mu[i]) + 1), repeat=m) if sum(c) <= problem.mu[i]]
            allocs.append(np.array(opts, dtype=float))
            total *= len(opts)
        if total > MAX_ASSIGNMENTS:
            raise ValueError("WTA instance too large for enumeration")
        Z = np.zeros((1, m))
        for i in range(n):
            Z = (Z[:, None, :] + (allocs[i] * A[i])[None, :, :]).reshape(-1, m)
        obj = (1.0 - np.exp(-Z)) @ problem.V
        j = int(np.argmax(obj))
        idx = np.unravel_index(j, [len(al) for al in allocs])
        x = np.stack([allocs[i][idx[i]] for i in range(n)]).astype(int)
        return float(obj[j]), x
    raise TypeError("optimum_bruteforce expects an EUM or WTA instance")
