"""Separation of lifted cuts at a point (w, x) with 0 <= x <= mu.

Points whose coordinates are all integral with at most one strictly interior
entry are separated exactly: the lifted cut built on that pattern has
right-hand side f(a^T x) at x.  Other points use a rounding heuristic over
the fractional coordinates.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional

from .concave_core import TOL
from .cutgen import build_cut
from .lifting import InstanceX, LiftContext
from .seed import Cut

VIOL_MIN = 1e-6
SNAP_INT = 1e-9
FAMILY_ORDER = ("single", "two_I", "two_II")


def _ordered(families: Iterable[str]) -> list[str]:
    fam = set(families)
    unknown = fam - set(FAMILY_ORDER)
    if unknown:
        raise ValueError(f"unknown cut families: {sorted(unknown)}")
    return [f for f in FAMILY_ORDER if f in fam]


def _best(ctxs, families, prefer_exact, wbar, xbar, threshold) -> Optional[Cut]:
    best = None
    best_v = threshold
    for ctx in ctxs:
        for fam in families:
            cut = build_cut(ctx, fam, prefer_exact)
            v = cut.violation(wbar, xbar)
            if v > best_v:
                best, best_v = cut.with_meta(violation=v), v
    return best


def separate(
    point,
    inst: InstanceX,
    families: Iterable[str] = ("single",),
    prefer_exact: bool = True,
) -> Optional[Cut]:
    """Most violated cut among the requested families, or None."""
    wbar, xbar = point
    xbar = [float(v) for v in xbar]
    families = _ordered(families)
    if not families:
        return None
    a, mu, n = inst.a, inst.mu, inst.n

    # internal coordinates, snapped to integers where within SNAP_INT
    y = inst.to_internal(xbar)
    for i in range(n):
        r = round(y[i])
        if abs(y[i] - r) <= SNAP_INT:
            y[i] = float(r)
        y[i] = min(max(y[i], 0.0), float(mu[i]))
    integral = all(float(v).is_integer() for v in y)
    interior = [i for i in range(n) if 0 < y[i] < mu[i]]

    if not any(ai > 0 for ai in a):
        # f(a^T x) is the constant f(0)
        c = inst.raw_f(0.0)
        if wbar > c + TOL * max(1.0, abs(c)):
            return Cut(c, (0.0,) * n, {"family": "constant", "violation": wbar - c})
        return None

    if integral and len(interior) <= 1:
        if interior:
            s = interior[0]
            k = int(y[s])
        else:
            s = max(range(n), key=lambda i: (a[i], -i))
            k = 1 if y[s] == 0 else mu[s]
        if a[s] > 0:
            S0 = [i for i in range(n) if i != s and y[i] == 0]
            S1 = [i for i in range(n) if i != s and y[i] == mu[i]]
            ctx = LiftContext(inst, s, k, S0, S1)
            fx = inst.value(xbar)
            return _best([ctx], families, prefer_exact, wbar, xbar, TOL * max(1.0, abs(fx)))
        # zero-weight interior variable: fall through to the heuristic

    ctxs = []
    for s in interior:
        if a[s] <= 0:
            continue
        k = min(max(math.ceil(y[s]), 1), mu[s])
        S1 = [i for i in range(n) if i != s and y[i] >= mu[i] / 2]
        S0 = [i for i in range(n) if i != s and y[i] < mu[i] / 2]
        ctxs.append(LiftContext(inst, s, k, S0, S1))
    return _best(ctxs, families, prefer_exact, wbar, xbar, VIOL_MIN)
