"""Assembly of lifted cuts and their closed-form specializations.

Builders take a :class:`LiftContext` (stated in the instance's internal,
nonnegative-weight coordinates) and return cuts over the instance's input
variables, with tiny coefficients snapped to zero.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

from .concave_core import ConcaveFn, MinLinear, Shifted
from .lifting import InstanceX, LiftContext, floor_div
from .seed import Cut


def _emit(ctx: LiftContext, alpha0: float, alpha: Sequence[float], **meta) -> Cut:
    meta.setdefault("context", ctx.to_json())
    cut = Cut(alpha0, tuple(alpha), meta)
    return ctx.inst.cut_to_original(cut).snapped()


def _assemble(ctx: LiftContext, c0: dict, c1: dict) -> tuple[float, list]:
    """Flatten sum c0_i x_i + sum c1_i (mu_i - x_i) + rho (x_s - k) + g(k a_s)."""
    mu = ctx.inst.mu
    alpha = [0.0] * ctx.inst.n
    alpha0 = ctx.gk - ctx.rho * ctx.k
    alpha[ctx.s] = ctx.rho
    for i, c in c0.items():
        alpha[i] = c
    for i, c in c1.items():
        alpha0 += c * mu[i]
        alpha[i] = -c
    return alpha0, alpha


def single_phase_cut(ctx: LiftContext) -> Cut:
    a = ctx.inst.a
    c0 = {i: ctx.z_approx(a[i]) for i in ctx.S0}
    c1 = {i: ctx.z_approx(-a[i]) for i in ctx.S1}
    return _emit(ctx, *_assemble(ctx, c0, c1), family="single")


def two_phase_cut_I(ctx: LiftContext, prefer_exact: bool = True) -> Cut:
    """First lift S0 with zeta, then S1 with eta (exact when available) or eta upper."""
    a = ctx.inst.a
    exact = prefer_exact and ctx.eta_exact_available
    second = ctx.eta_exact if exact else ctx.eta_upper
    c0 = {i: ctx.zeta(a[i]) for i in ctx.S0}
    c1 = {i: second(-a[i]) for i in ctx.S1}
    return _emit(ctx, *_assemble(ctx, c0, c1), family="two_I", lifting="exact" if exact else "upper")


def two_phase_cut_II(ctx: LiftContext, prefer_exact: bool = True) -> Cut:
    """First lift S1 with zeta, then S0 with phi (exact when available) or phi upper."""
    a = ctx.inst.a
    exact = prefer_exact and ctx.phi_exact_available
    second = ctx.phi_exact if exact else ctx.phi_upper
    c1 = {i: ctx.zeta(-a[i]) for i in ctx.S1}
    c0 = {i: second(a[i]) for i in ctx.S0}
    return _emit(ctx, *_assemble(ctx, c0, c1), family="two_II", lifting="exact" if exact else "upper")


FAMILIES = {
    "single": lambda ctx, prefer_exact=True: single_phase_cut(ctx),
    "two_I": two_phase_cut_I,
    "two_II": two_phase_cut_II,
}


def build_cut(ctx: LiftContext, family: str, prefer_exact: bool = True) -> Cut:
    try:
        return FAMILIES[family](ctx, prefer_exact=prefer_exact)
    except KeyError:
        raise ValueError(f"unknown cut family {family!r}") from None


def complement_transform(cut: Cut, mu: Sequence[int]) -> Cut:
    """Rewrite a cut under x_i = mu_i - y_i for every i."""
    if len(mu) != cut.n:
        raise ValueError("dimension mismatch between cut and bounds")
    return cut.complemented(mu)


def tworow_transform(cut_for_XK: Cut, a2: Sequence[float], b2: float) -> Cut:
    """Map a cut for w <= f(a^T x) with f = min{0, b - z}, a = a1 - a2,
    b = b1 - b2 to the two-row set v <= b1 - a1^T x, v <= b2 - a2^T x.

    The sets are linked by w = v + a2^T x - b2.
    """
    if len(a2) != cut_for_XK.n:
        raise ValueError("dimension mismatch between cut and a2")
    alpha = tuple(c - d for c, d in zip(cut_for_XK.alpha, a2))
    return Cut(cut_for_XK.alpha0 + b2, alpha, dict(cut_for_XK.meta)).snapped()


# ---------------------------------------------------------------------------
# knapsack shape f(z) = min{0, b - z}


def _knapsack_rhs(f: ConcaveFn) -> float:
    shift = 0.0
    while isinstance(f, Shifted):
        shift += f.c
        f = f.inner
    if not isinstance(f, MinLinear):
        raise ValueError("knapsack closed forms need f(z) = min{0, b - z}")
    return f.b - shift


class _Knap:
    """theta, sigma, k of a knapsack context, validated."""

    def __init__(self, ctx: LiftContext):
        a, mu = ctx.inst.a, ctx.inst.mu
        b = _knapsack_rhs(ctx.inst.f)
        a_s = ctx.a_s
        theta = b - sum(a[i] * mu[i] for i in ctx.S1)
        if not theta > 0:
            raise ValueError("knapsack context needs theta = b - sum_{S1} a_i mu_i > 0")
        if not a_s * ctx.mu_s - theta > 0:
            raise ValueError("knapsack context needs a_s mu_s > theta")
        r = theta / a_s
        if abs(r - round(r)) <= 1e-9 * max(1.0, abs(r)):
            raise ValueError("knapsack context needs theta / a_s non-integral")
        k = math.ceil(r)
        if k != ctx.k:
            raise ValueError(f"knapsack context needs k = ceil(theta / a_s) = {k}, got {ctx.k}")
        self.ctx = ctx
        self.theta = theta
        self.k = k
        self.a_s = a_s
        self.mu_s = ctx.mu_s
        self.sigma = theta - math.floor(r) * a_s

    def frac(self, d: float) -> float:
        return d - floor_div(d, self.a_s) * self.a_s

    def mir(self, d: float) -> float:
        """-d + min{sigma, sigma_d} + floor(d / a_s) sigma."""
        return -d + min(self.sigma, self.frac(d)) + floor_div(d, self.a_s) * self.sigma

    def const(self) -> float:
        return -(self.k - 1) * (self.sigma - self.a_s)

    def eta_upper(self, delta: float) -> float:
        pre = self.ctx.S0plus
        k, sig, a_s, th = self.k, self.sigma, self.a_s, self.theta
        loc = pre.locate_desc(delta)
        A, _, units = pre.partial(loc)
        base = A - (units - 1) * k * sig - th
        if delta > k * a_s - A:
            ell = 0
        else:
            ell = k - math.ceil((delta + A) / a_s - 1e-12)
            if loc is not None:
                ell = min(ell, k - 1)
        if delta > th - A - ell * a_s:
            return -delta - ((units - 1) * k + ell) * sig
        return base - ell * (sig - a_s)

    def phi_upper(self, delta: float) -> float:
        pre = self.ctx.S1plus
        k, sig, a_s, th, mu_s = self.k, self.sigma, self.a_s, self.theta, self.mu_s
        loc = pre.locate_asc(delta)
        A, _, units = pre.partial(loc)
        ell = max(0, math.floor((delta - A) / a_s + 1e-12) - k + mu_s + 1)
        level = ((mu_s - k + 1) * (units - 1) + ell) * (sig - a_s)
        if delta < A + th - (mu_s - ell) * a_s:
            return level
        return -delta + th - (mu_s - ell) * a_s + A + level


def mir_closed_form(ctx: LiftContext) -> Cut:
    """Single-phase cut for the knapsack shape, written as the MIR inequality."""
    kn = _Knap(ctx)
    a = ctx.inst.a
    mu = ctx.inst.mu
    alpha = [0.0] * ctx.inst.n
    alpha0 = kn.const()
    for i in ctx.S0 + (ctx.s,):
        alpha[i] = kn.mir(a[i])
    for i in ctx.S1:
        c = a[i] + min(kn.sigma, kn.frac(-a[i])) + floor_div(-a[i], kn.a_s) * kn.sigma
        alpha0 += c * mu[i]
        alpha[i] = -c
    return _emit(ctx, alpha0, alpha, family="single", closed_form="mir")


def knapsack_pack_cover_cuts(ctx: LiftContext) -> tuple[Cut, Cut]:
    """Two-phase knapsack cuts built from the eta/phi upper approximations:
    the pack cut (S0 first) and the cover cut (S1 first)."""
    kn = _Knap(ctx)
    a, mu = ctx.inst.a, ctx.inst.mu
    big0 = set(ctx.S0plus.items)
    big1 = set(ctx.S1plus.items)
    top = kn.sigma - kn.a_s

    alpha = [0.0] * ctx.inst.n
    alpha0 = kn.const()
    alpha[ctx.s] = top
    for i in ctx.S0:
        alpha[i] = -a[i] + kn.k * kn.sigma if i in big0 else kn.mir(a[i])
    for i in ctx.S1:
        c = kn.eta_upper(-a[i])
        alpha0 += c * mu[i]
        alpha[i] = -c
    pack = _emit(ctx, alpha0, alpha, family="two_I", lifting="upper", closed_form="pack")

    alpha = [0.0] * ctx.inst.n
    alpha0 = kn.const()
    alpha[ctx.s] = top
    for i in ctx.S1:
        if i in big1:
            c = (kn.k - kn.mu_s - 1) * top
        else:
            c = a[i] + min(kn.sigma, kn.frac(-a[i])) + floor_div(-a[i], kn.a_s) * kn.sigma
        alpha0 += c * mu[i]
        alpha[i] = -c
    for i in ctx.S0:
        alpha[i] = kn.phi_upper(a[i])
    cover = _emit(ctx, alpha0, alpha, family="two_II", lifting="upper", closed_form="cover")
    return pack, cover


# ---------------------------------------------------------------------------
# 0-1 specializations


def submodular_cut_closed_forms(ctx: LiftContext, family: str) -> Cut:
    """Closed forms for mu = 1 written directly in f and subset sums."""
    inst = ctx.inst
    if any(m != 1 for m in inst.mu):
        raise ValueError("the 0-1 closed forms need mu = 1 for every variable")
    f, a, n, s = inst.f, inst.a, inst.n, ctx.s
    aS1 = sum(a[i] for i in ctx.S1)
    aS1s = aS1 + a[s]
    fS1, fS1s = f(aS1), f(aS1s)
    alpha = [0.0] * n

    if family == "single":
        rho = fS1s - fS1

        def Z(d):
            ell = floor_div(d, a[s])
            return f(d + aS1 - ell * a[s]) + ell * rho - fS1

        alpha0 = fS1
        for i in ctx.S0:
            alpha[i] = Z(a[i])
        for i in ctx.S1:
            alpha0 += Z(-a[i])
            alpha[i] = -Z(-a[i])
        alpha[s] = rho
        return _emit(ctx, alpha0, alpha, family="single", closed_form="binary")

    if family == "two_I":
        group = sorted(ctx.S0 + (s,), key=lambda i: (-a[i], i))
        ws = [a[i] for i in group]
        zs = [f(w + aS1) - fS1 for w in ws]
        total = sum(a)

        def eta(d):
            A = 0.0
            zsum = 0.0
            for w, z in zip(ws, zs):
                nxt = A + w
                zsum += z
                if -nxt < d <= -A:
                    return f(d + nxt + aS1) - zsum - fS1
                A = nxt
            return f(d + total) - zsum - fS1

        alpha0 = fS1
        for i in group:
            alpha[i] = f(aS1 + a[i]) - fS1
        for i in ctx.S1:
            c = eta(-a[i])
            alpha0 += c
            alpha[i] = -c
        return _emit(ctx, alpha0, alpha, family="two_I", lifting="exact", closed_form="binary")

    if family == "two_II":
        group = sorted(ctx.S1 + (s,), key=lambda i: (-a[i], i))
        ws = [a[i] for i in group]
        zs = [f(-w + aS1s) - fS1s for w in ws]

        def phi(d):
            A = 0.0
            zsum = 0.0
            for w, z in zip(ws, zs):
                nxt = A + w
                zsum += z
                if A <= d < nxt:
                    return f(d - nxt + aS1s) - zsum - f(aS1s)
                A = nxt
            return f(d) - zsum - f(aS1s)

        alpha0 = fS1s
        for i in ctx.S0:
            alpha[i] = phi(a[i])
        for i in group:
            c = f(aS1s - a[i]) - fS1s
            alpha0 += c
            alpha[i] = -c
        return _emit(ctx, alpha0, alpha, family="two_II", lifting="exact", closed_form="binary")

    raise ValueError(f"unknown cut family {family!r}")
