"""LP-based branch-and-cut for max c^T y over linear rows and links w_j <= f_j(a_j^T x).

The LP relaxations are solved by a dense bounded-variable primal simplex.
Links are enforced lazily with outer-approximation (tangent) cuts at
integral points; lifted cuts from :mod:`separation` strengthen the
relaxation at fractional points.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .concave_core import ExpUtility
from .lifting import InstanceX
from .problems import EUMInstance, WTAInstance
from .seed import Cut
from .separation import VIOL_MIN, separate

INT_TOL = 1e-6
ABS_GAP = 1e-7
LAZY_TOL = 1e-8
DEFAULT_TIME_LIMIT = 600.0

_PIVOT_TOL = 1e-9
_OPT_TOL = 1e-9
_FEAS_TOL = 1e-9


# ---------------------------------------------------------------------------
# LP


class LpModel:
    """max (or min) c^T y subject to rows (coef, sense, rhs) and lo <= y <= hi."""

    def __init__(self, c: Sequence[float], lo: Sequence[float], hi: Sequence[float],
                 integer: Optional[Sequence[bool]] = None, sense: str = "max"):
        self.c = np.asarray(c, dtype=float)
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        n = len(self.c)
        if self.lo.shape != (n,) or self.hi.shape != (n,):
            raise ValueError("bound vectors must match the objective length")
        if np.any(self.lo > self.hi):
            raise ValueError("inconsistent bounds: lo > hi")
        if not (np.all(np.isfinite(self.c))):
            raise ValueError("objective must be finite")
        if sense not in ("max", "min"):
            raise ValueError("sense must be 'max' or 'min'")
        self.sense = sense
        self.integer = np.zeros(n, dtype=bool) if integer is None else np.asarray(integer, dtype=bool)
        self.rows: list[np.ndarray] = []
        self.senses: list[str] = []
        self.rhs: list[float] = []

    @property
    def n(self) -> int:
        return len(self.c)

    def add_row(self, coef: Sequence[float], sense: str, rhs: float) -> None:
        coef = np.asarray(coef, dtype=float)
        if coef.shape != (self.n,):
            raise ValueError("row length must match the number of variables")
        if sense not in ("<=", ">=", "="):
            raise ValueError("row sense must be '<=', '>=' or '='")
        if not (np.all(np.isfinite(coef)) and np.isfinite(rhs)):
            raise ValueError("row data must be finite")
        self.rows.append(coef)
        self.senses.append(sense)
        self.rhs.append(float(rhs))


@dataclass
class LpResult:
    status: str  # optimal | infeasible | unbounded | iteration_limit
    obj: float = float("nan")
    x: Optional[np.ndarray] = None
    iterations: int = 0


class _Tableau:
    """Dense tableau T = B^{-1} A with bounded variables."""

    def __init__(self, A, b, lo, hi, basis, x):
        self.T = A.copy()
        self.A = A
        self.b = b
        self.lo = lo
        self.hi = hi
        self.basis = list(basis)
        self.x = x
        self.iters = 0

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = j

    def run(self, c: np.ndarray, limit: int, bland_after: int) -> str:
        m, N = self.T.shape
        lo, hi, x = self.lo, self.hi, self.x
        while True:
            if self.iters >= limit:
                return "iteration_limit"
            bland = self.iters >= bland_after
            B = self.basis
            d = c - c[B] @ self.T
            d[B] = 0.0
            up = (d > _OPT_TOL) & (x < hi - _FEAS_TOL)
            down = (d < -_OPT_TOL) & (x > lo + _FEAS_TOL)
            cand = np.flatnonzero(up | down)
            if cand.size == 0:
                return "optimal"
            if bland:
                j = int(cand[0])
            else:
                j = int(cand[np.argmax(np.abs(d[cand]))])
            direction = 1.0 if d[j] > 0 else -1.0
            col = self.T[:, j] * direction
            xb = x[B]
            theta = hi[j] - lo[j]
            r = -1
            with np.errstate(divide="ignore", invalid="ignore"):
                lim = np.full(m, np.inf)
                pos = col > _PIVOT_TOL
                neg = col < -_PIVOT_TOL
                lob = lo[B]
                hib = hi[B]
                lim[pos] = (xb[pos] - lob[pos]) / col[pos]
                lim[neg] = (hib[neg] - xb[neg]) / (-col[neg])
            lim = np.maximum(lim, 0.0)
            if m:
                best = lim.min()
                if best < theta:
                    ties = np.flatnonzero(lim <= best + 1e-12)
                    if bland:
                        r = int(min(ties, key=lambda i: B[i]))
                    else:
                        r = int(ties[np.argmax(np.abs(col[ties]))])
                    theta = best
            if not np.isfinite(theta):
                return "unbounded"
            self.iters += 1
            x[j] += direction * theta
            x[B] = xb - theta * col
            if r < 0:
                continue
            leaving = B[r]
            x[leaving] = lo[leaving] if col[r] > 0 else hi[leaving]
            self.pivot(r, j)


def solve_lp(model: LpModel, lo: Optional[np.ndarray] = None, hi: Optional[np.ndarray] = None) -> LpResult:
    """Optimal basic solution of the continuous relaxation (bounds may be overridden)."""
    lo = model.lo if lo is None else np.asarray(lo, dtype=float)
    hi = model.hi if hi is None else np.asarray(hi, dtype=float)
    if np.any(lo > hi + _FEAS_TOL):
        return LpResult("infeasible")
    n = model.n
    m = len(model.rows)
    sign = 1.0 if model.sense == "max" else -1.0
    A0 = np.array(model.rows, dtype=float).reshape(m, n)
    b = np.array(model.rhs, dtype=float)

    # nonbasic structurals start at a finite bound (0 when free)
    xs = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
    resid = b - A0 @ xs if m else np.zeros(0)

    # slack bounds by row sense: A y + s = b
    slo = np.empty(m)
    shi = np.empty(m)
    for i, sn in enumerate(model.senses):
        slo[i], shi[i] = {"<=": (0.0, np.inf), ">=": (-np.inf, 0.0), "=": (0.0, 0.0)}[sn]
    need = (resid < slo - _FEAS_TOL) | (resid > shi + _FEAS_TOL)
    arts = np.flatnonzero(need)
    na = len(arts)
    N = n + m + na
    A = np.zeros((m, N))
    A[:, :n] = A0
    A[:, n:n + m] = np.eye(m)
    full_lo = np.concatenate([lo, slo, np.zeros(na)])
    full_hi = np.concatenate([hi, shi, np.full(na, np.inf)])
    x = np.concatenate([xs, np.clip(resid, slo, shi), np.zeros(na)])
    basis = list(range(n, n + m))
    bb = b.copy()
    for t, i in enumerate(arts):
        # slack sits at its violated bound, the artificial absorbs the rest
        sval = slo[i] if resid[i] < slo[i] else shi[i]
        rem = resid[i] - sval
        sg = 1.0 if rem > 0 else -1.0
        A[i] *= sg
        bb[i] *= sg
        A[i, n + m + t] = 1.0
        x[n + i] = sval
        x[n + m + t] = abs(rem)
        basis[i] = n + m + t
    tab = _Tableau(A, bb, full_lo, full_hi, basis, x)
    limit = 50 * (m + N) + 1000
    bland_after = 10 * (m + N)

    if na:
        c1 = np.zeros(N)
        c1[n + m:] = -1.0
        st = tab.run(c1, limit, bland_after)
        if st == "iteration_limit":
            return LpResult(st, iterations=tab.iters)
        infeas = float(np.sum(x[n + m:]))
        if infeas > 1e-7 * max(1.0, float(np.max(np.abs(b))) if m else 1.0):
            return LpResult("infeasible", iterations=tab.iters)
        full_hi[n + m:] = 0.0
        x[n + m:] = 0.0
        for r, j in enumerate(list(tab.basis)):
            if j >= n + m:
                row = np.abs(tab.T[r, : n + m])
                row[tab.basis] = 0.0
                k = int(np.argmax(row)) if row.size else -1
                if k >= 0 and row[k] > 1e-7:
                    tab.pivot(r, k)
    c2 = np.zeros(N)
    c2[:n] = sign * model.c
    st = tab.run(c2, limit, bland_after)
    if st != "optimal":
        return LpResult(st, iterations=tab.iters)
    # recompute basic values from the original data to shed drift
    B = tab.basis
    nb = np.ones(N, dtype=bool)
    nb[B] = False
    if m:
        try:
            xb = np.linalg.solve(A[:, B], bb - A[:, nb] @ x[nb])
            x[B] = np.clip(xb, full_lo[B], full_hi[B])
        except np.linalg.LinAlgError:
            pass
    y = x[:n].copy()
    return LpResult("optimal", float(model.c @ y), y, tab.iters)


# ---------------------------------------------------------------------------
# problem description


@dataclass(frozen=True, eq=False)
class Link:
    """w (column ``w``) <= f(a^T x) over columns ``x`` with box 0 <= x <= mu."""

    w: int
    x: tuple[int, ...]
    inst: InstanceX


@dataclass(eq=False)
class MinlpProblem:
    c: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    integer: np.ndarray
    rows: list = field(default_factory=list)  # (coef, sense, rhs)
    links: list = field(default_factory=list)
    source: object = None

    def objective(self, y: np.ndarray) -> float:
        """True objective at an integral y, with each w replaced by its link value."""
        y = np.array(y, dtype=float)
        for ln in self.links:
            y[ln.w] = min(ln.inst.value(y[list(ln.x)]), self.hi[ln.w])
        return float(self.c @ y)

    def rows_ok(self, y: np.ndarray) -> bool:
        for coef, sn, rhs in self.rows:
            v = float(coef @ y)
            tol = 1e-9 * max(1.0, abs(rhs))
            if (sn == "<=" and v > rhs + tol) or (sn == ">=" and v < rhs - tol) or (sn == "=" and abs(v - rhs) > tol):
                return False
        return True


def _link_bounds(inst: InstanceX) -> tuple[float, float]:
    """f over the box attains its extremes on the weight range endpoints
    (upper end may be interior for non-monotone f; use endpoints for the
    increasing utilities used here, guarded by a max over both)."""
    lo_z = sum(min(0.0, ai * m) for ai, m in zip(inst.raw_a, inst.mu))
    hi_z = sum(max(0.0, ai * m) for ai, m in zip(inst.raw_a, inst.mu))
    v1, v2 = inst.raw_f(lo_z), inst.raw_f(hi_z)
    return min(v1, v2), max(v1, v2)


def eum_problem(p: EUMInstance) -> MinlpProblem:
    n, m = p.n, p.m
    f = ExpUtility(p.lam, 0.0)
    c = np.concatenate([np.zeros(n), p.pi])
    lo = np.zeros(n + m)
    hi = np.ones(n + m)
    links = []
    for j in range(m):
        inst = InstanceX.create(p.v[j], [1] * n, f)
        wl, wh = _link_bounds(inst)
        lo[n + j], hi[n + j] = wl, wh
        links.append(Link(n + j, tuple(range(n)), inst))
    integer = np.concatenate([np.ones(n, dtype=bool), np.zeros(m, dtype=bool)])
    rows = [(np.concatenate([p.a, np.zeros(m)]), "<=", 1.0)]
    return MinlpProblem(c, lo, hi, integer, rows, links, p)


def wta_problem(p: WTAInstance) -> MinlpProblem:
    n, m = p.n, p.m
    A = p.weights
    f = ExpUtility(1.0, 0.0)
    nx = n * m
    c = np.concatenate([np.zeros(nx), p.V])
    lo = np.zeros(nx + m)
    hi = np.concatenate([np.repeat(p.mu.astype(float), m), np.zeros(m)])
    links = []
    for j in range(m):
        cols = tuple(i * m + j for i in range(n))
        inst = InstanceX.create(A[:, j], [int(v) for v in p.mu], f)
        wl, wh = _link_bounds(inst)
        lo[nx + j], hi[nx + j] = wl, wh
        links.append(Link(nx + j, cols, inst))
    integer = np.concatenate([np.ones(nx, dtype=bool), np.zeros(m, dtype=bool)])
    rows = []
    for i in range(n):
        coef = np.zeros(nx + m)
        coef[i * m:(i + 1) * m] = 1.0
        rows.append((coef, "<=", float(p.mu[i])))
    return MinlpProblem(c, lo, hi, integer, rows, links, p)


def to_minlp(problem) -> MinlpProblem:
    if isinstance(problem, MinlpProblem):
        return problem
    if isinstance(problem, EUMInstance):
        return eum_problem(problem)
    if isinstance(problem, WTAInstance):
        return wta_problem(problem)
    raise TypeError("expected an EUM, WTA or MinlpProblem instance")


# ---------------------------------------------------------------------------
# cuts


def oa_cut(xbar: Sequence[float], inst: InstanceX) -> Cut:
    """Tangent cut w <= f(z) + f'(z) a^T (x - xbar) at z = a^T xbar."""
    xbar = np.asarray(xbar, dtype=float)
    a = np.asarray(inst.raw_a, dtype=float)
    z = float(a @ xbar)
    fz = inst.raw_f(z)
    slope = inst.raw_f.slope(z)
    alpha = slope * a
    return Cut(fz - float(alpha @ xbar), tuple(alpha), {"family": "oa", "at": xbar.tolist()})


def _row_of(cut: Cut, link: Link, ncols: int) -> tuple[np.ndarray, float]:
    coef = np.zeros(ncols)
    coef[link.w] = 1.0
    for i, col in enumerate(link.x):
        coef[col] -= cut.alpha[i]
    return coef, cut.alpha0


# ---------------------------------------------------------------------------
# branch and cut


@dataclass
class BCConfig:
    use_oa: bool = True
    families: frozenset = frozenset()
    prefer_exact: bool = False
    time_limit: float = DEFAULT_TIME_LIMIT
    node_limit: Optional[int] = None
    root_rounds: int = 10
    node_rounds: int = 2


SETTINGS = {
    "oa": BCConfig(),
    "single": BCConfig(families=frozenset({"single"})),
    "two": BCConfig(families=frozenset({"two_I", "two_II"})),
    "both": BCConfig(families=frozenset({"single", "two_I", "two_II"})),
}


def config_for(setting: str, **kw) -> BCConfig:
    """Solver configuration of a named setting (none/oa, single, two, both)."""
    key = "oa" if setting in ("none", "oa") else setting
    if key not in SETTINGS:
        raise ValueError(f"unknown setting {setting!r}")
    base = SETTINGS[key]
    return BCConfig(**{**base.__dict__, **kw})


@dataclass
class SolveStats:
    cuts_added: int = 0
    nodes: int = 0
    wall_time: float = 0.0
    separation_time: float = 0.0
    root_bound: float = float("nan")
    incumbent: float = float("-inf")
    proven_bound: float = float("inf")
    status: str = "unknown"
    lp_solves: int = 0
    bound_trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "C": self.cuts_added,
            "N": self.nodes,
            "T": self.wall_time,
            "ST": self.separation_time,
            "z_R": self.root_bound,
            "z": self.incumbent,
            "z_UB": self.proven_bound,
            "status": self.status,
            "lp_solves": self.lp_solves,
        }


def _separate_links(prob: MinlpProblem, cfg: BCConfig, y: np.ndarray, integral: bool) -> list[tuple[Cut, Link]]:
    out = []
    for ln in prob.links:
        xs = y[list(ln.x)]
        ws = float(y[ln.w])
        cands: list[Cut] = []
        if integral:
            xr = np.round(xs)
            fv = ln.inst.value(xr)
            if ws <= fv + LAZY_TOL * max(1.0, abs(fv)):
                continue
            if cfg.families:
                c = separate((ws, xr), ln.inst, cfg.families, cfg.prefer_exact)
                if c is not None:
                    cands.append(c)
            cands.append(oa_cut(xr, ln.inst))
        else:
            if cfg.families:
                c = separate((ws, xs), ln.inst, cfg.families, cfg.prefer_exact)
                if c is not None:
                    cands.append(c)
            if cfg.use_oa:
                mu = np.asarray(ln.inst.mu, dtype=float)
                xr = np.clip(np.round(xs), 0.0, mu)
                c = oa_cut(xr, ln.inst)
                if c.violation(ws, xs) > VIOL_MIN:
                    cands.append(c)
        if cands:
            best = max(cands, key=lambda c: c.violation(ws, xs))
            if best.violation(ws, xs) > 0:
                out.append((best, ln))
    return out


def branch_and_cut(problem, config: Optional[BCConfig] = None) -> tuple[Optional[np.ndarray], SolveStats]:
    """Maximize; returns (incumbent point over all columns, stats)."""
    cfg = config or BCConfig()
    prob = to_minlp(problem)
    ncols = len(prob.c)
    model = LpModel(prob.c, prob.lo, prob.hi, prob.integer, "max")
    for coef, sn, rhs in prob.rows:
        model.add_row(coef, sn, rhs)
    stats = SolveStats()
    t0 = time.perf_counter()

    best_y = None
    best = -np.inf
    y0 = np.where(prob.integer, np.maximum(prob.lo, 0.0), prob.lo)
    y0 = np.clip(np.round(y0), prob.lo, prob.hi)
    if prob.rows_ok(y0):
        best_y = y0.copy()
        for ln in prob.links:
            best_y[ln.w] = ln.inst.value(y0[list(ln.x)])
        best = prob.objective(y0)

    # open nodes: [bound, id, lo, hi, depth]
    open_nodes = [[np.inf, 0, prob.lo.copy(), prob.hi.copy(), 0]]
    next_id = 1
    ub_run = np.inf
    status = "optimal"

    def proven():
        return max([best] + [nd[0] for nd in open_nodes])

    while open_nodes:
        if time.perf_counter() - t0 > cfg.time_limit:
            status = "time_limit"
            break
        if cfg.node_limit is not None and stats.nodes >= cfg.node_limit:
            status = "node_limit"
            break
        if stats.nodes and stats.nodes % 100 == 0:
            k = max(range(len(open_nodes)), key=lambda i: (open_nodes[i][0], -open_nodes[i][1]))
            open_nodes.append(open_nodes.pop(k))
        bound, nid, lo, hi, depth = open_nodes.pop()
        if bound <= best + ABS_GAP:
            continue
        stats.nodes += 1
        is_root = nid == 0
        rounds = 0
        limit = cfg.root_rounds if is_root else cfg.node_rounds
        branch_on = None
        while True:
            res = solve_lp(model, lo, hi)
            stats.lp_solves += 1
            if res.status != "optimal":
                if res.status == "unbounded":
                    raise RuntimeError("LP relaxation unbounded; add bounds on every column")
                if res.status == "iteration_limit":
                    raise RuntimeError("LP iteration limit reached")
                break
            y = res.x
            if res.obj <= best + ABS_GAP:
                break
            xi = y[prob.integer]
            frac = np.abs(xi - np.round(xi))
            integral = bool(np.all(frac <= INT_TOL))
            if not integral and rounds >= limit:
                branch_on = y
                break
            ts = time.perf_counter()
            cuts = _separate_links(prob, cfg, y, integral)
            stats.separation_time += time.perf_counter() - ts
            if cuts:
                for cut, ln in cuts:
                    coef, rhs = _row_of(cut, ln, ncols)
                    model.add_row(coef, "<=", rhs)
                stats.cuts_added += len(cuts)
                if not integral:
                    rounds += 1
                continue
            if integral:
                yr = y.copy()
                yr[prob.integer] = np.round(yr[prob.integer])
                val = prob.objective(yr)
                if val > best:
                    best = val
                    best_y = yr.copy()
                    for ln in prob.links:
                        best_y[ln.w] = ln.inst.value(yr[list(ln.x)])
                break
            branch_on = y
            break
        if is_root:
            stats.root_bound = res.obj if res.status == "optimal" else -np.inf
        if branch_on is not None:
            y = branch_on
            idx = np.flatnonzero(prob.integer)
            fr = y[idx] - np.floor(y[idx])
            score = np.minimum(fr, 1.0 - fr)
            score[score <= INT_TOL] = -1.0
            j = int(idx[int(np.argmax(score))])
            v = y[j]
            dlo, dhi = lo.copy(), hi.copy()
            dhi[j] = np.floor(v)
            ulo, uhi = lo.copy(), hi.copy()
            ulo[j] = np.ceil(v)
            open_nodes.append([res.obj, next_id, dlo, dhi, depth + 1])
            open_nodes.append([res.obj, next_id + 1, ulo, uhi, depth + 1])
            next_id += 2
        ub_run = min(ub_run, proven())
        stats.bound_trace.append(ub_run)

    stats.incumbent = float(best)
    stats.proven_bound = float(min(ub_run, proven())) if open_nodes or status != "optimal" else float(best)
    if status == "optimal":
        stats.proven_bound = float(best)
    stats.status = status
    stats.wall_time = time.perf_counter() - t0
    return best_y, stats
