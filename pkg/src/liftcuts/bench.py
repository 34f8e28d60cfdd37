"""Instance generators and the experiment harness."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .milp import BCConfig, branch_and_cut, config_for
from .problems import EUMInstance, WTAInstance

PRNG_VERSION = "philox4x64-boxmuller-v1"
CSV_COLUMNS = ["n", "m", "param", "setting", "C", "N", "T", "ST", "Rgap", "Egap", "status"]


class Rng:
    """Counter-based stream: Philox 4x64 raw words, 53-bit uniforms, Box-Muller normals.

    Every draw consumes a fixed number of raw words, so streams are
    reproducible across platforms and numpy versions.
    """

    def __init__(self, seed: int):
        self._bg = np.random.Philox(key=int(seed) & (2**64 - 1))

    def _raw(self, k: int) -> np.ndarray:
        return np.asarray(self._bg.random_raw(k), dtype=np.uint64)

    def uniform(self, lo: float = 0.0, hi: float = 1.0, size: int = 1) -> np.ndarray:
        """Uniform on [lo, hi)."""
        u = (self._raw(size) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return lo + (hi - lo) * u

    def open_uniform(self, size: int = 1) -> np.ndarray:
        """Uniform on the open interval (0, 1)."""
        u = ((self._raw(size) >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
        return u

    def normal(self, mean: float, var: float, size: int = 1) -> np.ndarray:
        u1 = self.open_uniform(size)
        u2 = self.uniform(size=size)
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)
        return mean + math.sqrt(var) * z

    def integers(self, lo: int, hi: int, size: int = 1) -> np.ndarray:
        """Integers uniform on [lo, hi] inclusive."""
        u = self.uniform(size=size)
        return lo + np.floor(u * (hi - lo + 1)).astype(np.int64)


def gen_eum(n: int, m: int, lam: float, seed: int) -> EUMInstance:
    if n < 1 or m < 1 or not lam > 0:
        raise ValueError("gen_eum needs n, m >= 1 and lam > 0")
    r = Rng(seed)
    a = r.uniform(0.1, 0.15, n)
    p = r.uniform(0.0, 0.2, n)
    alpha = r.uniform(0.05, 0.1, n)
    beta = r.uniform(0.0, 1.0, n)
    lnf = r.normal(0.05, 0.0025, m)
    eps = r.normal(0.0, 0.0025, m * n).reshape(m, n)
    v = p[None, :] * np.exp(alpha[None, :] + beta[None, :] * lnf[:, None] + eps)
    return EUMInstance(a, np.full(m, 1.0 / m), v, float(lam))


def gen_wta(n: int, m: int, rho: float, seed: int) -> WTAInstance:
    if n < 1 or m < 1 or not (0.0 <= rho <= 1.0):
        raise ValueError("gen_wta needs n, m >= 1 and rho in [0, 1]")
    r = Rng(seed)
    p = r.open_uniform(n * m).reshape(n, m)
    V = r.integers(1, 100, m).astype(float)
    mu = np.where(r.uniform(size=n) < rho, 2, 1).astype(np.int64)
    return WTAInstance(p, V, mu)


def generate(kind: str, n: int, m: int, param: float, seed: int):
    if kind == "eum":
        return gen_eum(n, m, param, seed)
    if kind == "wta":
        return gen_wta(n, m, param, seed)
    raise ValueError(f"unknown problem kind {kind!r}")


def instance_json(problem, n: int, m: int, param: float, seed: int) -> dict:
    d = problem.to_json()
    d["header"] = {"prng": PRNG_VERSION, "n": n, "m": m, "param": param, "seed": seed}
    return d


@dataclass
class Cell:
    kind: str
    n: int
    m: int
    param: float
    seeds: Sequence[int]


def _gap(z: float, zopt: float) -> float:
    if not math.isfinite(z) or zopt == 0:
        return float("nan")
    return (z - zopt) / abs(zopt) * 100.0


def _fmt(v, digits: int = 6) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None or not math.isfinite(v):
        return "nan"
    return f"{v:.{digits}f}"


def run_experiment(
    cells: Iterable[Cell],
    settings: Sequence[str] = ("oa", "single", "two", "both"),
    time_limit: float = 600.0,
    node_limit: Optional[int] = None,
    timing: bool = True,
    prefer_exact: bool = False,
) -> list[dict]:
    """Solve every instance of every cell under every setting.

    Gaps are measured against the best incumbent over all settings for the
    same instance.  With ``timing`` off, T and ST are reported as "-" so the
    output depends on the inputs alone.
    """
    rows = []
    for cell in cells:
        for seed in cell.seeds:
            prob = generate(cell.kind, cell.n, cell.m, cell.param, seed)
            results = []
            for st in settings:
                cfg = config_for(st, time_limit=time_limit, node_limit=node_limit, prefer_exact=prefer_exact)
                try:
                    _, s = branch_and_cut(prob, cfg)
                    results.append((st, s, None))
                except Exception as exc:  # keep the grid going
                    results.append((st, None, exc))
            zopt = max((s.incumbent for _, s, e in results if s is not None), default=float("nan"))
            for st, s, err in results:
                row = {"kind": cell.kind, "n": cell.n, "m": cell.m, "param": cell.param, "seed": seed, "setting": st}
                if s is None:
                    row.update(C=0, N=0, T=float("nan"), ST=float("nan"), Rgap=float("nan"), Egap=float("nan"), status=f"error:{type(err).__name__}")
                else:
                    row.update(
                        C=s.cuts_added,
                        N=s.nodes,
                        T=s.wall_time if timing else "-",
                        ST=s.separation_time if timing else "-",
                        Rgap=_gap(s.root_bound, zopt),
                        Egap=_gap(s.proven_bound, zopt),
                        status=s.status,
                    )
                rows.append(row)
    return rows


def results_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) if c not in ("n", "m", "setting", "status") else str(r[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def summary_table(rows: Sequence[dict]) -> str:
    """Per (n, m, param, setting) averages; Egap carries ^k when k instances
    of the cell ended unsolved."""
    groups: dict = {}
    for r in rows:
        groups.setdefault((r["n"], r["m"], r["param"], r["setting"]), []).append(r)
    lines = ["n,m,param,setting,C,N,T,ST,Rgap,Egap"]
    for (n, m, param, st), rs in groups.items():
        def avg(key):
            vals = [r[key] for r in rs if not isinstance(r[key], str)]
            vals = [v for v in vals if math.isfinite(v)]
            if not vals:
                return "-" if any(isinstance(r[key], str) for r in rs) else "nan"
            return _fmt(sum(vals) / len(vals), 2)
        unsolved = sum(1 for r in rs if r["status"] != "optimal")
        eg = avg("Egap") + (f"^{unsolved}" if unsolved else "")
        lines.append(",".join([str(n), str(m), _fmt(param, 2), st, avg("C"), avg("N"), avg("T"), avg("ST"), avg("Rgap"), eg]))
    return "\n".join(lines) + "\n"


def desk_wta_cells(seeds: Sequence[int] = (1, 2, 3)) -> list[Cell]:
    return [Cell("wta", n, n, rho, seeds) for n in (3, 4) for rho in (0.3, 0.4, 0.5)]
