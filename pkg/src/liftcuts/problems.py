"""Benchmark problem data: expected utility maximization and weapon-target assignment."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np


@dataclass(frozen=True, eq=False)
class EUMInstance:
    """max sum_j pi_j (1 - exp(-v_j^T x / lam)) s.t. a^T x <= 1, x binary."""

    a: np.ndarray  # (n,)
    pi: np.ndarray  # (m,)
    v: np.ndarray  # (m, n)
    lam: float
    kind = "eum"

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def m(self) -> int:
        return len(self.pi)

    def objective(self, x) -> float:
        z = self.v @ np.asarray(x, dtype=float)
        return float(np.sum(self.pi * (1.0 - np.exp(-z / self.lam))))

    def feasible(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all((x == 0) | (x == 1)) and self.a @ x <= 1.0 + tol)

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": "eum",
            "lam": self.lam,
            "a": self.a.tolist(),
            "pi": self.pi.tolist(),
            "v": self.v.tolist(),
        }


@dataclass(frozen=True, eq=False)
class WTAInstance:
    """max sum_j V_j (1 - prod_i (1 - p_ij)^{x_ij}) s.t. sum_j x_ij <= mu_i."""

    p: np.ndarray  # (n weapons, m targets)
    V: np.ndarray  # (m,)
    mu: np.ndarray  # (n,) integer
    kind = "wta"

    @property
    def n(self) -> int:
        return self.p.shape[0]

    @property
    def m(self) -> int:
        return self.p.shape[1]

    @property
    def weights(self) -> np.ndarray:
        """a_ij = -ln(1 - p_ij), so the survival probability is exp(-sum a_ij x_ij)."""
        return -np.log1p(-self.p)

    def objective(self, x) -> float:
        x = np.asarray(x, dtype=float).reshape(self.n, self.m)
        z = np.sum(self.weights * x, axis=0)
        return float(np.sum(self.V * (1.0 - np.exp(-z))))

    def feasible(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float).reshape(self.n, self.m)
        return bool(
            np.all(x >= -tol)
            and np.all(np.abs(x - np.round(x)) <= tol)
            and np.all(x.sum(axis=1) <= self.mu + tol)
        )

    def to_json(self) -> dict[str, Any]:
        return {"kind": "wta", "p": self.p.tolist(), "V": self.V.tolist(), "mu": self.mu.tolist()}


def problem_from_json(d: dict[str, Any]):
    if d.get("kind") == "eum":
        return EUMInstance(
            np.asarray(d["a"], dtype=float),
            np.asarray(d["pi"], dtype=float),
            np.asarray(d["v"], dtype=float),
            float(d["lam"]),
        )
    if d.get("kind") == "wta":
        return WTAInstance(
            np.asarray(d["p"], dtype=float),
            np.asarray(d["V"], dtype=float),
            np.asarray(d["mu"], dtype=int),
        )
    raise ValueError(f"unknown problem kind {d.get('kind')!r}")
