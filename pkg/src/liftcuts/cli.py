"""Command line entry point: gen, bench, solve, cut, verify."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import bench
from .cutgen import build_cut
from .lifting import InstanceX, LiftContext
from .milp import branch_and_cut, config_for
from .polyoracle import check_validity, face_dimension
from .problems import problem_from_json
from .seed import Cut

CUT_SETTINGS = {"none": "oa", "single": "single", "two": "two", "both": "both"}


def _load(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _emit(obj, out: Optional[str]) -> None:
    text = json.dumps(obj, indent=2, default=_jsonable) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(f"not serializable: {type(v).__name__}")


def _floats(s: str) -> list[float]:
    return [float(t) for t in s.split(",") if t.strip()]


def _ints(s: str) -> list[int]:
    return [int(t) for t in s.split(",") if t.strip()]


def cmd_gen(args) -> int:
    prob = bench.generate(args.problem, args.n, args.m, args.param, args.seed)
    _emit(bench.instance_json(prob, args.n, args.m, args.param, args.seed), args.out)
    return 0


def cmd_solve(args) -> int:
    if args.instance:
        data = _load(args.instance)
        prob = problem_from_json(data)
    else:
        if args.problem is None:
            raise SystemExit("solve: give an instance file or --problem with --n/--m/--param")
        prob = bench.generate(args.problem, args.n, args.m, args.param, args.seed)
    cfg = config_for(
        CUT_SETTINGS[args.cuts],
        prefer_exact=args.exact_lifting,
        time_limit=args.time_limit,
        node_limit=args.node_limit,
    )
    y, stats = branch_and_cut(prob, cfg)
    out = {"objective": stats.incumbent, "stats": stats.to_json()}
    if y is not None:
        k = prob.n if prob.kind == "eum" else prob.n * prob.m
        x = np.round(y[:k]).astype(int)
        out["x"] = x.tolist() if prob.kind == "eum" else x.reshape(prob.n, prob.m).tolist()
    _emit(out, args.out)
    return 0


def cmd_bench(args) -> int:
    sizes = _ints(args.sizes)
    ms = _ints(args.m) if args.m else None
    cells = []
    for i, n in enumerate(sizes):
        m = n if ms is None else ms[min(i, len(ms) - 1)]
        for p in _floats(args.params):
            cells.append(bench.Cell(args.problem, n, m, p, _ints(args.seeds)))
    rows = bench.run_experiment(
        cells,
        settings=args.settings.split(","),
        time_limit=args.time_limit,
        node_limit=args.node_limit,
        timing=args.timing,
        prefer_exact=args.exact_lifting,
    )
    text = bench.results_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.summary:
        with open(args.summary, "w") as fh:
            fh.write(bench.summary_table(rows))
    return 0


def cmd_cut(args) -> int:
    inst = InstanceX.from_json(_load(args.instance))
    ctx = LiftContext.from_json(inst, _load(args.context))
    cuts = [build_cut(ctx, fam, not args.approx).to_json() for fam in args.families.split(",")]
    _emit({"cuts": cuts}, args.out)
    return 0


def cmd_verify(args) -> int:
    inst = InstanceX.from_json(_load(args.instance))
    data = _load(args.cuts)
    items = data["cuts"] if isinstance(data, dict) else data
    report = []
    all_ok = True
    for d in items:
        cut = Cut.from_json(d)
        v = check_validity(cut, inst)
        entry = {"meta": cut.meta, "validity": v.to_json()}
        if v.ok:
            dim = face_dimension(cut, inst)
            entry["face_dimension"] = dim
            entry["facet"] = dim == inst.n
        all_ok &= v.ok
        report.append(entry)
    _emit({"n": inst.n, "all_valid": all_ok, "cuts": report}, args.out)
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="liftcuts", description="Lifted cuts for w <= f(a^T x) over integer boxes.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a benchmark instance as JSON")
    g.add_argument("--problem", choices=["eum", "wta"], required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--param", type=float, required=True, help="lambda for eum, rho for wta")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve an EUM/WTA instance by branch-and-cut")
    s.add_argument("instance", nargs="?", help="instance JSON (or generate with --problem)")
    s.add_argument("--problem", choices=["eum", "wta"])
    s.add_argument("--n", type=int, default=10)
    s.add_argument("--m", type=int, default=5)
    s.add_argument("--param", type=float, default=1.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cuts", choices=sorted(CUT_SETTINGS), default="none")
    s.add_argument("--exact-lifting", action="store_true", help="use exact second-phase lifting when available")
    s.add_argument("--time-limit", type=float, default=600.0)
    s.add_argument("--node-limit", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run a settings x instance grid and write the results CSV")
    b.add_argument("--problem", choices=["eum", "wta"], default="wta")
    b.add_argument("--sizes", default="3,4", help="comma list of n")
    b.add_argument("--m", help="comma list of m (defaults to m = n)")
    b.add_argument("--params", default="0.3,0.4,0.5")
    b.add_argument("--seeds", default="1,2,3")
    b.add_argument("--settings", default="oa,single,two,both")
    b.add_argument("--time-limit", type=float, default=600.0)
    b.add_argument("--node-limit", type=int)
    b.add_argument("--timing", action=argparse.BooleanOptionalAction, default=False,
                   help="report wall/separation times (off keeps the CSV reproducible)")
    b.add_argument("--exact-lifting", action="store_true")
    b.add_argument("--out")
    b.add_argument("--summary", help="also write the averaged summary table here")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("cut", help="build lifted cuts for an instance and context")
    c.add_argument("instance")
    c.add_argument("context")
    c.add_argument("--families", default="single,two_I,two_II")
    c.add_argument("--approx", action="store_true", help="use the upper approximations in the second phase")
    c.add_argument("--out")
    c.set_defaults(func=cmd_cut)

    v = sub.add_parser("verify", help="check cuts against the enumerated instance")
    v.add_argument("instance")
    v.add_argument("cuts")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
