"""Command-line entry point: ``fde verify|solve|mnc|stability|study``.

Exit codes: 0 success, 1 check failed (no existence, no convergence, bound
violated), 2 config error, 3 singular parameters, 4 divergence,
5 stability-condition violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict
from typing import Any, Sequence

import numpy as np

from .bvp import check_existence
from .config import ProblemConfig, load_config
from .errors import DivergenceError, FdeError
from .mnc import VectorFamily, hausdorff_mnc, hu_experiment, unit_sphere_family
from .picard import picard_solve, refinement_study, truncation_study


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fde", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", required=True, help="path to a JSON problem config")
        p.add_argument("--output", choices=("json", "csv"), help="overrides the config's output format")
        p.add_argument("--out", help="write to this file instead of stdout")
        return p

    add("verify", "evaluate existence/uniqueness/stability constants")
    add("solve", "solve the truncated system by Picard iteration")
    p = add("mnc", "estimate the Hausdorff measure of noncompactness")
    p.add_argument("--kmax", type=int, default=40)
    p.add_argument("--J", type=int, default=50, help="members sampled from the generator")
    p.add_argument("--family", choices=("unit-sphere", "solution"), default="unit-sphere",
                   help="unit-sphere generator, or the solution values at each grid node")
    p = add("stability", "run the Hyers-Ulam perturbation experiment")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--shape", choices=("constant", "sine"), default="constant")
    p = add("study", "truncation and grid refinement tables")
    p.add_argument("--Ns", type=_int_list, help="truncation sizes, e.g. 5,10,20")
    p.add_argument("--Ms", type=_int_list, help="grid sizes, e.g. 64,128,256")
    return parser


def _json(obj: Any) -> str:
    # json writes floats with repr, which round-trips exactly
    return json.dumps(obj, indent=2)


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else format(v, ".17g") if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def solution_csv(nodes: np.ndarray, solution: np.ndarray) -> str:
    header = ["xi"] + [f"m_{i}" for i in range(1, solution.shape[0] + 1)]
    rows = [[float(x), *map(float, col)] for x, col in zip(nodes, solution.T)]
    return _csv(header, rows)


def cmd_verify(cfg: ProblemConfig, args) -> tuple[str, int]:
    report = check_existence(cfg.to_spec())
    for note in report.advisories:
        print(f"advisory: {note}", file=sys.stderr)
    d = report.to_dict()
    if args.output == "csv":
        keys = [k for k in d if k != "advisories"]
        return _csv(keys, [[d[k] for k in keys]]), 0 if report.exists_flag else 1
    return _json(d), 0 if report.exists_flag else 1


def cmd_solve(cfg: ProblemConfig, args) -> tuple[str, int]:
    spec = cfg.to_spec()
    rep = picard_solve(spec, tol=cfg.tol, max_iter=cfg.max_iter)
    code = 0 if rep.converged else 1
    if args.output == "csv":
        return solution_csv(spec.grid.nodes, rep.solution), code
    d = rep.to_dict()
    d["xi"] = spec.grid.nodes.tolist()
    return _json(d), code


def cmd_mnc(cfg: ProblemConfig, args) -> tuple[str, int]:
    spec = cfg.to_spec()
    if args.family == "unit-sphere":
        family = unit_sphere_family(args.J, spec.weights)
    else:
        rep = picard_solve(spec, tol=cfg.tol, max_iter=cfg.max_iter)
        family = VectorFamily.of(rep.solution.T, rule="solution-values")
    est = hausdorff_mnc(family, spec.weights, args.kmax)
    if args.output == "csv":
        rows = [[k, float(v)] for k, v in enumerate(est.tail_sup, start=1)]
        return _csv(["k", "tail_sup"], rows), 0
    return _json(est.to_dict()), 0


def cmd_stability(cfg: ProblemConfig, args) -> tuple[str, int]:
    rep = hu_experiment(cfg.to_spec(), args.epsilon, args.shape, tol=min(cfg.tol, 1e-12),
                        max_iter=max(cfg.max_iter, 500))
    d = rep.to_dict()
    code = 0 if rep.holds else 1
    if args.output == "csv":
        return _csv(list(d), [list(d.values())]), code
    return _json(d), code


def cmd_study(cfg: ProblemConfig, args) -> tuple[str, int]:
    if not args.Ns and not args.Ms:
        raise FdeError("study needs --Ns and/or --Ms")
    out: dict[str, list[dict]] = {}
    if args.Ns:
        rows = truncation_study(cfg.to_spec(), args.Ns, tol=cfg.tol, max_iter=cfg.max_iter)
        out["truncation"] = [asdict(r) for r in rows]
    if args.Ms:
        rows = refinement_study(lambda M: cfg.to_spec(M=M), args.Ms, tol=cfg.tol, max_iter=cfg.max_iter)
        out["refinement"] = [asdict(r) for r in rows]
    if args.output == "csv":
        parts = []
        for name, rows in out.items():
            parts.append(f"# {name}\n" + _csv(list(rows[0]), [list(r.values()) for r in rows]))
        return "".join(parts), 0
    return _json(out), 0


COMMANDS = {
    "verify": cmd_verify,
    "solve": cmd_solve,
    "mnc": cmd_mnc,
    "stability": cmd_stability,
    "study": cmd_study,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        args.output = args.output or cfg.output
        text, code = COMMANDS[args.command](cfg, args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(_json({"residual_history": exc.history}), file=sys.stderr)
        return exc.exit_code
    except FdeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    text = text if text.endswith("\n") else text + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
