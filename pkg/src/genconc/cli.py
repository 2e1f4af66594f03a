"""``genconc`` command-line front end.

Subcommands read state or density files (see :mod:`genconc.io`), accept a
single file or a directory of ``*.json`` files, and print a JSON report
(or CSV with ``--csv``). Exit codes: 0 success, 1 failed health check,
2 input/validation, 3 kind/support violation, 4 dense cap, 5 numerical integrity.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable

from . import io
from .concurrence import COHERENCE_TOL, bipartition_values, concurrence_pure
from .errors import GenconcError, ParameterError, ValidationError
from .mixed import convex_roof_upper, fermionic_detection, mb_bound, mb_bound_bosonic
from .projectors import DEFAULT_GRID, HEALTH_TOL, Tag, healthcheck_grid
from .states import MixedState, PureState, random_mixed, random_pure, schmidt_coefficients
from .tensor_core import DEFAULT_DENSE_CAP, Kind, SystemShape

ROOF_DEFAULTS = {"ensemble_size": None, "restarts": 32, "max_iters": 500, "tol": 1e-8, "seed": 0}
_TAG_OF_KIND = {"distinguishable": Tag.PD, "boson": Tag.PB, "fermion": Tag.PF}


def _inputs(path: str) -> list[Path]:
    p = Path(path)
    if p.is_dir():
        files = sorted(p.glob("*.json"))
        if not files:
            raise ValidationError(f"{p}: no .json files")
        return files
    if not p.exists():
        raise ValidationError(f"{p}: no such file")
    return [p]


def _as_density(obj: PureState | MixedState) -> MixedState:
    return obj.density() if isinstance(obj, PureState) else obj


def _concurrence(path: Path, args) -> dict:
    obj = io.load(path)
    if not isinstance(obj, PureState):
        raise ValidationError(f"{path}: concurrence needs a pure-state file; use 'bound' or 'roof'")
    res = concurrence_pure(obj, args.method, args.dense_cap)
    tol = COHERENCE_TOL if args.tol is None else args.tol
    return {"kind": res.kind, "L": obj.L, "N": obj.N, "concurrence": res.value,
            "expectation": res.expectation, "coherent": res.value <= tol,
            "bipartition_values": bipartition_values(obj), "method": res.method}


def _bound(path: Path, args) -> dict:
    rho = _as_density(io.load(path))
    fn = {Kind.DISTINGUISHABLE: mb_bound, Kind.BOSON: mb_bound_bosonic,
          Kind.FERMION: fermionic_detection}[rho.kind]
    return {"L": rho.L, "N": rho.N, **fn(rho, args.method, args.dense_cap).to_dict()}


def _roof_options(args) -> dict:
    opts = dict(ROOF_DEFAULTS)
    if args.options:
        doc = io.load_document(args.options)
        unknown = set(doc) - set(opts)
        if unknown:
            raise ValidationError(f"unknown roof options: {sorted(unknown)}")
        opts.update(doc)
    for key in opts:
        flag = getattr(args, key, None)
        if flag is not None:
            opts[key] = flag
    return opts


def _roof(path: Path, args) -> dict:
    rho = _as_density(io.load(path))
    est = convex_roof_upper(rho, **_roof_options(args))
    return {"kind": rho.kind.value, "L": rho.L, "N": rho.N, **est.to_dict()}


def _schmidt(path: Path, args) -> dict:
    obj = io.load(path)
    if not isinstance(obj, PureState):
        raise ValidationError(f"{path}: schmidt needs a pure-state file")
    sites = range(obj.L) if args.site is None else [args.site - 1]
    return {"kind": obj.kind.value, "L": obj.L, "N": obj.N,
            "schmidt": {str(i + 1): [float(x) for x in schmidt_coefficients(obj, i)] for i in sites}}


def _run_batch(fn: Callable[[Path, argparse.Namespace], dict], args) -> tuple[list[dict], int]:
    files = _inputs(args.input)

    def one(p: Path):
        try:
            return {"file": str(p), **fn(p, args)}, 0
        except GenconcError as exc:
            return {"file": str(p), "error": str(exc), "exit_code": exc.exit_code}, exc.exit_code

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        results = list(pool.map(one, files))
    code = next((c for _, c in results if c), 0)
    for rec, c in results:
        if c:
            msg = rec["error"]
            print(f"genconc: {msg if msg.startswith(rec['file']) else rec['file'] + ': ' + msg}",
                  file=sys.stderr)
    return [r for r, _ in results], code


def _flat(rec: dict) -> dict:
    out = {}
    for k, v in rec.items():
        if isinstance(v, dict):
            continue
        out[k] = ";".join(repr(float(x)) for x in v) if isinstance(v, list) else v
    return out


def _emit(records: list[dict] | dict, args, single: bool) -> None:
    if args.csv:
        rows = [_flat(r) for r in (records if isinstance(records, list) else [records])]
        fields = list(dict.fromkeys(k for r in rows for k in r))
        buf = _io.StringIO()
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    else:
        payload = records[0] if single and isinstance(records, list) else records
        text = json.dumps(payload, indent=1) + "\n"
    if args.output:
        io.write_atomic(args.output, text)
    else:
        sys.stdout.write(text)


def _file_command(fn):
    def run(args) -> int:
        records, code = _run_batch(fn, args)
        single = not Path(args.input).is_dir()
        if single and code:
            return code
        _emit(records, args, single)
        return code
    return run


def _parse_grid(text: str) -> list[tuple[int, int]]:
    try:
        return [tuple(int(x) for x in item.split("x")) for item in text.split(",")]
    except ValueError:
        raise ValidationError(f"grid must look like '2x2,3x3' (L x N), got {text!r}") from None


def _healthcheck(args) -> int:
    if args.L is not None or args.N is not None:
        if args.L is None or args.N is None:
            raise ParameterError("--L and --N must be given together")
        grid = [(args.L, args.N)]
    else:
        grid = _parse_grid(args.grid) if args.grid else list(DEFAULT_GRID)
    tags = [_TAG_OF_KIND[args.kind]] if args.kind else list(_TAG_OF_KIND.values())
    if args.kind:
        for L, N in grid:
            SystemShape(Kind(args.kind), L, N)
    reports = healthcheck_grid(grid, tags, args.dense_cap, args.form, args.workers)
    tol = HEALTH_TOL if args.tol is None else args.tol
    records = [{**r.to_dict(), "passed": r.passed(tol)} for r in reports]
    _emit(records, args, single=False)
    return 0 if all(r["passed"] for r in records) else 1


def _random(args) -> int:
    shape = SystemShape(Kind(args.kind), args.L, args.N)
    seed = 0 if args.seed is None else args.seed
    if args.rank is None:
        obj = random_pure(shape, seed)
    else:
        obj = random_mixed(shape, args.rank, seed)
    text = json.dumps(io.to_dict(obj), indent=1) + "\n"
    if args.output:
        io.write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--csv", action="store_true", help="one flat CSV row per input")
    common.add_argument("--dense-cap", type=int, default=DEFAULT_DENSE_CAP,
                        help="largest two-copy dimension materialized densely (default %(default)s)")
    common.add_argument("--workers", type=int, default=None, help="batch worker threads")
    common.add_argument("--tol", type=float, default=None,
                        help="coherence threshold, optimizer tolerance or health tolerance")

    method = argparse.ArgumentParser(add_help=False)
    method.add_argument("--method", choices=["purity", "two-copy", "dense"], default="purity")

    p = argparse.ArgumentParser(prog="genconc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, helptext, parents in [
        ("concurrence", _concurrence, "pure-state concurrence and coherence test", [common, method]),
        ("bound", _bound, "two-copy lower bound for a density matrix", [common, method]),
        ("roof", _roof, "convex-roof upper estimate", [common]),
        ("schmidt", _schmidt, "Schmidt coefficients across single-site cuts", [common]),
    ]:
        sp = sub.add_parser(name, help=helptext, parents=parents)
        sp.add_argument("input", help="state/density file or a directory of them")
        sp.set_defaults(run=_file_command(fn))
        if name == "roof":
            sp.add_argument("--restarts", type=int)
            sp.add_argument("--max-iters", dest="max_iters", type=int)
            sp.add_argument("--ensemble-size", dest="ensemble_size", type=int)
            sp.add_argument("--seed", type=int)
            sp.add_argument("--options", help="JSON file with optimizer options; flags win")
        if name == "schmidt":
            sp.add_argument("--site", type=int, help="1-based site; all sites if omitted")

    hc = sub.add_parser("healthcheck", help="dense projector checks on a grid", parents=[common])
    hc.add_argument("--grid", help="comma-separated LxN pairs, e.g. 2x2,3x3")
    hc.add_argument("--kind", choices=list(_TAG_OF_KIND))
    hc.add_argument("--L", type=int)
    hc.add_argument("--N", type=int)
    hc.add_argument("--form", choices=["compressed", "literal"], default="compressed")
    hc.set_defaults(run=_healthcheck)

    rd = sub.add_parser("random", help="Haar-random state or density file")
    rd.add_argument("--kind", choices=[k.value for k in Kind], default="distinguishable")
    rd.add_argument("--L", type=int, required=True)
    rd.add_argument("--N", type=int, required=True)
    rd.add_argument("--seed", type=int, default=0)
    rd.add_argument("--rank", type=int, help="emit a density matrix of this rank")
    rd.add_argument("--output")
    rd.set_defaults(run=_random)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except GenconcError as exc:
        print(f"genconc: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
