"""Command line driver.

Subcommands: ``verify``, ``map``, ``dualize``, ``curve``, ``flow``,
``ccduality`` and ``gen``.  Exit status is 0 when every check passes, 1 when
one fails and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import exactnum as xn
from .cc_duality import verify_cc_identifications
from .errors import DualityLabError
from .flows import evolve_gaudin, evolve_manybody
from .instances import generate_instance
from .manybody import ModelKind, PhasePoint
from .pq_duality import dualize
from .report import DualityReport, digest
from .spectral_duality import DUAL_TRANSFORMS, curve_residual, spectral_poly
from .spectral_models import MultiPoleLax, SpectralKind
from .suites import SUITES, SuiteConfig, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _range(text: str) -> tuple:
    """``"3"`` -> ``(3, 3)``; ``"2..4"`` -> ``(2, 4)``."""
    try:
        if ".." in text:
            lo, hi = (int(v) for v in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO..HI, got {text!r}")
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"invalid range {text!r}")
    return lo, hi


def _read_json(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}")


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

_CONFIG_KEYS = ("suite", "n", "m", "trials", "seed", "backend", "tol", "out", "format")


def cmd_verify(args) -> int:
    values = {}
    if args.config:
        values.update(_read_json(args.config))
        unknown = set(values) - set(_CONFIG_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        for key in ("n", "m"):
            if isinstance(values.get(key), (str, int)):
                values[key] = _range(str(values[key]))
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    suite = values.get("suite")
    if suite not in SUITES + ("all",):
        raise UsageError(f"unknown suite {suite!r}")
    config = SuiteConfig(**values)
    start = time.perf_counter()
    report = run_suite(config)
    if args.timing:
        report.wall_time = time.perf_counter() - start
    text = report.to_csv() if config.format == "csv" else report.to_json()
    _emit(text, config.out)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_map(args) -> int:
    desc = _read_json(args.model)
    kind, x = PhasePoint.from_dict(desc)
    res = dualize(kind, x)
    scale = max(1.0, xn.max_abs(res.dual_matrix))
    out = res.dual.to_dict(res.dual_kind)
    out["dual_of"] = {"kind": kind.value, "digest": digest(desc)}
    out["residual"] = res.residual / scale
    ok = out["residual"] <= args.tol
    out["pass"] = ok
    _emit(_dumps(out), args.out)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_dualize(args) -> int:
    desc = _read_json(args.model)
    L = MultiPoleLax.from_dict(desc)
    dual = DUAL_TRANSFORMS[args.direction](L)
    report = DualityReport(config={"direction": args.direction})
    r = curve_residual(L, dual)
    if not isinstance(r, Fraction):
        r = r / max(1.0, xn.max_abs(xn.complex_array(spectral_poly(L).coeffs)))
    report.add("curve_coincidence", digest(desc), r, 0.0 if L.exact else args.tol)
    out = {"dual": dual.to_dict(), "report": report.to_dict()}
    _emit(_dumps(out), args.out)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_curve(args) -> int:
    L = MultiPoleLax.from_dict(_read_json(args.model))
    _emit(_dumps(spectral_poly(L).to_dict()), args.out)
    return EXIT_PASS


def _csv_cells(value) -> list:
    arr = np.atleast_1d(np.asarray(value, dtype=complex)).ravel()
    return [repr(complex(v)) for v in arr]


def cmd_flow(args) -> int:
    desc = _read_json(args.model)
    kind_name = desc.get("kind")
    if kind_name in {k.value for k in ModelKind}:
        kind, x = PhasePoint.from_dict(desc)
        result = evolve_manybody(kind, x, args.t_end, args.dt, args.sample_every)
    elif kind_name == SpectralKind.RATIONAL_GAUDIN.value:
        model = MultiPoleLax.from_dict(desc)
        if not 0 <= args.flow < model.m:
            raise UsageError(f"flow index must be in 0..{model.m - 1}")
        result = evolve_gaudin(model, args.flow, args.t_end, args.dt, args.sample_every)
    else:
        raise UsageError(f"flows are available for many-body kinds and rational_gaudin, not {kind_name!r}")
    names = list(result.invariants)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["t"]
    for name in names:
        width = len(_csv_cells(result.invariants[name][0]))
        header += [name] if width == 1 else [f"{name}[{i}]" for i in range(width)]
    writer.writerow(header)
    for idx, t in enumerate(result.times):
        row = [repr(t)]
        for name in names:
            row += _csv_cells(result.invariants[name][idx])
        writer.writerow(row)
    _emit(buf.getvalue(), args.out)
    summary = {"dt": result.dt, "order": result.order, "t_end": args.t_end,
               "drift": result.drift, "tolerance": args.tol,
               "pass": result.max_drift <= args.tol}
    text = _dumps(summary)
    if args.summary:
        _emit(text, args.summary)
    else:
        sys.stderr.write(text)
    return EXIT_PASS if summary["pass"] else EXIT_FAIL


def cmd_ccduality(args) -> int:
    kind, x = PhasePoint.from_dict(_read_json(args.model))
    if kind is not ModelKind.RATIONAL_CM:
        raise UsageError("ccduality expects a rational_cm phase point")
    report = verify_cc_identifications(x)
    _emit(report.to_json(), args.out)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_gen(args) -> int:
    desc = generate_instance(args.kind, args.n, args.m, args.seed, args.backend, args.regime)
    _emit(_dumps(desc), args.out)
    return EXIT_PASS


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="duality-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=SUITES + ("all",))
    p.add_argument("--config", help="JSON file with suite settings; flags win over it")
    p.add_argument("--n", type=_range, help="matrix size N or range LO..HI")
    p.add_argument("--m", type=_range, help="number of poles M or range LO..HI")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--backend", choices=("exact", "float"))
    p.add_argument("--tol", type=float, help="override floating point tolerances")
    p.add_argument("--out", help="report path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--timing", action="store_true", help="record wall time in the report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("map", help="apply the many-body duality map to a phase point")
    p.add_argument("--model", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("dualize", help="spectral dual of a multi-pole Lax matrix")
    p.add_argument("--model", required=True)
    p.add_argument("--direction", required=True, choices=tuple(DUAL_TRANSFORMS))
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dualize)

    p = sub.add_parser("curve", help="cleared spectral polynomial coefficients")
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("flow", help="integrate a many-body or Gaudin flow")
    p.add_argument("--model", required=True)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--flow", type=int, default=0, help="Gaudin flow index a (0-based)")
    p.add_argument("--sample-every", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--summary", help="drift summary JSON path (default stderr)")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("ccduality", help="classical-classical identifications for rational CM")
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ccduality)

    p = sub.add_parser("gen", help="generate a random instance descriptor")
    p.add_argument("--kind", required=True,
                   choices=[k.value for k in ModelKind] + [k.value for k in SpectralKind])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=("exact", "float"), default="exact")
    p.add_argument("--regime", choices=("generic", "flow"), default="generic")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        return args.func(args)
    except (UsageError, KeyError, ValueError, TypeError) as exc:
        if isinstance(exc, DualityLabError):
            sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
            return EXIT_FAIL
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
