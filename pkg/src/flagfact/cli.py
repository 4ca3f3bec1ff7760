"""``flagfact`` command line: factorizations, flag-manifold checks, sweeps.

Every run writes one report ``{"body": ..., "meta": ...}``.  The body is a
pure function of the configuration, the input bytes and the package version;
wall-clock timings live in ``meta`` together with a SHA-256 of the body.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
import warnings
from importlib import resources

import numpy as np

from . import __version__
from .algebra import NonHermitianWarning, norm, spectrum
from .errors import BadPartition, BadWitness, CornerNotInvertible, FlagFactError, NotPositive
from .factorization import gauss_decompose, nest_gram_factorize, uab_decompose
from .manifold import (base_point, chart_sigma, counterexample_char, flag_action,
                       u11_counterexample, unitary_transitivity_witness)
from .serialization import (complex_list, element_from_json, element_to_json,
                            flag_from_json, instance_from_json, instance_to_json,
                            parse_flag, parse_instance)
from .sweep import indefinite_witness, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_CORNER, EXIT_POSITIVE, EXIT_SUITE = 0, 1, 2, 3, 4

FACTOR_COMMANDS = ("gauss", "nestgram", "uab", "orbit", "chart", "transitivity")
COMMANDS = FACTOR_COMMANDS + ("counterexample", "propsweep")


class ConfigError(Exception):
    pass


def _canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _sha256(data):
    return hashlib.sha256(data).hexdigest()


def _read_json(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
        return json.loads(raw.decode("utf-8")), raw
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _bundled_example():
    raw = resources.files("flagfact").joinpath("data/example_2x2.json").read_bytes()
    return json.loads(raw.decode("utf-8")), raw


def _tolerances(args):
    return {"rel_residual": args.tol_residual} if args.tol_residual is not None else None


def _resolve_instance(args, doc):
    tol = _tolerances(args)
    if args.instance is not None:
        if os.path.exists(args.instance):
            desc, _ = _read_json(args.instance)
            return instance_from_json(desc, tol)
        return parse_instance(args.instance, tol)
    if doc is not None and "instance" in doc:
        return instance_from_json(doc["instance"], tol)
    raise ConfigError("no instance given (use --instance or an input file with 'instance')")


def _resolve_flag(spec, algebra):
    if isinstance(spec, dict):
        return flag_from_json(spec, algebra)
    if os.path.exists(spec):
        obj, _ = _read_json(spec)
        return flag_from_json(obj, algebra)
    return parse_flag(spec, algebra)


def _load_problem(args):
    """Instance, element, flag and input hash for the factorization-style commands."""
    if args.input is not None:
        doc, raw = _read_json(args.input)
    elif args.instance is None:
        doc, raw = _bundled_example()
    else:
        doc, raw = None, None
    algebra = _resolve_instance(args, doc)
    if doc is not None and "element" in doc:
        element = element_from_json(doc["element"], algebra)
    else:
        # no element supplied: draw a seeded random invertible one
        element = algebra.random_invertible(np.random.default_rng(args.seed))
        raw = _canonical({"generated": instance_to_json(algebra), "seed": args.seed}).encode()
    flag_spec = args.flag if args.flag is not None else (doc or {}).get("flag", "standard")
    flag = _resolve_flag(flag_spec, algebra)
    return algebra, element, flag, _sha256(raw)


def _spectrum_json(x):
    return complex_list(np.sort_complex(spectrum(x).points))


def _run_gauss(g, flag):
    f = gauss_decompose(g, flag)
    return ({"x": element_to_json(f.x), "d": element_to_json(f.d), "y": element_to_json(f.y)},
            f.residual, f.corner_conditions, {"d": _spectrum_json(f.d)})


def _run_nestgram(s, flag):
    f = nest_gram_factorize(s, flag)
    return ({"d": element_to_json(f.d), "b": element_to_json(f.b)},
            f.residual, f.corner_conditions, {"d": _spectrum_json(f.d)})


def _run_uab(s, flag):
    f = uab_decompose(s, flag)
    return ({"u": element_to_json(f.u), "a": element_to_json(f.a), "b": element_to_json(f.b),
             "unitarity": f.unitarity},
            f.residual, f.corner_conditions, {"a": _spectrum_json(f.a)})


def _run_orbit(g, flag):
    point = flag_action(g, base_point(flag, canonicalize=False))
    result = {"reps": [element_to_json(q.element) for q in point.reps]}
    if point.canonical is not None:
        result["canonical"] = [element_to_json(q.element) for q in point.canonical]
    residual = max((norm(q.element * q.element - q.element) for q in point.reps), default=0.0)
    return result, residual, (), {}


def _run_chart(g, flag):
    c = chart_sigma(g, flag)
    gf = gauss_decompose(g, flag)
    return ({"point": element_to_json(c.point)}, c.residual, gf.corner_conditions, {})


def _run_transitivity(g, flag):
    w = unitary_transitivity_witness(g, flag)
    residual = max(w.unitarity, w.delta_residual, w.inverse_delta_residual)
    tol = g.algebra.tol.rel_residual
    return ({"u": element_to_json(w.u), "unitarity": w.unitarity,
             "delta_residual": w.delta_residual,
             "inverse_delta_residual": w.inverse_delta_residual,
             "passed": w.passed(max(tol, 1e-8))},
            residual, uab_decompose(g, flag).corner_conditions, {"u": _spectrum_json(w.u)})


RUNNERS = {"gauss": _run_gauss, "nestgram": _run_nestgram, "uab": _run_uab,
           "orbit": _run_orbit, "chart": _run_chart, "transitivity": _run_transitivity}


def _factor_command(args, body):
    algebra, element, flag, digest = _load_problem(args)
    body["instance"] = instance_to_json(algebra, with_tolerances=True)
    body["input_sha256"] = digest
    result, residual, conds, spectra = RUNNERS[args.command](element, flag)
    body["result"] = result
    body["diagnostics"] = {"residual": residual, "corner_conditions": list(conds),
                           "spectra": spectra}
    return EXIT_OK


def _counterexample(args, body):
    if args.input is not None:
        doc, raw = _read_json(args.input)
        algebra = _resolve_instance(args, doc)
        if "element" not in doc:
            raise ConfigError("witness file needs an 'element'")
        a = element_from_json(doc["element"], algebra)
        digest = _sha256(raw)
    else:
        a = indefinite_witness()
        if args.instance is not None:
            raise ConfigError("--instance needs a witness file (--input)")
        digest = _sha256(_canonical({"builtin": "indefinite-witness"}).encode())
    body["instance"] = instance_to_json(a.algebra, with_tolerances=True)
    body["input_sha256"] = digest
    check = not args.no_witness_check
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonHermitianWarning)
        if args.model == "char":
            r = counterexample_char(a, check_witness=check)
            body["result"] = {"model": "char", "failed": r.failed,
                              "failing_corner": r.failing_corner, "smallest": r.smallest,
                              "one_plus_a2_norm": r.one_plus_a2_norm,
                              "corner_residual": r.corner_residual, "message": r.message}
            body["diagnostics"] = {"residual": r.one_plus_a2_norm, "corner_conditions": [],
                                   "spectra": {"a": complex_list(np.sort_complex(r.spectrum_a))}}
            if r.failed:
                body["error"] = {"type": "CornerNotInvertible", "corner": r.failing_corner,
                                 "message": r.message}
                return EXIT_CORNER
            return EXIT_OK
        r = u11_counterexample(a, check_witness=check)
        body["result"] = {"model": "u11", "member": r.member, "u11_residual": r.residual,
                          "g11_smallest": r.g11_smallest, "omega_member": r.omega_member,
                          "failing_corners": r.failing_corners}
        body["diagnostics"] = {"residual": r.residual, "corner_conditions": [],
                               "spectra": {"a": _spectrum_json(a)}}
        if r.failing_corners:
            corner = r.failing_corners[0]
            body["error"] = {"type": "CornerNotInvertible", "corner": corner,
                             "message": f"corner {corner} of the U(1,1) element is singular"}
            return EXIT_CORNER
        return EXIT_OK


def _propsweep(args, body):
    if args.trials < 1:
        raise ConfigError("--trials must be at least 1")
    report = run_sweep(seed=args.seed, trials=args.trials, threshold=args.tol_residual)
    body["instance"] = None
    body["input_sha256"] = _sha256(_canonical({"seed": args.seed, "trials": args.trials}).encode())
    body["result"] = report
    worst = max((p["max_residual"] for p in report["properties"]), default=0.0)
    body["diagnostics"] = {"residual": worst, "corner_conditions": [], "spectra": {}}
    if not report["ok"]:
        body["error"] = {"type": "SuiteFailure", "message":
                         f"{report['total_failures']} failing samples"}
        return EXIT_SUITE
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="flagfact", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"flagfact {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--instance", help="instance file or shorthand (dense:3, loop:2x64, ...)")
        p.add_argument("--flag", help="flag file or shorthand (standard, standard:k1,k2, trivial)")
        p.add_argument("--input", help="JSON input file")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (env FLAGFACT_SEED)")
        p.add_argument("--trials", type=int, default=200)
        p.add_argument("--tol-residual", type=float, default=None)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        return p

    for name in FACTOR_COMMANDS + ("propsweep",):
        common(sub.add_parser(name))
    cx = common(sub.add_parser("counterexample"))
    cx.add_argument("--model", choices=("char", "u11"), default="char")
    cx.add_argument("--no-witness-check", action="store_true",
                    help="skip the 'i in spectrum' precondition (control runs)")
    return parser


def _seed(args):
    if args.seed is not None:
        seed = args.seed
    else:
        env = os.environ.get("FLAGFACT_SEED")
        try:
            seed = int(env) if env not in (None, "") else 0
        except ValueError as exc:
            raise ConfigError(f"FLAGFACT_SEED is not an integer: {env!r}") from exc
    if not 0 <= seed < 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return seed


def _csv(body):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    result = body.get("result") or {}
    if body["command"] == "propsweep" and "properties" in result:
        cols = ["name", "module", "trials", "failures", "max_residual", "threshold"]
        writer.writerow(cols)
        for p in result["properties"]:
            writer.writerow([p[c] for c in cols])
        return out.getvalue()
    writer.writerow(["key", "value"])
    writer.writerow(["command", body["command"]])
    writer.writerow(["status", body["status"]])
    writer.writerow(["exit_code", body["exit_code"]])
    diag = body.get("diagnostics") or {}
    if "residual" in diag:
        writer.writerow(["residual", diag["residual"]])
    for j, c in enumerate(diag.get("corner_conditions", []), start=1):
        writer.writerow([f"corner_condition_{j}", c])
    for key, value in sorted(result.items()):
        if isinstance(value, (bool, int, float, str)):
            writer.writerow([key, value])
    return out.getvalue()


def _jsonable(obj):
    """Make numpy scalars and non-finite floats JSON-safe (strings for inf/nan)."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if np.isfinite(value) else str(value)
    return obj


def run(argv=None):
    """Execute one command; returns ``(exit_code, report)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_CONFIG
        return (EXIT_OK if code == 0 else EXIT_CONFIG), None
    start = time.perf_counter()
    body = {"command": args.command, "status": "ok", "exit_code": EXIT_OK, "instance": None,
            "input_sha256": None, "seed": None, "result": None,
            "diagnostics": {"residual": None, "corner_conditions": [], "spectra": {}},
            "error": None}
    try:
        args.seed = _seed(args)
        body["seed"] = args.seed
        if args.command in FACTOR_COMMANDS:
            code = _factor_command(args, body)
        elif args.command == "counterexample":
            code = _counterexample(args, body)
        else:
            code = _propsweep(args, body)
    except CornerNotInvertible as exc:
        code = EXIT_CORNER
        body["error"] = {"type": "CornerNotInvertible", "corner": exc.corner,
                         "smallest": exc.smallest, "message": str(exc)}
    except NotPositive as exc:
        code = EXIT_POSITIVE
        body["error"] = {"type": "NotPositive", "message": str(exc)}
    except (ConfigError, BadPartition, BadWitness, FlagFactError, ValueError, KeyError,
            TypeError) as exc:
        code = EXIT_CONFIG
        body["error"] = {"type": type(exc).__name__, "message": str(exc)}
    body["exit_code"] = code
    body["status"] = "ok" if code == EXIT_OK else "error"
    body = _jsonable(body)
    meta = {"version": __version__, "timings": {"total_s": time.perf_counter() - start},
            "body_sha256": _sha256(_canonical(body).encode())}
    report = {"body": body, "meta": meta}
    text = _csv(body) if args.format == "csv" else json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code, report


def main(argv=None):
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
