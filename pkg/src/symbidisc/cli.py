"""Command-line front end.

Every command reads a JSON payload (``--input``, default stdin) and writes one
JSON document to stdout or ``--out``. Exit status: 0 success, 2 verification
failure, 1 input error (an error document goes to stderr).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

import jsonschema
import numpy as np
from referencing import Registry, Resource
from referencing.jsonschema import DRAFT202012

from . import caratheodory as car
from .extremals import pb_extremal, pb_frame, royal_extremal
from .functions import GFunction, constant
from .gdomain import DomainError, SymPoint, Tangent
from .mobius import MobiusMap
from .realization import (
    Colligation,
    lft_identity_sweep,
    random_colligation,
    random_unitary_colligation,
    schur_from_colligation,
)

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2
LFT_TOL = 1e-11
TOL_NAMES = ("constancy", "cluster", "angle", "extremality")
ENV_PREFIX = "SYMB_"


class InputError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# -- schemas ---------------------------------------------------------------

def _load_schemas() -> dict:
    out = {}
    for f in resources.files("symbidisc.schemas").iterdir():
        if f.name.endswith(".json"):
            out[f.name] = json.loads(f.read_text())
    return out


_SCHEMAS = _load_schemas()
_REGISTRY = Registry().with_resources((name, Resource.from_contents(doc, default_specification=DRAFT202012)) for name, doc in _SCHEMAS.items())


def schema_validator(name: str) -> jsonschema.Draft202012Validator:
    return jsonschema.Draft202012Validator(_SCHEMAS[name], registry=_REGISTRY)


def _validate(doc, name: str):
    err = jsonschema.exceptions.best_match(schema_validator(name).iter_errors(doc))
    if err is not None:
        where = "/".join(str(x) for x in err.absolute_path) or "<root>"
        raise InputError("schema_violation", f"{where}: {err.message}")


# -- encoding --------------------------------------------------------------

def cpx(doc) -> complex:
    return complex(doc[0], doc[1])


def enc(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def parse_point(doc: dict) -> SymPoint:
    try:
        return SymPoint(cpx(doc["s"]), cpx(doc["p"]))
    except DomainError as exc:
        raise InputError("point_not_in_G", str(exc)) from None


def parse_tangent(doc: dict) -> Tangent:
    _validate(doc, "input.tangent.json")
    t = Tangent(parse_point(doc["lambda"]), (cpx(doc["v"][0]), cpx(doc["v"][1])))
    if t.degenerate:
        raise InputError("degenerate_tangent", "degenerate tangent: v = (0, 0)")
    return t


def _psi(doc) -> GFunction:
    if doc is None:
        return constant(0)
    try:
        return schur_from_colligation(Colligation.from_json(doc))
    except ValueError as exc:
        raise InputError("invalid_input", f"psi: {exc}") from None


def build_function(doc: dict, tol: car.Tolerances) -> GFunction:
    psi = _psi(doc.get("psi"))
    if doc["family"] == "royal":
        m = MobiusMap.from_json(doc["m"]) if "m" in doc else MobiusMap.identity()
        return royal_extremal(m, psi)
    if "tangent" not in doc:
        raise InputError("schema_violation", "pb family needs a 'tangent'")
    frame = pb_frame(parse_tangent(doc["tangent"]), tol)
    return pb_extremal(frame, doc.get("r", 0.5), psi)


# -- commands --------------------------------------------------------------

def cmd_metric(payload, args, tol):
    return {"c": car.metric(parse_tangent(payload), tol)}, EXIT_OK


def cmd_distance(payload, args, tol):
    _validate(payload, "input.distance.json")
    return {"distance": car.distance(parse_point(payload["lambda"]), parse_point(payload["mu"]), tol)}, EXIT_OK


def cmd_extremal_set(payload, args, tol):
    delta = parse_tangent(payload)
    es = car.extremal_set(delta, tol)
    if args.profile:
        theta, f = car.profile_grid(delta, tol.grid)
        with open(args.profile, "w") as fh:
            fh.write("theta,pushforward_metric\n")
            for t, v in zip(theta, f):
                fh.write(f"{t:.17g},{v:.17g}\n")
    return es.to_json(), EXIT_OK


def cmd_classify(payload, args, tol):
    tc = car.classify(parse_tangent(payload), tol)
    doc = {"tag": tc.tag, "extremal_set": tc.extremal.to_json()}
    pr = tc.params
    for key in ("z", "c", "beta", "omega"):
        if key in pr:
            doc[key] = enc(pr[key])
    if "m" in pr:
        doc["mobius"] = pr["m"].to_json()
        doc["fixed_points"] = [enc(t) for t in pr["fixed_points"]]
    return doc, EXIT_OK


def _eval_points(raw: str | None) -> list[SymPoint]:
    if raw is None:
        return []
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError("malformed_json", f"--eval-at: {exc}") from None
    docs = doc if isinstance(doc, list) else [doc]
    return [parse_point(d) for d in docs]


def cmd_construct(payload, args, tol):
    _validate(payload, "input.construct.json")
    F = build_function(payload, tol)
    pts = _eval_points(args.eval_at)
    values = [enc(F(q.s, q.p)) for q in pts]
    doc = {k: v for k, v in (F.params or {}).items() if k in ("family", "m", "r", "omegas", "psi")}
    doc["psi"] = payload.get("psi")
    doc["values"] = values
    return doc, EXIT_OK


def cmd_verify(payload, args, tol):
    _validate(payload, "input.verify.json")
    F = build_function(payload["function"], tol)
    delta = parse_tangent(payload["tangent"])
    rep = car.verify_extremal(F, delta, seed=args.seed, n=payload.get("n", 10_000), tol=tol)
    return rep.to_json(), EXIT_OK if rep.passed else EXIT_FAIL


def cmd_sample_schur(payload, args, tol):
    payload = payload or {}
    _validate(payload, "input.sample-schur.json")
    n = payload.get("n", 2)
    if payload.get("unitary", False):
        col = random_unitary_colligation(args.seed, n)
    else:
        col = random_colligation(args.seed, n, payload.get("strictness", 0.9))
    return col.to_json(), EXIT_OK


def cmd_lft_check(payload, args, tol):
    res = lft_identity_sweep(args.trials, args.seed)
    ok = res < LFT_TOL
    return {"max_residual": res, "trials": args.trials, "pass": ok}, EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "classify": (cmd_classify, True),
    "metric": (cmd_metric, True),
    "distance": (cmd_distance, True),
    "extremal-set": (cmd_extremal_set, True),
    "construct": (cmd_construct, True),
    "verify": (cmd_verify, True),
    "sample-schur": (cmd_sample_schur, False),
    "lft-check": (cmd_lft_check, False),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symbidisc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--input", "-i", default=None, help="JSON payload file ('-' for stdin)")
        sp.add_argument("--out", "-o", default=None, help="write the result here instead of stdout")
        sp.add_argument("--seed", type=int, default=None)
        for t in TOL_NAMES:
            sp.add_argument(f"--tol-{t}", type=float, default=None, dest=f"tol_{t}")
        if name == "extremal-set":
            sp.add_argument("--profile", default=None, help="CSV file for the (theta, f(theta)) profile")
        if name == "construct":
            sp.add_argument("--eval-at", default=None, help='JSON point or list, e.g. \'{"s":[0,0],"p":[0,0]}\'')
        if name == "lft-check":
            sp.add_argument("--trials", type=int, default=100)
    return parser


def _tolerances(args) -> car.Tolerances:
    kw = {}
    for t in TOL_NAMES:
        val = getattr(args, f"tol_{t}")
        if val is None and f"{ENV_PREFIX}TOL_{t.upper()}" in os.environ:
            val = float(os.environ[f"{ENV_PREFIX}TOL_{t.upper()}"])
        kw[t] = val
    return car.DEFAULT_TOL.override(**kw)


def _read_payload(args, required: bool):
    src = args.input if args.input is not None else ("-" if required else None)
    if src is None:
        return None
    text = sys.stdin.read() if src == "-" else open(src).read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("malformed_json", str(exc)) from None


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def dumps(doc) -> str:
    return json.dumps(_plain(doc), sort_keys=True, indent=2) + "\n"


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is None:
        args.seed = int(os.environ.get(f"{ENV_PREFIX}SEED", 0))
    func, needs_payload = COMMANDS[args.command]
    try:
        tol = _tolerances(args)
        payload = _read_payload(args, needs_payload)
        doc, status = func(payload, args, tol)
    except InputError as exc:
        sys.stderr.write(dumps({"error": {"code": exc.code, "message": str(exc)}}))
        return EXIT_INPUT
    except (car.ClassificationError, car.TrichotomyError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(dumps({"error": {"code": "numerical_failure", "message": str(exc)}}))
        return EXIT_INPUT
    except (ValueError, DomainError) as exc:
        sys.stderr.write(dumps({"error": {"code": "invalid_input", "message": str(exc)}}))
        return EXIT_INPUT
    text = dumps(doc)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
