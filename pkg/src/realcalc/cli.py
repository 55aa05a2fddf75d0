"""Command-line front end.

Every subcommand prints one JSON report on stdout and a one-line summary on
stderr. Exit codes: 0 pass, 1 fail (or unknown), 2 I/O or parse error,
3 unsupported shape.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .calculus import (CalculusInstance, FreeCalculusInstance, canonical_diag_1d,
                       validate_calculus, validate_free_calculus)
from .classify1d import (anti_selfsimilar, count_classes, enumerate_classes,
                         witness_1d, zero_pattern)
from .errors import RealCalcError, ShapeError, UnsupportedDimensionError
from .iso_nd import (IsoWitness, check_free_isomorphism, check_isomorphism_witness,
                     compatible_pair_residual, phi_residual, search_witness)
from .matrix_core import Tolerance, eig_antihermitian_sorted
from .metric_conn import (AlignedMetric, ConnectionSpec, FreeMetric, ScalarMetric,
                          christoffel_free, eigenvector_residual, koszul_rhs,
                          lc_abelian, lc_exists_1d, verify_pseudo_riemannian)
from .projection import (build_split_realization, free_metric_from_aligned,
                         is_orthogonal_projection, metric_symmetry_condition,
                         restricted_components)
from .serialize import (ParseError, connection_from_json, connection_to_json,
                        encode_complex, instance_from_json, load_json, metric_from_json,
                        metric_to_json, projection_to_json, witness_from_json,
                        witness_to_json)

EXIT_PASS, EXIT_FAIL, EXIT_PARSE, EXIT_UNSUPPORTED = 0, 1, 2, 3


def _report(command, status, residuals=None, artifacts=None, message=""):
    out = {"command": command, "status": status,
           "residuals": {k: float(v) for k, v in (residuals or {}).items()}}
    if artifacts:
        out["artifacts"] = artifacts
    if message:
        out["message"] = message
    return out


def _load(decoder, path):
    obj = load_json(path)
    try:
        return decoder(obj)
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, RealCalcError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _status(ok):
    return "pass" if ok else "fail"


def _metric_or_default(args, space):
    if args.metric:
        return _load(metric_from_json, args.metric)
    if isinstance(space, CalculusInstance) and space.n == 1 and space.m == 1:
        return ScalarMetric(1.0)
    raise ParseError("--metric is required for this instance")


# ---------------------------------------------------------------- subcommands

def cmd_validate(args, tol):
    c = _load(instance_from_json, args.path)
    rep = validate_free_calculus(c, tol) if isinstance(c, FreeCalculusInstance) else validate_calculus(c, tol)
    return _report("validate", _status(rep.ok), rep.residuals(), {"checks": rep.to_dict()["checks"]},
                   "failed: " + ", ".join(rep.failed()) if not rep.ok else "")


def _require_1d(c):
    if not isinstance(c, CalculusInstance) or c.n != 1 or c.m != 1:
        raise UnsupportedDimensionError("this command needs dim g = 1 and module C^N")


def cmd_classify(args, tol):
    c = _load(instance_from_json, args.path)
    _require_1d(c)
    canon = canonical_diag_1d(c, tol)
    spec = eig_antihermitian_sorted(c.rep.Dhat[0], tol)
    anti = anti_selfsimilar(c.rep.Dhat[0], tol)
    pattern = zero_pattern(canon, tol)
    artifacts = {
        "blocks": [{"eigenvalue": encode_complex(lam), "multiplicity": int(mult)}
                   for lam, mult in zip(spec.eigenvalues, spec.multiplicities)],
        "anti_selfsimilar": bool(anti),
        "zero_pattern": list(pattern.bits),
        "representative": list(pattern.representative(anti).bits),
        "classes": count_classes(pattern.k, anti),
    }
    return _report("classify", _status(pattern.is_valid()), {}, artifacts)


def cmd_count(args, tol):
    return _report("count", "pass", {}, {"k": args.k, "anti": args.anti,
                                         "classes": count_classes(args.k, args.anti)})


def cmd_enumerate(args, tol):
    reps = enumerate_classes(args.k, args.anti)
    return _report("enumerate", "pass", {}, {"k": args.k, "anti": args.anti,
                                             "classes": [list(p.bits) for p in reps]})


def cmd_iso(args, tol):
    a = _load(instance_from_json, args.a)
    b = _load(instance_from_json, args.b)
    if type(a) is not type(b) or a.N != b.N or a.n != b.n or getattr(a, "m", 0) != getattr(b, "m", 0):
        raise ShapeError("instances have different shapes")
    free = isinstance(a, FreeCalculusInstance)
    if not free and a.n == 1 and a.m == 1 and not args.witness:
        found = witness_1d(a, b, tol)
        if found is None:
            return _report("iso", "fail", {}, {"method": "exact"})
        U, mu, x = found
        w = IsoWitness(U, [[mu]], [[x]])
        return _report("iso", "pass", {"compatible_pair": compatible_pair_residual(a, b, w.U, w.psi),
                                       "phi": phi_residual(a, b, w)},
                       {"method": "exact", "witness": witness_to_json(w)})
    if args.witness:
        w = _load(witness_from_json, args.witness)
        if free:
            ok = check_free_isomorphism(a, b, w.U, w.psi, tol)
            res = {"compatible_pair": compatible_pair_residual(a, b, w.U, w.psi)}
        else:
            ok = check_isomorphism_witness(a, b, w, tol)
            res = {"compatible_pair": compatible_pair_residual(a, b, w.U, w.psi),
                   "phi": phi_residual(a, b, w)}
        return _report("iso", _status(ok), res, {"method": "witness"})
    if free:
        return _report("iso", "unknown", {}, {"method": "search"},
                       "no search is implemented for free calculi; supply --witness")
    w = search_witness(a, b, budget=args.budget, seed=args.seed, tol=tol)
    if w is None:
        return _report("iso", "unknown", {}, {"method": "search", "budget": args.budget},
                       "search exhausted without finding a witness")
    return _report("iso", "pass", {"phi": phi_residual(a, b, w)},
                   {"method": "search", "witness": witness_to_json(w)})


def _verify(space, metric, conn, tol, seed):
    rep = verify_pseudo_riemannian(space, metric, conn, tol, seed=seed)
    return rep.ok, rep.residuals()


def cmd_levi_civita(args, tol):
    c = _load(instance_from_json, args.path)
    metric = _metric_or_default(args, c)
    if isinstance(c, FreeCalculusInstance):
        if not isinstance(metric, FreeMetric):
            raise UnsupportedDimensionError("free calculi need a free metric")
        conn = christoffel_free(c, metric, tol)
        ok, res = _verify(c, metric, conn, tol, args.seed)
        return _report("levi-civita", _status(ok), res, {"connection": connection_to_json(conn)})
    if c.n == 1 and c.m == 1:
        if not isinstance(metric, ScalarMetric):
            raise UnsupportedDimensionError("C^N needs a scalar metric")
        lam = lc_exists_1d(c, tol)
        if lam is None:
            res = eigenvector_residual(c.phi[0], c.rep.Dhat[0])
            return _report("levi-civita", "fail", {"eigenvector": res},
                           {"diagnosis": "v0 D(1 - p) != 0"},
                           "no Levi-Civita connection: v0 D(1 - p) != 0")
        conn = ConnectionSpec("endomorphism", [[[lam]]])
        ok, res = _verify(c, metric, conn, tol, args.seed)
        return _report("levi-civita", _status(ok), res,
                       {"connection": connection_to_json(conn), "lambda": encode_complex(lam)})
    if not isinstance(metric, AlignedMetric):
        raise UnsupportedDimensionError("(C^N)^n needs an aligned metric")
    conn, eig = lc_abelian(c, metric, tol)
    ok, res = _verify(c, metric, conn, tol, args.seed)
    return _report("levi-civita", _status(ok), res,
                   {"connection": connection_to_json(conn), "eigenvalues": encode_complex(eig)})


def cmd_koszul(args, tol):
    f = _load(instance_from_json, args.path)
    if not isinstance(f, FreeCalculusInstance):
        raise UnsupportedDimensionError("the Koszul formula is solved on free calculi")
    metric = _load(metric_from_json, args.metric)
    if not isinstance(metric, FreeMetric):
        raise UnsupportedDimensionError("free calculi need a free metric")
    n = f.n
    R = np.array([[[koszul_rhs(f, metric, i, j, k) for k in range(n)]
                   for j in range(n)] for i in range(n)])
    conn = christoffel_free(f, metric, tol)
    return _report("koszul", "pass", {}, {"rhs": encode_complex(R), "connection": connection_to_json(conn)})


def cmd_project(args, tol):
    c = _load(instance_from_json, args.path)
    if not isinstance(c, CalculusInstance):
        raise UnsupportedDimensionError("project needs an instance on (C^N)^n")
    split = build_split_realization(c, tol)
    res = {"idempotence": split.P.idempotence_residual()}
    artifacts = {"projection": projection_to_json(split.P), "v0": encode_complex(split.v0),
                 "alphas": split.alphas.tolist()}
    ok = res["idempotence"] <= tol.threshold(split.P.pblocks)
    if args.metric:
        metric = _load(metric_from_json, args.metric)
        h = free_metric_from_aligned(split, c, metric, tol)
        orth = is_orthogonal_projection(split.P, h, tol)
        sym = metric_symmetry_condition(split.P, h, tol)
        artifacts.update(free_metric=metric_to_json(h), orthogonal=bool(orth), symmetric=bool(sym),
                         restricted=encode_complex(restricted_components(split.P, h)))
        ok = ok and orth and sym
    return _report("project", _status(ok), res, artifacts)


def cmd_verify(args, tol):
    c = _load(instance_from_json, args.path)
    metric = _metric_or_default(args, c)
    conn = _load(connection_from_json, args.connection)
    ok, res = _verify(c, metric, conn, tol, args.seed)
    return _report("verify", _status(ok), res)


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="realcalc", description="Real calculi over Mat(N).")
    parser.add_argument("--tol", type=float, default=1e-9, help="absolute tolerance eps")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    parser.add_argument("--json-only", action="store_true", help="suppress the stderr summary")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate an instance")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", help="classify a 1-d instance")
    p.add_argument("path")
    p.set_defaults(func=cmd_classify)

    for name, func in (("count", cmd_count), ("enumerate", cmd_enumerate)):
        p = sub.add_parser(name, help=f"{name} isomorphism classes for k eigenblocks")
        p.add_argument("k", type=int)
        p.add_argument("--anti", action="store_true", help="spectrum is anti-selfsimilar")
        p.set_defaults(func=func)

    p = sub.add_parser("iso", help="decide or verify an isomorphism")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--witness", help="witness JSON to verify")
    p.add_argument("--budget", type=int, default=64, help="search budget")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("levi-civita", help="construct the Levi-Civita connection")
    p.add_argument("path")
    p.add_argument("--metric")
    p.set_defaults(func=cmd_levi_civita)

    p = sub.add_parser("koszul", help="Koszul right-hand sides and Christoffel symbols")
    p.add_argument("path")
    p.add_argument("--metric", required=True)
    p.set_defaults(func=cmd_koszul)

    p = sub.add_parser("project", help="realize an instance as a projection of a free calculus")
    p.add_argument("path")
    p.add_argument("--metric")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("verify", help="check a connection for metric compatibility and torsion")
    p.add_argument("path")
    p.add_argument("--metric")
    p.add_argument("--connection", required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def _emit(report, json_only):
    print(json.dumps(report, indent=2))
    if not json_only:
        line = f"{report['command']}: {report['status']}"
        if report.get("message"):
            line += f" ({report['message']})"
        print(line, file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol <= 0:
        parser.error("--tol must be positive")
    tol = Tolerance(args.tol)
    try:
        report = args.func(args, tol)
        code = EXIT_PASS if report["status"] == "pass" else EXIT_FAIL
    except ParseError as exc:
        report, code = _report(args.command, "error", message=str(exc)), EXIT_PARSE
    except (UnsupportedDimensionError, ShapeError) as exc:
        report, code = _report(args.command, "error", message=str(exc)), EXIT_UNSUPPORTED
    except RealCalcError as exc:
        report, code = _report(args.command, "fail", message=f"{type(exc).__name__}: {exc}"), EXIT_FAIL
    _emit(report, args.json_only)
    return code


if __name__ == "__main__":
    sys.exit(main())
