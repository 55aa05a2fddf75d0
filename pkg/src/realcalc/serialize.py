"""JSON encoding of instances, metrics, connections, witnesses and projections.

Complex scalars are two-element arrays ``[re, im]``; matrices are row-major
nested arrays of those. Real-valued fields (structure constants, ``psi``,
``Mtilde``, ``alphas``) are plain nested numbers.
"""
from __future__ import annotations

import json

import numpy as np

from .calculus import CalculusInstance, FreeCalculusInstance
from .errors import RealCalcError
from .iso_nd import IsoWitness
from .lie_rep import LieAlgebraSpec, MatrixRep
from .metric_conn import AlignedMetric, ConnectionSpec, FreeMetric, ScalarMetric
from .projection import ProjectionSpec


class ParseError(RealCalcError, ValueError):
    """Input JSON does not follow the expected schema."""


def encode_complex(a):
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode_complex(obj, name="value") -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: not a numeric array") from exc
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ParseError(f"{name}: complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def decode_real(obj, name="value") -> np.ndarray:
    try:
        return np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: not a real numeric array") from exc


def _field(obj, key):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"missing field {key!r}")
    return obj[key]


# ---------------------------------------------------------------- representations

def rep_to_json(rep: MatrixRep) -> dict:
    return {
        "dim": rep.n,
        "structure_constants": rep.lie.structure_constants.tolist(),
        "N": rep.N,
        "Dhat": encode_complex(rep.Dhat),
    }


def rep_from_json(obj) -> MatrixRep:
    n = int(_field(obj, "dim"))
    N = int(_field(obj, "N"))
    c = decode_real(_field(obj, "structure_constants"), "structure_constants")
    if c.size == 0:
        c = np.zeros((n, n, n))
    D = decode_complex(_field(obj, "Dhat"), "Dhat")
    if c.shape != (n, n, n) or D.shape != (n, N, N):
        raise ParseError(f"rep shapes {c.shape}, {D.shape} do not match dim={n}, N={N}")
    return MatrixRep(LieAlgebraSpec(n, c), D)


def instance_to_json(c) -> dict:
    if isinstance(c, FreeCalculusInstance):
        return {"rep": rep_to_json(c.rep), "basis_images": encode_complex(c.basis_images)}
    return {"rep": rep_to_json(c.rep), "module_rank": c.m, "phi": encode_complex(c.phi)}


def instance_from_json(obj):
    """A :class:`CalculusInstance`, or a :class:`FreeCalculusInstance` when ``basis_images`` is present."""
    rep = rep_from_json(_field(obj, "rep"))
    if "basis_images" in obj:
        return FreeCalculusInstance(rep, decode_complex(obj["basis_images"], "basis_images"))
    m = int(_field(obj, "module_rank"))
    return CalculusInstance(rep, m, decode_complex(_field(obj, "phi"), "phi"))


# ---------------------------------------------------------------- metrics and connections

def metric_to_json(metric) -> dict:
    if isinstance(metric, ScalarMetric):
        return {"kind": "scalar", "x": metric.x}
    if isinstance(metric, AlignedMetric):
        return {"kind": "aligned", "Mtilde": metric.Mtilde.tolist(),
                "v0": encode_complex(metric.v0), "alphas": metric.alphas.tolist()}
    if isinstance(metric, FreeMetric):
        return {"kind": "free", "hblocks": encode_complex(metric.hblocks)}
    raise TypeError(f"unknown metric type {type(metric).__name__}")


def metric_from_json(obj):
    kind = _field(obj, "kind")
    if kind == "scalar":
        return ScalarMetric(float(_field(obj, "x")))
    if kind == "aligned":
        return AlignedMetric(decode_real(_field(obj, "Mtilde"), "Mtilde"),
                             decode_complex(_field(obj, "v0"), "v0"),
                             decode_real(_field(obj, "alphas"), "alphas"))
    if kind == "free":
        return FreeMetric(decode_complex(_field(obj, "hblocks"), "hblocks"))
    raise ParseError(f"unknown metric kind {kind!r}")


def connection_to_json(conn: ConnectionSpec) -> dict:
    return {"kind": conn.kind, "data": encode_complex(conn.data)}


def connection_from_json(obj) -> ConnectionSpec:
    kind = _field(obj, "kind")
    try:
        return ConnectionSpec(kind, decode_complex(_field(obj, "data"), "data"))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


# ---------------------------------------------------------------- witnesses and projections

def witness_to_json(w: IsoWitness) -> dict:
    return {"U": encode_complex(w.U), "psi": w.psi.tolist(), "X": encode_complex(w.X)}


def witness_from_json(obj) -> IsoWitness:
    return IsoWitness(decode_complex(_field(obj, "U"), "U"),
                      decode_real(_field(obj, "psi"), "psi"),
                      decode_complex(_field(obj, "X"), "X"))


def projection_to_json(P: ProjectionSpec) -> dict:
    return {"pblocks": encode_complex(P.pblocks)}


def projection_from_json(obj) -> ProjectionSpec:
    return ProjectionSpec(decode_complex(_field(obj, "pblocks"), "pblocks"))


def load_json(path):
    """Read a JSON file, turning I/O and syntax problems into :class:`ParseError`."""
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
