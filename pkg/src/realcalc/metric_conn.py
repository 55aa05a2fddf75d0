"""Metrics, affine connections and Levi-Civita connections.

Two kinds of modules are supported:

* ``(C^N)^m`` (a :class:`~realcalc.calculus.CalculusInstance`). Every affine
  connection there has the form ``nabla_i v = v (K_i kron 1) - v . Dhat_i``
  for complex ``m x m`` matrices ``K_i``; the closed-form Levi-Civita
  connections are of this type with ``K_i`` scalar.
* the free module ``Mat(N)^n`` (a :class:`~realcalc.calculus.FreeCalculusInstance`),
  where connections are given by Christoffel symbols relative to the basis
  ``e_i = phi(d_i)``.

Index convention for connection data: ``data[i, j, k]`` is the coefficient of
``e_k`` in ``nabla_i e_j`` (the Christoffel symbol ``Gamma^k_ij``).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calculus import CalculusInstance, FreeCalculusInstance
from .errors import (DegenerateError, InvalidMetricError, NoLeviCivitaError, ShapeError,
                     SingularMetricError, UnsupportedDimensionError)
from .lie_rep import ValidationReport
from .matrix_core import as_square, as_tolerance, dagger, max_abs, unit


# ---------------------------------------------------------------- metrics

@dataclass(frozen=True)
class ScalarMetric:
    """``h_x(u, v) = x u^H v`` on ``C^N``."""

    x: float

    def __post_init__(self):
        if not np.isfinite(self.x) or self.x == 0:
            raise DegenerateError("scalar metric needs a nonzero real x")
        object.__setattr__(self, "x", float(self.x))


@dataclass(frozen=True)
class AlignedMetric:
    """Metric on ``(C^N)^n`` with ``h(e_i, e_j) = Mtilde[i, j] v0^H v0``.

    Here ``e_i = (0, .., alphas[i] v0, .., 0)`` are the aligned anchors.
    """

    Mtilde: np.ndarray = field(repr=False)
    v0: np.ndarray = field(repr=False)
    alphas: np.ndarray = field(repr=False)

    def __post_init__(self):
        M = np.asarray(self.Mtilde)
        if np.iscomplexobj(M):
            if np.any(M.imag != 0):
                raise InvalidMetricError("Mtilde must be real")
            M = M.real
        M = np.atleast_2d(M.astype(float))
        v0 = np.asarray(self.v0, dtype=complex).reshape(-1)
        alphas = np.asarray(self.alphas, dtype=float).reshape(-1)
        n = M.shape[0]
        if M.shape != (n, n) or alphas.shape != (n,):
            raise ShapeError("Mtilde must be n x n and alphas of length n")
        object.__setattr__(self, "Mtilde", M)
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "alphas", alphas)

    @property
    def n(self) -> int:
        return self.Mtilde.shape[0]

    def slot_gram(self) -> np.ndarray:
        return self.Mtilde / np.outer(self.alphas, self.alphas)


@dataclass(frozen=True)
class FreeMetric:
    """Metric on ``Mat(N)^n`` given by ``hblocks[i, j] = h(e_i, e_j)``."""

    hblocks: np.ndarray = field(repr=False)

    def __post_init__(self):
        h = np.array(self.hblocks, dtype=complex)
        if h.ndim != 4 or h.shape[0] != h.shape[1] or h.shape[2] != h.shape[3]:
            raise ShapeError(f"hblocks must have shape (n, n, N, N), got {h.shape}")
        object.__setattr__(self, "hblocks", h)

    @property
    def n(self) -> int:
        return self.hblocks.shape[0]

    @property
    def N(self) -> int:
        return self.hblocks.shape[2]

    def block_matrix(self) -> np.ndarray:
        n, N = self.n, self.N
        return np.transpose(self.hblocks, (0, 2, 1, 3)).reshape(n * N, n * N)

    def inverse_blocks(self) -> np.ndarray:
        n, N = self.n, self.N
        inv = np.linalg.inv(self.block_matrix())
        return np.transpose(inv.reshape(n, N, n, N), (0, 2, 1, 3))


def eval_scalar_metric(h: ScalarMetric, u, v) -> np.ndarray:
    u = np.asarray(u, dtype=complex).reshape(-1)
    v = np.asarray(v, dtype=complex).reshape(-1)
    if u.shape != v.shape:
        raise ShapeError(f"vectors of length {u.size} and {v.size}")
    return h.x * np.outer(u.conj(), v)


def validate_metric_on_CN(H, tol=None) -> float:
    """Recover ``x`` from ``H = h(e_1, e_1)``; a metric on ``C^N`` forces ``H = x E_11``."""
    tol = as_tolerance(tol)
    H = as_square(H, "H")
    x = H[0, 0]
    thr = tol.threshold(H)
    rest = H - x * unit(H.shape[0], 0, 0)
    if max_abs(rest) > thr:
        raise InvalidMetricError("h(e_1, e_1) must be a multiple of E_11")
    if abs(x) <= thr:
        raise DegenerateError("h(e_1, e_1) = 0 gives the zero form")
    if abs(x.imag) > thr:
        raise DegenerateError("h(e_1, e_1) must be real")
    return float(x.real)


def validate_metric(metric, tol=None) -> ValidationReport:
    tol = as_tolerance(tol)
    r = ValidationReport()
    if isinstance(metric, ScalarMetric):
        r.add("nonzero", metric.x != 0, abs(metric.x))
    elif isinstance(metric, AlignedMetric):
        M = metric.Mtilde
        r.add("symmetric", max_abs(M - M.T) <= tol.threshold(M), max_abs(M - M.T))
        s = np.linalg.svd(M, compute_uv=False)
        r.add("invertible", s.min() > tol.threshold(M), float(s.min()))
        norm = float(np.linalg.norm(metric.v0))
        r.add("unit_anchor", abs(norm - 1) <= tol.eps, abs(norm - 1))
        r.add("alphas_nonzero", bool(np.all(metric.alphas != 0)), float(np.min(np.abs(metric.alphas))))
    elif isinstance(metric, FreeMetric):
        h = metric.hblocks
        h3 = max_abs(h - dagger(np.transpose(h, (1, 0, 2, 3))))
        r.add("h3", h3 <= tol.threshold(h), h3)
        s = np.linalg.svd(metric.block_matrix(), compute_uv=False)
        r.add("invertible", s.min() > tol.threshold(h), float(s.min()))
    else:
        raise TypeError(f"unknown metric type {type(metric).__name__}")
    return r


# ---------------------------------------------------------------- anchors

def projector(v0) -> np.ndarray:
    """``v0^H v0 / |v0|^2``."""
    v0 = np.asarray(v0, dtype=complex).reshape(-1)
    nrm = float(np.vdot(v0, v0).real)
    if nrm == 0:
        raise DegenerateError("anchor vector is zero")
    return np.outer(v0.conj(), v0) / nrm


def aligned_anchors(c: CalculusInstance, tol=None):
    """Return ``(v0, alphas)`` with ``phi(d_i) = alphas[i] v0`` in slot ``i`` and zero elsewhere."""
    tol = as_tolerance(tol)
    if c.m != c.n:
        raise UnsupportedDimensionError("aligned anchors need module (C^N)^n with n = dim g")
    slots = c.phi.reshape(c.n, c.m, c.N)
    thr = tol.threshold(c.phi)
    v0 = slots[0, 0]
    nrm = float(np.linalg.norm(v0))
    if nrm <= thr:
        raise UnsupportedDimensionError("phi(d_1) has no component in slot 1")
    v0 = v0 / nrm
    alphas = []
    for i in range(c.n):
        off = slots[i].copy()
        off[i] = 0
        a = complex(np.vdot(v0, slots[i, i]))
        if max_abs(off) > thr or abs(a.imag) > thr or max_abs(slots[i, i] - a * v0) > thr:
            raise UnsupportedDimensionError(f"phi(d_{i + 1}) is not aligned with the anchor")
        alphas.append(a.real)
    return v0, np.array(alphas)


def _matching_anchors(c, metric: AlignedMetric, tol):
    v0, alphas = aligned_anchors(c, tol)
    if metric.n != c.n:
        raise ShapeError(f"metric has n={metric.n}, calculus n={c.n}")
    expected = np.zeros((c.n, c.m, c.N), dtype=complex)
    for i in range(c.n):
        expected[i, i] = metric.alphas[i] * metric.v0
    if max_abs(c.phi.reshape(expected.shape) - expected) > tol.threshold(c.phi):
        raise UnsupportedDimensionError("metric anchors do not match phi")
    return metric.v0, metric.alphas


def slot_gram(c: CalculusInstance, metric, tol=None) -> np.ndarray:
    """Hermitian ``m x m`` matrix ``g`` with ``h(u, v) = sum_ab g_ab u_a^H v_b``."""
    tol = as_tolerance(tol)
    if isinstance(metric, ScalarMetric):
        if c.m != 1:
            raise ShapeError("a scalar metric lives on C^N (module rank 1)")
        return np.array([[metric.x]], dtype=complex)
    if isinstance(metric, AlignedMetric):
        _matching_anchors(c, metric, tol)
        return metric.slot_gram().astype(complex)
    raise ShapeError(f"{type(metric).__name__} does not apply to (C^N)^m")


# ---------------------------------------------------------------- geometry adapters

class Geometry:
    """Module, metric and derivations in the form the verifier needs."""

    n: int
    structure_constants: np.ndarray

    def generators(self):
        raise NotImplementedError

    def inner(self, u, v) -> np.ndarray:
        raise NotImplementedError

    def derivation(self, i, a) -> np.ndarray:
        raise NotImplementedError

    def act(self, v, a):
        raise NotImplementedError

    def random_element(self, rng):
        raise NotImplementedError

    def random_scalar(self, rng) -> np.ndarray:
        N = self.N
        return rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))

    def apply(self, conn, i, v):
        raise NotImplementedError

    def bracket_image(self, i, j):
        gens = self.generators()
        c = self.structure_constants[i, j]
        return sum(c[k] * gens[k] for k in range(self.n))


class ProjectiveGeometry(Geometry):
    def __init__(self, c: CalculusInstance, gram):
        self.c = c
        self.gram = np.asarray(gram, dtype=complex)
        self.n = c.n
        self.N = c.N
        self.structure_constants = c.rep.lie.structure_constants

    def generators(self):
        return list(self.c.phi)

    def inner(self, u, v):
        us = np.asarray(u).reshape(self.c.m, self.N)
        vs = np.asarray(v).reshape(self.c.m, self.N)
        return np.einsum("ab,ai,bj->ij", self.gram, us.conj(), vs)

    def derivation(self, i, a):
        return self.c.rep.derivation(i, a)

    def act(self, v, a):
        return (np.asarray(v).reshape(-1, self.N) @ a).reshape(-1)

    def random_element(self, rng):
        size = self.c.m * self.N
        return rng.standard_normal(size) + 1j * rng.standard_normal(size)

    def apply(self, conn, i, v):
        if isinstance(conn, ConnectionSpec):
            return _apply_projective(self.c, conn, i, v)
        return conn(v, i)


class FreeGeometry(Geometry):
    def __init__(self, f: FreeCalculusInstance, metric: FreeMetric):
        if metric.n != f.n or metric.N != f.N:
            raise ShapeError("metric shape does not match the free calculus")
        self.f = f
        self.h = metric.hblocks
        self.n = f.n
        self.N = f.N
        self.structure_constants = f.rep.lie.structure_constants

    def generators(self):
        return list(self.f.basis_images)

    def coordinates(self, m):
        return self.f.coordinates(m)

    def inner(self, u, v):
        a = self.coordinates(u)
        b = self.coordinates(v)
        return np.einsum("iba,ijbc,jcd->ad", a.conj(), self.h, b)

    def derivation(self, i, a):
        return self.f.rep.derivation(i, a)

    def act(self, v, a):
        return np.asarray(v) @ a

    def random_element(self, rng):
        shape = (self.n, self.N, self.N)
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    def apply(self, conn, i, v):
        if isinstance(conn, ConnectionSpec):
            if conn.kind != "christoffel":
                raise ShapeError(f"{conn.kind} connections do not act on the free module")
            a = self.coordinates(v)
            gamma = conn.data[i]  # (j, k, N, N)
            new = np.einsum("jkab,jbc->kac", gamma, a)
            new = new + np.array([self.derivation(i, x) for x in a])
            return self.f.element(new)
        return conn(v, i)


def geometry(space, metric, tol=None) -> Geometry:
    if isinstance(space, Geometry):
        return space
    if isinstance(space, FreeCalculusInstance):
        if not isinstance(metric, FreeMetric):
            raise ShapeError("free calculi need a FreeMetric")
        return FreeGeometry(space, metric)
    if isinstance(space, CalculusInstance):
        return ProjectiveGeometry(space, slot_gram(space, metric, tol))
    raise TypeError(f"unsupported space {type(space).__name__}")


# ---------------------------------------------------------------- connections

CONNECTION_KINDS = ("lambda_scalar", "lambda_tensor", "christoffel", "endomorphism")


@dataclass(frozen=True)
class ConnectionSpec:
    """Connection data of one of four shapes.

    ``lambda_scalar``
        ``data`` is the complex ``lambda`` of ``nabla v0 = v0 (lambda 1 + d(p))`` on ``C^N``.
    ``lambda_tensor``
        ``data[i, j, k]`` with ``nabla_i e_j = e_k data[i, j, k]`` for aligned anchors.
    ``christoffel``
        ``data[i, j, k]`` is the ``N x N`` symbol ``Gamma^k_ij`` on the free module.
    ``endomorphism``
        ``data[i]`` is ``K_i`` with ``nabla_i v = v (K_i kron 1) - v . Dhat_i``.
    """

    kind: str
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in CONNECTION_KINDS:
            raise ValueError(f"unknown connection kind {self.kind!r}")
        object.__setattr__(self, "data", np.asarray(self.data, dtype=complex))

    def bind(self, space):
        """Callable ``nabla(v, i=0)`` on the module of ``space``."""
        geo = _bare_geometry(space)

        def nabla(v, i=0):
            return geo.apply(self, i, v)

        return nabla


def _bare_geometry(space):
    if isinstance(space, Geometry):
        return space
    if isinstance(space, FreeCalculusInstance):
        n, N = space.n, space.N
        eye = np.broadcast_to(np.eye(N), (n, N, N))
        return FreeGeometry(space, FreeMetric(np.einsum("ij,iab->ijab", np.eye(n), eye)))
    return ProjectiveGeometry(space, np.eye(space.m))


def _apply_projective(c: CalculusInstance, conn: ConnectionSpec, i, v):
    v = np.asarray(v, dtype=complex).reshape(-1)
    D = c.rep.Dhat[i]
    if conn.kind == "endomorphism":
        K = conn.data[i]
        return v @ np.kron(K, np.eye(c.N)) - (v.reshape(c.m, c.N) @ D).reshape(-1)
    if conn.kind == "lambda_scalar":
        if c.n != 1 or c.m != 1:
            raise UnsupportedDimensionError("lambda_scalar connections live on C^N with dim g = 1")
        return connection_on_CN(c, complex(conn.data), v)
    if conn.kind == "lambda_tensor":
        v0, alphas = aligned_anchors(c)
        slots = v.reshape(c.m, c.N)
        # v = sum_k e_k B^k with B^k = v0^H v_k / alpha_k
        B = np.einsum("a,kb->kab", v0.conj(), slots) / alphas[:, None, None]
        lam = conn.data[i]  # (j, k)
        coeff = np.einsum("jk,jab->kab", lam, B) + np.array([D @ b - b @ D for b in B])
        out = alphas[:, None] * np.einsum("a,kab->kb", v0, coeff)
        return out.reshape(-1)
    raise ShapeError(f"{conn.kind} connections do not act on (C^N)^m")


def connection_on_CN(c: CalculusInstance, lam, v) -> np.ndarray:
    """Evaluate ``nabla v`` for ``nabla v0 = v0 (lam 1 + d(p))`` extended by Leibniz."""
    if c.n != 1 or c.m != 1:
        raise UnsupportedDimensionError("connection_on_CN needs dim g = 1 and module C^N")
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != c.N:
        raise ShapeError(f"vector of length {v.size} is not in C^{c.N}")
    D = c.rep.Dhat[0]
    v0 = c.phi[0]
    p = projector(v0)
    nabla_v0 = v0 @ (lam * np.eye(c.N) + D @ p - p @ D)
    B = np.outer(v0.conj(), v) / float(np.vdot(v0, v0).real)
    return nabla_v0 @ B + v0 @ (D @ B - B @ D)


def eigenvector_residual(v0, D) -> float:
    """``|| v0 D (1 - p) ||``, zero exactly when ``v0`` is a left eigenvector of ``D``."""
    v0 = np.asarray(v0, dtype=complex).reshape(-1)
    p = projector(v0)
    return float(np.linalg.norm(v0 @ D @ (np.eye(len(v0)) - p)))


def _eigenvalue(v0, D, tol):
    lam = complex(v0 @ D @ v0.conj() / np.vdot(v0, v0).real)
    if abs(lam.real) > tol.threshold(D):
        raise ShapeError("eigenvalue of an anti-hermitian matrix has a real part")
    return complex(0.0, lam.imag)


def lc_exists_1d(c: CalculusInstance, tol=None):
    """Eigenvalue of ``Dhat`` at ``v0 = phi(d)`` when ``v0`` is an eigenvector, else ``None``."""
    tol = as_tolerance(tol)
    if c.n != 1 or c.m != 1:
        raise UnsupportedDimensionError("lc_exists_1d needs dim g = 1 and module C^N")
    v0 = c.phi[0]
    D = c.rep.Dhat[0]
    if np.linalg.norm(v0) == 0:
        raise DegenerateError("phi(d) = 0 does not generate C^N")
    res = eigenvector_residual(v0, D)
    if res > tol.threshold(D) * max(1.0, float(np.linalg.norm(v0))):
        return None
    return _eigenvalue(v0, D, tol)


def lc_connection_1d(c: CalculusInstance, tol=None):
    """Levi-Civita connection ``nabla v = lam v - v Dhat`` as a callable ``nabla(v)``.

    Raises
    ------
    NoLeviCivitaError
        If ``v0 Dhat (1 - p) != 0``, i.e. ``v0`` is not an eigenvector.
    """
    lam = lc_exists_1d(c, tol)
    if lam is None:
        raise NoLeviCivitaError("v0 D(1 - p) != 0: phi(d) is not an eigenvector of Dhat(d)")
    return ConnectionSpec("endomorphism", [[[lam]]]).bind(c)


def lc_abelian(c: CalculusInstance, metric: AlignedMetric, tol=None):
    """Levi-Civita connection for abelian ``g`` with aligned anchors.

    The coefficients ``lambda^k_ij`` are obtained from the Koszul formula on
    the anchors; they vanish whenever ``v0`` is a common eigenvector. Returns
    the ``lambda_tensor`` connection and the eigenvalues ``lambda_i`` of the
    closed form ``nabla_i v = lambda_i v - v . Dhat_i``.
    """
    tol = as_tolerance(tol)
    if not c.rep.lie.abelian():
        raise UnsupportedDimensionError("lc_abelian needs an abelian Lie algebra")
    report = validate_metric(metric, tol)
    if not report.ok:
        raise InvalidMetricError(f"invalid metric: {', '.join(report.failed())}")
    v0, alphas = _matching_anchors(c, metric, tol)
    eig = []
    for i, D in enumerate(c.rep.Dhat):
        if eigenvector_residual(v0, D) > tol.threshold(D):
            raise NoLeviCivitaError(f"v0 is not an eigenvector of Dhat(d_{i + 1})")
        eig.append(_eigenvalue(v0, D, tol))

    n = c.n
    p = projector(v0)
    M = metric.Mtilde
    # Koszul right-hand side on anchors: brackets vanish, d_i h(e_j, e_k) = M_jk d_i(p)
    dp = np.array([D @ p - p @ D for D in c.rep.Dhat])
    rhs = (np.einsum("jk,iab->ijkab", M, dp) + np.einsum("ik,jab->ijkab", M, dp)
           - np.einsum("ij,kab->ijkab", M, dp))
    scal = np.einsum("a,ijkab,b->ijk", v0, rhs, v0.conj())
    # 2 sum_l M_lk conj(lambda^l_ij) = scal_ijk
    lam = np.conj(np.einsum("ijk,kl->ijl", scal / 2, np.linalg.inv(M)))
    return ConnectionSpec("lambda_tensor", lam), np.array(eig)


def abelian_closed_form(c: CalculusInstance, eigenvalues):
    """``nabla_i v = lambda_i v - v . Dhat_i`` as an endomorphism-type connection."""
    K = np.array([lam * np.eye(c.m) for lam in eigenvalues])
    return ConnectionSpec("endomorphism", K)


# ---------------------------------------------------------------- real metric calculi

def is_real_metric_calculus(space, metric, tol=None) -> bool:
    tol = as_tolerance(tol)
    if not validate_metric(metric, tol).ok:
        return False
    geo = geometry(space, metric, tol)
    gens = geo.generators()
    for u in gens:
        for v in gens:
            h = geo.inner(u, v)
            if max_abs(h - dagger(h)) > tol.threshold(h):
                return False
    return True


def koszul_rhs(f: FreeCalculusInstance, h: FreeMetric, i, j, k) -> np.ndarray:
    """Right-hand side of the Koszul formula for ``(d_i, d_j, d_k)`` on the free module."""
    n = f.n
    for idx in (i, j, k):
        if not 0 <= idx < n:
            raise IndexError(f"index {idx} out of range for dim g = {n}")
    hb = h.hblocks
    c = f.rep.lie.structure_constants
    d = f.rep.derivation
    out = d(i, hb[j, k]) + d(j, hb[i, k]) - d(k, hb[i, j])
    out = out - np.einsum("l,lab->ab", c[j, k], hb[i])
    out = out + np.einsum("l,lab->ab", c[k, i], hb[j])
    out = out + np.einsum("l,lab->ab", c[i, j], hb[k])
    return out


def christoffel_free(f: FreeCalculusInstance, h: FreeMetric, tol=None) -> ConnectionSpec:
    """Levi-Civita Christoffel symbols of a free real metric calculus.

    Solves ``sum_l (Gamma^l_ij)^H h_lk = koszul_rhs(i, j, k) / 2`` with the
    inverse of the ``(N n) x (N n)`` block matrix of ``h``.
    """
    tol = as_tolerance(tol)
    if h.n != f.n or h.N != f.N:
        raise ShapeError("metric shape does not match the free calculus")
    s = np.linalg.svd(h.block_matrix(), compute_uv=False)
    if s.min() <= tol.threshold(h.hblocks):
        raise SingularMetricError("metric block matrix is not invertible")
    if not is_real_metric_calculus(f, h, tol):
        raise InvalidMetricError("(calculus, metric) is not a real metric calculus")
    n = f.n
    hinv = h.inverse_blocks()
    R = np.array([[[koszul_rhs(f, h, i, j, k) for k in range(n)]
                   for j in range(n)] for i in range(n)])
    # Gamma^l_ij = sum_k hinv[l, k] (R_ijk / 2)^H
    gamma = np.einsum("lkab,ijkbc->ijlac", hinv, dagger(R) / 2)
    return ConnectionSpec("christoffel", gamma)


# ---------------------------------------------------------------- verification

def verify_pseudo_riemannian(space, metric, conn, tol=None, seed=0, samples=16) -> ValidationReport:
    """Residuals of the real-connection symmetry, metric and torsion conditions.

    ``conn`` is a :class:`ConnectionSpec` or a callable ``nabla(v, i)``.
    Metric compatibility is checked on generator pairs and on ``samples``
    seeded random pairs of module elements.
    """
    tol = as_tolerance(tol)
    geo = geometry(space, metric, tol)
    rng = np.random.default_rng(seed)
    gens = geo.generators()
    n = geo.n

    nab = [[geo.apply(conn, i, g) for g in gens] for i in range(n)]

    sym = 0.0
    scale = 0.0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                s = geo.inner(nab[i][j], gens[k])
                sym = max(sym, max_abs(s - dagger(s)))
                scale = max(scale, max_abs(s))
    report = ValidationReport()
    report.add("symmetry", sym <= tol.eps * max(1.0, scale), sym)

    def metric_residual(u, v, i, nu, nv):
        lhs = geo.derivation(i, geo.inner(u, v))
        rhs = geo.inner(nu, v) + geo.inner(u, nv)
        return max_abs(lhs - rhs), max(max_abs(lhs), max_abs(rhs))

    res, scale = 0.0, 0.0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                r, s = metric_residual(gens[j], gens[k], i, nab[i][j], nab[i][k])
                res, scale = max(res, r), max(scale, s)
    report.add("metric.generators", res <= tol.eps * max(1.0, scale), res)

    res, scale = 0.0, 0.0
    for _ in range(samples):
        u, v = geo.random_element(rng), geo.random_element(rng)
        i = int(rng.integers(n))
        r, s = metric_residual(u, v, i, geo.apply(conn, i, u), geo.apply(conn, i, v))
        res, scale = max(res, r), max(scale, s)
    report.add("metric.random", res <= tol.eps * max(1.0, scale), res)

    tor, scale = 0.0, 0.0
    for i in range(n):
        for j in range(n):
            t = nab[i][j] - nab[j][i] - geo.bracket_image(i, j)
            tor = max(tor, max_abs(t))
            scale = max(scale, max_abs(nab[i][j]))
    report.add("torsion", tor <= tol.eps * max(1.0, scale), tor)
    return report


def leibniz_residual(space, conn, i, v, a) -> float:
    """``|nabla_i(v a) - (nabla_i v) a - v d_i(a)|``."""
    geo = _bare_geometry(space)
    lhs = geo.apply(conn, i, geo.act(v, a))
    rhs = geo.act(geo.apply(conn, i, v), a) + geo.act(v, geo.derivation(i, a))
    return max_abs(lhs - rhs)
