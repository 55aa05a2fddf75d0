"""Projective calculi realized as projections of free ones.

A projection of ``Mat(N)^n`` is stored through its coefficients
``pblocks[k, j] = p^k_j`` with ``P(e_j) = sum_k e_k p^k_j``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calculus import CalculusInstance, FreeCalculusInstance
from .errors import DegenerateError, HypothesisViolationError, InvalidMetricError, ShapeError, UnsupportedDimensionError
from .matrix_core import as_tolerance, max_abs
from .metric_conn import (ConnectionSpec, FreeGeometry, FreeMetric, aligned_anchors,
                          projector, slot_gram)


@dataclass(frozen=True)
class ProjectionSpec:
    pblocks: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.pblocks, dtype=complex)
        if p.ndim != 4 or p.shape[0] != p.shape[1] or p.shape[2] != p.shape[3]:
            raise ShapeError(f"pblocks must have shape (n, n, N, N), got {p.shape}")
        object.__setattr__(self, "pblocks", p)

    @property
    def n(self) -> int:
        return self.pblocks.shape[0]

    @property
    def N(self) -> int:
        return self.pblocks.shape[2]

    @classmethod
    def identity(cls, n, N) -> "ProjectionSpec":
        return cls.diagonal(n, np.eye(N))

    @classmethod
    def diagonal(cls, n, p) -> "ProjectionSpec":
        p = np.asarray(p, dtype=complex)
        blocks = np.zeros((n, n) + p.shape, dtype=complex)
        for k in range(n):
            blocks[k, k] = p
        return cls(blocks)

    def compose(self, other: "ProjectionSpec") -> np.ndarray:
        """Coefficients of ``self o other``: ``sum_l self^k_l other^l_j``."""
        return np.einsum("klab,ljbc->kjac", self.pblocks, other.pblocks)

    def idempotence_residual(self) -> float:
        return max_abs(self.compose(self) - self.pblocks)

    def apply_coords(self, a) -> np.ndarray:
        """Coordinates of ``P(m)`` from the coordinates ``a`` of ``m``."""
        return np.einsum("kjab,jbc->kac", self.pblocks, np.asarray(a))


@dataclass(frozen=True)
class SplitRealization:
    """Free calculus, projection and anchor data realizing a projective calculus.

    ``A`` is the unitary with first row ``v0``; ``e_i`` carries ``alphas[i] A``
    in slot ``i``.
    """

    free: FreeCalculusInstance
    P: ProjectionSpec
    A: np.ndarray = field(repr=False)
    v0: np.ndarray = field(repr=False)
    alphas: np.ndarray = field(repr=False)

    def theta(self, v) -> np.ndarray:
        """Module element of ``P(Mat(N)^n)`` identified with ``v`` in ``(C^N)^n``."""
        n, N = self.free.n, self.free.N
        out = np.zeros((n, N, N), dtype=complex)
        out[:, 0, :] = np.asarray(v).reshape(n, N)
        return out

    def theta_inverse(self, m) -> np.ndarray:
        return np.asarray(m)[:, 0, :].reshape(-1)


def projection_from_anchor(v0) -> np.ndarray:
    """Rank-one hermitian idempotent ``v0^H v0 / |v0|^2``."""
    v0 = np.asarray(v0, dtype=complex).reshape(-1)
    if not np.any(v0):
        raise DegenerateError("anchor vector is zero")
    return projector(v0)


def unitary_completion(v0, tol=None) -> np.ndarray:
    """Unitary matrix whose first row is ``v0 / |v0|``.

    Gram-Schmidt over the standard basis, skipping candidates that are
    parallel to the rows already kept.
    """
    tol = as_tolerance(tol)
    v0 = np.asarray(v0, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(v0)
    if nrm == 0:
        raise DegenerateError("anchor vector is zero")
    rows = [v0 / nrm]
    for e in np.eye(len(v0), dtype=complex):
        if len(rows) == len(v0):
            break
        w = e.copy()
        for _ in range(2):
            for r in rows:
                w = w - np.vdot(r, w) * r
        wn = np.linalg.norm(w)
        if wn > max(tol.eps, 1e-8):
            rows.append(w / wn)
    return np.array(rows)


def build_split_realization(c: CalculusInstance, tol=None) -> SplitRealization:
    """Realize ``c`` (one anchor, or aligned anchors) as ``P`` applied to a free calculus."""
    tol = as_tolerance(tol)
    if c.m != c.n:
        raise UnsupportedDimensionError("split realization needs module (C^N)^n with n = dim g")
    if c.n == 1:
        v0 = c.phi[0]
        alpha = float(np.linalg.norm(v0))
        if alpha == 0:
            raise DegenerateError("phi(d) = 0")
        v0 = v0 / alpha
        alphas = np.array([alpha])
    else:
        v0, alphas = aligned_anchors(c, tol)
    A = unitary_completion(v0, tol)
    n, N = c.n, c.N
    basis = np.zeros((n, n, N, N), dtype=complex)
    for i in range(n):
        basis[i, i] = alphas[i] * A
    free = FreeCalculusInstance(c.rep, basis)
    P = ProjectionSpec.diagonal(n, projection_from_anchor(v0))
    split = SplitRealization(free, P, A, v0, alphas)

    images = projected_generators(free, P)
    for k in range(n):
        target = split.theta(c.phi[k])
        if max_abs(images[k] - target) > tol.threshold(target):
            raise ShapeError("projection does not reproduce phi under the identification")
    return split


def free_metric_from_aligned(split: SplitRealization, c: CalculusInstance, metric, tol=None) -> FreeMetric:
    """Metric on ``Mat(N)^n`` whose restriction reproduces ``metric`` on ``(C^N)^n``.

    Since ``A`` is unitary, ``h(e_i, e_j) = alpha_i alpha_j g_ij 1`` with ``g``
    the slot Gram matrix of ``metric``.
    """
    g = slot_gram(c, metric, tol)
    a = split.alphas
    scal = np.outer(a, a) * g
    return FreeMetric(np.einsum("ij,ab->ijab", scal, np.eye(split.free.N)))


def projected_generators(f: FreeCalculusInstance, P: ProjectionSpec) -> np.ndarray:
    """``P(e_k)`` as module elements, shape ``(n, n, N, N)``."""
    return np.array([f.element(P.pblocks[:, k]) for k in range(f.n)])


def is_orthogonal_projection(P: ProjectionSpec, h: FreeMetric, tol=None) -> bool:
    """``(p^k_i)^H h_kj = h_ik p^k_j`` for all ``i, j``."""
    tol = as_tolerance(tol)
    if P.n != h.n or P.N != h.N:
        raise ShapeError("projection and metric shapes differ")
    lhs = np.einsum("kiba,kjbc->ijac", P.pblocks.conj(), h.hblocks)
    rhs = np.einsum("ikab,kjbc->ijac", h.hblocks, P.pblocks)
    return max_abs(lhs - rhs) <= tol.threshold(lhs, rhs)


def restricted_components(P: ProjectionSpec, h: FreeMetric) -> np.ndarray:
    return np.einsum("ikab,kjbc->ijac", h.hblocks, P.pblocks)


def restrict_metric(P: ProjectionSpec, h: FreeMetric, tol=None) -> FreeMetric:
    """Components ``h(P e_i, P e_j) = h_ik p^k_j`` of the metric on ``P(Mat(N)^n)``.

    The result is returned as a :class:`FreeMetric` holding these components;
    it is nondegenerate on the projected module when its block matrix has the
    same rank as the projection's.
    """
    tol = as_tolerance(tol)
    if not is_orthogonal_projection(P, h, tol):
        raise InvalidMetricError("projection is not orthogonal for the metric")
    comp = restricted_components(P, h)
    n, N = P.n, P.N
    flat = lambda b: np.transpose(b, (0, 2, 1, 3)).reshape(n * N, n * N)
    r_h = np.linalg.matrix_rank(flat(comp), tol=tol.threshold(comp))
    r_p = np.linalg.matrix_rank(flat(P.pblocks), tol=tol.threshold(P.pblocks))
    if r_h != r_p:
        raise InvalidMetricError(f"restricted metric is degenerate (rank {r_h} vs {r_p})")
    return FreeMetric(comp)


def metric_symmetry_condition(P: ProjectionSpec, h: FreeMetric, tol=None) -> bool:
    """``h_jk p^k_i = h_ik p^k_j`` for all ``i, j``; requires ``h_ij = h_ji``."""
    tol = as_tolerance(tol)
    hb = h.hblocks
    if max_abs(hb - np.transpose(hb, (1, 0, 2, 3))) > tol.threshold(hb):
        raise HypothesisViolationError("metric components must satisfy h_ij = h_ji")
    comp = restricted_components(P, h)  # [i, j] = h_ik p^k_j
    return max_abs(comp - np.transpose(comp, (1, 0, 2, 3))) <= tol.threshold(comp)


def project_connection(P: ProjectionSpec, nabla_free: ConnectionSpec, f: FreeCalculusInstance) -> ConnectionSpec:
    """Christoffel symbols of ``P o nabla`` relative to the generators ``P(e_k)``.

    ``Gamma^k_ij = sum_l Gamma~^k_il p^l_j + d_i(p^k_j)``.
    """
    if nabla_free.kind != "christoffel":
        raise ShapeError("project_connection needs Christoffel symbols on the free module")
    n, N = f.n, f.N
    if P.n != n or P.N != N or nabla_free.data.shape != (n, n, n, N, N):
        raise ShapeError("projection, connection and calculus shapes differ")
    gt = nabla_free.data  # [i, l, k] = Gamma~^k_il
    gamma = np.einsum("ilkab,ljbc->ijkac", gt, P.pblocks)
    dp = np.array([[[f.rep.derivation(i, P.pblocks[k, j]) for k in range(n)]
                    for j in range(n)] for i in range(n)])
    return ConnectionSpec("christoffel", gamma + dp)


class ProjectedGeometry(FreeGeometry):
    """The module ``P(Mat(N)^n)`` with the restricted metric.

    Elements are free-module elements fixed by ``P``; connections act through
    the projected generators ``P(e_k)``.
    """

    def __init__(self, f: FreeCalculusInstance, metric: FreeMetric, P: ProjectionSpec):
        super().__init__(f, metric)
        self.P = P

    def generators(self):
        return list(projected_generators(self.f, self.P))

    def random_element(self, rng):
        m = super().random_element(rng)
        return self.f.element(self.P.apply_coords(self.coordinates(m)))

    def apply(self, conn, i, v):
        if not isinstance(conn, ConnectionSpec):
            return conn(v, i)
        # v = sum_k P(e_k) a^k with a the free coordinates of v (P v = v)
        a = self.coordinates(v)
        gamma = conn.data[i]
        coeff = np.einsum("jkab,jbc->kac", gamma, a) + np.array([self.derivation(i, x) for x in a])
        return self.f.element(self.P.apply_coords(coeff))


def lambda_from_projection(split: SplitRealization, gamma_tilde) -> complex:
    """Scalar ``lambda = v0 G v0^H / |v0|^2`` of the one-dimensional projected connection."""
    v0 = split.v0
    return complex(v0 @ np.asarray(gamma_tilde) @ v0.conj() / np.vdot(v0, v0).real)
