"""Real calculi over Mat(N) with modules (C^N)^m and the free module Mat(N)^n."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, UnsupportedDimensionError
from .lie_rep import MatrixRep, ValidationReport, validate_rep
from .matrix_core import as_square, as_tolerance, eig_antihermitian_sorted, max_abs


@dataclass(frozen=True)
class CalculusInstance:
    """Real calculus ``(Mat(N), g_D, (C^N)^m, phi)``.

    ``phi[i]`` is the row vector ``phi(d_i)`` of length ``N*m``, the
    concatenation of ``m`` slots of length ``N``.
    """

    rep: MatrixRep
    module_rank: int
    phi: np.ndarray = field(repr=False)

    def __post_init__(self):
        phi = np.array(self.phi, dtype=complex)
        if phi.ndim == 1:
            phi = phi[None]
        want = (self.rep.n, self.rep.N * self.module_rank)
        if self.module_rank < 1 or phi.shape != want:
            raise ShapeError(f"phi must have shape {want}, got {phi.shape}")
        object.__setattr__(self, "phi", phi)

    @property
    def N(self) -> int:
        return self.rep.N

    @property
    def n(self) -> int:
        return self.rep.n

    @property
    def m(self) -> int:
        return self.module_rank

    def slots(self, v) -> np.ndarray:
        """View a module element as an ``(m, N)`` array of slots."""
        return np.asarray(v).reshape(self.m, self.N)

    def phi_of(self, coeffs) -> np.ndarray:
        """``phi`` of the Lie algebra element with real coordinates ``coeffs``."""
        return np.einsum("i,ij->j", np.asarray(coeffs, float), self.phi)

    def generation_matrix(self) -> np.ndarray:
        """The ``m x (N*n)`` matrix whose block (i, j) is slot i of ``phi[j]``."""
        blocks = self.phi.reshape(self.n, self.m, self.N)
        return np.transpose(blocks, (1, 0, 2)).reshape(self.m, self.n * self.N)


@dataclass(frozen=True)
class FreeCalculusInstance:
    """Free real calculus on ``Mat(N)^n``.

    ``basis_images[i, j]`` is the j-th component of ``e_i = phi(d_i)``.
    """

    rep: MatrixRep
    basis_images: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.array(self.basis_images, dtype=complex)
        n, N = self.rep.n, self.rep.N
        if e.shape != (n, n, N, N):
            raise ShapeError(f"basis_images must have shape {(n, n, N, N)}, got {e.shape}")
        object.__setattr__(self, "basis_images", e)

    @property
    def N(self) -> int:
        return self.rep.N

    @property
    def n(self) -> int:
        return self.rep.n

    def frame(self) -> np.ndarray:
        """``(N*n) x (N*n)`` matrix ``F`` with block (j, i) equal to component j of ``e_i``.

        An element with coordinates ``a`` (stacked ``N x N`` blocks) is ``F @ a``
        when module elements are stacked the same way.
        """
        n, N = self.n, self.N
        return np.transpose(self.basis_images, (1, 2, 0, 3)).reshape(n * N, n * N)

    def element(self, coords) -> np.ndarray:
        """Module element ``sum_i e_i a^i`` as an ``(n, N, N)`` array."""
        coords = np.asarray(coords)
        return np.einsum("ijab,ibc->jac", self.basis_images, coords)

    def coordinates(self, m) -> np.ndarray:
        """Inverse of :meth:`element`."""
        n, N = self.n, self.N
        stacked = np.asarray(m).reshape(n * N, N)
        return np.linalg.solve(self.frame(), stacked).reshape(n, N, N)


def _rank(matrix, tol) -> tuple:
    s = np.linalg.svd(matrix, compute_uv=False)
    thr = tol.threshold(matrix)
    return int(np.sum(s > thr)), (float(s.min()) if s.size else 0.0)


def validate_calculus(c: CalculusInstance, tol=None) -> ValidationReport:
    tol = as_tolerance(tol)
    report = ValidationReport().extend(validate_rep(c.rep, tol), prefix="rep.")
    rank, smin = _rank(c.generation_matrix(), tol)
    report.add("generation", rank == c.m, smin, f"rank {rank} of {c.m}")
    return report


def validate_free_calculus(f: FreeCalculusInstance, tol=None) -> ValidationReport:
    tol = as_tolerance(tol)
    report = ValidationReport().extend(validate_rep(f.rep, tol), prefix="rep.")
    frame = f.frame()
    rank, smin = _rank(frame, tol)
    report.add("basis", rank == frame.shape[0], smin, f"rank {rank} of {frame.shape[0]}")
    return report


def module_action(v, a) -> np.ndarray:
    """Right action of ``A`` on ``v`` in ``(C^N)^m``: every slot times ``A``."""
    a = as_square(a, "A")
    v = np.asarray(v, dtype=complex)
    N = a.shape[0]
    if v.ndim != 1 or v.size % N:
        raise ShapeError(f"vector of length {v.size} is not in (C^{N})^m")
    return (v.reshape(-1, N) @ a).reshape(-1)


def canonical_diag_1d(c: CalculusInstance, tol=None) -> CalculusInstance:
    """Conjugate ``Dhat`` to descending diagonal form and carry ``phi`` along.

    With ``U`` from :func:`eig_antihermitian_sorted` the result has
    ``Dhat' = direct_sum(lam_j I)`` (equal to ``U^H Dhat U`` within tolerance)
    and ``phi' = phi (1_m kron U)``; ``(U, psi=1, X=1)`` is an isomorphism
    witness from ``c`` to the result.
    """
    if c.n != 1:
        raise UnsupportedDimensionError(f"canonical_diag_1d needs dim g = 1, got {c.n}")
    tol = as_tolerance(tol)
    spec = eig_antihermitian_sorted(c.rep.Dhat[0], tol)
    u = spec.diagonalizer
    phi = np.kron(np.eye(c.m), u)
    rep = MatrixRep(c.rep.lie, spec.diagonal()[None])
    return CalculusInstance(rep, c.m, c.phi @ phi)


def canonical_witness_1d(c: CalculusInstance, tol=None) -> np.ndarray:
    """Unitary used by :func:`canonical_diag_1d`."""
    return eig_antihermitian_sorted(c.rep.Dhat[0], as_tolerance(tol)).diagonalizer


def is_canonical_1d(c: CalculusInstance, tol=None) -> bool:
    tol = as_tolerance(tol)
    if c.n != 1:
        return False
    d = c.rep.Dhat[0]
    diag = np.diag(d)
    off = d - np.diag(diag)
    if max_abs(off) > tol.threshold(d):
        return False
    return bool(np.all(np.diff(diag.imag) <= tol.eps))
