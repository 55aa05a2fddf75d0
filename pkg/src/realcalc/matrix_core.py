"""Dense complex matrix primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Everything here is
a pure function of its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotAntiHermitianError, ShapeError

DEFAULT_EPS = 1e-9


@dataclass(frozen=True)
class Tolerance:
    """Absolute threshold ``eps`` scaled by the magnitude of the data compared.

    Matrix comparisons use ``eps * max(1, max-abs-entry)`` where the maximum
    runs over every operand involved in the comparison.
    """

    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"tolerance must be positive, got {self.eps!r}")

    def threshold(self, *arrays) -> float:
        scale = 1.0
        for a in arrays:
            a = np.asarray(a)
            if a.size:
                scale = max(scale, float(np.max(np.abs(a))))
        return self.eps * scale

    def close(self, a, b) -> bool:
        a = np.asarray(a)
        b = np.asarray(b)
        if a.shape != b.shape:
            return False
        return max_abs(a - b) <= self.threshold(a, b)

    def is_zero(self, a, scale=None) -> bool:
        ref = () if scale is None else (scale,)
        return max_abs(a) <= self.threshold(*ref)


def as_tolerance(tol) -> Tolerance:
    if tol is None:
        return Tolerance()
    if isinstance(tol, Tolerance):
        return tol
    return Tolerance(float(tol))


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def as_matrix(a, name="matrix") -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-d array, got shape {m.shape}")
    return m


def as_square(a, name="matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {m.shape}")
    return m


def exactly_equal(a, b) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and bool(np.all(a == b))


def dagger(a) -> np.ndarray:
    return np.conj(np.swapaxes(np.asarray(a), -1, -2))


def unit(n: int, i: int, j: int) -> np.ndarray:
    """Matrix unit with a single 1 at (i, j), zero-based."""
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1.0
    return e


def commutator(a, b) -> np.ndarray:
    """Return ``AB - BA``."""
    a = as_square(a, "A")
    b = as_square(b, "B")
    if a.shape != b.shape:
        raise ShapeError(f"commutator of {a.shape} and {b.shape} matrices")
    return a @ b - b @ a


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a, "A"), as_matrix(b, "B"))


def direct_sum(blocks) -> np.ndarray:
    blocks = [as_square(b, "block") for b in blocks]
    if not blocks:
        raise ValueError("direct_sum needs at least one block")
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    k = 0
    for b in blocks:
        s = b.shape[0]
        out[k:k + s, k:k + s] = b
        k += s
    return out


def antihermitian_residual(d) -> float:
    d = np.asarray(d)
    return max_abs(d + dagger(d))


@dataclass(frozen=True)
class SpectrumBlocks:
    """Distinct eigenvalues of an anti-hermitian matrix, descending by imaginary part.

    ``diagonalizer`` is unitary and ``diagonalizer^H D diagonalizer`` equals
    ``direct_sum(lam * I_n for lam, n in blocks)``.
    """

    eigenvalues: tuple
    multiplicities: tuple
    diagonalizer: np.ndarray = field(repr=False)

    @property
    def blocks(self):
        return list(zip(self.eigenvalues, self.multiplicities))

    @property
    def k(self) -> int:
        return len(self.eigenvalues)

    @property
    def size(self) -> int:
        return int(sum(self.multiplicities))

    def offsets(self):
        """Start and stop index of every eigenblock."""
        out = []
        start = 0
        for n in self.multiplicities:
            out.append((start, start + n))
            start += n
        return out

    def diagonal(self) -> np.ndarray:
        return direct_sum([lam * np.eye(n) for lam, n in self.blocks])

    def spectrum(self) -> np.ndarray:
        """Imaginary parts with multiplicity, descending."""
        return np.repeat(np.array([lam.imag for lam in self.eigenvalues]),
                         self.multiplicities)


def eig_antihermitian_sorted(d, tol=None) -> SpectrumBlocks:
    """Diagonalize a trace-free anti-hermitian matrix into sorted eigenblocks.

    Eigenvalues whose imaginary parts lie within ``tol.eps`` of their
    neighbour (after sorting) are merged into one block. Inside a block the
    eigenvector columns keep the solver's order and are re-orthonormalized.

    Raises
    ------
    ShapeError
        If ``d`` is not square.
    NotAntiHermitianError
        If ``max|D + D^H|`` exceeds the tolerance threshold.
    """
    tol = as_tolerance(tol)
    d = as_square(d, "D")
    res = antihermitian_residual(d)
    if res > tol.threshold(d):
        raise NotAntiHermitianError(f"max|D + D^H| = {res:.3e} exceeds tolerance")
    # D = i H with H hermitian
    h = -1j * d
    h = 0.5 * (h + dagger(h))
    w, v = np.linalg.eigh(h)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]

    groups = [[0]]
    for idx in range(1, len(w)):
        if w[groups[-1][-1]] - w[idx] <= tol.eps:
            groups[-1].append(idx)
        else:
            groups.append([idx])

    eigenvalues = []
    mults = []
    cols = []
    for g in groups:
        eigenvalues.append(complex(0.0, float(np.mean(w[g]))))
        mults.append(len(g))
        q, r = np.linalg.qr(v[:, g])
        phases = np.diag(r).copy()
        phases[np.abs(phases) == 0] = 1.0
        cols.append(q * (phases / np.abs(phases)))
    u = np.hstack(cols)
    return SpectrumBlocks(tuple(eigenvalues), tuple(mults), u)
