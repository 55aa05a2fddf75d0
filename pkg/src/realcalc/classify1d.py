"""Isomorphism classes of real calculi ``(Mat(N), <d>_D, C^N, phi)``.

For a one-dimensional Lie algebra the isomorphism class is decided by two
pieces of data: the eigenvalue spectrum of ``Dhat`` up to a real rescaling,
and which eigenblocks of ``Dhat`` the vector ``phi(d)`` touches (its zero
pattern). Automorphisms rescale ``d`` by a real ``mu``; a negative ``mu`` reverses
the descending eigenvalue order and therefore the pattern.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calculus import CalculusInstance, canonical_diag_1d, canonical_witness_1d, is_canonical_1d
from .errors import (DegenerateError, MustCanonicalizeError, ResourceError,
                     ShapeError, UnsupportedDimensionError)
from .matrix_core import as_square, as_tolerance, eig_antihermitian_sorted, max_abs

MAX_ENUMERATION_K = 24


@dataclass(frozen=True)
class ZeroPattern:
    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits or any(b not in (0, 1) for b in bits):
            raise ValueError(f"invalid zero pattern {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @property
    def k(self) -> int:
        return len(self.bits)

    @classmethod
    def _trusted(cls, bits: tuple) -> "ZeroPattern":
        obj = object.__new__(cls)
        object.__setattr__(obj, "bits", bits)
        return obj

    def reversed(self) -> "ZeroPattern":
        return ZeroPattern(self.bits[::-1])

    def is_valid(self) -> bool:
        return any(self.bits)

    def representative(self, anti: bool) -> "ZeroPattern":
        return min(self, self.reversed(), key=lambda p: p.bits) if anti else self


@dataclass(frozen=True)
class QuasiEquivalence1D:
    """Real factors ``mu`` with ``spec(Db) = mu * spec(Da)`` as multisets."""

    mu_candidates: frozenset

    def __bool__(self):
        return bool(self.mu_candidates)

    @property
    def positive(self):
        return [m for m in sorted(self.mu_candidates) if m > 0]

    @property
    def negative(self):
        return [m for m in sorted(self.mu_candidates) if m < 0]


def anti_selfsimilar(d, tol=None) -> bool:
    """True iff the spectrum of ``d`` is symmetric under negation."""
    tol = as_tolerance(tol)
    spec = eig_antihermitian_sorted(d, tol)
    w = spec.spectrum()
    return max_abs(w + w[::-1]) <= tol.threshold(w)


def zero_pattern(c: CalculusInstance, tol=None) -> ZeroPattern:
    """Which descending eigenblocks of a canonical instance ``phi(d)`` touches.

    A block segment counts as zero when its norm is at most
    ``eps * (1 + ||phi(d)||)``.
    """
    tol = as_tolerance(tol)
    if c.n != 1 or c.m != 1:
        raise UnsupportedDimensionError("zero patterns are defined for dim g = 1 and module C^N")
    if not is_canonical_1d(c, tol):
        raise MustCanonicalizeError("instance must be in descending diagonal form; "
                                    "apply canonical_diag_1d first")
    spec = eig_antihermitian_sorted(c.rep.Dhat[0], tol)
    v = c.phi[0]
    cut = tol.eps * (1.0 + float(np.linalg.norm(v)))
    return ZeroPattern(tuple(int(np.linalg.norm(v[a:b]) > cut) for a, b in spec.offsets()))


def _spectrum(d, tol):
    return eig_antihermitian_sorted(d, tol).spectrum()


def quasi_equivalent_1d(da, db, tol=None) -> QuasiEquivalence1D:
    tol = as_tolerance(tol)
    da = as_square(da, "Da")
    db = as_square(db, "Db")
    if da.shape != db.shape:
        raise ShapeError(f"representations act on different sizes {da.shape} and {db.shape}")
    wa = _spectrum(da, tol)
    wb = _spectrum(db, tol)
    if max_abs(wa) <= tol.threshold(da) or max_abs(wb) <= tol.threshold(db):
        raise DegenerateError("zero representation is not faithful")
    mu0 = max_abs(wb) / max_abs(wa)
    found = set()
    for mu in (mu0, -mu0):
        scaled = np.sort(mu * wa)
        if max_abs(scaled - np.sort(wb)) <= tol.threshold(scaled, wb):
            found.add(float(mu))
    return QuasiEquivalence1D(frozenset(found))


def _check_1d(c):
    if c.n != 1 or c.m != 1:
        raise UnsupportedDimensionError(
            f"exact decision needs dim g = 1 and module C^N, got n={c.n}, m={c.m}")


def is_isomorphic_1d(a: CalculusInstance, b: CalculusInstance, tol=None) -> bool:
    return witness_1d(a, b, tol) is not None


def witness_1d(a: CalculusInstance, b: CalculusInstance, tol=None):
    """Decide isomorphism and return ``(U, mu, x)`` or ``None``.

    The returned data satisfy ``Db = U^-1 (mu Da) U`` and
    ``phi_b = mu * x * phi_a U``, i.e. they form an isomorphism witness with
    ``psi = [[mu]]`` and ``X = [[x]]``.
    """
    tol = as_tolerance(tol)
    _check_1d(a)
    _check_1d(b)
    if a.N != b.N:
        raise ShapeError(f"instances over Mat({a.N}) and Mat({b.N})")
    qe = quasi_equivalent_1d(a.rep.Dhat[0], b.rep.Dhat[0], tol)
    if not qe:
        return None
    ca, cb = canonical_diag_1d(a, tol), canonical_diag_1d(b, tol)
    pa, pb = zero_pattern(ca, tol), zero_pattern(cb, tol)
    if pa.k != pb.k:
        return None
    offs_a = eig_antihermitian_sorted(ca.rep.Dhat[0], tol).offsets()
    offs_b = eig_antihermitian_sorted(cb.rep.Dhat[0], tol).offsets()
    for mu in qe.positive + qe.negative:
        order = list(range(pa.k)) if mu > 0 else list(range(pa.k))[::-1]
        if tuple(pa.bits[j] for j in order) != pb.bits:
            continue
        w = _block_intertwiner(ca.phi[0], cb.phi[0], offs_a, offs_b, order, pa.bits)
        u = canonical_witness_1d(a, tol) @ w @ canonical_witness_1d(b, tol).conj().T
        return u, mu, 1.0 / mu
    return None


def _row_completion(v):
    """Invertible matrix whose first row is the nonzero row vector ``v``."""
    n = v.size
    pivot = int(np.argmax(np.abs(v)))
    m = np.eye(n, dtype=complex)
    rows = [v] + [m[i] for i in range(n) if i != pivot]
    return np.array(rows)


def _block_intertwiner(va, vb, offs_a, offs_b, order, bits_a):
    """Matrix sending block ``order[j]`` of ``va`` onto block ``j`` of ``vb``."""
    n = va.size
    w = np.zeros((n, n), dtype=complex)
    for j, src in enumerate(order):
        a0, a1 = offs_a[src]
        b0, b1 = offs_b[j]
        seg_a, seg_b = va[a0:a1], vb[b0:b1]
        if seg_a.size != seg_b.size:
            raise ShapeError("eigenblock sizes do not match")
        if not bits_a[src]:
            blk = np.eye(seg_a.size)
        else:
            # seg_a @ inv(Ma) = e_1, e_1 @ Mb = seg_b
            blk = np.linalg.solve(_row_completion(seg_a), _row_completion(seg_b))
        w[a0:a1, b0:b1] = blk
    return w


def count_classes(k: int, anti: bool) -> int:
    if k < 1:
        raise ValueError("k must be at least 1")
    if not anti:
        return 2 ** k - 1
    if k % 2:
        m = (k - 1) // 2
        return 2 ** m * (1 + 2 ** m) - 1
    m = k // 2
    return 2 ** (m - 1) * (1 + 2 ** m) - 1


def enumerate_classes(k: int, anti: bool) -> list:
    """One representative per class, the lexicographic minimum of its reversal orbit.

    Patterns are read as ``k``-bit integers (first block = most significant
    bit), so lexicographic order on bit tuples is integer order.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > MAX_ENUMERATION_K:
        raise ResourceError(f"enumeration is capped at k={MAX_ENUMERATION_K}")
    codes = np.arange(1, 2 ** k, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    bits = ((codes[:, None] >> shifts) & 1).astype(np.int8)
    if anti:
        reversed_codes = bits[:, ::-1].astype(np.int64) @ (1 << shifts)
        bits = bits[codes <= reversed_codes]
    return [ZeroPattern._trusted(tuple(row)) for row in bits.tolist()]
