"""Real Lie algebras represented by inner hermitian derivations of Mat(N).

A representation is given directly by its trace-free anti-hermitian matrices
``Dhat[i]``; the derivation attached to a Lie algebra element with
coordinates ``c`` is ``A -> [sum_i c_i Dhat[i], A]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError
from .matrix_core import antihermitian_residual, as_square, as_tolerance, max_abs


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float = 0.0
    detail: str = ""


@dataclass
class ValidationReport:
    """Named pass/fail entries with the residual that decided each one."""

    checks: list = field(default_factory=list)

    def add(self, name, passed, residual=0.0, detail=""):
        self.checks.append(Check(name, bool(passed), float(residual), detail))
        return self

    def extend(self, other: "ValidationReport", prefix=""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.residual, c.detail))
        return self

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self):
        return [c.name for c in self.checks if not c.passed]

    def residuals(self) -> dict:
        return {c.name: c.residual for c in self.checks}

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [
                {"name": c.name, "passed": c.passed, "residual": c.residual,
                 **({"detail": c.detail} if c.detail else {})}
                for c in self.checks
            ],
        }


@dataclass(frozen=True)
class LieAlgebraSpec:
    """Real Lie algebra with ``[d_i, d_j] = sum_k c[i, j, k] d_k``."""

    dim: int
    structure_constants: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.structure_constants, dtype=float)
        if self.dim < 1:
            raise ShapeError("Lie algebra dimension must be >= 1")
        if c.size == 0 and self.dim >= 1:
            c = np.zeros((self.dim,) * 3)
        if c.shape != (self.dim,) * 3:
            raise ShapeError(f"structure constants must have shape {(self.dim,) * 3}, got {c.shape}")
        object.__setattr__(self, "structure_constants", c)

    @classmethod
    def abelian_of_dim(cls, n: int) -> "LieAlgebraSpec":
        return cls(n, np.zeros((n, n, n)))

    def abelian(self) -> bool:
        return not np.any(self.structure_constants)

    def bracket(self, x, y) -> np.ndarray:
        """Bracket of two elements given by real coordinate vectors."""
        return np.einsum("i,j,ijk->k", np.asarray(x, float), np.asarray(y, float),
                         self.structure_constants)

    def antisymmetry_residual(self) -> float:
        c = self.structure_constants
        return max_abs(c + np.transpose(c, (1, 0, 2)))

    def jacobi_residual(self) -> float:
        c = self.structure_constants
        # [[d_i, d_j], d_k] = sum_l c_ij^l c_lk^m d_m, summed cyclically
        t = np.einsum("ijl,lkm->ijkm", c, c)
        cyc = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
        return max_abs(cyc)

    def is_automorphism(self, psi, tol=None) -> bool:
        """``psi[:, i]`` holds the coordinates of the image of ``d_i``."""
        tol = as_tolerance(tol)
        psi = np.asarray(psi, dtype=float)
        if psi.shape != (self.dim, self.dim):
            return False
        if np.linalg.matrix_rank(psi, tol=tol.eps) < self.dim:
            return False
        c = self.structure_constants
        lhs = np.einsum("ijk,mk->ijm", c, psi)
        rhs = np.einsum("ai,bj,abm->ijm", psi, psi, c)
        return max_abs(lhs - rhs) <= tol.threshold(lhs, rhs)


@dataclass(frozen=True)
class MatrixRep:
    """Lie algebra together with its trace-free matrix representation ``Dhat``."""

    lie: LieAlgebraSpec
    Dhat: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = np.array(self.Dhat, dtype=complex)
        if d.ndim == 2:
            d = d[None]
        if d.ndim != 3 or d.shape[1] != d.shape[2] or d.shape[1] < 1:
            raise ShapeError(f"Dhat must be a stack of square matrices, got shape {d.shape}")
        if d.shape[0] != self.lie.dim:
            raise ShapeError(f"{d.shape[0]} matrices given for a {self.lie.dim}-dimensional algebra")
        object.__setattr__(self, "Dhat", d)

    @property
    def N(self) -> int:
        return self.Dhat.shape[1]

    @property
    def n(self) -> int:
        return self.lie.dim

    def element(self, coeffs) -> np.ndarray:
        """Matrix ``sum_i coeffs_i Dhat[i]`` of a Lie algebra element."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.n,):
            raise ShapeError(f"expected {self.n} coefficients, got shape {coeffs.shape}")
        return np.einsum("i,ijk->jk", coeffs, self.Dhat)

    def derivation(self, i: int, a) -> np.ndarray:
        """Apply the i-th basis derivation to ``a``."""
        d = self.Dhat[i]
        a = np.asarray(a)
        return d @ a - a @ d


def rep_1d(d) -> MatrixRep:
    """Representation of the one-dimensional Lie algebra spanned by one matrix."""
    d = as_square(d, "Dhat")
    return MatrixRep(LieAlgebraSpec.abelian_of_dim(1), d[None])


def remove_trace(rep: MatrixRep):
    """Subtract ``(tr/N) * 1`` from every generator.

    Returns the corrected representation and the list of removed traces, one
    per generator. The induced derivations are unchanged.
    """
    traces = np.trace(rep.Dhat, axis1=1, axis2=2)
    eye = np.eye(rep.N)
    fixed = rep.Dhat - (traces / rep.N)[:, None, None] * eye
    return MatrixRep(rep.lie, fixed), [complex(t) for t in traces]


def validate_rep(rep: MatrixRep, tol=None) -> ValidationReport:
    tol = as_tolerance(tol)
    report = ValidationReport()
    d = rep.Dhat
    thr = tol.threshold(d)
    lie = rep.lie

    anti = lie.antisymmetry_residual()
    report.add("structure_antisymmetric", anti <= tol.threshold(lie.structure_constants), anti)
    jac = lie.jacobi_residual()
    report.add("jacobi", jac <= tol.threshold(lie.structure_constants ** 2), jac)

    tr = max((abs(np.trace(x)) for x in d), default=0.0)
    report.add("trace_free", tr <= thr, tr)

    ah = max(antihermitian_residual(x) for x in d)
    report.add("anti_hermitian", ah <= thr, ah)

    # [D_i, D_j] - sum_k c_ij^k D_k
    comm = np.einsum("iab,jbc->ijac", d, d) - np.einsum("jab,ibc->ijac", d, d)
    expected = np.einsum("ijk,kac->ijac", lie.structure_constants, d)
    br = max_abs(comm - expected)
    report.add("bracket", br <= tol.threshold(comm, expected), br)

    # real linear independence of the generators
    real = np.hstack([d.reshape(rep.n, -1).real, d.reshape(rep.n, -1).imag])
    smin = float(np.linalg.svd(real, compute_uv=False).min())
    report.add("faithful", smin > thr, smin)
    return report


def derivation_apply(rep: MatrixRep, coeffs, a) -> np.ndarray:
    """Hermitian derivation of the Lie element ``coeffs`` applied to ``a``."""
    a = as_square(a, "A")
    if a.shape[0] != rep.N:
        raise ShapeError(f"A is {a.shape}, representation acts on Mat({rep.N})")
    d = rep.element(coeffs)
    return d @ a - a @ d
