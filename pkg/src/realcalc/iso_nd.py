"""Isomorphism witnesses for real calculi over Mat(N).

An isomorphism between ``(Mat(N), g_D, (C^N)^n, phi)`` and
``(Mat(N), g_D', (C^N)^n, phi')`` is described by ``U`` in GL(N), a Lie
algebra automorphism ``psi`` (column i holds the coordinates of ``psi(d_i)``)
and ``X`` in GL(n), subject to

* ``Dhat'(d_i) = U^-1 Dhat(psi(d_i)) U``
* ``phi'(d_i) = phi(psi(d_i)) (X kron U)``.

Beyond the one-dimensional case there is no decision procedure;
:func:`search_witness` is a semi-decision helper whose ``None`` answer means
"unknown".
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .calculus import CalculusInstance, FreeCalculusInstance
from .errors import ShapeError, UnsupportedDimensionError
from .matrix_core import as_matrix, as_tolerance, max_abs


@dataclass(frozen=True)
class IsoWitness:
    U: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    X: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "U", as_matrix(self.U, "U"))
        psi = np.atleast_2d(np.asarray(self.psi))
        if np.iscomplexobj(psi):
            if np.any(np.abs(psi.imag) > 0):
                raise ShapeError("psi must be real")
            psi = psi.real
        object.__setattr__(self, "psi", psi.astype(float))
        object.__setattr__(self, "X", as_matrix(np.atleast_2d(self.X), "X"))

    @classmethod
    def identity(cls, N: int, n: int) -> "IsoWitness":
        return cls(np.eye(N), np.eye(n), np.eye(n))


def _invertible(m, tol) -> bool:
    m = np.asarray(m)
    if m.shape[0] != m.shape[1]:
        return False
    s = np.linalg.svd(m, compute_uv=False)
    return s.min() > tol.eps * max(1.0, s.max())


def _same_lie(a, b, tol):
    ca, cb = a.rep.lie.structure_constants, b.rep.lie.structure_constants
    return ca.shape == cb.shape and max_abs(ca - cb) <= tol.threshold(ca, cb)


def _check_shapes(a, b, U, psi):
    if a.N != b.N or a.n != b.n:
        raise ShapeError(f"instances differ: (N, n) = {(a.N, a.n)} vs {(b.N, b.n)}")
    U = np.asarray(U)
    psi = np.asarray(psi)
    if U.shape != (a.N, a.N):
        raise ShapeError(f"U must be {a.N}x{a.N}, got {U.shape}")
    if psi.shape != (a.n, a.n):
        raise ShapeError(f"psi must be {a.n}x{a.n}, got {psi.shape}")


def transported_rep(Dhat, psi) -> np.ndarray:
    """``Dhat(psi(d_i))`` for every basis element ``d_i``."""
    return np.einsum("ji,jab->iab", np.asarray(psi, float), Dhat)


def compatible_pair_residual(a, b, U, psi) -> float:
    U = np.asarray(U, dtype=complex)
    target = np.linalg.solve(U, transported_rep(a.rep.Dhat, psi) @ U)
    return max_abs(b.rep.Dhat - target)


def check_compatible_pair(a, b, U, psi, tol=None) -> bool:
    """True iff ``(U, psi)`` realizes a quasi-equivalence from ``a``'s to ``b``'s representation."""
    tol = as_tolerance(tol)
    U = as_matrix(U, "U")
    psi = np.atleast_2d(np.asarray(psi, dtype=float))
    _check_shapes(a, b, U, psi)
    if not _same_lie(a, b, tol):
        raise ShapeError("instances carry different structure constants")
    if not _invertible(U, tol) or not a.rep.lie.is_automorphism(psi, tol):
        return False
    res = compatible_pair_residual(a, b, U, psi)
    return res <= tol.threshold(a.rep.Dhat, b.rep.Dhat)


def phi_residual(a: CalculusInstance, b: CalculusInstance, w: IsoWitness) -> float:
    image = np.einsum("ji,jk->ik", w.psi, a.phi) @ np.kron(w.X, w.U)
    return max_abs(b.phi - image)


def check_isomorphism_witness(a: CalculusInstance, b: CalculusInstance, w: IsoWitness, tol=None) -> bool:
    tol = as_tolerance(tol)
    if a.m != a.n or b.m != b.n:
        raise UnsupportedDimensionError("witness check covers modules (C^N)^n with n = dim g")
    _check_shapes(a, b, w.U, w.psi)
    if w.X.shape != (a.n, a.n):
        raise ShapeError(f"X must be {a.n}x{a.n}, got {w.X.shape}")
    if not _invertible(w.X, tol):
        return False
    if not check_compatible_pair(a, b, w.U, w.psi, tol):
        return False
    return phi_residual(a, b, w) <= tol.threshold(a.phi, b.phi)


def check_free_isomorphism(a: FreeCalculusInstance, b: FreeCalculusInstance, U, psi, tol=None) -> bool:
    """Free calculi are isomorphic exactly when a compatible pair exists; ``phi`` plays no role."""
    return check_compatible_pair(a, b, U, psi, tol)


def apply_witness(a: CalculusInstance, w: IsoWitness) -> CalculusInstance:
    """Image of ``a`` under ``w``: the unique ``b`` for which ``w`` is a witness."""
    from .lie_rep import MatrixRep

    U = np.asarray(w.U, dtype=complex)
    Dhat = np.linalg.solve(U, transported_rep(a.rep.Dhat, w.psi) @ U)
    phi = np.einsum("ji,jk->ik", w.psi, a.phi) @ np.kron(w.X, U)
    return CalculusInstance(MatrixRep(a.rep.lie, Dhat), a.m, phi)


def intertwiners(Da, Db, tol=None) -> np.ndarray:
    """Basis of ``{U : Da_i U = U Db_i for all i}`` as an array ``(r, N, N)``."""
    tol = as_tolerance(tol)
    Da = np.asarray(Da)
    Db = np.asarray(Db)
    N = Da.shape[1]
    eye = np.eye(N)
    # vec(A U - U B) = (I kron A - B^T kron I) vec(U), column-major vec
    rows = [np.kron(eye, A) - np.kron(B.T, eye) for A, B in zip(Da, Db)]
    system = np.vstack(rows)
    _, s, vh = np.linalg.svd(system)
    cut = tol.threshold(system) * N
    null = vh[np.sum(s > cut):].conj()
    return np.array([v.reshape(N, N, order="F") for v in null])


def _psi_candidates(lie, n, rng, budget, tol):
    yield np.eye(n)
    yield -np.eye(n)
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1.0, -1.0), repeat=n):
            p = np.zeros((n, n))
            p[list(perm), range(n)] = signs
            if lie.is_automorphism(p, tol):
                yield p
    if lie.abelian():
        for _ in range(budget):
            yield rng.standard_normal((n, n))


def _solve_X(a_phi, b_phi, U, n, N):
    """Least-squares ``X`` for ``b_phi = a_phi (X kron U)``."""
    # row i: b_i = sum_{p,q} a_i[p-block] X[p,q] U placed in slot q
    ablocks = a_phi.reshape(-1, n, N) @ U
    design = np.zeros((b_phi.size, n * n), dtype=complex)
    for p in range(n):
        for q in range(n):
            col = np.zeros((a_phi.shape[0], n, N), dtype=complex)
            col[:, q, :] = ablocks[:, p, :]
            design[:, p * n + q] = col.reshape(-1)
    x, *_ = np.linalg.lstsq(design, b_phi.reshape(-1), rcond=None)
    return x.reshape(n, n)


def _solve_joint(a_img, b_phi, space, n, N):
    """Fit ``b_phi = a_img (X kron U)`` with ``U = sum_r c_r space[r]``.

    The condition is linear in ``Z[p, q, r] = X[p, q] c[r]``; the least-squares
    ``Z`` is factored by its leading singular pair.
    """
    r = len(space)
    ablocks = a_img.reshape(-1, n, N)
    rows = ablocks.shape[0]
    design = np.zeros((rows, n, N, n, n, r), dtype=complex)
    for p in range(n):
        img = np.einsum("ia,rab->irb", ablocks[:, p, :], space)  # (rows, r, N)
        for q in range(n):
            design[:, q, :, p, q, :] = np.transpose(img, (0, 2, 1))
    design = design.reshape(rows * n * N, n * n * r)
    z, *_ = np.linalg.lstsq(design, b_phi.reshape(-1), rcond=None)
    u, s, vh = np.linalg.svd(z.reshape(n * n, r))
    X = (u[:, 0] * s[0]).reshape(n, n)
    U = np.einsum("r,rab->ab", vh[0], space)
    return X, U


def search_witness(a: CalculusInstance, b: CalculusInstance, budget: int = 64, seed: int = 0, tol=None):
    """Look for an isomorphism witness; return it or ``None`` (meaning unknown).

    Candidates for ``psi`` come from signed permutations that preserve the
    structure constants (plus random matrices when the algebra is abelian);
    for each ``psi`` a random element of the intertwiner space gives ``U``
    and ``X`` is fitted by least squares. Every returned witness has passed
    :func:`check_isomorphism_witness`.
    """
    tol = as_tolerance(tol)
    if a.N != b.N or a.n != b.n or a.m != b.m:
        return None
    if a.m != a.n:
        raise UnsupportedDimensionError("search covers modules (C^N)^n with n = dim g")
    rng = np.random.default_rng(seed)
    n, N = a.n, a.N

    ident = IsoWitness.identity(N, n)
    if check_isomorphism_witness(a, b, ident, tol):
        return ident

    if n == 1:
        from .classify1d import quasi_equivalent_1d, witness_1d

        try:
            if not quasi_equivalent_1d(a.rep.Dhat[0], b.rep.Dhat[0], tol):
                return None
        except ValueError:
            return None
        found = witness_1d(a, b, tol)
        if found is None:
            return None
        U, mu, x = found
        w = IsoWitness(U, [[mu]], [[x]])
        return w if check_isomorphism_witness(a, b, w, tol) else None

    trials = 0
    for psi in _psi_candidates(a.rep.lie, n, rng, budget, tol):
        if trials >= budget:
            break
        trials += 1
        space = intertwiners(transported_rep(a.rep.Dhat, psi), b.rep.Dhat, tol)
        if len(space) == 0:
            continue
        a_img = np.einsum("ji,jk->ik", psi, a.phi)
        X, U = _solve_joint(a_img, b.phi, space, n, N)
        if _invertible(U, tol) and _invertible(X, tol):
            w = IsoWitness(U, psi, X)
            if check_isomorphism_witness(a, b, w, tol):
                return w
        for _ in range(4):
            coeffs = rng.standard_normal(len(space)) + 1j * rng.standard_normal(len(space))
            U = np.einsum("r,rab->ab", coeffs, space)
            if not _invertible(U, tol):
                continue
            X = _solve_X(a_img, b.phi, U, n, N)
            w = IsoWitness(U, psi, X)
            if check_isomorphism_witness(a, b, w, tol):
                return w
    return None
