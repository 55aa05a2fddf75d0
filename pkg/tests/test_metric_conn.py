import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from realcalc import (AlignedMetric, CalculusInstance, ConnectionSpec, FreeCalculusInstance,
                      FreeMetric, LieAlgebraSpec, MatrixRep, ScalarMetric, abelian_closed_form,
                      christoffel_free, connection_on_CN, eval_scalar_metric,
                      is_real_metric_calculus, koszul_rhs, lc_abelian, lc_connection_1d,
                      lc_exists_1d, rep_1d, validate_metric, validate_metric_on_CN,
                      verify_pseudo_riemannian)
from realcalc.errors import (DegenerateError, InvalidMetricError, NoLeviCivitaError,
                             SingularMetricError, UnsupportedDimensionError)
from realcalc.matrix_core import unit
from realcalc.metric_conn import eigenvector_residual, leibniz_residual

from gen import abelian_rep, identity_free, random_hermitian, random_unitary, su2_rep

E11 = unit(2, 0, 0)


def inst(diag, v):
    return CalculusInstance(rep_1d(np.diag(diag)), 1, [v])


def random_free_metric(rng, n, N, spread=0.1):
    """Hermitian-valued, h_ij = h_ji, close to the identity."""
    h = np.zeros((n, n, N, N), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            blk = spread * random_hermitian(rng, N)
            if i == j:
                blk = blk + np.eye(N)
            h[i, j] = h[j, i] = blk
    return FreeMetric(h)


# ---------------------------------------------------------------- metrics

def test_eval_scalar_metric():
    e1, e2 = np.array([1, 0]), np.array([0, 1])
    np.testing.assert_array_equal(eval_scalar_metric(ScalarMetric(1), e1, e1), E11)
    np.testing.assert_array_equal(eval_scalar_metric(ScalarMetric(2), e1, e2), 2 * unit(2, 0, 1))
    assert not np.any(eval_scalar_metric(ScalarMetric(3), np.zeros(2), e2))


def test_scalar_metric_needs_nonzero_x():
    with pytest.raises(DegenerateError):
        ScalarMetric(0)


def test_validate_metric_on_cn():
    assert validate_metric_on_CN(2 * E11) == 2.0
    with pytest.raises(InvalidMetricError):
        validate_metric_on_CN(np.eye(2))
    with pytest.raises(DegenerateError):
        validate_metric_on_CN(np.zeros((2, 2)))
    with pytest.raises(DegenerateError):
        validate_metric_on_CN(1j * E11)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_metric_shape_on_cn(N, seed):
    rng = np.random.default_rng(seed)
    x = float(rng.uniform(0.5, 3)) * rng.choice([-1, 1])
    H = x * unit(N, 0, 0)
    assert validate_metric_on_CN(H) == pytest.approx(x)
    noise = rng.standard_normal((N, N))
    noise[0, 0] = 0
    if N > 1 and np.any(noise):
        with pytest.raises(InvalidMetricError):
            validate_metric_on_CN(H + noise)


def test_real_metric_calculus_examples():
    c = inst([1j, -1j], [1, 2j])
    assert is_real_metric_calculus(c, ScalarMetric(-3.0))
    rng = np.random.default_rng(0)
    rep, W, _ = abelian_rep(rng, 2, 3)
    v0 = W[:, 0].conj()
    phi = np.zeros((2, 6), dtype=complex)
    phi[0, :3], phi[1, 3:] = 2 * v0, -1 * v0
    c2 = CalculusInstance(rep, 2, phi)
    M = np.array([[1.0, 0.3], [0.3, -2.0]])
    assert is_real_metric_calculus(c2, AlignedMetric(M, v0, [2, -1]))
    f = identity_free(rep)
    h = np.zeros((2, 2, 3, 3), dtype=complex)
    h[0, 0] = h[1, 1] = np.eye(3)
    h[0, 1], h[1, 0] = 1j * np.eye(3), -1j * np.eye(3)
    assert not is_real_metric_calculus(f, FreeMetric(h))


def test_validate_metric_reports():
    assert validate_metric(ScalarMetric(2.0)).ok
    bad = AlignedMetric(np.array([[1.0, 2.0], [0.0, 1.0]]), [1, 0], [1, 1])
    assert not validate_metric(bad)["symmetric"].passed
    sing = AlignedMetric(np.ones((2, 2)), [1, 0], [1, 1])
    assert not validate_metric(sing)["invertible"].passed


# ---------------------------------------------------------------- 1-d connections

def test_connection_on_cn_examples():
    c = inst([1j, -1j], [1, 0])
    np.testing.assert_allclose(connection_on_CN(c, 3, [1, 0]), [3, 0])
    np.testing.assert_allclose(connection_on_CN(c, 0, [1, 0]), [0, 0])
    s = 2 ** -0.5
    c = inst([1j, -1j], [s, s])
    np.testing.assert_allclose(connection_on_CN(c, 0, [s, s]), [-1j * s, 1j * s], atol=1e-15)


def test_lc_exists_examples():
    assert lc_exists_1d(inst([1j, -1j], [1, 0])) == 1j
    assert lc_exists_1d(inst([1j, -1j], [1, 1])) is None
    assert lc_exists_1d(inst([2j, -1j, -1j], [0, 3, -4j])) == pytest.approx(-1j)


def test_lc_connection_examples():
    c = inst([1j, -1j], [1, 0])
    nabla = lc_connection_1d(c)
    np.testing.assert_allclose(nabla(np.array([0, 1])), [0, 2j])
    np.testing.assert_allclose(nabla(c.phi[0]), [0, 0])
    c3 = inst([1j, 0, -1j], [0, 1, 0])
    v = np.array([1, 2, 3j])
    np.testing.assert_allclose(lc_connection_1d(c3)(v), -v @ np.diag([1j, 0, -1j]))


def test_no_lc_names_condition():
    with pytest.raises(NoLeviCivitaError, match=r"v0 D\(1 - p\) != 0"):
        lc_connection_1d(inst([1j, -1j], [1, 1]))


def test_lc_1d_requires_1d():
    rng = np.random.default_rng(0)
    rep, _, _ = abelian_rep(rng, 2, 3)
    with pytest.raises(UnsupportedDimensionError):
        lc_exists_1d(CalculusInstance(rep, 2, rng.standard_normal((2, 6))))


def _eigen_instance(rng, N):
    W = random_unitary(rng, N)
    vals = rng.integers(-3, 4, size=N).astype(float)
    vals -= vals.mean()
    if not np.any(vals):
        vals[0], vals[-1] = 1.0, -1.0
    D = W @ np.diag(1j * vals) @ W.conj().T
    j = int(rng.integers(N))
    block = np.isclose(vals, vals[j])
    coef = (rng.standard_normal(N) + 1j * rng.standard_normal(N)) * block
    return CalculusInstance(rep_1d(D), 1, [coef @ W.conj().T]), 1j * vals[j]


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**31 - 1), st.floats(-5, 5).filter(lambda x: abs(x) > 0.1))
def test_lc_1d_passes_for_every_x(N, seed, x):
    rng = np.random.default_rng(seed)
    c, lam = _eigen_instance(rng, N)
    assert lc_exists_1d(c) == pytest.approx(lam, abs=1e-9)
    report = verify_pseudo_riemannian(c, ScalarMetric(x), lc_connection_1d(c))
    assert report.ok, report.to_dict()


def test_lambda_character():
    c = inst([1j, -1j], [1, 0])
    h = ScalarMetric(1.0)
    imag = verify_pseudo_riemannian(c, h, ConnectionSpec("lambda_scalar", 1j))
    assert not imag["symmetry"].passed
    real = verify_pseudo_riemannian(c, h, ConnectionSpec("lambda_scalar", 1.0))
    assert real["symmetry"].passed
    assert not real["metric.generators"].passed
    assert verify_pseudo_riemannian(c, h, ConnectionSpec("lambda_scalar", 0.0)).ok


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31 - 1))
def test_no_eigenvector_means_symmetry_fails(N, seed):
    rng = np.random.default_rng(seed)
    W = random_unitary(rng, N)
    D = W @ np.diag(1j * (np.arange(N) - (N - 1) / 2)) @ W.conj().T
    c = CalculusInstance(rep_1d(D), 1, [W[:, 0].conj() + W[:, 1].conj()])
    assert lc_exists_1d(c) is None
    h = ScalarMetric(1.0)
    for lam in rng.standard_normal(100) + 1j * rng.standard_normal(100):
        assert not verify_pseudo_riemannian(c, h, ConnectionSpec("lambda_scalar", lam))["symmetry"].passed


def test_eigenvector_residual():
    assert eigenvector_residual([1, 0], np.diag([1j, -1j])) == 0
    assert eigenvector_residual([1, 1], np.diag([1j, -1j])) > 1


# ---------------------------------------------------------------- abelian LC

def _abelian_aligned(rng, n, N, eigen=True):
    rep, W, _ = abelian_rep(rng, n, N)
    v0 = W[:, 0].conj() if eigen else (W[:, 0] + W[:, 1]).conj() / np.sqrt(2)
    alphas = rng.uniform(0.5, 2, size=n) * rng.choice([-1, 1], size=n)
    phi = np.zeros((n, n * N), dtype=complex)
    for i in range(n):
        phi[i, i * N:(i + 1) * N] = alphas[i] * v0
    A = rng.standard_normal((n, n))
    M = A + A.T + 2 * n * np.eye(n)
    return CalculusInstance(rep, n, phi), AlignedMetric(M, v0, alphas)


def test_lc_abelian_example():
    rep = MatrixRep(LieAlgebraSpec.abelian_of_dim(2), [np.diag([1j, -1j]), np.diag([2j, -2j])])
    c = CalculusInstance(rep, 2, [[1, 0, 0, 0], [0, 0, 1, 0]])
    conn, eig = lc_abelian(c, AlignedMetric(np.eye(2), [1, 0], [1, 1]))
    np.testing.assert_allclose(eig, [1j, 2j])
    assert not np.any(conn.data)
    h = AlignedMetric(np.eye(2), [1, 0], [1, 1])
    assert verify_pseudo_riemannian(c, h, conn).ok
    assert verify_pseudo_riemannian(c, h, abelian_closed_form(c, eig)).ok


def test_lc_abelian_errors():
    rng = np.random.default_rng(5)
    c, h = _abelian_aligned(rng, 2, 3, eigen=False)
    with pytest.raises(NoLeviCivitaError):
        lc_abelian(c, h)
    rep = su2_rep()
    c3 = CalculusInstance(rep, 3, np.eye(6)[::2])
    with pytest.raises(UnsupportedDimensionError):
        lc_abelian(c3, AlignedMetric(np.eye(3), [1, 0], [1, 1, 1]))
    c, h = _abelian_aligned(rng, 2, 3)
    mis = c.phi.copy()
    mis[1, :3] = 1
    with pytest.raises(UnsupportedDimensionError):
        lc_abelian(CalculusInstance(c.rep, 2, mis), h)


def test_lc_abelian_n1_matches_1d():
    c = inst([1j, 0, -1j], [0, 2, 0])
    conn, eig = lc_abelian(c, AlignedMetric([[1.0]], [0, 1, 0], [2.0]))
    assert eig[0] == lc_exists_1d(c)
    v = np.array([1, 2, 3j])
    np.testing.assert_allclose(conn.bind(c)(v), lc_connection_1d(c)(v), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**31 - 1))
def test_lc_abelian_random(n, seed):
    rng = np.random.default_rng(seed)
    c, h = _abelian_aligned(rng, n, n + 2)
    conn, eig = lc_abelian(c, h)
    assert np.abs(conn.data).max() <= 1e-12
    assert verify_pseudo_riemannian(c, h, conn).ok
    closed = abelian_closed_form(c, eig)
    for i in range(n):
        for g in c.phi:
            np.testing.assert_allclose(conn.bind(c)(g, i), closed.bind(c)(g, i), atol=1e-10)


# ---------------------------------------------------------------- Koszul and Christoffel

def test_koszul_constant_metric_vanishes():
    rng = np.random.default_rng(2)
    rep, _, _ = abelian_rep(rng, 2, 3)
    f = identity_free(rep)
    h = FreeMetric(np.einsum("ij,ab->ijab", [[2.0, 0.5], [0.5, 1.0]], np.eye(3)))
    for idx in np.ndindex(2, 2, 2):
        assert not np.any(koszul_rhs(f, h, *idx))
    with pytest.raises(IndexError):
        koszul_rhs(f, h, 0, 0, 2)


def test_koszul_1d_is_derivative_of_metric():
    D = np.diag([1j, -1j])
    f = identity_free(rep_1d(D))
    A = np.array([[1, 2 - 1j], [2 + 1j, 3]])
    np.testing.assert_allclose(koszul_rhs(f, FreeMetric([[A]]), 0, 0, 0), D @ A - A @ D)
    assert not np.any(koszul_rhs(f, FreeMetric([[np.eye(2)]]), 0, 0, 0))


def test_koszul_bracket_terms():
    rep = su2_rep()
    f = identity_free(rep)
    h = FreeMetric(np.einsum("ij,ab->ijab", np.eye(3), np.eye(2)))
    # constant metric: only bracket terms survive; c_01^2 = 1
    R = koszul_rhs(f, h, 0, 1, 2)
    # -h(e_0, [e_1, e_2]) + h(e_1, [e_2, e_0]) + h(e_2, [e_0, e_1]) = -1 + 1 + 1
    np.testing.assert_allclose(R, np.eye(2))


def test_christoffel_flat_examples():
    rng = np.random.default_rng(3)
    rep, _, _ = abelian_rep(rng, 2, 3)
    f = identity_free(rep)
    conn = christoffel_free(f, FreeMetric(np.einsum("ij,ab->ijab", np.eye(2), np.eye(3))))
    assert not np.any(conn.data)
    W = random_unitary(rng, 3)
    D = W @ np.diag([1j, 0, -1j]) @ W.conj().T
    assert not np.any(christoffel_free(identity_free(rep_1d(D)), FreeMetric([[np.eye(3)]])).data)


def test_christoffel_errors():
    rep = rep_1d(np.diag([1j, -1j]))
    f = identity_free(rep)
    with pytest.raises(SingularMetricError):
        christoffel_free(f, FreeMetric([[E11]]))
    with pytest.raises(InvalidMetricError):
        christoffel_free(f, FreeMetric([[np.array([[1, 1j], [1j, 1]])]]))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(2, 4), st.integers(0, 2**31 - 1))
def test_christoffel_passes_verifier(n, N, seed):
    rng = np.random.default_rng(seed)
    rep, _, _ = abelian_rep(rng, min(n, N - 1), N)
    f = identity_free(rep)
    h = random_free_metric(rng, rep.n, N)
    conn = christoffel_free(f, h)
    report = verify_pseudo_riemannian(f, h, conn, seed=seed)
    assert report.ok, report.to_dict()


@pytest.mark.parametrize("seed", range(5))
def test_christoffel_nonabelian_nonidentity_basis(seed):
    rng = np.random.default_rng(seed)
    rep = su2_rep()
    basis = np.array([[random_unitary(rng, 2) if i == j else np.zeros((2, 2))
                       for j in range(3)] for i in range(3)])
    f = FreeCalculusInstance(rep, basis)
    h = random_free_metric(rng, 3, 2)
    conn = christoffel_free(f, h)
    assert verify_pseudo_riemannian(f, h, conn).ok


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_lc_uniqueness(seed):
    rng = np.random.default_rng(seed)
    rep, _, _ = abelian_rep(rng, 2, 3)
    f = identity_free(rep)
    h = random_free_metric(rng, 2, 3)
    conn = christoffel_free(f, h)
    i, j, k = rng.integers(2, size=3)
    data = conn.data.copy()
    data[i, j, k] += 1e-3 * (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    report = verify_pseudo_riemannian(f, h, ConnectionSpec("christoffel", data))
    assert max(report.residuals().values()) > 1e-4


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_leibniz_for_all_kinds(seed):
    rng = np.random.default_rng(seed)
    N = 3
    a = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    c1, _ = _eigen_instance(rng, N)
    v = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    lam = complex(rng.standard_normal(), rng.standard_normal())
    assert leibniz_residual(c1, ConnectionSpec("lambda_scalar", lam), 0, v, a) < 1e-9
    assert leibniz_residual(c1, ConnectionSpec("endomorphism", [[[lam]]]), 0, v, a) < 1e-9
    c2, h2 = _abelian_aligned(rng, 2, N)
    conn, _ = lc_abelian(c2, h2)
    v2 = rng.standard_normal(2 * N) + 1j * rng.standard_normal(2 * N)
    tensor = ConnectionSpec("lambda_tensor", rng.standard_normal((2, 2, 2)) + 0j)
    for i in range(2):
        assert leibniz_residual(c2, conn, i, v2, a) < 1e-9
        assert leibniz_residual(c2, tensor, i, v2, a) < 1e-9
    rep, _, _ = abelian_rep(rng, 2, N)
    f = identity_free(rep)
    gamma = ConnectionSpec("christoffel", rng.standard_normal((2, 2, 2, N, N)) + 0j)
    m = rng.standard_normal((2, N, N)) + 1j * rng.standard_normal((2, N, N))
    assert leibniz_residual(f, gamma, 1, m, a) < 1e-9
