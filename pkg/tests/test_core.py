import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from moyalgeo.core import (ModelParams, TruncatedOperator, commutator, covariance_defect, deriv_z,
                           deriv_zbar, displacement, energies, hamiltonian, hermitian_function,
                           identity, ladder, number_op, operator_norm, position_ops)
from moyalgeo.errors import ContractViolation, InvalidTruncation, TruncationTooSmall

lams = st.floats(0.3, 3.0)
sizes = st.integers(3, 24)


def test_ladder_small():
    a, ad = ladder(3, 1.0)
    want = [[0, 1, 0], [0, 0, np.sqrt(2)], [0, 0, 0]]
    assert np.allclose(a.entries, want)
    assert np.allclose(ad.entries, np.transpose(want))


def test_ladder_commutator_examples():
    a, ad = ladder(2, 1.0)
    assert commutator(a, ad)[0, 0] == pytest.approx(1.0)
    a, ad = ladder(6, 2.0)
    c = commutator(a, ad)
    assert np.allclose(np.diag(c)[:5], 4.0)


@given(sizes, lams)
def test_ccr_on_interior(n, lam):
    a, ad = ladder(n, lam)
    c = commutator(a, ad)
    k = n - 1
    assert np.allclose(c[:k, :k], lam**2 * np.eye(k), atol=1e-12 * lam**2 * n)


def test_position_examples():
    q1, q2 = position_ops(4, 1.0)
    assert commutator(q1, q2)[0, 0] == pytest.approx(1j)
    assert np.trace(q1.entries) == 0
    q1, _ = position_ops(8, 1.0)
    assert (q1.entries @ q1.entries)[0, 0].real == pytest.approx(0.5)


@given(sizes, lams)
def test_hermiticity_and_number_commutation(n, lam):
    q1, q2 = position_ops(n, lam)
    h = hamiltonian(n, lam)
    for op in (q1, q2, h):
        assert op.is_hermitian()
    assert np.allclose(commutator(h, number_op(n, lam)), 0)


def test_hamiltonian_examples():
    assert np.allclose(hamiltonian(3, 1.0).entries, np.diag([0.5, 1.5, 2.5]))
    assert np.allclose(hamiltonian(3, 0.0).entries, 0)
    assert np.allclose(hamiltonian(3, 2.0).entries, np.diag([2, 6, 10]))
    assert np.allclose(energies(3, 2.0), [2, 6, 10])


def test_displacement_identity_for_zero():
    assert np.allclose(displacement((0, 0), 10).entries, np.eye(10))


def test_displacement_mean_and_second_moment():
    n = 64
    q1, _ = position_ops(n)
    psi = displacement((1, 0), n).entries[:, 0]
    assert np.vdot(psi, q1.entries @ psi).real == pytest.approx(1.0, abs=1e-8)
    psi = displacement((1, 2), n).entries[:, 0]
    q1sq = q1.entries @ q1.entries
    assert np.vdot(psi, q1sq @ psi).real == pytest.approx(q1sq[0, 0].real + 1, abs=1e-8)


def test_displacement_matches_expm_oracle():
    n, lam, kappa = 30, 1.3, (0.4, -0.7)
    a, ad = ladder(n, lam)
    kc = (kappa[0] + 1j * kappa[1]) / np.sqrt(2)
    ref = expm((kc * ad.entries - np.conj(kc) * a.entries) / lam**2)
    assert np.allclose(displacement(kappa, n, lam).entries, ref, atol=1e-11)


def test_displacement_is_unitary():
    u = displacement((2.0, 1.0), 40).entries
    assert np.allclose(u.conj().T @ u, np.eye(40), atol=1e-12)


def test_displacement_too_small_truncation_raises():
    with pytest.raises(TruncationTooSmall):
        displacement((6.0, 6.0), 12)


@settings(max_examples=25, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_displacement_inverse_is_adjoint(k1, k2):
    n = 48
    u = displacement((k1, k2), n).entries
    v = displacement((-k1, -k2), n).entries
    b = 3 * n // 4
    assert np.abs(v - u.conj().T)[:b, :b].max() <= 1e-10


def test_covariance_defect_small_at_adequate_truncation():
    u = displacement((1.0, -0.5), 48)
    assert covariance_defect(u, (1.0, -0.5)) < 1e-10


def test_hermitian_function_examples():
    assert np.allclose(hermitian_function(np.diag([4.0, 9.0]), np.sqrt).entries, np.diag([2, 3]))
    h = hamiltonian(3, 1.0)
    out = hermitian_function(h, lambda w: 2 * np.sqrt(w))
    assert np.allclose(out.entries, np.diag(np.sqrt([2, 6, 10])))
    assert np.allclose(hermitian_function(identity(4), np.exp).entries, np.e * np.eye(4))


@given(sizes, lams)
def test_hermitian_function_identity_map(n, lam):
    q1, _ = position_ops(n, lam)
    out = hermitian_function(q1, lambda w: w)
    assert np.abs(out.entries - q1.entries).max() <= 1e-12 * max(1, np.abs(q1.entries).max()) * n


def test_hermitian_function_matches_expm():
    q1, _ = position_ops(12, 0.8)
    assert np.allclose(hermitian_function(q1, np.exp).entries, expm(q1.entries), atol=1e-10)


def test_hermitian_function_rejects_non_hermitian():
    a, _ = ladder(4)
    with pytest.raises(ContractViolation):
        hermitian_function(a, np.sqrt)


def test_operator_norm_examples():
    assert operator_norm(np.zeros((3, 3))) == 0
    a, _ = ladder(4, 1.0)
    assert operator_norm(a) == pytest.approx(np.sqrt(3))
    assert operator_norm(np.diag([-2.0, 1.0])) == pytest.approx(2)


@given(st.integers(2, 12), st.integers(0, 2**31 - 1))
def test_operator_norm_matches_svd(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assert operator_norm(m) == pytest.approx(np.linalg.svd(m, compute_uv=False)[0], rel=1e-10)


def test_deriv_examples():
    n = 8
    a, _ = ladder(n, 1.0)
    d = deriv_z(a).entries
    assert np.allclose(d[: n - 1, : n - 1], np.eye(n - 1))
    assert np.allclose(deriv_z(identity(n)).entries, 0)
    l0 = np.diag([0, 1 / np.sqrt(2), (1 + 1 / np.sqrt(2)) / np.sqrt(2),
                  (1 + 1 / np.sqrt(2) + 1 / np.sqrt(3)) / np.sqrt(2),
                  (1 + 1 / np.sqrt(2) + 1 / np.sqrt(3) + 0.5) / np.sqrt(2)])
    dz = deriv_z(TruncatedOperator(l0, 1.0, True)).entries
    assert np.allclose(np.diag(dz, -1), 1 / np.sqrt(2))
    off = dz - np.diag(np.diag(dz, -1), -1)
    assert np.allclose(off, 0)


@given(st.integers(3, 10), st.integers(0, 2**31 - 1), lams)
def test_deriv_linearity_and_adjoint(n, seed, lam):
    rng = np.random.default_rng(seed)
    x = TruncatedOperator(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)), lam)
    y = TruncatedOperator(rng.normal(size=(n, n)), lam)
    c = 0.7 - 0.2j
    assert np.allclose(deriv_z(x + c * y).entries, deriv_z(x).entries + c * deriv_z(y).entries)
    assert np.allclose(deriv_zbar(x.dag).entries, deriv_z(x).dag.entries, atol=1e-12)


def test_model_params_validation():
    ModelParams(1.0, 8, 1e-8)
    with pytest.raises(ValueError):
        ModelParams(0.0, 8)
    with pytest.raises(InvalidTruncation):
        ModelParams(1.0, 3)
    with pytest.raises(ValueError):
        ModelParams(1.0, 8, 2.0)


def test_hermitian_tag_is_checked():
    with pytest.raises(ContractViolation):
        TruncatedOperator(np.array([[0, 1], [0, 0]]), 1.0, True)
