import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moyalgeo.core import ladder, position_ops
from moyalgeo.errors import InvalidTruncation
from moyalgeo.states import Coherent, Eigenstate, Vector
from moyalgeo.tensor import (exchange, ground_kernel, interior_sectors, kernel_dimension_numeric,
                             length, length_sq, length_sq_dense, schmidt_rank, sector_indices,
                             spectrum_L, uncertainty, universal_diff)


def test_universal_diff_small():
    q1, _ = position_ops(2, 1.0)
    d = universal_diff(q1).entries
    s = 1 / math.sqrt(2)
    want = np.array([[0, -s, s, 0], [-s, 0, 0, s], [s, 0, 0, -s], [0, s, -s, 0]])
    assert np.allclose(d, want)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_sector_form_matches_dense(n):
    dense = length_sq_dense(n, 1.3).entries
    sect = length_sq(n, 1.3).to_dense().entries
    assert np.allclose(sect, dense, atol=1e-12)


@pytest.mark.parametrize("n", [6, 12])
def test_two_forms_agree_on_interior_sectors(n):
    a = length_sq(n, 0.7, form="differentials")
    b = length_sq(n, 0.7, form="ladder")
    for s in interior_sectors(n):
        assert np.allclose(a.blocks[s], b.blocks[s], atol=1e-12)


def test_unknown_form_and_small_truncation():
    with pytest.raises(ValueError):
        length_sq(4, form="other")
    with pytest.raises(InvalidTruncation):
        length_sq(1)


def test_sector_indices():
    i, j = sector_indices(4, 5)
    assert list(zip(i, j)) == [(2, 3), (3, 2)]


def test_spectrum_at_40():
    sp = spectrum_L(40, 1.0, levels=4)
    assert not sp.unreliable
    for lvl in sp.levels:
        assert lvl.eigenvalue == pytest.approx(math.sqrt(4 * lvl.level + 2), abs=1e-5)


def test_spectrum_multiplicity_finite_n():
    sp = spectrum_L(20, 1.0, levels=1)
    assert sp.levels[0].multiplicity == 19


@given(st.floats(0.3, 3.0))
@settings(max_examples=10, deadline=None)
def test_spectrum_scales_with_lambda(lam):
    sp = spectrum_L(16, lam, levels=2)
    for lvl in sp.levels:
        assert lvl.eigenvalue == pytest.approx(lam * math.sqrt(4 * lvl.level + 2), rel=1e-8)


def test_spectrum_edge_cases():
    assert spectrum_L(10, levels=0).levels == []
    assert spectrum_L(8, levels=5).unreliable


def test_length_sq_bounded_below():
    l2 = length_sq(14, 1.0)
    for s, w in l2.eigenvalues(interior_sectors(14)).items():
        assert w.min() >= 2 - 1e-10


def test_length_is_root_of_length_sq():
    n = 10
    l2 = length_sq(n).to_dense().entries
    l = length(n).to_dense().entries
    assert np.allclose(l @ l, l2, atol=1e-10)


def test_low_sector_kernel_vectors():
    n = 6
    a, _ = ladder(n)
    da = universal_diff(a).entries
    e = np.eye(n)
    v0 = np.kron(e[0], e[0])
    v1 = (np.kron(e[0], e[1]) + np.kron(e[1], e[0])) / math.sqrt(2)
    v2 = (math.sqrt(2) * np.kron(e[1], e[1]) + np.kron(e[2], e[0]) + np.kron(e[0], e[2])) / 2
    for v in (v0, v1, v2):
        assert np.linalg.norm(v) == pytest.approx(1)
        assert np.linalg.norm(da @ v) < 1e-10


def test_ground_kernel_structure():
    gk = ground_kernel(16, 1.0, max_total=10)
    assert len(gk.sectors) == 11
    assert max(gk.residuals) < 1e-10
    assert gk.schmidt_ranks.count(1) == 1
    assert np.allclose(gk.vectors @ gk.vectors.T, np.eye(11), atol=1e-12)
    assert kernel_dimension_numeric(16, 1.0, max_total=10) == 11


def test_kernel_is_exchange_symmetric():
    n = 9
    gk = ground_kernel(n)
    p = exchange(n)
    for v in gk.vectors:
        assert np.allclose(p @ v, v)


def test_length_commutes_with_exchange():
    n = 6
    p = exchange(n)
    l2 = length_sq(n).to_dense().entries
    assert np.allclose(p @ l2 @ p.T, l2)


def test_schmidt_rank_examples():
    e = np.eye(3)
    assert schmidt_rank(np.kron(e[0], e[1]), 3) == 1
    assert schmidt_rank((np.kron(e[0], e[1]) + np.kron(e[1], e[0])) / math.sqrt(2), 3) == 2


def test_kernel_dimension_requires_room():
    with pytest.raises(InvalidTruncation):
        kernel_dimension_numeric(8, max_total=7)


@pytest.mark.parametrize("kappa", [(0.0, 0.0), (1.0, 2.0), (-3.0, 0.0)])
def test_coherent_ground_states_saturate_uncertainty(kappa):
    spec = Coherent(0, kappa)
    q1, q2 = position_ops(64, 1.0)
    assert uncertainty(spec, q1) * uncertainty(spec, q2) == pytest.approx(0.5, abs=1e-8)


def test_eigenstate_uncertainty():
    q1, q2 = position_ops(20, 1.0)
    for m in range(4):
        assert uncertainty(Eigenstate(m), q1) == pytest.approx(math.sqrt(m + 0.5))


@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=10).filter(lambda c: np.linalg.norm(c) > 1e-2))
def test_uncertainty_bound_random_vectors(coeffs):
    n = len(coeffs) + 2
    q1, q2 = position_ops(n, 1.0)
    v = Vector.normalized(coeffs)
    assert uncertainty(v, q1) * uncertainty(v, q2) >= 0.5 - 1e-8
