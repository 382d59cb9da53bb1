import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entmeas.errors import DimensionError, ValidationError
from entmeas.operator_core import (
    eig_general,
    eig_hermitian,
    hs_inner,
    matrix_unit,
    partial_trace,
    tensor,
    unvec,
    vec,
)

from randstates import ginibre, random_density


def test_tensor_identity_and_diagonal():
    assert np.array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(tensor(np.diag([1, -1]), np.eye(2)), np.diag([1, 1, -1, -1]))


def test_tensor_index_convention(rng):
    a, b = ginibre(rng, 2, 3), ginibre(rng, 3, 2)
    t = tensor(a, b)
    assert t.shape == (6, 6)
    for ia in range(2):
        for ib in range(3):
            for ja in range(3):
                for jb in range(2):
                    assert np.isclose(t[ia * 3 + ib, ja * 2 + jb], a[ia, ja] * b[ib, jb])


def test_trace_of_tensor_by_contraction(rng):
    a, b = ginibre(rng, 2), ginibre(rng, 2)
    t = tensor(a, b)
    # trace via explicit index contraction
    tr = sum(a[i, i] * b[j, j] for i in range(2) for j in range(2))
    assert np.isclose(np.trace(t), tr)
    assert np.isclose(np.trace(t), np.trace(a) * np.trace(b))


def test_tensor_associative(rng):
    a, b, c = ginibre(rng, 2), ginibre(rng, 3), ginibre(rng, 2)
    assert np.allclose(tensor(tensor(a, b), c), tensor(a, tensor(b, c)), atol=1e-12)


def test_partial_trace_product_state(rng):
    ra, rm = random_density(rng, 2).matrix, random_density(rng, 3).matrix
    assert np.allclose(partial_trace(np.kron(ra, rm), (2, 3), keep=0), ra)
    assert np.allclose(partial_trace(np.kron(ra, rm), (2, 3), keep=1), rm)


def test_partial_trace_bell():
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rho = np.outer(psi, psi)
    for keep in (0, 1):
        assert np.allclose(partial_trace(rho, (2, 2), keep=keep), np.eye(2) / 2)


def test_partial_trace_nested_loop_oracle(rng):
    m = random_density(rng, 4).matrix
    first = np.zeros((2, 2), complex)
    second = np.zeros((2, 2), complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    if k == l:
                        first[i, j] += m[i * 2 + k, j * 2 + l]
                        second[i, j] += m[k * 2 + i, l * 2 + j]
    assert np.allclose(partial_trace(m, (2, 2), keep=0), first, atol=1e-14)
    assert np.allclose(partial_trace(m, (2, 2), keep=1), second, atol=1e-14)


def test_partial_trace_multipartite(rng):
    a, b, c = (random_density(rng, d).matrix for d in (2, 3, 2))
    m = np.kron(a, np.kron(b, c))
    assert np.allclose(partial_trace(m, (2, 3, 2), keep=(0, 2)), np.kron(a, c))
    assert np.allclose(partial_trace(m, (2, 3, 2), keep=1), b)


def test_partial_trace_dimension_mismatch():
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4), (2, 3))


@settings(max_examples=40, deadline=None)
@given(da=st.integers(2, 4), db=st.integers(2, 4), seed=st.integers(0, 2**32 - 1))
def test_partial_trace_of_tensor_property(da, db, seed):
    rng = np.random.default_rng(seed)
    a, b = ginibre(rng, da), ginibre(rng, db)
    assert np.allclose(partial_trace(tensor(a, b), (da, db), keep=0), a * np.trace(b), atol=1e-10)


def test_vec_column_stacking():
    m = np.array([[1, 2], [3, 4]])
    assert np.array_equal(vec(m), [1, 3, 2, 4])
    assert np.array_equal(unvec(vec(m)), m)


def test_eig_hermitian_diagonal():
    e = eig_hermitian(np.diag([3.0, 1.0]))
    assert np.allclose(e.eigenvalues, [3, 1])
    assert np.allclose(e.eigenvectors, np.eye(2))


def test_eig_hermitian_2x2_characteristic_polynomial():
    m = np.array([[0.5, 0.25], [0.25, 0.5]])
    tr, det = np.trace(m), np.linalg.det(m)
    disc = np.sqrt(tr**2 - 4 * det)
    expected = [(tr + disc) / 2, (tr - disc) / 2]
    assert np.allclose(eig_hermitian(m).eigenvalues, expected, atol=1e-14)
    assert np.allclose(expected, [0.75, 0.25])


def test_eig_hermitian_identity_degenerate():
    e = eig_hermitian(np.eye(4))
    assert np.allclose(e.eigenvalues, 1)
    assert np.allclose(e.eigenvectors, np.eye(4))


def test_eig_hermitian_phase_convention(rng):
    g = ginibre(rng, 5)
    e = eig_hermitian(g + g.conj().T)
    for v in e.eigenvectors.T:
        idx = np.argmax(np.abs(v))
        assert abs(v[idx].imag) < 1e-12 and v[idx].real > 0


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        eig_hermitian([[0, 1], [0, 0]])


@settings(max_examples=40, deadline=None)
@given(D=st.integers(1, 8), seed=st.integers(0, 2**32 - 1))
def test_eig_hermitian_reconstruction(D, seed):
    rng = np.random.default_rng(seed)
    g = ginibre(rng, D)
    m = g + g.conj().T
    e = eig_hermitian(m)
    assert np.max(np.abs(e.reconstruct() - m)) < 1e-9
    assert np.allclose(e.eigenvectors.conj().T @ e.eigenvectors, np.eye(D), atol=1e-10)
    assert np.all(np.diff(e.eigenvalues) <= 0)


def test_eig_general_nilpotent():
    s = eig_general([[0, 1], [0, 0]])
    assert s.eigenvalues == ((0j, 2),)
    assert s.geometric == (1,)
    assert s.defective


def test_eig_general_identity():
    s = eig_general(np.eye(5))
    assert s.eigenvalues == ((1 + 0j, 5),)
    assert s.geometric == (5,)
    assert not s.defective


@settings(max_examples=30, deadline=None)
@given(D=st.integers(2, 6), seed=st.integers(0, 2**32 - 1))
def test_eig_general_agrees_on_hermitian(D, seed):
    rng = np.random.default_rng(seed)
    g = ginibre(rng, D)
    m = g + g.conj().T
    s = eig_general(m)
    assert not s.defective
    assert sum(a for _, a in s.eigenvalues) == D
    flat = sorted(lam.real for lam, a in s.eigenvalues for _ in range(a))
    assert np.allclose(flat, sorted(eig_hermitian(m).eigenvalues), atol=1e-9)


def test_hs_inner():
    p12, p11, p22 = matrix_unit(2, 0, 1), matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)
    assert hs_inner(p12, p12) == 1
    assert hs_inner(p11, p22) == 0
    assert hs_inner(np.eye(2), np.eye(2)) == 2
    with pytest.raises(DimensionError):
        hs_inner(np.eye(2), np.eye(3))
