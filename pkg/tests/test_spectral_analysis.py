import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entmeas.entanglement_matrix import qubit_family
from entmeas.errors import DimensionError, ValidationError
from entmeas.measurement_superop import entangling_measurement, standard_measurement, complete_partition
from entmeas.operator_core import matrix_unit
from entmeas.spectral_analysis import (
    annihilates,
    canonical_qubit_basis,
    from_basis_coordinates,
    jordan_witness,
    matrix_in_eigen_basis,
    spectral_report,
    verify_qubit_null_forms,
)

from randstates import random_R

P11, P12, P21, P22 = (matrix_unit(2, k, l) for k, l in ((0, 0), (0, 1), (1, 0), (1, 1)))

disk = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0, 1), st.floats(0, 2 * np.pi))


def apply_eq6_directly(q, x):
    """Entangling map on a 4x4 operator, index by index, for R = [[1, q], [q*, 1]]."""
    R = np.array([[1, q], [np.conj(q), 1]])
    tr_m = np.array([[x[2 * a, 2 * b] + x[2 * a + 1, 2 * b + 1] for b in range(2)] for a in range(2)])
    out = np.zeros((4, 4), complex)
    for k in range(2):
        for l in range(2):
            out += R[k, l] * tr_m[k, l] * np.kron(matrix_unit(2, k, l), matrix_unit(2, k, l))
    return out


def test_report_q_half():
    rep = spectral_report(entangling_measurement(qubit_family(0.5)))
    assert rep.unit_eigenspace_dim == 2
    assert rep.zero_algebraic_dim == 14
    assert rep.zero_geometric_dim == 12
    assert rep.defective
    assert rep.unit_eigenspace_dim + rep.zero_algebraic_dim == 16
    assert len(rep.jordan_chain_witnesses) == 2


def test_report_standard():
    rep = spectral_report(entangling_measurement(qubit_family(0)))
    assert rep.zero_geometric_dim == 14
    assert not rep.defective
    assert rep.jordan_chain_witnesses == ()


@pytest.mark.parametrize("q", [0, 0.3, 0.5j, 1])
def test_unit_eigenvectors(q):
    S = entangling_measurement(qubit_family(q))
    for op in (np.kron(P11, P11), np.kron(P22, P22)):
        assert np.allclose(S(op), op)


@pytest.mark.parametrize("q", [0.5, 1, -0.6j])
def test_witnesses_are_chains(q):
    S = entangling_measurement(qubit_family(q))
    for v, mv in spectral_report(S).jordan_chain_witnesses:
        assert np.allclose(S(v), mv)
        assert np.max(np.abs(mv)) > 1e-6
        assert annihilates(S, mv)


@settings(max_examples=25, deadline=None)
@given(q=disk)
def test_multiplicities_over_disk(q):
    rep = spectral_report(entangling_measurement(qubit_family(q)))
    assert rep.zero_algebraic_dim == 14
    if abs(q) > 1e-6:
        assert rep.zero_geometric_dim == 12 and rep.defective
    else:
        assert rep.zero_geometric_dim == 14 and not rep.defective


def test_report_general_dimension(rng):
    # D = 3: unit dim D, kernel of Tr_M has D^4 - D^2, and D(D-1) Jordan pairs
    rep = spectral_report(entangling_measurement(random_R(rng, 3)))
    assert rep.unit_eigenspace_dim == 3
    assert rep.zero_algebraic_dim == 78
    assert rep.zero_geometric_dim == 72
    assert len(rep.jordan_chain_witnesses) == 6


@pytest.mark.parametrize("q", [0.5, 1, 0])
def test_null_forms(q):
    assert verify_qubit_null_forms(entangling_measurement(qubit_family(q)), q)


def test_standard_extra_nulls():
    S0 = entangling_measurement(qubit_family(0))
    assert annihilates(S0, np.kron(P12, np.eye(2)))
    assert annihilates(S0, np.kron(P21, np.eye(2)))
    S = entangling_measurement(qubit_family(0.5))
    assert not annihilates(S, np.kron(P12, np.eye(2)))
    # asking for the q = 0 nulls on an entangling map fails
    assert not verify_qubit_null_forms(S, 0)


def test_null_forms_detect_wrong_map():
    identity_like = standard_measurement(complete_partition(2), 2)
    assert verify_qubit_null_forms(identity_like)
    from entmeas.measurement_superop import Superoperator

    assert not verify_qubit_null_forms(Superoperator.identity((2, 2)))


@pytest.mark.parametrize("q", [1, 0.5, 0.3 - 0.4j])
def test_jordan_witness(q):
    S = entangling_measurement(qubit_family(q))
    v, image = jordan_witness(S, q)
    assert np.allclose(v, np.kron(P12, np.eye(2)) / 2)
    assert np.allclose(image, apply_eq6_directly(q, v), atol=1e-15)
    assert np.allclose(image, q * np.kron(P12, P12))


def test_jordan_witness_q_zero():
    with pytest.raises(ValidationError):
        jordan_witness(entangling_measurement(qubit_family(0)), 0)


def nonzero_pattern(C, tol=1e-10):
    return {(int(i) + 1, int(j) + 1): C[i, j] for i, j in np.argwhere(np.abs(C) > tol)}


def test_matrix_form_q_half():
    C = matrix_in_eigen_basis(entangling_measurement(qubit_family(0.5)), canonical_qubit_basis())
    pat = nonzero_pattern(C)
    assert set(pat) == {(1, 1), (2, 2), (13, 15), (14, 16)}
    assert np.allclose([pat[1, 1], pat[2, 2], pat[13, 15], pat[14, 16]], [1, 1, 0.5, 0.5])


def test_matrix_form_standard():
    C = matrix_in_eigen_basis(entangling_measurement(qubit_family(0)), canonical_qubit_basis())
    assert set(nonzero_pattern(C)) == {(1, 1), (2, 2)}


@settings(max_examples=25, deadline=None)
@given(q=disk)
def test_matrix_form_any_q(q):
    S = entangling_measurement(qubit_family(q))
    basis = canonical_qubit_basis()
    C = matrix_in_eigen_basis(S, basis)
    assert abs(C[12, 14] - q) < 1e-10 and abs(C[13, 15] - np.conj(q)) < 1e-10
    assert set(nonzero_pattern(C @ C)) == {(1, 1), (2, 2)}
    assert np.max(np.abs(from_basis_coordinates(C, basis).matrix - S.matrix)) < 1e-9


def test_matrix_in_basis_singular():
    basis = canonical_qubit_basis()
    basis[3] = basis[2]
    with pytest.raises(ValidationError):
        matrix_in_eigen_basis(entangling_measurement(qubit_family(0.5)), basis)


def test_qubit_only_operations():
    S3 = entangling_measurement(np.eye(3))
    with pytest.raises(DimensionError):
        verify_qubit_null_forms(S3)
    with pytest.raises(DimensionError):
        jordan_witness(S3, 0.5)
