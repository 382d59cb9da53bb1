import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entmeas.errors import DimensionError, ValidationError
from entmeas.info_metrics import von_neumann_entropy
from entmeas.operator_core import partial_trace
from entmeas.quantum_state import (
    DensityMatrix,
    PureState,
    density_from_matrix,
    density_from_pure,
    maximum_uncertainty_state,
    purify,
    qc_state,
)

from randstates import random_density, random_pure


def test_density_from_matrix_accepts_maximally_mixed():
    rho = density_from_matrix(np.eye(2) / 2)
    assert rho.dims == (2,)
    assert not rho.matrix.flags.writeable


@pytest.mark.parametrize(
    "m, condition",
    [
        (np.diag([1.2, -0.2]), "psd"),
        (np.diag([0.6, 0.6]), "trace"),
        (np.array([[0.5, 0.1], [0.3, 0.5]]), "hermitian"),
    ],
)
def test_density_from_matrix_rejects(m, condition):
    with pytest.raises(ValidationError) as exc:
        density_from_matrix(m)
    assert exc.value.condition == condition


def test_density_dims_must_match():
    with pytest.raises(DimensionError):
        density_from_matrix(np.eye(4) / 4, (2, 3))


def test_density_from_pure_examples():
    assert np.allclose(density_from_pure(PureState([1, 0])).matrix, np.diag([1, 0]))
    half = density_from_pure(PureState([1 / np.sqrt(2), 1 / np.sqrt(2)])).matrix
    assert np.allclose(half, 0.5)


def test_density_from_pure_has_zero_entropy(rng):
    for D in (2, 3, 5):
        assert abs(von_neumann_entropy(density_from_pure(random_pure(rng, D)))) < 1e-9


def test_pure_state_normalization():
    with pytest.raises(ValidationError):
        PureState([1, 1])


def test_maximum_uncertainty_state():
    assert np.allclose(maximum_uncertainty_state(2).amplitudes, 1 / np.sqrt(2))
    assert np.array_equal(maximum_uncertainty_state(4).amplitudes, [0.5] * 4)
    for D in range(1, 7):
        rho = density_from_pure(maximum_uncertainty_state(D)).matrix
        assert np.allclose(rho, 1 / D, atol=1e-15, rtol=0)
    with pytest.raises(DimensionError):
        maximum_uncertainty_state(0)


def test_maximum_uncertainty_powers_of_two_exact():
    # 1/sqrt(D) squares to 1/D exactly when D is a power of four
    for D in (1, 4, 16):
        rho = density_from_pure(maximum_uncertainty_state(D)).matrix
        assert np.all(rho == 1 / D)


def test_purify_pure_state_is_product():
    rho = density_from_pure(PureState([0.6, 0.8j]))
    psi = purify(rho).amplitudes.reshape(2, 2)
    # a single Schmidt term: reference factor is |0>
    assert np.allclose(psi[:, 1], 0)
    assert np.allclose(np.abs(psi[:, 0]), [0.6, 0.8])


def test_purify_maximally_mixed_gives_bell():
    psi = purify(DensityMatrix(np.eye(2) / 2)).amplitudes
    assert np.allclose(psi, np.array([1, 0, 0, 1]) / np.sqrt(2))


@settings(max_examples=30, deadline=None)
@given(D=st.sampled_from([2, 3, 4]), seed=st.integers(0, 2**32 - 1))
def test_purify_then_trace_recovers(D, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, D)
    psi = purify(rho).amplitudes
    reduced = partial_trace(np.outer(psi, psi.conj()), (D, D), keep=0)
    assert np.max(np.abs(reduced - rho.matrix)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(D=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_density_from_pure_always_valid(D, seed):
    psi = random_pure(np.random.default_rng(seed), D)
    density_from_matrix(density_from_pure(psi).matrix)


def test_qc_state_examples(rng):
    rho = random_density(rng, 2).matrix
    s = qc_state(["a", "b"], [rho / 2, rho / 2])
    assert np.allclose(s.total, rho)
    assert np.allclose(s["b"], rho / 2)
    qc_state({0: rho})


def test_qc_state_positivity():
    with pytest.raises(ValidationError) as exc:
        qc_state([1, 2], [np.diag([0.5, -0.1]), np.diag([0.6, 0.0])])
    assert exc.value.condition == "positivity"


def test_qc_state_total_trace():
    with pytest.raises(ValidationError) as exc:
        qc_state([1, 2], [np.diag([0.5, 0.1]), np.diag([0.6, 0.0])])
    assert exc.value.condition == "trace"
