"""The entanglement matrix ``R`` that parametrizes an entangling measurement.

A valid ``R`` is Hermitian, has unit diagonal (trace preservation of the
measurement) and is positive semidefinite (complete positivity).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .operator_core import HERMITIAN_TOL, as_matrix, is_hermitian
from .quantum_state import PSD_TOL, _frozen

DIAG_TOL = 1e-10

__all__ = [
    "EntanglementMatrix",
    "check_entanglement_matrix",
    "duplication_matrix",
    "normalized_spectrum",
    "qubit_family",
    "standard_matrix",
    "validate_entanglement_matrix",
]


def check_entanglement_matrix(m) -> dict[str, bool]:
    """Evaluate each defining condition separately.

    Returns a mapping ``{"square", "hermitian", "normalization", "psd"}`` to
    booleans; later checks are ``False`` when an earlier one makes them
    meaningless.
    """
    arr = as_matrix(m, "entanglement matrix")
    checks = {"square": arr.shape[0] == arr.shape[1] and arr.shape[0] >= 1}
    checks["hermitian"] = checks["square"] and is_hermitian(arr, HERMITIAN_TOL)
    checks["normalization"] = checks["square"] and bool(
        np.all(np.abs(np.diag(arr) - 1) <= DIAG_TOL)
    )
    if checks["hermitian"]:
        low = np.linalg.eigvalsh((arr + arr.conj().T) / 2).min()
        checks["psd"] = bool(low >= -PSD_TOL)
    else:
        checks["psd"] = False
    return checks


@dataclass(frozen=True)
class EntanglementMatrix:
    """Hermitian, unit-diagonal, positive semidefinite ``D x D`` matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        arr = as_matrix(self.matrix, "entanglement matrix")
        checks = check_entanglement_matrix(arr)
        if not checks["square"]:
            raise DimensionError(f"entanglement matrix must be square, got {arr.shape}")
        if not checks["hermitian"]:
            raise ValidationError("hermitian", "entanglement matrix is not Hermitian")
        if not checks["normalization"]:
            raise ValidationError(
                "normalization", f"diagonal must be all ones, got {np.diag(arr).real}"
            )
        if not checks["psd"]:
            raise ValidationError("psd", "entanglement matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", _frozen(arr))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def validate_entanglement_matrix(m) -> EntanglementMatrix:
    return EntanglementMatrix(m)


def standard_matrix(D: int) -> EntanglementMatrix:
    """``R = I``: the standard (fully dephasing) measurement."""
    return EntanglementMatrix(np.eye(D))


def duplication_matrix(D: int) -> EntanglementMatrix:
    """``R = 1`` everywhere: the duplication measurement."""
    return EntanglementMatrix(np.ones((D, D)))


def qubit_family(q: complex) -> EntanglementMatrix:
    """``[[1, q], [q*, 1]]``, valid exactly when ``|q| <= 1``."""
    q = complex(q)
    if abs(q) > 1 + PSD_TOL:
        raise ValidationError("psd", f"|q| = {abs(q):.6g} exceeds 1")
    return EntanglementMatrix(np.array([[1, q], [q.conjugate(), 1]]))


def normalized_spectrum(R: EntanglementMatrix) -> np.ndarray:
    """Eigenvalues ``r_k`` of ``R / D`` in descending order.

    Each lies in ``[0, 1]`` and they sum to one because ``Tr R = D``.
    """
    w = np.linalg.eigvalsh(R.matrix / R.dim)[::-1]
    return np.clip(w, 0.0, 1.0)
