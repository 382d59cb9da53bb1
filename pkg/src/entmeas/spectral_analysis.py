"""Eigenstructure of measurement superoperators.

For a qubit (``D = 2``) the entangling measurement has eigenvalue 1 on the
two operators ``|kk><kk|``, a twelve-dimensional kernel made of all
operators with vanishing pointer trace, and, whenever ``q != 0``, two
size-2 Jordan blocks at eigenvalue 0 fed by ``P_12 (x) I / 2`` and
``P_21 (x) I / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .measurement_superop import MAX_EXPLICIT_DIM, Superoperator
from .operator_core import (
    GeneralSpectrum,
    eig_general,
    matrix_unit,
    null_space,
    numerical_rank,
    unvec,
    vec,
)

NULL_TOL = 1e-9

__all__ = [
    "SpectralReport",
    "annihilates",
    "canonical_qubit_basis",
    "from_basis_coordinates",
    "jordan_witness",
    "matrix_in_eigen_basis",
    "spectral_report",
    "verify_qubit_null_forms",
]


@dataclass(frozen=True)
class SpectralReport:
    spectrum: GeneralSpectrum
    unit_eigenspace_dim: int
    zero_geometric_dim: int
    zero_algebraic_dim: int
    defective: bool
    jordan_chain_witnesses: tuple[tuple[np.ndarray, np.ndarray], ...]


def _jordan_witnesses(S: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    # vectors in ker(S^2) orthogonal to ker(S): each v has S v != 0, S S v = 0
    k1 = null_space(S)
    k2 = null_space(S @ S)
    if k2.shape[1] <= k1.shape[1]:
        return []
    proj = k2 - k1 @ (k1.conj().T @ k2)
    u = np.linalg.svd(proj, full_matrices=False)[0]
    count = k2.shape[1] - k1.shape[1]
    out = []
    for v in u[:, :count].T:
        out.append((unvec(v), unvec(S @ v)))
    return out


def spectral_report(S: Superoperator) -> SpectralReport:
    """Multiplicities, defectiveness and Jordan-chain witnesses of ``S``."""
    if S.dim > MAX_EXPLICIT_DIM:
        raise DimensionError(f"spectral analysis needs n <= {MAX_EXPLICIT_DIM}")
    spec = eig_general(S.matrix)
    return SpectralReport(
        spectrum=spec,
        unit_eigenspace_dim=spec.algebraic_of(1.0),
        zero_geometric_dim=spec.geometric_of(0.0),
        zero_algebraic_dim=spec.algebraic_of(0.0),
        defective=spec.defective,
        jordan_chain_witnesses=tuple(_jordan_witnesses(S.matrix)),
    )


def annihilates(S: Superoperator, op, tol: float = NULL_TOL) -> bool:
    return bool(np.max(np.abs(S(op))) <= tol)


def _qubit_density_basis() -> list[np.ndarray]:
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    return [
        matrix_unit(2, 0, 0),
        matrix_unit(2, 1, 1),
        (np.eye(2) + sx) / 2,
        (np.eye(2) + sy) / 2,
    ]


def verify_qubit_null_forms(S: Superoperator, q: complex | None = None) -> bool:
    """Check the twelve zero-eigenvalue operators of a qubit measurement.

    They are ``rho (x) P_12``, ``rho (x) P_21`` and ``rho (x) (P_22 - P_11)``
    for four linearly independent density matrices ``rho``. When ``q == 0``
    the standard-measurement nulls ``P_12 (x) I`` and ``P_21 (x) I`` are
    required as well.
    """
    if S.space_dims != (2, 2):
        raise DimensionError("qubit null forms need space dims (2, 2)")
    p12, p21 = matrix_unit(2, 0, 1), matrix_unit(2, 1, 0)
    dz = matrix_unit(2, 1, 1) - matrix_unit(2, 0, 0)
    forms = [np.kron(rho, m) for m in (p12, p21, dz) for rho in _qubit_density_basis()]
    if q is not None and abs(q) == 0:
        forms += [np.kron(p12, np.eye(2)), np.kron(p21, np.eye(2))]
    return all(annihilates(S, f) for f in forms)


def jordan_witness(S: Superoperator, q: complex) -> tuple[np.ndarray, np.ndarray]:
    """The improper vector ``v = P_12 (x) I/2`` and its image ``q P_12 (x) P_12``.

    Raises if ``q == 0`` (no defect) or if ``S`` does not behave as expected.
    """
    if S.space_dims != (2, 2):
        raise DimensionError("jordan_witness needs space dims (2, 2)")
    if abs(q) == 0:
        raise ValidationError("defect", "q = 0 is the standard measurement: no Jordan block")
    p12 = matrix_unit(2, 0, 1)
    v = np.kron(p12, np.eye(2)) / 2
    image = S(v)
    if np.max(np.abs(image - q * np.kron(p12, p12))) > NULL_TOL:
        raise ValidationError("defect", "S(v) differs from q P_12 (x) P_12")
    if not annihilates(S, image):
        raise ValidationError("defect", "S(S(v)) is not zero")
    return v, image


def canonical_qubit_basis() -> list[np.ndarray]:
    """Sixteen operators adapted to the qubit measurement's eigenstructure.

    Order: the two unit eigenvectors; ten kernel vectors (the families
    ``rho (x) P_12``, ``rho (x) P_21``, ``rho (x) (P_22 - P_11)`` without the
    transversal pair); the transversal pair ``P_12 (x) P_12``,
    ``P_21 (x) P_21``; the improper pair ``P_12 (x) I/2``, ``P_21 (x) I/2``.
    """
    u = lambda k, l: matrix_unit(2, k, l)  # noqa: E731
    dz = u(1, 1) - u(0, 0)
    basis = [np.kron(u(0, 0), u(0, 0)), np.kron(u(1, 1), u(1, 1))]
    basis += [np.kron(u(a, b), u(0, 1)) for a, b in ((0, 0), (1, 0), (1, 1))]
    basis += [np.kron(u(a, b), u(1, 0)) for a, b in ((0, 0), (0, 1), (1, 1))]
    basis += [np.kron(u(a, b), dz) for a, b in ((0, 0), (0, 1), (1, 0), (1, 1))]
    basis += [np.kron(u(0, 1), u(0, 1)), np.kron(u(1, 0), u(1, 0))]
    basis += [np.kron(u(0, 1), np.eye(2)) / 2, np.kron(u(1, 0), np.eye(2)) / 2]
    return basis


def matrix_in_eigen_basis(S: Superoperator, basis) -> np.ndarray:
    """Coordinates of ``S`` in a (not necessarily orthogonal) operator basis.

    Column ``j`` holds the expansion of ``S(basis[j])``; coefficients come
    from the Hilbert-Schmidt Gram system.
    """
    B = np.column_stack([vec(b) for b in basis])
    if B.shape != (S.dim**2, S.dim**2):
        raise DimensionError(f"basis must contain {S.dim ** 2} operators of side {S.dim}")
    gram = B.conj().T @ B
    if numerical_rank(gram) < gram.shape[0]:
        raise ValidationError("basis", "Gram matrix is singular; basis is linearly dependent")
    return np.linalg.solve(gram, B.conj().T @ S.matrix @ B)


def from_basis_coordinates(C: np.ndarray, basis, space_dims=(2, 2)) -> Superoperator:
    """Inverse of :func:`matrix_in_eigen_basis`."""
    B = np.column_stack([vec(b) for b in basis])
    return Superoperator(B @ C @ np.linalg.inv(B), tuple(space_dims))
