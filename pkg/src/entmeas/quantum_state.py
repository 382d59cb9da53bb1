"""Validated density matrices, pure states and quantum-classical states."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionError, ValidationError
from .operator_core import HERMITIAN_TOL, as_matrix, eig_hermitian, is_hermitian

PSD_TOL = 1e-10
TRACE_TOL = 1e-10
NORM_TOL = 1e-10

__all__ = [
    "DensityMatrix",
    "PureState",
    "QCState",
    "basis_state",
    "density_from_matrix",
    "density_from_pure",
    "maximally_entangled_state",
    "maximum_uncertainty_state",
    "purify",
    "qc_state",
]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


def check_positive(m: np.ndarray, name: str, tol: float = PSD_TOL) -> None:
    if not is_hermitian(m, HERMITIAN_TOL):
        raise ValidationError("hermitian", f"{name} is not Hermitian")
    low = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min(initial=0.0))
    if low < -tol:
        raise ValidationError("psd", f"{name} has negative eigenvalue {low:.3g}")


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator.

    ``dims`` records the subsystem structure; its product equals the side of
    ``matrix``. Construction validates; an existing instance is always valid.
    """

    matrix: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        m = as_matrix(self.matrix, "density matrix")
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        dims = tuple(int(d) for d in self.dims) or (m.shape[0],)
        if int(np.prod(dims)) != m.shape[0]:
            raise DimensionError(f"dims {dims} do not match side {m.shape[0]}")
        check_positive(m, "density matrix")
        tr = np.trace(m)
        if abs(tr - 1) > TRACE_TOL:
            raise ValidationError("trace", f"trace is {tr.real:.12g}, expected 1")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def density_from_matrix(m, dims: Sequence[int] = ()) -> DensityMatrix:
    """Validate ``m`` as a density matrix on subsystems ``dims``."""
    return DensityMatrix(m, tuple(dims))


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector ``(c_1, ..., c_D)``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if c.size == 0:
            raise DimensionError("pure state needs at least one amplitude")
        if not np.all(np.isfinite(c)):
            raise ValidationError("finite", "amplitudes contain NaN or Inf")
        norm = float(np.sum(np.abs(c) ** 2))
        if abs(norm - 1) > NORM_TOL:
            raise ValidationError("normalization", f"sum |c|^2 = {norm:.12g}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(c))

    @property
    def dim(self) -> int:
        return self.amplitudes.size


def density_from_pure(psi: PureState, dims: Sequence[int] = ()) -> DensityMatrix:
    c = psi.amplitudes
    return DensityMatrix(np.outer(c, c.conj()), tuple(dims))


def maximum_uncertainty_state(D: int) -> PureState:
    """Uniform superposition ``c_i = 1/sqrt(D)`` over the measurement basis."""
    if D < 1:
        raise DimensionError("dimension must be at least 1")
    return PureState(np.full(D, 1 / np.sqrt(D)))


def basis_state(D: int, k: int) -> PureState:
    if not 0 <= k < D:
        raise DimensionError(f"basis index {k} out of range for dimension {D}")
    c = np.zeros(D)
    c[k] = 1.0
    return PureState(c)


def maximally_entangled_state(D: int) -> PureState:
    """``sum_k |k>|k> / sqrt(D)`` on a ``D x D`` system."""
    c = np.zeros(D * D)
    c[[k * D + k for k in range(D)]] = 1 / np.sqrt(D)
    return PureState(c)


def purify(rho: DensityMatrix) -> PureState:
    """Schmidt-form purification on ``H (x) H_ref``.

    Uses ``sum_i sqrt(p_i) |e_i> (x) |i>`` with ``(p_i, e_i)`` from
    :func:`eig_hermitian` and the standard basis on the reference factor.
    """
    D = rho.dim
    eig = eig_hermitian(rho.matrix)
    p = np.clip(eig.eigenvalues, 0.0, None)
    psi = np.zeros(D * D, dtype=np.complex128)
    for i in range(D):
        psi += np.sqrt(p[i]) * np.kron(eig.eigenvectors[:, i], np.eye(D)[i])
    return PureState(psi / np.linalg.norm(psi))


@dataclass(frozen=True)
class QCState:
    """Finite map from classical pointer labels to positive operators."""

    pointer_values: tuple
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        labels = tuple(self.pointer_values)
        if len(labels) != len(self.operators):
            raise DimensionError("one operator per pointer value is required")
        ops = tuple(as_matrix(o, f"operator[{mu!r}]") for mu, o in zip(labels, self.operators))
        if len(set(labels)) != len(labels):
            raise ValidationError("labels", "pointer values must be distinct")
        if not ops:
            raise DimensionError("at least one pointer value is required")
        side = ops[0].shape
        for mu, o in zip(labels, ops):
            if o.shape != side or side[0] != side[1]:
                raise DimensionError(f"operator for {mu!r} has shape {o.shape}")
            try:
                check_positive(o, f"operator for pointer value {mu!r}")
            except ValidationError as exc:
                raise ValidationError("positivity", str(exc)) from None
        total = sum(np.trace(o) for o in ops)
        if abs(total - 1) > TRACE_TOL:
            raise ValidationError("trace", f"total trace is {total.real:.12g}, expected 1")
        object.__setattr__(self, "pointer_values", labels)
        object.__setattr__(self, "operators", tuple(_frozen(o) for o in ops))

    def __getitem__(self, mu) -> np.ndarray:
        return self.operators[self.pointer_values.index(mu)]

    def items(self):
        return zip(self.pointer_values, self.operators)

    @property
    def total(self) -> np.ndarray:
        """``sum_mu rho(mu)``, the object's marginal state."""
        return sum(self.operators[1:], self.operators[0].copy())


def qc_state(pointer_values, operators=None) -> QCState:
    """Build a :class:`QCState` from labels and operators, or from one mapping."""
    if operators is None and isinstance(pointer_values, Mapping):
        return QCState(tuple(pointer_values), tuple(pointer_values.values()))
    if isinstance(operators, Mapping):
        return QCState(tuple(pointer_values), tuple(operators[mu] for mu in pointer_values))
    return QCState(tuple(pointer_values), tuple(operators))
