"""Measurement superoperators: standard, duplication and entangling.

The joint object-pointer space is ordered ``H_A (x) H_M``.  A superoperator
on an ``n``-dimensional space is stored as an ``n^2 x n^2`` matrix acting on
column-stacked operators (see :func:`entmeas.operator_core.vec`).

The entangling measurement with entanglement matrix ``R`` acts as::

    X  ->  sum_kl R_kl (P_kk Tr_M(X) P_ll) (x) |k><l|_M

so on a product input it gives ``sum_kl R_kl rho_kl |k><l| (x) |k><l|``.
Three independent routes compute this: the explicit matrix
(:func:`entangling_measurement`), the tensor contraction
(:func:`measure_state` / :func:`apply_local`), and the product-state
formula (:func:`measure_product`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .entanglement_matrix import EntanglementMatrix, duplication_matrix
from .errors import DimensionError, ValidationError
from .operator_core import (
    as_matrix,
    eig_hermitian,
    matrix_unit,
    partial_trace,
    unvec,
    vec,
)
from .quantum_state import (
    DensityMatrix,
    PureState,
    QCState,
    _frozen,
    density_from_pure,
)

MAX_EXPLICIT_DIM = 36
CHOI_TOL = 1e-10
BRANCH_TOL = 1e-12

__all__ = [
    "Branch",
    "ProjectorPartition",
    "Superoperator",
    "apply",
    "apply_local",
    "choi_matrix",
    "classical_pointer_measure",
    "complete_partition",
    "compose",
    "dubbed_decomposition",
    "duplication_measurement",
    "entangling_measurement",
    "is_completely_positive",
    "joint_output_decomposition",
    "measure_joint",
    "measure_product",
    "measure_state",
    "partition_from_observable",
    "standard_measurement",
]


@dataclass(frozen=True)
class Superoperator:
    """Linear map on operators of a space with subsystem dims ``space_dims``."""

    matrix: np.ndarray
    space_dims: tuple[int, ...]

    def __post_init__(self):
        m = as_matrix(self.matrix, "superoperator")
        dims = tuple(int(d) for d in self.space_dims)
        n = int(np.prod(dims))
        if m.shape != (n * n, n * n):
            raise DimensionError(
                f"superoperator on dims {dims} must be {n * n}x{n * n}, got {m.shape}"
            )
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "space_dims", dims)

    @property
    def dim(self) -> int:
        """Side of the operators the map acts on."""
        return int(np.prod(self.space_dims))

    def __call__(self, x) -> np.ndarray:
        x = as_matrix(x, "operator")
        if x.shape != (self.dim, self.dim):
            raise DimensionError(f"operator shape {x.shape} does not match dim {self.dim}")
        return unvec(self.matrix @ vec(x))

    @classmethod
    def from_function(
        cls, f: Callable[[np.ndarray], np.ndarray], space_dims: Sequence[int]
    ) -> "Superoperator":
        """Tabulate a linear map by applying it to every matrix unit."""
        dims = tuple(int(d) for d in space_dims)
        n = _check_cap(dims)
        cols = np.empty((n * n, n * n), dtype=np.complex128)
        for j in range(n):
            for i in range(n):
                cols[:, i + j * n] = vec(f(matrix_unit(n, i, j)))
        return cls(cols, dims)

    @classmethod
    def identity(cls, space_dims: Sequence[int]) -> "Superoperator":
        n = int(np.prod(space_dims))
        return cls(np.eye(n * n), tuple(space_dims))


def _check_cap(dims: Sequence[int]) -> int:
    n = int(np.prod(dims))
    if n > MAX_EXPLICIT_DIM:
        raise DimensionError(
            f"explicit superoperator matrices are limited to n <= {MAX_EXPLICIT_DIM}, got n = {n}"
        )
    return n


@dataclass(frozen=True)
class ProjectorPartition:
    """Orthogonal projectors resolving the identity, labelled by eigenvalue."""

    projectors: tuple[np.ndarray, ...]
    labels: tuple

    def __post_init__(self, tol: float = 1e-10):
        ps = tuple(as_matrix(p, "projector") for p in self.projectors)
        labels = tuple(self.labels)
        if not ps or len(ps) != len(labels):
            raise DimensionError("need one label per projector and at least one projector")
        d = ps[0].shape[0]
        for p in ps:
            if p.shape != (d, d):
                raise DimensionError("projectors must share one square shape")
        for a, pa in enumerate(ps):
            for b, pb in enumerate(ps):
                target = pa if a == b else np.zeros_like(pa)
                if np.max(np.abs(pa @ pb - target)) > tol:
                    raise ValidationError("orthogonality", f"P[{a}] P[{b}] != delta P[{a}]")
            if np.max(np.abs(pa - pa.conj().T)) > tol:
                raise ValidationError("hermitian", f"P[{a}] is not Hermitian")
        if np.max(np.abs(sum(ps) - np.eye(d))) > tol:
            raise ValidationError("completeness", "projectors do not sum to the identity")
        object.__setattr__(self, "projectors", tuple(_frozen(p) for p in ps))
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def __len__(self) -> int:
        return len(self.projectors)


def complete_partition(D: int) -> ProjectorPartition:
    """Rank-one partition ``{|k><k|}`` labelled ``0..D-1``."""
    return ProjectorPartition(tuple(matrix_unit(D, k, k) for k in range(D)), tuple(range(D)))


def partition_from_observable(A, tol: float = 1e-8) -> ProjectorPartition:
    """Spectral projectors of a Hermitian observable, grouped by eigenvalue."""
    eig = eig_hermitian(A)
    groups: list[tuple[float, list[int]]] = []
    for i, lam in enumerate(eig.eigenvalues):
        if groups and abs(groups[-1][0] - lam) <= tol:
            groups[-1][1].append(i)
        else:
            groups.append((float(lam), [i]))
    projs = []
    for _, idx in groups:
        v = eig.eigenvectors[:, idx]
        projs.append(v @ v.conj().T)
    return ProjectorPartition(tuple(projs), tuple(lam for lam, _ in groups))


def classical_pointer_measure(state: QCState, partition: ProjectorPartition) -> QCState:
    """Measurement with a classical pointer: ``rho(lambda) = sum_mu P rho(mu) P``.

    The result forgets the initial pointer values and depends only on
    ``sum_mu rho(mu)``.
    """
    d = state.operators[0].shape[0]
    if partition.dim != d:
        raise DimensionError(f"partition acts on dim {partition.dim}, state on dim {d}")
    total = state.total
    ops = tuple(p @ total @ p for p in partition.projectors)
    return QCState(partition.labels, ops)


def standard_measurement(partition: ProjectorPartition, pointer_dim: int) -> Superoperator:
    """Quantum-pointer standard measurement on ``H_A (x) H_M``.

    ``X -> sum_lambda (P_lambda Tr_M(X) P_lambda) (x) |lambda><lambda|_M``
    where the ``i``-th block of ``partition`` is recorded as pointer state
    ``|i>``. Coarse-grained (multi-dimensional) blocks are allowed.
    """
    if len(partition) != pointer_dim:
        raise DimensionError(
            f"partition has {len(partition)} blocks but pointer dimension is {pointer_dim}"
        )
    dA = partition.dim
    dims = (dA, pointer_dim)

    def f(x):
        xa = partial_trace(x, dims, keep=0)
        return sum(
            np.kron(p @ xa @ p, matrix_unit(pointer_dim, i, i))
            for i, p in enumerate(partition.projectors)
        )

    return Superoperator.from_function(f, dims)


def _raw_R(R) -> np.ndarray:
    if isinstance(R, EntanglementMatrix):
        return R.matrix
    arr = as_matrix(R, "entanglement matrix")
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError("entanglement matrix must be square")
    return arr


def entangling_measurement(R, validate: bool = True) -> Superoperator:
    """Explicit matrix of the entangling measurement with entanglement matrix ``R``.

    With ``validate=False`` any square ``R`` is accepted, which is only
    useful for building non-physical maps in complete-positivity checks.
    """
    if validate and not isinstance(R, EntanglementMatrix):
        R = EntanglementMatrix(R)
    r = _raw_R(R)
    D = r.shape[0]
    n = _check_cap((D, D))
    nn = n * n
    S = np.zeros((nn, nn), dtype=np.complex128)
    for k in range(D):
        for l in range(D):
            row = (k * D + k) + (l * D + l) * n
            for m in range(D):
                S[row, (k * D + m) + (l * D + m) * n] += r[k, l]
    return Superoperator(S, (D, D))


def duplication_measurement(D: int) -> Superoperator:
    """Entangling measurement with the all-ones matrix: ``sum c_i|i>`` -> ``sum c_i|i>|i>``."""
    if D < 2:
        raise DimensionError("duplication needs D >= 2")
    return entangling_measurement(duplication_matrix(D))


def apply(S: Superoperator, rho: DensityMatrix) -> DensityMatrix:
    """Apply ``S`` to ``rho`` and validate the result as a density matrix.

    A ``ValidationError`` here means ``S`` is not a physical map for this
    input.
    """
    if rho.dim != S.dim:
        raise DimensionError(f"state dim {rho.dim} does not match superoperator dim {S.dim}")
    if len(rho.dims) > 1 and rho.dims != S.space_dims:
        raise DimensionError(f"state dims {rho.dims} differ from {S.space_dims}")
    return DensityMatrix(S(rho.matrix), S.space_dims)


def compose(S1: Superoperator, S2: Superoperator) -> Superoperator:
    """``S1 . S2`` (``S2`` acts first)."""
    if S1.space_dims != S2.space_dims:
        raise DimensionError(f"cannot compose maps on {S1.space_dims} and {S2.space_dims}")
    return Superoperator(S1.matrix @ S2.matrix, S1.space_dims)


def measure_product(
    R: EntanglementMatrix, rho_A: DensityMatrix, rho_M: DensityMatrix
) -> DensityMatrix:
    """Closed-form output ``sum_kl R_kl rho_kl |k><l| (x) |k><l|`` for ``rho_A (x) rho_M``.

    ``rho_M`` only fixes the pointer dimension; the output does not depend on it.
    """
    D = R.dim
    if rho_A.dim != D or rho_M.dim != D:
        raise DimensionError(
            f"R is {D}x{D} but rho_A has dim {rho_A.dim} and rho_M has dim {rho_M.dim}"
        )
    r = R.matrix
    a = rho_A.matrix
    out = np.zeros((D * D, D * D), dtype=np.complex128)
    for k in range(D):
        for l in range(D):
            out[k * D + k, l * D + l] = r[k, l] * a[k, l]
    return DensityMatrix(out, (D, D))


def measure_joint(R: EntanglementMatrix, rho_AB: DensityMatrix) -> DensityMatrix:
    """Object-pointer state when the object starts correlated with another system ``B``.

    Only the marginal ``Tr_B rho_AB`` enters.
    """
    if len(rho_AB.dims) != 2:
        raise DimensionError("rho_AB must carry two subsystem dims")
    rho_A = DensityMatrix(partial_trace(rho_AB.matrix, rho_AB.dims, keep=0))
    pointer = DensityMatrix(np.eye(R.dim) / R.dim)
    return measure_product(R, rho_A, pointer)


def apply_local(R, x, dims: Sequence[int], obj: int, ptr: int) -> np.ndarray:
    """Entangling measurement of subsystem ``obj`` with pointer ``ptr``.

    ``x`` is an operator on the multipartite space with subsystem ``dims``;
    all other subsystems are left untouched.
    """
    r = _raw_R(R)
    dims = tuple(int(d) for d in dims)
    D = r.shape[0]
    if dims[obj] != D or dims[ptr] != D or obj == ptr:
        raise DimensionError(f"obj/ptr dims {dims[obj]}, {dims[ptr]} do not match R size {D}")
    x = as_matrix(x, "operator")
    n = len(dims)
    t = x.reshape(dims + dims)
    t = np.trace(t, axis1=ptr, axis2=ptr + n)  # Tr over the pointer
    # axis positions of the object in the reduced tensor
    o = obj if obj < ptr else obj - 1
    o_row, o_col = o, o + n - 1
    out = np.zeros(dims + dims, dtype=np.complex128)
    for k in range(D):
        for l in range(D):
            block = np.take(np.take(t, k, axis=o_row), l, axis=o_col - 1)
            idx: list = [slice(None)] * (2 * n)
            idx[obj], idx[ptr], idx[obj + n], idx[ptr + n] = k, k, l, l
            out[tuple(idx)] = r[k, l] * block
    side = int(np.prod(dims))
    return out.reshape(side, side)


def measure_state(R, x) -> np.ndarray:
    """Entangling measurement applied to an arbitrary operator on ``H_A (x) H_M``."""
    D = _raw_R(R).shape[0]
    return apply_local(R, x, (D, D), 0, 1)


def choi_matrix(S: Superoperator) -> np.ndarray:
    """``sum_ij S(|i><j|) (x) |i><j|``; PSD exactly when ``S`` is completely positive."""
    n = S.dim
    # S.matrix[a + b n, i + j n] = <a| S(|i><j|) |b>
    s4 = S.matrix.reshape(n, n, n, n)  # [b, a, j, i]
    return s4.transpose(1, 3, 0, 2).reshape(n * n, n * n)


def is_completely_positive(S: Superoperator, tol: float = CHOI_TOL) -> bool:
    c = choi_matrix(S)
    if np.max(np.abs(c - c.conj().T)) > tol:
        return False
    return bool(np.linalg.eigvalsh((c + c.conj().T) / 2).min() >= -tol)


class Branch(NamedTuple):
    """One term ``weight * |v>><<v|`` of the post-measurement mixture."""

    weight: float
    vector: np.ndarray


def dubbed_decomposition(R: EntanglementMatrix, rho_A: DensityMatrix) -> list[Branch]:
    """Diagonalize ``R_kl rho_kl`` and lift its eigenvectors to the dubbed basis.

    Each branch vector is ``sum_i e_i |i>|i>``. Eigenvalues at or below
    ``BRANCH_TOL`` are dropped.
    """
    D = R.dim
    if rho_A.dim != D:
        raise DimensionError(f"R is {D}x{D} but state has dim {rho_A.dim}")
    eig = eig_hermitian(R.matrix * rho_A.matrix)
    diag_idx = [i * D + i for i in range(D)]
    out = []
    for w, e in zip(eig.eigenvalues, eig.eigenvectors.T):
        if w <= BRANCH_TOL:
            continue
        v = np.zeros(D * D, dtype=np.complex128)
        v[diag_idx] = e
        out.append(Branch(float(w), v))
    return out


def joint_output_decomposition(R: EntanglementMatrix, psi: PureState) -> list[Branch]:
    """Post-measurement state of a pure input as a mixture of dubbed pure states."""
    if psi.dim != R.dim:
        raise DimensionError(f"R is {R.dim}x{R.dim} but psi has {psi.dim} amplitudes")
    return dubbed_decomposition(R, density_from_pure(psi))


def reconstruct(branches: Sequence[Branch], side: int) -> np.ndarray:
    out = np.zeros((side, side), dtype=np.complex128)
    for w, v in branches:
        out += w * np.outer(v, v.conj())
    return out
