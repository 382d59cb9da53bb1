"""Entropic and correlation measures, all in bits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entanglement_matrix import EntanglementMatrix
from .errors import DimensionError
from .measurement_superop import Superoperator, measure_product, measure_state
from .operator_core import as_matrix, partial_trace
from .quantum_state import DensityMatrix, purify

EIG_CLAMP = 1e-12

__all__ = [
    "MetricsReport",
    "apply_to_first",
    "coherent_information",
    "entanglement_after_measurement",
    "metrics_report",
    "mutual_information",
    "negativity",
    "partial_transpose",
    "two_time_channel",
    "von_neumann_entropy",
]


def _entropy_of(m: np.ndarray) -> float:
    m = as_matrix(m)
    p = np.linalg.eigvalsh((m + m.conj().T) / 2)
    p = p[p > EIG_CLAMP]
    return float(-np.sum(p * np.log2(p))) + 0.0


def von_neumann_entropy(rho) -> float:
    """``-sum p log2 p`` over the eigenvalues of ``rho``."""
    return _entropy_of(rho.matrix if isinstance(rho, DensityMatrix) else rho)


def entanglement_after_measurement(R: EntanglementMatrix, rho_A: DensityMatrix) -> float:
    """One-time object-pointer entanglement ``S[(rho_kk)] - S[(R_kl rho_kl)]``."""
    if R.dim != rho_A.dim:
        raise DimensionError(f"R is {R.dim}x{R.dim} but state has dim {rho_A.dim}")
    diag = np.real(np.diag(rho_A.matrix))
    return _entropy_of(np.diag(diag)) - _entropy_of(R.matrix * rho_A.matrix)


def two_time_channel(R: EntanglementMatrix, rho_M: DensityMatrix) -> Superoperator:
    """Channel from the object's initial state to the pointer's final state.

    ``rho_A -> Tr_A M(rho_A (x) rho_M)``, tabulated through the measurement
    map; the result is ``sum_k rho_kk |k><k|`` whatever ``rho_M`` is.
    """
    D = R.dim
    if rho_M.dim != D:
        raise DimensionError(f"pointer state has dim {rho_M.dim}, expected {D}")
    m = rho_M.matrix

    def f(x):
        return partial_trace(measure_state(R, np.kron(x, m)), (D, D), keep=1)

    return Superoperator.from_function(f, (D,))


def apply_to_first(N: Superoperator, x, second_dim: int) -> np.ndarray:
    """``(N (x) id)(x)`` for an operator on ``H_in (x) H_ref``."""
    d = N.dim
    x = as_matrix(x)
    if x.shape != (d * second_dim, d * second_dim):
        raise DimensionError(f"operator shape {x.shape} does not match {d} x {second_dim}")
    t = x.reshape(d, second_dim, d, second_dim)
    out = np.empty_like(t)
    for r in range(second_dim):
        for s in range(second_dim):
            out[:, r, :, s] = N(t[:, r, :, s])
    return out.reshape(d * second_dim, d * second_dim)


def coherent_information(N: Superoperator, rho_A: DensityMatrix) -> float:
    """``S[N(rho)] - S[(N (x) id)(|Psi><Psi|)]`` with ``Psi`` a purification of ``rho``.

    Can be negative for general channels.
    """
    if N.dim != rho_A.dim:
        raise DimensionError(f"channel acts on dim {N.dim}, state has dim {rho_A.dim}")
    psi = purify(rho_A).amplitudes
    joint = apply_to_first(N, np.outer(psi, psi.conj()), rho_A.dim)
    return _entropy_of(N(rho_A.matrix)) - _entropy_of(joint)


def _bipartite(rho: DensityMatrix) -> tuple[int, int]:
    if len(rho.dims) != 2:
        raise DimensionError(f"bipartite structure required, got dims {rho.dims}")
    return rho.dims


def mutual_information(rho: DensityMatrix) -> float:
    """``S[rho_1] + S[rho_2] - S[rho_12]``."""
    dims = _bipartite(rho)
    m = rho.matrix
    return (
        _entropy_of(partial_trace(m, dims, keep=0))
        + _entropy_of(partial_trace(m, dims, keep=1))
        - _entropy_of(m)
    )


def partial_transpose(m, dims: tuple[int, int]) -> np.ndarray:
    """Transpose on the second factor."""
    d1, d2 = dims
    t = as_matrix(m).reshape(d1, d2, d1, d2)
    return t.transpose(0, 3, 2, 1).reshape(d1 * d2, d1 * d2)


def negativity(rho: DensityMatrix) -> float:
    """``(||rho^T2||_1 - 1) / 2``."""
    dims = _bipartite(rho)
    pt = partial_transpose(rho.matrix, dims)
    w = np.linalg.eigvalsh((pt + pt.conj().T) / 2)
    return max(0.0, float((np.sum(np.abs(w)) - 1) / 2))


@dataclass(frozen=True)
class MetricsReport:
    entropy_object: float
    entropy_pointer: float
    entropy_joint: float
    one_time_E: float
    coherent_information_two_time: float
    mutual_information: float


def metrics_report(
    R: EntanglementMatrix, rho_A: DensityMatrix, rho_M: DensityMatrix | None = None
) -> MetricsReport:
    """Entropies of the post-measurement state plus one- and two-time measures."""
    D = R.dim
    if rho_M is None:
        rho_M = DensityMatrix(np.eye(D) / D)
    joint = measure_product(R, rho_A, rho_M)
    return MetricsReport(
        entropy_object=_entropy_of(partial_trace(joint.matrix, (D, D), keep=0)),
        entropy_pointer=_entropy_of(partial_trace(joint.matrix, (D, D), keep=1)),
        entropy_joint=_entropy_of(joint.matrix),
        one_time_E=entanglement_after_measurement(R, rho_A),
        coherent_information_two_time=coherent_information(two_time_channel(R, rho_M), rho_A),
        mutual_information=mutual_information(joint),
    )
