"""Can local entangling measurements move entanglement from ``A-B`` onto ``M-N``?

Two independent measurements act on ``A-M`` and ``B-N`` starting from
``rho_AB (x) rho_M (x) rho_N``; the pointer pair is then read off by tracing
out ``A`` and ``B``. Two role assignments are supported:

``"prose"``
    ``A`` and ``B`` are measured, ``M`` and ``N`` are their pointers. The
    pointer pair ends up in the joint diagonal of ``rho_AB``.
``"printed"``
    The roles of the displayed joint superoperator: ``A`` and ``B`` are
    traced and replaced, ``M`` and ``N`` are sandwiched. The pointer pair
    ends up in ``dephase(rho_M) (x) dephase(rho_N)``.

Either way the result is diagonal in the product basis, hence separable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .entanglement_matrix import EntanglementMatrix
from .errors import DimensionError
from .info_metrics import mutual_information, negativity
from .measurement_superop import apply_local
from .operator_core import partial_trace
from .quantum_state import DensityMatrix

CONVENTIONS = ("prose", "printed")
NO_GO_TOL = 1e-9

__all__ = ["CONVENTIONS", "TransferReport", "TransferScenario", "run_transfer", "verify_no_go"]


def _convention(name: str) -> str:
    if name == "paper-printed":
        return "printed"
    if name not in CONVENTIONS:
        raise ValueError(f"unknown convention {name!r}; expected one of {CONVENTIONS}")
    return name


@dataclass(frozen=True)
class TransferScenario:
    rho_AB: DensityMatrix
    R_A: EntanglementMatrix
    R_B: EntanglementMatrix
    rho_M: DensityMatrix
    rho_N: DensityMatrix
    convention: str = "prose"

    def __post_init__(self):
        object.__setattr__(self, "convention", _convention(self.convention))
        if len(self.rho_AB.dims) != 2:
            raise DimensionError("rho_AB must carry dims (D_A, D_B)")
        dA, dB = self.rho_AB.dims
        if self.R_A.dim != dA or self.rho_M.dim != dA:
            raise DimensionError(f"R_A and rho_M must have dimension D_A = {dA}")
        if self.R_B.dim != dB or self.rho_N.dim != dB:
            raise DimensionError(f"R_B and rho_N must have dimension D_B = {dB}")


@dataclass(frozen=True)
class TransferReport:
    rho_MN: DensityMatrix
    negativity: float
    mutual_information: float
    is_product: bool
    is_diagonal: bool


def run_transfer(s: TransferScenario, tol: float = NO_GO_TOL) -> TransferReport:
    """Apply both local measurements to the four-party state and reduce to ``M-N``."""
    dA, dB = s.rho_AB.dims
    dims = (dA, dB, dA, dB)  # A, B, M, N
    x = np.kron(s.rho_AB.matrix, np.kron(s.rho_M.matrix, s.rho_N.matrix))
    if s.convention == "prose":
        x = apply_local(s.R_A, x, dims, obj=0, ptr=2)
        x = apply_local(s.R_B, x, dims, obj=1, ptr=3)
    else:
        x = apply_local(s.R_A, x, dims, obj=2, ptr=0)
        x = apply_local(s.R_B, x, dims, obj=3, ptr=1)
    mn = partial_trace(x, dims, keep=(2, 3))
    rho_MN = DensityMatrix(mn, (dA, dB))

    marg = np.kron(partial_trace(mn, (dA, dB), keep=0), partial_trace(mn, (dA, dB), keep=1))
    off = mn - np.diag(np.diag(mn))
    return TransferReport(
        rho_MN=rho_MN,
        negativity=negativity(rho_MN),
        mutual_information=mutual_information(rho_MN),
        is_product=bool(np.max(np.abs(mn - marg)) <= tol),
        is_diagonal=bool(np.max(np.abs(off), initial=0.0) <= tol),
    )


def verify_no_go(s: TransferScenario, tol: float = NO_GO_TOL) -> bool:
    """True when ``M-N`` carries no negativity under both conventions."""
    return all(run_transfer(replace(s, convention=c)).negativity <= tol for c in CONVENTIONS)
