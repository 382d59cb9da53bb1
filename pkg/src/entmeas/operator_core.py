"""Dense complex matrix algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Tensor products
follow the Kronecker convention: the joint index of ``(i_a, i_b)`` is
``i_a * d_b + i_b``.  Operators are vectorized by column stacking, so the
2x2 matrix ``[[a, b], [c, d]]`` becomes ``(a, c, b, d)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, ValidationError

HERMITIAN_TOL = 1e-10
CLUSTER_TOL = 1e-8
RANK_TOL = 1e-8

__all__ = [
    "GeneralSpectrum",
    "HermitianEigen",
    "as_matrix",
    "eig_general",
    "eig_hermitian",
    "hs_inner",
    "is_hermitian",
    "matrix_unit",
    "null_space",
    "numerical_rank",
    "partial_trace",
    "tensor",
    "unvec",
    "vec",
]


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("finite", f"{name} contains NaN or Inf")
    return arr


def _square(m, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(m, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    arr = as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        return False
    return bool(np.max(np.abs(arr - arr.conj().T), initial=0.0) <= tol)


def matrix_unit(d: int, k: int, l: int) -> np.ndarray:
    """The rank-one operator ``|k><l|`` on a ``d``-dimensional space."""
    p = np.zeros((d, d), dtype=np.complex128)
    p[k, l] = 1.0
    return p


def tensor(a, b) -> np.ndarray:
    """Kronecker product ``a (x) b``."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def vec(m) -> np.ndarray:
    """Column-stack a matrix into a 1-D vector."""
    return np.asarray(m, dtype=np.complex128).reshape(-1, order="F")


def unvec(v, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Inverse of :func:`vec`; square shape is assumed unless given."""
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if shape is None:
        n = int(round(np.sqrt(v.size)))
        if n * n != v.size:
            raise DimensionError(f"cannot unvec length {v.size} into a square matrix")
        shape = (n, n)
    return v.reshape(shape, order="F")


def partial_trace(m, dims: Sequence[int], keep: int | Sequence[int] = 0) -> np.ndarray:
    """Trace out every subsystem of ``m`` except those listed in ``keep``.

    :param m: square operator on ``H_0 (x) H_1 (x) ...`` with side ``prod(dims)``.
    :param dims: subsystem dimensions in tensor order.
    :param keep: index (or indices) of the subsystems to keep, in the
        order they appear in ``dims``.
    """
    arr = _square(m)
    dims = tuple(int(d) for d in dims)
    if int(np.prod(dims)) != arr.shape[0]:
        raise DimensionError(f"dims {dims} do not match matrix side {arr.shape[0]}")
    keep = (keep,) if np.isscalar(keep) else tuple(keep)
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionError(f"keep={keep} out of range for {len(dims)} subsystems")
    keep = tuple(sorted(set(keep)))

    t = arr.reshape(dims + dims)
    n = len(dims)
    for s in sorted(set(range(len(dims))) - set(keep), reverse=True):
        t = np.trace(t, axis1=s, axis2=s + n)
        n -= 1
    side = int(np.prod([dims[k] for k in keep]))
    return t.reshape(side, side)


@dataclass(frozen=True)
class HermitianEigen:
    """Eigenvalues in descending order with matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _fix_phase(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    # first component whose modulus is maximal (ties broken by position)
    idx = int(np.argmax(mags >= mags.max() - 1e-12))
    if mags[idx] == 0:
        return v
    return v * (np.conj(v[idx]) / mags[idx])


def _lex_key(v: np.ndarray) -> tuple:
    return tuple(x for c in v for x in (round(c.real, 9), round(c.imag, 9)))


def eig_hermitian(m, tol: float = HERMITIAN_TOL) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix with a deterministic gauge.

    Each eigenvector is rotated so its first component of largest modulus is
    real and positive. Eigenvalues are sorted in descending order; vectors
    inside a degenerate cluster (within ``CLUSTER_TOL``) are sorted in
    descending lexicographic order of their ``(re, im)`` components.
    """
    arr = _square(m)
    if not is_hermitian(arr, tol):
        raise ValidationError("hermitian", "eig_hermitian needs a Hermitian matrix")
    arr = (arr + arr.conj().T) / 2
    w, v = np.linalg.eigh(arr)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    cols = [_fix_phase(v[:, i]) for i in order]

    out_idx: list[int] = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i - 1] - w[i] > CLUSTER_TOL:
            block = sorted(range(start, i), key=lambda j: _lex_key(cols[j]), reverse=True)
            out_idx.extend(block)
            start = i
    vecs = np.column_stack([cols[j] for j in out_idx]) if cols else np.zeros((0, 0), complex)
    return HermitianEigen(eigenvalues=w.copy(), eigenvectors=vecs)


def numerical_rank(m, rtol: float = RANK_TOL) -> int:
    """Rank from singular values above ``rtol`` times the largest one."""
    s = np.linalg.svd(as_matrix(m), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def null_space(m, rtol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical kernel of ``m``."""
    arr = as_matrix(m)
    _, s, vh = np.linalg.svd(arr)
    if s.size == 0 or s[0] == 0:
        return np.eye(arr.shape[1], dtype=np.complex128)
    rank = int(np.sum(s > rtol * s[0]))
    return vh[rank:].conj().T


@dataclass(frozen=True)
class GeneralSpectrum:
    """Distinct eigenvalues with algebraic and geometric multiplicities."""

    eigenvalues: tuple[tuple[complex, int], ...]
    geometric: tuple[int, ...]
    defective: bool

    def algebraic_of(self, value: complex, tol: float = CLUSTER_TOL) -> int:
        return sum(a for lam, a in self.eigenvalues if abs(lam - value) <= tol)

    def geometric_of(self, value: complex, tol: float = CLUSTER_TOL) -> int:
        return sum(
            g for (lam, _), g in zip(self.eigenvalues, self.geometric) if abs(lam - value) <= tol
        )


def _cluster(values: np.ndarray, tol: float) -> list[list[complex]]:
    clusters: list[list[complex]] = []
    for lam in sorted(values, key=lambda z: (-z.real, -z.imag)):
        for c in clusters:
            if any(abs(lam - x) <= tol for x in c):
                c.append(lam)
                break
        else:
            clusters.append([lam])
    return clusters


def eig_general(m) -> GeneralSpectrum:
    """Spectrum of an arbitrary square matrix, flagging Jordan defects.

    Eigenvalues closer than ``CLUSTER_TOL`` are merged; the geometric
    multiplicity of each cluster is ``n - rank(m - lambda I)`` with the
    relative rank threshold ``RANK_TOL``.
    """
    arr = _square(m)
    n = arr.shape[0]
    clusters = _cluster(np.linalg.eigvals(arr), CLUSTER_TOL)
    eigenvalues = []
    geometric = []
    for c in clusters:
        lam = complex(np.mean(c))
        # snap tiny real/imag parts so reports read 0 and 1 rather than 1e-17
        lam = complex(
            0.0 if abs(lam.real) < CLUSTER_TOL else lam.real,
            0.0 if abs(lam.imag) < CLUSTER_TOL else lam.imag,
        )
        alg = len(c)
        geo = n - numerical_rank(arr - lam * np.eye(n))
        eigenvalues.append((lam, alg))
        geometric.append(min(geo, alg))
    defective = any(g < a for (_, a), g in zip(eigenvalues, geometric))
    return GeneralSpectrum(tuple(eigenvalues), tuple(geometric), defective)


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``Tr(a^dagger b)``."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))
