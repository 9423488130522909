"""Dense complex linear algebra used throughout the engine.

All matrices are plain ``numpy.ndarray`` values of dtype ``complex128``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.linalg

from tclplus.exceptions import DimensionError, InvalidMatrix
from tclplus.logger import log


@dataclass(frozen=True)
class SvdResult:
    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray

    def reconstruct(self):
        return (self.u * self.singular_values) @ self.v.conj().T


def as_matrix(a: npt.ArrayLike, name="matrix") -> np.ndarray:
    """Validate ``a`` as a finite two dimensional complex matrix."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise InvalidMatrix(f"{name} must be two dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name} has non-finite entries")
    return arr


def is_square(a: np.ndarray) -> bool:
    return a.ndim == 2 and a.shape[0] == a.shape[1]


def is_hermitian(a: np.ndarray, atol=1e-10) -> bool:
    if not is_square(a):
        return False
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= atol)


def svd(a: npt.ArrayLike) -> SvdResult:
    """Thin singular value decomposition ``a = u diag(s) v^dagger``."""
    arr = as_matrix(a)
    if arr.size == 0:
        raise InvalidMatrix("cannot decompose an empty matrix")
    u, s, vh = scipy.linalg.svd(arr, full_matrices=False, lapack_driver="gesdd")
    return SvdResult(u=u, singular_values=s, v=vh.conj().T)


def default_rank_tol(a: np.ndarray) -> float:
    return max(a.shape) * np.finfo(np.float64).eps


def pinv_svd(a: npt.ArrayLike, tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse ``V D^+ U^dagger``.

    Singular values at or below ``tol * sigma_max`` are treated as zero. The
    default ``tol`` is ``max(rows, cols) * eps``.
    """
    arr = as_matrix(a)
    if tol is None:
        tol = default_rank_tol(arr)
    if tol < 0:
        raise ValueError(f"tol must be non-negative, got {tol}")
    res = svd(arr)
    s = res.singular_values
    cutoff = tol * (s[0] if s.size else 0.0)
    keep = s > cutoff
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (res.v * inv) @ res.u.conj().T


def operator_norm(a: npt.ArrayLike) -> float:
    """Largest singular value."""
    arr = as_matrix(a)
    if arr.size == 0:
        return 0.0
    return float(np.linalg.norm(arr, ord=2))


def hs_inner(x: npt.ArrayLike, y: npt.ArrayLike) -> complex:
    """Hilbert-Schmidt inner product ``Tr[x^dagger y]``."""
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if x.shape != y.shape:
        raise DimensionError(f"shape mismatch: {x.shape} vs {y.shape}")
    return complex(np.vdot(x, y))


def pinv_series_partial_sums(a: npt.ArrayLike, depth: int):
    """Yield the partial sums ``S_d = sum_{k<=d} (I - A^dagger A)^k A^dagger``.

    Uses ``S_{d+1} = (I - A^dagger A) S_d + A^dagger``.
    """
    if depth < 0:
        raise ValueError(f"depth must be non-negative, got {depth}")
    arr = as_matrix(a)
    a_dag = arr.conj().T
    m = np.eye(arr.shape[1], dtype=np.complex128) - a_dag @ arr
    s = a_dag.copy()
    yield s
    for _ in range(depth):
        s = m @ s + a_dag
        yield s


def pinv_series(a: npt.ArrayLike, depth: int) -> np.ndarray:
    """Depth-``depth`` partial sum of the pseudoinverse series.

    Convergence is not checked: callers measure it themselves.
    """
    s = None
    for s in pinv_series_partial_sums(a, depth):
        pass
    return s


def neumann_partial_sums(sigma: npt.ArrayLike, depth: int):
    """Yield ``N_d = sum_{k<=d} sigma^k`` for ``d = 0..depth``."""
    if depth < 0:
        raise ValueError(f"depth must be non-negative, got {depth}")
    arr = as_matrix(sigma, "sigma")
    if not is_square(arr):
        raise DimensionError(f"sigma must be square, got {arr.shape}")
    eye = np.eye(arr.shape[0], dtype=np.complex128)
    s = eye.copy()
    yield s
    for _ in range(depth):
        s = arr @ s + eye
        yield s


def neumann_series(sigma: npt.ArrayLike, depth: int) -> np.ndarray:
    s = None
    for s in neumann_partial_sums(sigma, depth):
        pass
    return s


@dataclass(frozen=True)
class PenroseResiduals:
    """Frobenius residuals of the four Moore-Penrose conditions."""

    aga: float
    gag: float
    ag_hermitian: float
    ga_hermitian: float

    def max(self):
        return max(self.aga, self.gag, self.ag_hermitian, self.ga_hermitian)


def moore_penrose_residuals(a: npt.ArrayLike, a_plus: npt.ArrayLike) -> PenroseResiduals:
    a = as_matrix(a)
    g = as_matrix(a_plus, "a_plus")
    if g.shape != a.shape[::-1]:
        raise DimensionError(f"pseudoinverse shape {g.shape} does not match {a.shape}")
    ag = a @ g
    ga = g @ a
    fro = np.linalg.norm
    res = PenroseResiduals(
        aga=float(fro(ag @ a - a)),
        gag=float(fro(ga @ g - g)),
        ag_hermitian=float(fro(ag - ag.conj().T)),
        ga_hermitian=float(fro(ga - ga.conj().T)),
    )
    log.debug(f"Penrose residuals: {res}")
    return res
