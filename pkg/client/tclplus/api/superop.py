"""Superoperators on a system (x) bath Hilbert space.

Operators are vectorized by column stacking: entry ``(i, j)`` of an ``n x n``
matrix lands at index ``j * n + i``. In this convention left multiplication by
``A`` is ``kron(I, A)`` and right multiplication by ``B`` is ``kron(B.T, I)``.
Joint operators are ordered system first, bath second.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import numpy.typing as npt
import scipy.linalg

from tclplus.api.linalg import as_matrix, is_hermitian, operator_norm
from tclplus.constants import BATH_STATE_TOL, HERMITICITY_TOL, MAX_DENSE_JOINT_DIM
from tclplus.exceptions import (
    CapacityError,
    DimensionError,
    InvalidHamiltonian,
    InvalidMatrix,
)
from tclplus.logger import log


@dataclass(frozen=True)
class SpaceDims:
    d_sys: int
    d_bath: int

    def __post_init__(self):
        if self.d_sys < 1 or self.d_bath < 1:
            raise DimensionError(f"dimensions must be >= 1, got {self.d_sys}x{self.d_bath}")

    @property
    def joint(self):
        return self.d_sys * self.d_bath

    @property
    def vec(self):
        return self.joint ** 2

    def check_joint(self, x, name="operator"):
        if x.shape != (self.joint, self.joint):
            raise DimensionError(
                f"{name} has shape {x.shape}, expected {(self.joint, self.joint)}"
            )

    def check_dense(self):
        if self.joint > MAX_DENSE_JOINT_DIM:
            raise CapacityError(
                f"joint dimension {self.joint} exceeds {MAX_DENSE_JOINT_DIM}; "
                "use the apply_* operator-form functions instead"
            )


def vectorize(x: npt.ArrayLike) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionError(f"can only vectorize square matrices, got {x.shape}")
    return x.reshape(-1, order="F")


def devectorize(v: npt.ArrayLike) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    n = int(round(np.sqrt(v.size)))
    if n * n != v.size:
        raise DimensionError(f"vector length {v.size} is not a perfect square")
    return v.reshape(n, n, order="F")


@dataclass(frozen=True, eq=False)
class SuperOperator:
    """A linear map on vectorized joint operators."""

    dims: SpaceDims
    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=np.complex128)
        if mat.shape != (self.dims.vec, self.dims.vec):
            raise DimensionError(
                f"superoperator matrix has shape {mat.shape}, "
                f"expected {(self.dims.vec, self.dims.vec)}"
            )
        object.__setattr__(self, "mat", mat)

    @classmethod
    def zero(cls, dims):
        return cls(dims, np.zeros((dims.vec, dims.vec), dtype=np.complex128))

    @classmethod
    def identity(cls, dims):
        return cls(dims, np.eye(dims.vec, dtype=np.complex128))

    def _other(self, other):
        if not isinstance(other, SuperOperator):
            return NotImplemented
        if other.dims != self.dims:
            raise DimensionError(f"dims differ: {self.dims} vs {other.dims}")
        return other.mat

    def __matmul__(self, other):
        mat = self._other(other)
        if mat is NotImplemented:
            return NotImplemented
        return SuperOperator(self.dims, self.mat @ mat)

    def __add__(self, other):
        mat = self._other(other)
        if mat is NotImplemented:
            return NotImplemented
        return SuperOperator(self.dims, self.mat + mat)

    def __sub__(self, other):
        mat = self._other(other)
        if mat is NotImplemented:
            return NotImplemented
        return SuperOperator(self.dims, self.mat - mat)

    def __neg__(self):
        return SuperOperator(self.dims, -self.mat)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return SuperOperator(self.dims, scalar * self.mat)

    __rmul__ = __mul__

    def adjoint(self):
        return SuperOperator(self.dims, self.mat.conj().T)

    def apply(self, x):
        """Apply to a joint operator given as a matrix."""
        x = np.asarray(x, dtype=np.complex128)
        self.dims.check_joint(x)
        return devectorize(self.mat @ vectorize(x))

    def norm(self):
        return operator_norm(self.mat)

    def allclose(self, other, atol=1e-10):
        return bool(np.allclose(self.mat, self._other(other), rtol=0.0, atol=atol))


@dataclass(frozen=True, eq=False)
class BathState:
    """Reference bath state ``rho_B`` used by the projector."""

    dims: SpaceDims
    rho_b: np.ndarray

    def __post_init__(self):
        rho = as_matrix(self.rho_b, "rho_b")
        if rho.shape != (self.dims.d_bath, self.dims.d_bath):
            raise DimensionError(
                f"rho_b has shape {rho.shape}, expected d_bath={self.dims.d_bath}"
            )
        if abs(np.trace(rho) - 1.0) > BATH_STATE_TOL:
            raise InvalidMatrix(f"rho_b must have unit trace, got {np.trace(rho):.3e}")
        if not is_hermitian(rho, BATH_STATE_TOL):
            raise InvalidMatrix("rho_b must be Hermitian")
        if np.min(np.linalg.eigvalsh(rho)) < -BATH_STATE_TOL:
            raise InvalidMatrix("rho_b must be positive semidefinite")
        object.__setattr__(self, "rho_b", rho)

    @classmethod
    def thermal(cls, h_b, beta, d_sys):
        """Gibbs state ``exp(-beta h_b) / Z``."""
        h_b = as_matrix(h_b, "h_b")
        if not is_hermitian(h_b, HERMITICITY_TOL):
            raise InvalidHamiltonian("bath Hamiltonian is not Hermitian")
        energies, vecs = scipy.linalg.eigh(h_b)
        weights = np.exp(-beta * (energies - energies.min()))
        weights /= weights.sum()
        rho = (vecs * weights) @ vecs.conj().T
        return cls(SpaceDims(d_sys, h_b.shape[0]), (rho + rho.conj().T) / 2)

    @classmethod
    def pure(cls, psi, d_sys):
        psi = np.asarray(psi, dtype=np.complex128).ravel()
        nrm = np.linalg.norm(psi)
        if nrm == 0:
            raise InvalidMatrix("pure bath state vector is zero")
        psi = psi / nrm
        return cls(SpaceDims(d_sys, psi.size), np.outer(psi, psi.conj()))

    @cached_property
    def purity(self):
        return float(np.real(np.trace(self.rho_b @ self.rho_b)))


def _check_hamiltonian(h, dims):
    h = as_matrix(h, "hamiltonian")
    dims.check_joint(h, "hamiltonian")
    if not is_hermitian(h, HERMITICITY_TOL):
        raise InvalidHamiltonian(
            f"hamiltonian deviates from Hermitian by {np.max(np.abs(h - h.conj().T)):.3e}"
        )
    return h


def _commutator_matrix(h, dims):
    eye = np.eye(dims.joint, dtype=np.complex128)
    return np.kron(eye, h) - np.kron(h.T, eye)


def liouvillian(h: npt.ArrayLike, dims: SpaceDims) -> SuperOperator:
    """Matrix of ``x -> -i[h, x]``."""
    dims.check_dense()
    h = _check_hamiltonian(h, dims)
    return SuperOperator(dims, -1j * _commutator_matrix(h, dims))


def liouvillian_adjoint(h: npt.ArrayLike, dims: SpaceDims) -> SuperOperator:
    """Matrix of ``x -> +i[h, x]``."""
    dims.check_dense()
    h = _check_hamiltonian(h, dims)
    return SuperOperator(dims, 1j * _commutator_matrix(h, dims))


def _tensor_to_superop(t, dims):
    # t[r, c, r', c'] maps input entry (r', c') to output entry (r, c)
    n = dims.joint
    return SuperOperator(dims, t.transpose(1, 0, 3, 2).reshape(n * n, n * n))


def projector_p(bath: BathState) -> SuperOperator:
    """Matrix of ``x -> Tr_B[x] (x) rho_B``."""
    dims = bath.dims
    dims.check_dense()
    eye_s = np.eye(dims.d_sys)
    eye_b = np.eye(dims.d_bath)
    t = np.einsum("ik,jl,mn,ab->iajbkmln", eye_s, eye_s, eye_b, bath.rho_b)
    return _tensor_to_superop(t.reshape((dims.joint,) * 4), dims)


def projector_p_adjoint(bath: BathState) -> SuperOperator:
    """Matrix of ``x -> Tr_B[x (I_S (x) rho_B)] (x) I_B``."""
    dims = bath.dims
    dims.check_dense()
    eye_s = np.eye(dims.d_sys)
    eye_b = np.eye(dims.d_bath)
    t = np.einsum("ik,jl,ab,nm->iajbkmln", eye_s, eye_s, eye_b, bath.rho_b)
    return _tensor_to_superop(t.reshape((dims.joint,) * 4), dims)


def projector_q(bath: BathState) -> SuperOperator:
    return SuperOperator.identity(bath.dims) - projector_p(bath)


def partial_trace_bath(x: npt.ArrayLike, dims: SpaceDims) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    dims.check_joint(x)
    return np.einsum("iaja->ij", x.reshape(dims.d_sys, dims.d_bath, dims.d_sys, dims.d_bath))


def apply_projector(x: npt.ArrayLike, bath: BathState) -> np.ndarray:
    return np.kron(partial_trace_bath(x, bath.dims), bath.rho_b)


def apply_projector_adjoint(x: npt.ArrayLike, bath: BathState) -> np.ndarray:
    dims = bath.dims
    weight = np.kron(np.eye(dims.d_sys), bath.rho_b)
    x = np.asarray(x, dtype=np.complex128)
    return np.kron(partial_trace_bath(x @ weight, dims), np.eye(dims.d_bath))


def apply_liouvillian(h: npt.ArrayLike, x: npt.ArrayLike) -> np.ndarray:
    h = np.asarray(h, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    return -1j * (h @ x - x @ h)


def shift_bath_operators(terms, rho_b):
    """Replace each ``B_a`` in ``[(A_a, B_a), ...]`` by ``B_a - Tr[B_a rho_B] I``.

    The decomposition is taken as given; it is not computed canonically.
    """
    rho_b = np.asarray(rho_b, dtype=np.complex128)
    eye = np.eye(rho_b.shape[0])
    return [(a, b - np.trace(b @ rho_b) * eye) for a, b in terms]


def coupling_hamiltonian(terms):
    """``sum_a A_a (x) B_a``."""
    return sum(np.kron(a, b) for a, b in terms)


@dataclass(frozen=True)
class PlpReport:
    plp: float
    pdag_ldag_pdag: float
    pdag_l_p: float
    p_l_pdag: float

    def as_dict(self):
        return {
            "PLP": self.plp,
            "PdagLdagPdag": self.pdag_ldag_pdag,
            "PdagLP": self.pdag_l_p,
            "PLPdag": self.p_l_pdag,
        }


def plp_relations_check(h: npt.ArrayLike, bath: BathState) -> PlpReport:
    """Operator norms of PLP, P'L'P', P'LP and PLP' (prime = adjoint)."""
    p = projector_p(bath)
    p_dag = projector_p_adjoint(bath)
    lv = liouvillian(h, bath.dims)
    lv_dag = liouvillian_adjoint(h, bath.dims)
    report = PlpReport(
        plp=(p @ lv @ p).norm(),
        pdag_ldag_pdag=(p_dag @ lv_dag @ p_dag).norm(),
        pdag_l_p=(p_dag @ lv @ p).norm(),
        p_l_pdag=(p @ lv @ p_dag).norm(),
    )
    log.debug(f"Projector relations: {report.as_dict()}")
    return report
