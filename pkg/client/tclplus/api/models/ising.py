# -*- coding: utf-8 -*-
"""Qubit dephasing by a bath of independent spins.

The coupling is ``H = sigma_z (x) B`` with the shifted bath operator
``B = sum_n g_n sigma_n^z - theta I``, so ``Tr[B rho_B] = 0``. The bath
Hamiltonian ``sum_n Omega_n sigma_n^z / 2`` commutes with ``B``, which makes
the interaction-picture coupling time independent.
"""
import math
from dataclasses import dataclass
from math import comb

import numpy as np

from tclplus.api.expansion import TclProblem
from tclplus.api.models.base import ModelHandler, Trajectory
from tclplus.api.superop import (
    BathState,
    SpaceDims,
    apply_liouvillian,
    apply_projector,
    apply_projector_adjoint,
    partial_trace_bath,
)
from tclplus.constants import BRUTE_FORCE_MAX_SITES
from tclplus.exceptions import CapacityError, InvalidOrder

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

ISING_ORDERS = (2, 4, 5)


def site_polarizations(cfg):
    """``beta_n = <sigma_n^z> = tanh(-Omega_n beta / 2)``."""
    return np.tanh(-np.asarray(cfg.omegas, dtype=float) * cfg.beta / 2)


@dataclass(frozen=True)
class BathMoments:
    theta: float
    q: tuple
    tr_b: float
    tr_b2_rho2: float
    tr_brho_sq: float
    n_bath: int

    def moment(self, n):
        return self.q[n - 1]

    @property
    def cumulants(self):
        """``kappa_2 .. kappa_5`` of the shifted bath operator."""
        q2, q3, q4, q5 = self.q[1:5]
        return {2: q2, 3: q3, 4: q4 - 3 * q2 ** 2, 5: q5 - 10 * q2 * q3}

    @property
    def trace_product(self):
        """``2 Tr[B] (Tr[B^2 rho_B^2] + Tr[(B rho_B)^2])``."""
        return 2 * self.tr_b * (self.tr_b2_rho2 + self.tr_brho_sq)


def _site_central_moments(g, pol, max_order):
    # centred site variable: g(1 - pol) w.p. (1 + pol)/2, -g(1 + pol) w.p. (1 - pol)/2
    up, down = g * (1 - pol), -g * (1 + pol)
    p_up, p_down = (1 + pol) / 2, (1 - pol) / 2
    return [p_up * up ** k + p_down * down ** k for k in range(max_order + 1)]


def central_moments(cfg, max_order=5):
    """Central moments ``Q_0 .. Q_max`` of ``sum_n g_n sigma_n^z`` under ``rho_B``."""
    pols = site_polarizations(cfg)
    total = [1.0] + [0.0] * max_order
    for g, pol in zip(cfg.couplings, pols):
        site = _site_central_moments(g, pol, max_order)
        total = [
            sum(comb(n, k) * total[k] * site[n - k] for k in range(n + 1))
            for n in range(max_order + 1)
        ]
    return total


def bath_moments(cfg):
    """Moments and trace quantities from per-site factorization."""
    g = np.asarray(cfg.couplings, dtype=float)
    pols = site_polarizations(cfg)
    n = cfg.n_bath
    theta = float(np.sum(g * pols))
    q = tuple(float(x) for x in central_moments(cfg)[1:6])
    squared_weight = float(np.prod((1 + pols ** 2) / 2))
    mu = 2 * pols / (1 + pols ** 2)
    tr_b2_rho2 = squared_weight * float(np.sum(g ** 2 * (1 - mu ** 2)) + (np.sum(g * mu) - theta) ** 2)
    return BathMoments(
        theta=theta, q=q, tr_b=-(2 ** n) * theta,
        tr_b2_rho2=tr_b2_rho2, tr_brho_sq=tr_b2_rho2, n_bath=n,
    )


def _check_brute_force(cfg):
    if cfg.n_bath > BRUTE_FORCE_MAX_SITES:
        raise CapacityError(
            f"brute force enumeration is limited to {BRUTE_FORCE_MAX_SITES} bath spins, got {cfg.n_bath}"
        )


def bath_spectrum(cfg):
    """Diagonals of ``B`` and ``rho_B`` over all ``2**N`` bath configurations.

    Site ``n`` is the ``n``-th tensor factor; spin up (``sigma^z = +1``) is
    index 0.
    """
    _check_brute_force(cfg)
    n = cfg.n_bath
    spins = 1 - 2 * ((np.arange(2 ** n)[:, None] >> np.arange(n)[::-1]) & 1)
    pols = site_polarizations(cfg)
    probs = np.prod((1 + spins * pols) / 2, axis=1)
    theta = float(np.sum(np.asarray(cfg.couplings) * pols))
    energies = spins @ np.asarray(cfg.couplings, dtype=float) - theta
    return energies, probs


def moments_brute_force(cfg):
    """Same quantities as :func:`bath_moments`, by explicit diagonal traces."""
    b, rho = bath_spectrum(cfg)
    q = tuple(float(np.sum(rho * b ** k)) for k in range(1, 6))
    theta = float(np.sum(np.asarray(cfg.couplings) * site_polarizations(cfg)))
    return BathMoments(
        theta=theta, q=q, tr_b=float(np.sum(b)),
        tr_b2_rho2=float(np.sum(b ** 2 * rho ** 2)),
        tr_brho_sq=float(np.sum((b * rho) ** 2)), n_bath=cfg.n_bath,
    )


@dataclass
class BlochTrajectory(Trajectory):
    vx: np.ndarray = None
    vy: np.ndarray = None
    vz: np.ndarray = None
    n_bath: int = 0
    beta: float = 0.0

    columns = ("vx", "vy", "vz")
    meta_columns = ("method", "order", "n_bath", "beta")

    def rows(self):
        meta = self.meta_values()
        for row in zip(self.times, self.vx, self.vy, self.vz):
            yield [*row, *meta]

    @property
    def coherence(self):
        return self.vx + 1j * self.vy


def _bloch_from_coherence(cfg, times, coherence, method, order):
    vz = np.full(times.size, cfg.initial_bloch[2], dtype=float)
    return BlochTrajectory(
        times, method, order, vx=coherence.real, vy=coherence.imag, vz=vz,
        n_bath=cfg.n_bath, beta=cfg.beta,
    )


def _time_grid(cfg):
    return cfg.dt * np.arange(cfg.n_steps + 1)


def coherence_factor(cfg, times):
    """``exp(-2i lam theta t) prod_n [cos(2 lam g_n t) + i beta_n sin(2 lam g_n t)]``."""
    times = np.asarray(times, dtype=float)
    lam = cfg.coupling
    pols = site_polarizations(cfg)
    theta = float(np.sum(np.asarray(cfg.couplings) * pols))
    arg = 2 * lam * np.multiply.outer(times, np.asarray(cfg.couplings, dtype=float))
    factor = np.prod(np.cos(arg) + 1j * pols * np.sin(arg), axis=1)
    return np.exp(-2j * lam * theta * times) * factor


def exact_dephasing(cfg, times=None):
    times = _time_grid(cfg) if times is None else np.asarray(times, dtype=float)
    v0 = cfg.initial_bloch[0] + 1j * cfg.initial_bloch[1]
    return _bloch_from_coherence(cfg, times, v0 * coherence_factor(cfg, times), "exact", None)


def brute_force_dephasing(cfg, times=None):
    """Coherence from the joint unitary, summed over all bath configurations.

    ``U = exp(-i lam t sigma_z (x) B)`` is diagonal, so the reduced
    coherence is ``sum_b p_b exp(2 i lam t B_b)`` times its initial value.
    """
    times = _time_grid(cfg) if times is None else np.asarray(times, dtype=float)
    energies, probs = bath_spectrum(cfg)
    phases = np.exp(2j * cfg.coupling * np.multiply.outer(times, energies))
    v0 = cfg.initial_bloch[0] + 1j * cfg.initial_bloch[1]
    return _bloch_from_coherence(cfg, times, v0 * (phases @ probs), "brute_force", None)


def tcl_fg(order, t, moments, cfg):
    """Amplitude ``f`` and phase ``g`` of the order-truncated TCL solution.

    ``ln(f exp(-i g)) = sum_k kappa_k (2 i lam t)**k / k!`` truncated to
    grades ``2 .. order``; even grades feed ``f``, odd grades feed ``g``.
    """
    if order not in ISING_ORDERS:
        raise InvalidOrder(f"Ising TCL orders are {ISING_ORDERS}, got {order}")
    t = np.asarray(t, dtype=float)
    x = 2j * cfg.coupling * t
    kappa = moments.cumulants
    log_amp = sum(kappa[k] * x ** k / math.factorial(k) for k in range(2, order + 1))
    return np.exp(log_amp.real), -log_amp.imag


def tclplus_extra_term5(moments, t, cfg):
    """Phase correction from ``2 P L Pdag L L P L L P``.

    On ``rho_S (x) rho_B`` the word gives ``-8 i Q_2 T [sigma_z, rho_S]`` with
    ``T`` the trace product; weighted by ``t**4 / 4!`` and integrated once.
    """
    t = np.asarray(t, dtype=float)
    return -(2.0 / 15.0) * cfg.coupling ** 5 * t ** 5 * moments.moment(2) * moments.trace_product


def bloch_from_fg(cfg, times, f, g, method, order):
    vx0, vy0, _ = cfg.initial_bloch
    coherence = f * (vx0 + 1j * vy0) * np.exp(-1j * g)
    return _bloch_from_coherence(cfg, times, coherence, method, order)


def ising_hamiltonian(cfg):
    """Joint coupling ``sigma_z (x) B`` and the Gibbs bath state."""
    energies, probs = bath_spectrum(cfg)
    return np.kron(PAULI_Z, np.diag(energies)), np.diag(probs)


def ising_problem(cfg):
    """Superoperator inputs; dense, so only a few bath spins fit."""
    h, rho_b = ising_hamiltonian(cfg)
    dims = SpaceDims(2, rho_b.shape[0])
    dims.check_dense()
    return TclProblem(BathState(dims, rho_b), lambda t: h, cfg.coupling, name="ising")


def nested_commutator(h, x, n):
    """``[h, [h, ... [h, x]]]`` with ``n`` commutators."""
    out = np.asarray(x, dtype=np.complex128)
    for _ in range(n):
        out = h @ out - out @ h
    return out


def binomial_commutator(h, x, n):
    """``sum_k (-1)**k C(n, k) h**(n-k) x h**k``."""
    powers = [np.eye(h.shape[0], dtype=np.complex128)]
    for _ in range(n):
        powers.append(powers[-1] @ h)
    return sum((-1) ** k * comb(n, k) * powers[n - k] @ x @ powers[k] for k in range(n + 1))


def density_from_bloch(vec):
    vx, vy, vz = vec
    return 0.5 * (np.eye(2) + vx * PAULI_X + vy * PAULI_Y + vz * PAULI_Z)


def _fit_residual(y, basis):
    c = np.vdot(basis, y) / np.vdot(basis, basis)
    return float(np.linalg.norm(y - c * basis)), complex(c)


def odd_even_residuals(cfg, n_max=5, rho_s=None):
    """Check the odd/even structure of ``P L**n (rho_S (x) rho_B)``.

    Odd powers must lie along ``sigma_z rho - rho sigma_z``; even powers along
    ``sigma_z rho sigma_z - rho``. Returns ``{n: (residual, coefficient)}``.
    """
    if rho_s is None:
        rho_s = density_from_bloch((0.6, 0.3, 0.2))
    h, rho_b = ising_hamiltonian(cfg)
    bath = BathState(SpaceDims(2, rho_b.shape[0]), rho_b)
    odd_basis = PAULI_Z @ rho_s - rho_s @ PAULI_Z
    even_basis = PAULI_Z @ rho_s @ PAULI_Z - rho_s
    x = np.kron(rho_s, rho_b)
    out = {}
    for n in range(1, n_max + 1):
        x = apply_liouvillian(h, x)
        reduced = partial_trace_bath(apply_projector(x, bath), bath.dims)
        out[n] = _fit_residual(reduced, odd_basis if n % 2 else even_basis)
    return out


def adjoint_term_superop_value(cfg, rho_s=None):
    """Reduced value of ``2 P L Pdag L L P L L P (rho_S (x) rho_B)``.

    Returns the system operator together with the closed form
    ``-8 i Q_2 T [sigma_z, rho_S]``.
    """
    if rho_s is None:
        rho_s = density_from_bloch(cfg.initial_bloch)
    h, rho_b = ising_hamiltonian(cfg)
    bath = BathState(SpaceDims(2, rho_b.shape[0]), rho_b)

    def ll_p(x):
        return apply_projector(apply_liouvillian(h, apply_liouvillian(h, x)), bath)

    x = ll_p(np.kron(rho_s, rho_b))
    x = apply_liouvillian(h, apply_liouvillian(h, x))
    x = apply_projector_adjoint(x, bath)
    x = apply_projector(apply_liouvillian(h, x), bath)
    value = 2 * partial_trace_bath(x, bath.dims)

    moments = bath_moments(cfg)
    closed = -8j * moments.moment(2) * moments.trace_product * (PAULI_Z @ rho_s - rho_s @ PAULI_Z)
    return value, closed


class IsingHandler(ModelHandler):
    model_name = "ising"

    def file_stem(self):
        cfg = self.settings
        return f"{self.model_name}_{cfg.label}_N{cfg.n_bath}_beta{cfg.beta:g}"

    def run(self):
        cfg = self.settings
        if cfg.method == "exact":
            return exact_dephasing(cfg)
        if cfg.method == "brute_force":
            return brute_force_dephasing(cfg)

        times = _time_grid(cfg)
        moments = bath_moments(cfg)
        f, g = tcl_fg(cfg.order, times, moments, cfg)
        if cfg.method == "tclplus" and cfg.order >= 5:
            extra = tclplus_extra_term5(moments, times, cfg)
            self.log.debug(f"TCL+ phase correction at t_max: {extra[-1]:.6g} rad")
            g = g + extra
        return bloch_from_fg(cfg, times, f, g, cfg.method, cfg.order)


def run_ising(cfg):
    return IsingHandler(cfg).run()
