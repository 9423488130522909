# -*- coding: utf-8 -*-
"""Qubit coupled to a Lorentzian bosonic bath in the one-excitation sector.

Basis convention for the qubit: index 0 is the ground state, index 1 the
excited state, so ``sigma_plus = |1><0|``.
"""
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from tclplus.api.expansion import TclProblem, assemble_generator
from tclplus.api.integrate import causal_conv, cumint, rk4
from tclplus.api.models.base import ModelHandler, Trajectory
from tclplus.api.superop import BathState, SpaceDims, liouvillian, projector_p, projector_p_adjoint, vectorize
from tclplus.exceptions import InvalidOrder

SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=np.complex128)
SIGMA_MINUS = SIGMA_PLUS.conj().T
EXCITED = SIGMA_PLUS @ SIGMA_MINUS

JC_ORDERS = (2, 4, 6)


def spectral_density(omega, cfg):
    """Lorentzian ``J(w)`` centred on the qubit frequency."""
    x = (np.asarray(omega, dtype=float) - cfg.omega0) / cfg.nu_b
    return cfg.gamma0 / (2 * np.pi) / (1 + x ** 2)


def correlation_amplitude(cfg):
    return cfg.gamma0 * cfg.nu_b / 2


def bath_correlation(tau, cfg):
    """``f(tau) = int J(w) exp(i (omega0 - w) tau) dw``, closed form."""
    tau = np.asarray(tau, dtype=float)
    return (correlation_amplitude(cfg) * np.exp(-cfg.nu_b * np.abs(tau))).astype(np.complex128)


@dataclass(frozen=True)
class BathModes:
    omegas: np.ndarray
    couplings: np.ndarray
    d_omega: float

    def __len__(self):
        return self.omegas.size


def discretize_bath(cfg, n_modes=None):
    """Midpoint sampling of ``J`` on ``omega0 +- bandwidth_factor * nu_b``."""
    n = cfg.n_modes if n_modes is None else n_modes
    if n < 1:
        raise ValueError(f"n_modes must be >= 1, got {n}")
    half_width = cfg.bandwidth_factor * cfg.nu_b
    d_omega = 2 * half_width / n
    omegas = cfg.omega0 - half_width + d_omega * (np.arange(n) + 0.5)
    couplings = np.sqrt(spectral_density(omegas, cfg) * d_omega)
    return BathModes(omegas, couplings, d_omega)


def discrete_correlation(tau, modes, cfg):
    tau = np.asarray(tau, dtype=float)
    phases = np.exp(1j * np.multiply.outer(tau, cfg.omega0 - modes.omegas))
    return phases @ (modes.couplings ** 2)


@dataclass
class JcTrajectory(Trajectory):
    rho11: np.ndarray = None
    coherence: np.ndarray = None
    bath_dim: int = 1
    states: np.ndarray = field(default=None, repr=False)

    columns = ("rho11", "re_coherence", "im_coherence")
    meta_columns = ("method", "order", "bath_dim")

    def rows(self):
        meta = self.meta_values()
        for t, p, c in zip(self.times, self.rho11, self.coherence):
            yield [t, p, c.real, c.imag, *meta]


def initial_amplitudes(cfg):
    p = cfg.initial_excited
    return math.sqrt(1 - p), math.sqrt(p)


def _excited_amplitude_kernel(cfg, times):
    # Lorentzian memory kernel: z = int f(t - s) c1(s) ds obeys z' = f0 c1 - nu z
    _, c1_0 = initial_amplitudes(cfg)
    dt = times[1] - times[0]
    m = np.array([[0.0, -cfg.coupling ** 2], [correlation_amplitude(cfg), -cfg.nu_b]])
    step = scipy.linalg.expm(m * dt)
    y = np.array([c1_0, 0.0], dtype=np.complex128)
    out = np.empty(times.size, dtype=np.complex128)
    out[0] = y[0]
    for i in range(1, times.size):
        y = step @ y
        out[i] = y[0]
    return out


def _excited_amplitude_modes(cfg, times):
    _, c1_0 = initial_amplitudes(cfg)
    modes = discretize_bath(cfg)
    n = len(modes)
    m = np.zeros((n + 1, n + 1))
    m[0, 1:] = m[1:, 0] = cfg.coupling * modes.couplings
    m[1:, 1:] = np.diag(-(cfg.omega0 - modes.omegas))
    evals, evecs = scipy.linalg.eigh(m)
    y0 = np.zeros(n + 1, dtype=np.complex128)
    y0[0] = c1_0
    weights = evecs[0, :] * (evecs.conj().T @ y0)
    return weights @ np.exp(-1j * np.multiply.outer(evals, times))


def exact_one_excitation(cfg, times=None):
    """Exact qubit state; the ground amplitude ``c0`` stays constant."""
    if times is None:
        times = cfg.dt * np.arange(cfg.n_steps + 1)
    if cfg.coupling == 0:
        c1 = np.full(times.size, initial_amplitudes(cfg)[1], dtype=np.complex128)
    elif cfg.exact_solver == "modes":
        c1 = _excited_amplitude_modes(cfg, times)
    else:
        c1 = _excited_amplitude_kernel(cfg, times)
    c0, _ = initial_amplitudes(cfg)
    rho11 = np.abs(c1) ** 2
    coherence = c0 * c1.conj()
    # population leaving the qubit sits in the bath, the reduced ground weight absorbs it
    states = np.empty((times.size, 2, 2), dtype=np.complex128)
    states[:, 0, 0] = 1.0 - rho11
    states[:, 0, 1] = coherence
    states[:, 1, 0] = coherence.conj()
    states[:, 1, 1] = rho11
    return JcTrajectory(
        times, "exact", None,
        rho11=states[:, 1, 1].real, coherence=states[:, 0, 1], bath_dim=cfg.bath_dim,
        states=states,
    )


@dataclass
class JcRateTable:
    """Coefficients of the cumulative decay rate ``Gamma = gamma + i S``.

    ``gamma2``, ``gamma4`` and ``gamma6`` multiply ``lambda**2, **4, **6``.
    ``j6`` is the nested integral feeding the sixth order adjoint terms.
    """

    times: np.ndarray
    gamma2: np.ndarray
    gamma4: np.ndarray
    gamma6: np.ndarray
    j6: np.ndarray = field(repr=False)

    def tcl(self, order, coupling):
        if order not in JC_ORDERS:
            raise InvalidOrder(f"JC rates exist for orders {JC_ORDERS}, got {order}")
        total = coupling ** 2 * self.gamma2
        if order >= 4:
            total = total + coupling ** 4 * self.gamma4
        if order >= 6:
            total = total + coupling ** 6 * self.gamma6
        return total

    def adjoint_correction(self, coupling, bath_dim, word=None):
        """``Gamma`` shift from one adjoint word, or from both when ``word`` is None."""
        traces = adjoint_word_traces(bath_dim)
        weight = sum(traces) if word is None else traces[word]
        return 2 * weight * coupling ** 6 * self.j6

    def total(self, method, order, coupling, bath_dim=1):
        rates = self.tcl(order, coupling)
        if method == "tclplus" and order >= 6:
            rates = rates + self.adjoint_correction(coupling, bath_dim)
        return rates


def adjoint_word_traces(bath_dim):
    """Bath traces left behind by the two sixth order adjoint words.

    On a single mode truncated to ``bath_dim`` Fock states the first word
    closes with ``Tr[I_B] = D``. The second applies its last Liouvillian
    pair to ``sigma_plus (x) I_B`` and closes with
    ``Tr[b b^+ + b^+ b] = D (D - 1)``.
    """
    if bath_dim < 1:
        raise ValueError(f"bath_dim must be >= 1, got {bath_dim}")
    return bath_dim, bath_dim * (bath_dim - 1)


def jc_rate_table(cfg, times):
    """Rates from the coupling expansion of ``-2 c1'/c1``.

    With ``c1 = sum_k lambda**(2k) a_k`` and ``a_{k+1}' = -(f * a_k)``, the
    time-local rate is expanded order by order.
    """
    times = np.asarray(times, dtype=float)
    h = times[1] - times[0]
    f = bath_correlation(times, cfg)
    ad1 = -causal_conv(f, np.ones_like(f), h)
    a1 = cumint(ad1, h)
    ad2 = -causal_conv(f, a1, h)
    a2 = cumint(ad2, h)
    ad3 = -causal_conv(f, a2, h)
    gamma2 = -2 * ad1
    gamma4 = -2 * (ad2 - ad1 * a1)
    gamma6 = -2 * (ad3 - ad2 * a1 - ad1 * a2 + ad1 * a1 ** 2)

    inner = cumint(cumint(f, h), h)
    j6 = causal_conv(f, cumint(causal_conv(f, inner, h), h), h)
    return JcRateTable(times, gamma2, gamma4, gamma6, j6)


def _rate_grid(t, cfg):
    n = max(2, int(math.ceil(t / (cfg.dt / 2))))
    return np.linspace(0.0, t, n + 1)


def tcl_rates(order, t, cfg):
    """``(gamma, S)`` through ``order`` at time ``t``."""
    if t == 0:
        return 0.0, 0.0
    table = jc_rate_table(cfg, _rate_grid(t, cfg))
    rate = table.tcl(order, cfg.coupling)[-1]
    return float(rate.real), float(rate.imag)


def tclplus_extra_terms6(t, cfg, truncated_bath_dim, word=None):
    """Rate correction from the sixth order adjoint words.

    Word ``w`` reduces to ``-T_w f(t-t1) f(t2-t3) f(t4-t5)`` on
    ``sigma_plus (x) rho_B`` with ``T_w`` from :func:`adjoint_word_traces`,
    so both words together grow as ``D**2``.
    """
    if truncated_bath_dim < 1:
        raise ValueError("truncated_bath_dim must be >= 1")
    if t == 0:
        return 0j
    table = jc_rate_table(cfg, _rate_grid(t, cfg))
    return complex(table.adjoint_correction(cfg.coupling, truncated_bath_dim, word)[-1])


def qubit_generator(rho, gamma, s):
    """``-(i/2) S [s+s-, rho] + gamma (s- rho s+ - {s+s-, rho}/2)``."""
    comm = EXCITED @ rho - rho @ EXCITED
    anti = EXCITED @ rho + rho @ EXCITED
    return -0.5j * s * comm + gamma * (SIGMA_MINUS @ rho @ SIGMA_PLUS - 0.5 * anti)


def _annihilation(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(np.complex128)


def jc_problem(cfg, bath_dim, n_modes=1, modes=None, steps_per_unit=None):
    """Superoperator inputs on a Fock-truncated few-mode bath in vacuum."""
    if modes is None:
        modes = discretize_bath(cfg, n_modes)
    n = len(modes)
    dims = SpaceDims(2, bath_dim ** n)
    dims.check_dense()
    a = _annihilation(bath_dim)
    eye = np.eye(bath_dim)
    lowering = []
    for k in range(n):
        op = np.ones((1, 1), dtype=np.complex128)
        for j in range(n):
            op = np.kron(op, a if j == k else eye)
        lowering.append(op)
    detunings = cfg.omega0 - modes.omegas

    def hamiltonian(t):
        b = sum(g * np.exp(1j * d * t) * op for g, d, op in zip(modes.couplings, detunings, lowering))
        term = np.kron(SIGMA_PLUS, b)
        return term + term.conj().T

    vacuum = np.zeros(dims.d_bath)
    vacuum[0] = 1.0
    kwargs = {} if steps_per_unit is None else {"steps_per_unit": steps_per_unit}
    return TclProblem(BathState.pure(vacuum, 2), hamiltonian, cfg.coupling, name="jc", **kwargs)


def sigma_plus_state(problem):
    return np.kron(SIGMA_PLUS, problem.bath.rho_b)


def eigen_coefficient(mat, x):
    """Best scalar ``c`` with ``mat x ~ c x`` and the orthogonal residual."""
    v = vectorize(x)
    w = mat @ v
    c = np.vdot(v, w) / np.vdot(v, v)
    return complex(c), float(np.linalg.norm(w - c * v))


def generator_rate(problem, method, order, t, **kwargs):
    """``Gamma = -2 c`` where ``K(t) (sigma_plus (x) rho_B) = c (sigma_plus (x) rho_B)``."""
    gen = assemble_generator(method, order, t, problem, **kwargs)
    c, residual = eigen_coefficient(gen.mat, sigma_plus_state(problem))
    return -2 * c, residual


ADJOINT_WORDS = ("PLLPPdagLLPLLP", "PLLPdagLLPLLP")


def adjoint_term_superop_value(problem, times, word=0):
    """Apply one sixth order adjoint word to ``sigma_plus (x) rho_B``.

    ``times`` freezes the six Liouvillians, left to right. Returns the
    eigen coefficient and the orthogonal residual.
    """
    if len(times) != 6:
        raise ValueError("six frozen times are required")
    p = projector_p(problem.bath).mat
    p_dag = projector_p_adjoint(problem.bath).mat
    lv = [liouvillian(problem.hamiltonian(t), problem.dims).mat for t in times]
    if word == 0:
        op = p @ lv[0] @ lv[1] @ p @ p_dag @ lv[2] @ lv[3] @ p @ lv[4] @ lv[5] @ p
    elif word == 1:
        op = p @ lv[0] @ lv[1] @ p_dag @ lv[2] @ lv[3] @ p @ lv[4] @ lv[5] @ p
    else:
        raise ValueError(f"word index must be 0 or 1, got {word}")
    return eigen_coefficient(op, sigma_plus_state(problem))


class JcHandler(ModelHandler):
    model_name = "jc"

    def file_stem(self):
        return f"{self.model_name}_{self.settings.label}_dim{self.settings.bath_dim}"

    def run(self):
        cfg = self.settings
        if cfg.method == "exact":
            self.log.debug(f"Exact one-excitation solution ({cfg.exact_solver} solver)")
            return exact_one_excitation(cfg)

        half_grid = (cfg.dt / 2) * np.arange(2 * cfg.n_steps + 1)
        table = jc_rate_table(cfg, half_grid)
        rates = table.total(cfg.method, cfg.order, cfg.coupling, cfg.bath_dim)
        gamma, s = rates.real, rates.imag

        c0, c1 = initial_amplitudes(cfg)
        psi = np.array([c0, c1], dtype=np.complex128)
        rho0 = np.outer(psi, psi.conj())
        result = rk4(lambda k, rho: qubit_generator(rho, gamma[k], s[k]),
                     rho0, 0.0, cfg.dt, cfg.n_steps)
        if result.diverged:
            self.log.warning(f"{cfg.label} (bath dim {cfg.bath_dim}) diverged at t={result.divergence_time:.6g}")
        states = result.states
        return JcTrajectory(
            result.times, cfg.method, cfg.order,
            rho11=states[:, 1, 1].real, coherence=states[:, 0, 1],
            bath_dim=cfg.bath_dim, states=states, divergence_time=result.divergence_time,
        )


def run_jc(cfg):
    return JcHandler(cfg).run()
