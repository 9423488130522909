"""TCL and TCL+ term generation and numeric generator assembly.

The symbolic half expands the Neumann series ``sum_k Sigma^k`` and the
pseudoinverse series of ``[I - Sigma]^+ Sigma`` order by order in the
coupling. The numeric half evaluates ``Sigma(t)`` and its perturbative pieces
for a concrete :class:`TclProblem` and binds them into generators.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, Optional

import numpy as np
import scipy.linalg

from tclplus.api.linalg import pinv_svd
from tclplus.api.ncpoly import (
    L,
    L_DAG,
    P,
    P_DAG,
    NcPolynomial,
    NcSymbol,
    SymbolKind,
    sigma_sum,
)
from tclplus.api.superop import (
    BathState,
    SuperOperator,
    liouvillian,
    projector_p,
)
from tclplus.constants import (
    BREAKDOWN_DET_THRESHOLD,
    DEFAULT_STEPS_PER_UNIT,
    TAYLOR_STENCIL_POINTS,
    TAYLOR_STENCIL_SPACING,
)
from tclplus.exceptions import InvalidOrder, SingularGenerator
from tclplus.logger import log

MAX_TERM_ORDER = 10


def _check_max_order(max_order):
    if max_order < 1:
        raise InvalidOrder(f"max_order must be >= 1, got {max_order}")


def _grade_parts(poly, max_order):
    # order n collects the grade n-1 words
    return {n: poly.grade_part(n - 1) for n in range(1, max_order + 1)}


def expand_neumann_terms(max_order: int) -> Dict[int, NcPolynomial]:
    """Per-order term lists of ``lambda L sum_{k>=1} Sigma^k``."""
    _check_max_order(max_order)
    top = max_order - 1
    s = sigma_sum(top)
    total = NcPolynomial()
    power = NcPolynomial.one()
    for _ in range(top):
        power = power.multiply(s, max_grade=top)
        if power.is_zero():
            break
        total = total + power
    return _grade_parts(total, max_order)


def expand_pinv_terms(max_order: int, series_depth: Optional[int] = None) -> Dict[int, NcPolynomial]:
    """Per-order term lists of ``sum_k X^k (I - Sigma)^dagger Sigma``.

    ``X = Sigma^dagger + Sigma - Sigma^dagger Sigma``. With ``series_depth``
    set, only ``k <= series_depth`` is kept; otherwise the sum runs until no
    word of grade ``< max_order`` can appear.
    """
    _check_max_order(max_order)
    if series_depth is not None and series_depth < 0:
        raise ValueError(f"series_depth must be >= 0, got {series_depth}")
    top = max_order - 1
    s = sigma_sum(top)
    s_dag = sigma_sum(top, dagger=True)
    x = s_dag + s - s_dag.multiply(s, max_grade=top)
    y = s - s_dag.multiply(s, max_grade=top)
    depth = top if series_depth is None else min(series_depth, top)
    total = NcPolynomial()
    power = NcPolynomial.one()
    for k in range(depth + 1):
        total = total + power.multiply(y, max_grade=top)
        power = power.multiply(x, max_grade=top)
        if power.is_zero():
            break
    return _grade_parts(total, max_order)


def expand_terms(method: str, max_order: int, series_depth: Optional[int] = None):
    method = str(method).lower()
    if method == "tcl":
        return expand_neumann_terms(max_order)
    if method == "tclplus":
        return expand_pinv_terms(max_order, series_depth)
    raise ValueError(f"unknown expansion method {method!r}")


def term_table(method: str, max_order: int, series_depth: Optional[int] = None):
    """JSON-ready term tables, one entry per order."""
    if max_order > MAX_TERM_ORDER:
        raise InvalidOrder(f"term tables are limited to order {MAX_TERM_ORDER}")
    tables = expand_terms(method, max_order, series_depth)
    out = []
    for order, poly in tables.items():
        out.append({
            "order": order,
            "terms": poly.to_json(),
            "adjoint_terms": poly.dagger_part().to_json(),
        })
    return out


_SIGMA1_WORDS = NcPolynomial({(L, P): 1})
_SIGMA2_WORDS = NcPolynomial({(L, L, P): 1, (P, L, L, P): -1, (L, P, L): -1})


def lift_to_operators(poly: NcPolynomial) -> NcPolynomial:
    """Rewrite ``S1``, ``S2`` and their adjoints as words in ``P`` and ``L``.

    Time labels are dropped; the words assume ``PLP = 0``.
    """
    rules = {
        NcSymbol.sigma(1): _SIGMA1_WORDS,
        NcSymbol.sigma(2): _SIGMA2_WORDS,
        NcSymbol.sigma(1, dagger=True): _SIGMA1_WORDS.adjoint(),
        NcSymbol.sigma(2, dagger=True): _SIGMA2_WORDS.adjoint(),
    }
    for word in poly.as_dict():
        for sym in word:
            if sym.kind in (SymbolKind.SIGMA, SymbolKind.SIGMA_DAGGER) and sym.order > 2:
                raise InvalidOrder(f"no closed operator form for {sym.label}")
    return poly.substitute(rules)


def generator_words(poly: NcPolynomial) -> NcPolynomial:
    """``P L poly P`` as operator words."""
    return NcPolynomial({(P, L): 1}) * lift_to_operators(poly) * NcPolynomial.symbol(P)


def _collapse_projectors(word):
    out = []
    for s in word:
        if out and s.kind in (SymbolKind.P, SymbolKind.P_DAGGER) and out[-1] == s:
            continue
        out.append(s)
    return tuple(out)


def drop_vanishing(poly: NcPolynomial) -> NcPolynomial:
    """Drop words containing ``PLP`` or ``PdagLdagPdag``."""
    kept = {}
    for word, coeff in poly.as_dict().items():
        word = _collapse_projectors(word)
        triples = {word[i:i + 3] for i in range(len(word) - 2)}
        if (P, L, P) in triples or (P_DAG, L_DAG, P_DAG) in triples:
            continue
        kept[word] = kept.get(word, 0) + coeff
    return NcPolynomial(kept)


@dataclass(frozen=True, eq=False)
class TclProblem:
    """Superoperator inputs of a concrete model.

    ``hamiltonian(t)`` returns the joint interaction-picture Hamiltonian
    without the coupling factor.
    """

    bath: BathState
    hamiltonian: Callable[[float], np.ndarray]
    coupling: float = 1.0
    t0: float = 0.0
    steps_per_unit: int = DEFAULT_STEPS_PER_UNIT
    name: str = field(default="model")

    @property
    def dims(self):
        return self.bath.dims

    @cached_property
    def p(self) -> np.ndarray:
        return projector_p(self.bath).mat

    @cached_property
    def q(self) -> np.ndarray:
        return np.eye(self.dims.vec, dtype=np.complex128) - self.p

    def liouvillian_at(self, t) -> np.ndarray:
        return liouvillian(self.hamiltonian(t), self.dims).mat

    def time_grid(self, t, quad_steps=None):
        span = t - self.t0
        if span < 0:
            raise ValueError(f"t={t} precedes t0={self.t0}")
        if quad_steps is None:
            quad_steps = max(2, int(math.ceil(span * self.steps_per_unit)))
        if quad_steps < 2:
            raise ValueError(f"quad_steps must be >= 2, got {quad_steps}")
        return np.linspace(self.t0, t, quad_steps + 1)

    def with_coupling(self, coupling):
        return TclProblem(self.bath, self.hamiltonian, coupling, self.t0,
                          self.steps_per_unit, self.name)


def _trapezoid_weights(n_nodes):
    w = np.ones(n_nodes)
    w[0] = w[-1] = 0.5
    return w


def sigma_exact(problem: TclProblem, t: float, quad_steps: Optional[int] = None,
                coupling: Optional[float] = None) -> SuperOperator:
    """``Sigma(t) = lam int G+(t,s) Q L(s) P U-(s,t) ds`` by the trapezoid rule.

    The time-ordered propagators are products of midpoint exponentials over
    the same grid, accumulated backwards from ``t``.
    """
    lam = problem.coupling if coupling is None else coupling
    dims = problem.dims
    if t == problem.t0 or lam == 0:
        return SuperOperator.zero(dims)
    grid = problem.time_grid(t, quad_steps)
    h = grid[1] - grid[0]
    weights = _trapezoid_weights(grid.size)
    p, q = problem.p, problem.q
    eye = np.eye(dims.vec, dtype=np.complex128)
    g_plus = eye.copy()
    u_minus = eye.copy()
    acc = weights[-1] * (q @ problem.liouvillian_at(grid[-1]) @ p)
    for j in range(grid.size - 2, -1, -1):
        l_mid = problem.liouvillian_at(0.5 * (grid[j] + grid[j + 1]))
        g_plus = g_plus @ scipy.linalg.expm(lam * h * (q @ l_mid))
        u_minus = scipy.linalg.expm(-lam * h * l_mid) @ u_minus
        acc += weights[j] * (g_plus @ q @ problem.liouvillian_at(grid[j]) @ p @ u_minus)
    return SuperOperator(dims, lam * h * acc)


def _sigma1(problem, t, quad_steps):
    grid = problem.time_grid(t, quad_steps)
    h = grid[1] - grid[0]
    weights = _trapezoid_weights(grid.size)
    integral = sum(w * problem.liouvillian_at(s) for w, s in zip(weights, grid))
    return SuperOperator(problem.dims, h * (problem.q @ integral @ problem.p))


def _sigma2(problem, t, quad_steps):
    grid = problem.time_grid(t, quad_steps)
    h = grid[1] - grid[0]
    p, q = problem.p, problem.q
    lvs = [problem.liouvillian_at(s) for s in grid]
    cumulative = [np.zeros_like(lvs[0])]
    for j in range(1, grid.size):
        cumulative.append(cumulative[-1] + 0.5 * h * (lvs[j - 1] + lvs[j]))
    weights = _trapezoid_weights(grid.size)
    acc = np.zeros_like(lvs[0])
    for w, lv, a in zip(weights, lvs, cumulative):
        acc += w * (q @ lv @ q @ a @ p - q @ a @ p @ lv)
    return SuperOperator(problem.dims, h * acc)


def sigma_m(m: int, t: float, problem: TclProblem, quad_steps: Optional[int] = None) -> SuperOperator:
    """Coefficient of ``lam**m`` in ``Sigma(t)``.

    ``m = 1, 2`` use the closed double-integral forms. Higher orders are
    read off a polynomial fit of :func:`sigma_exact` on a symmetric stencil
    of couplings.
    """
    if m < 1:
        raise InvalidOrder(f"sigma order must be >= 1, got {m}")
    if t == problem.t0:
        return SuperOperator.zero(problem.dims)
    if m == 1:
        return _sigma1(problem, t, quad_steps)
    if m == 2:
        return _sigma2(problem, t, quad_steps)
    half = max((TAYLOR_STENCIL_POINTS - 1) // 2, int(math.ceil(m / 2)))
    h = TAYLOR_STENCIL_SPACING
    lams = h * np.arange(-half, half + 1)
    samples = np.stack([
        sigma_exact(problem, t, quad_steps, coupling=lam).mat.ravel() for lam in lams
    ])
    vander = np.vander(lams, N=lams.size, increasing=True)
    coeffs = np.linalg.solve(vander, samples)
    n = problem.dims.vec
    return SuperOperator(problem.dims, coeffs[m].reshape(n, n))


class SigmaFamily:
    """Caches ``Sigma(t)`` and its perturbative pieces at one time."""

    def __init__(self, problem: TclProblem, max_order: int, quad_steps: Optional[int] = None):
        self.problem = problem
        self.max_order = max_order
        self.quad_steps = quad_steps
        self.log = log
        self._cache = {}

    def exact(self, t) -> SuperOperator:
        key = ("exact", t)
        if key not in self._cache:
            self._cache[key] = sigma_exact(self.problem, t, self.quad_steps)
        return self._cache[key]

    def perturbative(self, m, t) -> SuperOperator:
        if m > self.max_order:
            raise InvalidOrder(f"sigma order {m} exceeds configured {self.max_order}")
        key = ("m", m, t)
        if key not in self._cache:
            self._cache[key] = sigma_m(m, t, self.problem, self.quad_steps)
        return self._cache[key]

    def bindings(self, t):
        """Matrices for every ``Sm`` and ``Smdag`` symbol at ``t``."""
        values = {}
        for m in range(1, self.max_order + 1):
            mat = self.perturbative(m, t).mat
            values[NcSymbol.sigma(m)] = mat
            values[NcSymbol.sigma(m, dagger=True)] = mat.conj().T
        return values


class GeneratorMethod(str, enum.Enum):
    TCL = "tcl"
    TCLPLUS = "tclplus"
    NONPERTURBATIVE_INVERSE = "inverse"
    NONPERTURBATIVE_PINV = "pinv"


def check_breakdown(sigma: SuperOperator, t: float):
    """Raise :class:`SingularGenerator` when ``I - Sigma`` is numerically singular."""
    eye = np.eye(sigma.mat.shape[0], dtype=np.complex128)
    sign, logabs = np.linalg.slogdet(eye - sigma.mat)
    det = 0.0 if sign == 0 else float(np.exp(logabs))
    if sign == 0 or logabs < math.log(BREAKDOWN_DET_THRESHOLD):
        log.warning(f"TCL breakdown at t={t:.6g}: |det(I - Sigma)| = {det:.3e}")
        raise SingularGenerator(t, det)
    return det


def assemble_generator(method, order: int, t: float, problem: TclProblem,
                       series_depth: Optional[int] = None,
                       family: Optional[SigmaFamily] = None) -> SuperOperator:
    """Numeric TCL generator ``K(t)`` on the joint space."""
    method = GeneratorMethod(method)
    lam = problem.coupling
    dims = problem.dims
    p = problem.p
    lv = problem.liouvillian_at(t)
    if lam == 0:
        return SuperOperator.zero(dims)

    if method is GeneratorMethod.NONPERTURBATIVE_INVERSE:
        sigma = (family.exact(t) if family else sigma_exact(problem, t))
        check_breakdown(sigma, t)
        eye = np.eye(dims.vec, dtype=np.complex128)
        inv_p = np.linalg.solve(eye - sigma.mat, p)
        return SuperOperator(dims, lam * p @ lv @ inv_p)
    if method is GeneratorMethod.NONPERTURBATIVE_PINV:
        sigma = (family.exact(t) if family else sigma_exact(problem, t))
        eye = np.eye(dims.vec, dtype=np.complex128)
        return SuperOperator(dims, lam * p @ lv @ pinv_svd(eye - sigma.mat) @ sigma.mat @ p)

    if order < 2:
        raise InvalidOrder(f"perturbative generators need order >= 2, got {order}")
    if method is GeneratorMethod.TCL:
        tables = expand_neumann_terms(order)
    else:
        tables = expand_pinv_terms(order, series_depth)
    family = family or SigmaFamily(problem, order - 1)
    values = family.bindings(t)
    total = np.zeros((dims.vec, dims.vec), dtype=np.complex128)
    if method is GeneratorMethod.TCL:
        total += lam * (p @ lv @ p)
    for n, poly in tables.items():
        if poly.is_zero():
            continue
        total += lam ** n * (p @ lv @ poly.evaluate(values, dims.vec) @ p)
    return SuperOperator(dims, total)


def norm_crossing_time(problem: TclProblem, times, quad_steps: Optional[int] = None):
    """First time in ``times`` where the operator norm of ``Sigma`` reaches 1."""
    for t in times:
        nrm = sigma_exact(problem, t, quad_steps).norm()
        if nrm >= 1.0:
            log.info(f"||Sigma|| crosses 1 at t={t:.6g} (norm {nrm:.4f})")
            return float(t)
    return None
