"""Convergence of the Neumann and pseudoinverse series.

Errors are operator-norm distances between depth-``d`` partial sums and a
reference inverse. A depth constant ``tau`` fits ``err(d) ~ a exp(-d / tau)``;
negative ``tau`` means the series diverges.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.stats

from tclplus.api.linalg import (
    as_matrix,
    neumann_partial_sums,
    operator_norm,
    pinv_series_partial_sums,
    pinv_svd,
    svd,
)
from tclplus.constants import MIN_FIT_SAMPLES, NOISE_FLOOR_FACTOR, SWEEP_MIN_FIT_SAMPLES
from tclplus.exceptions import InsufficientSamples, SingularReference
from tclplus.logger import log


class SeriesKind(str, enum.Enum):
    NEUMANN = "neumann"
    PINV = "pinv"


@dataclass
class ConvergenceCurve:
    depths: np.ndarray
    errors: np.ndarray
    series_kind: SeriesKind
    norm_of_sigma: float
    reference_norm: float = 1.0

    def noise_floor(self):
        return NOISE_FLOOR_FACTOR * np.finfo(np.float64).eps * max(1.0, self.reference_norm)


@dataclass(frozen=True)
class DepthFit:
    tau: float
    amplitude: float
    r_squared: float
    series_kind: SeriesKind
    norm_of_sigma: float
    window: Tuple[int, int] = (0, 0)

    @property
    def diverges(self):
        return self.tau < 0

    @property
    def n_samples(self):
        return self.window[1] - self.window[0]


def random_matrix_with_norm(dim: int, target_norm: float, seed) -> np.ndarray:
    """Complex Ginibre matrix rescaled to operator norm ``target_norm``."""
    if target_norm <= 0:
        raise ValueError(f"target_norm must be positive, got {target_norm}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    return z * (target_norm / operator_norm(z))


def _is_singular(a):
    s = svd(a).singular_values
    return s[-1] <= max(a.shape) * np.finfo(np.float64).eps * s[0]


def reference_inverse(sigma, series_kind):
    """``[I - sigma]^-1`` for Neumann, ``[I - sigma]^+`` for the pinv series."""
    sigma = as_matrix(sigma, "sigma")
    a = np.eye(sigma.shape[0], dtype=np.complex128) - sigma
    if SeriesKind(series_kind) is SeriesKind.PINV:
        return pinv_svd(a)
    if _is_singular(a):
        raise SingularReference("I - sigma is singular; the Neumann limit does not exist")
    return np.linalg.inv(a)


def _partial_sums(sigma, series_kind, max_depth):
    eye = np.eye(sigma.shape[0], dtype=np.complex128)
    if SeriesKind(series_kind) is SeriesKind.NEUMANN:
        gen = neumann_partial_sums(sigma, max_depth)
    else:
        gen = pinv_series_partial_sums(eye - sigma, max_depth)
    with np.errstate(over="ignore", invalid="ignore"):
        return np.stack(list(gen))


def _batched_norms(stack):
    out = np.full(stack.shape[0], np.inf)
    finite = np.all(np.isfinite(stack), axis=(1, 2))
    if np.any(finite):
        out[finite] = np.linalg.norm(stack[finite], ord=2, axis=(1, 2))
    return out


def convergence_curve(sigma, series_kind, max_depth: int, reference: Optional[np.ndarray] = None) -> ConvergenceCurve:
    """Error of every partial sum up to ``max_depth`` against a reference."""
    sigma = as_matrix(sigma, "sigma")
    kind = SeriesKind(series_kind)
    if reference is None:
        reference = reference_inverse(sigma, kind)
    sums = _partial_sums(sigma, kind, max_depth)
    with np.errstate(over="ignore", invalid="ignore"):
        errors = _batched_norms(sums - reference[None, :, :])
    return ConvergenceCurve(
        np.arange(max_depth + 1), errors, kind, operator_norm(sigma), operator_norm(reference),
    )


def partial_sum_norm_curve(sigma, series_kind, max_depth: int) -> ConvergenceCurve:
    """Norms of the partial sums themselves, for when no reference exists."""
    sigma = as_matrix(sigma, "sigma")
    kind = SeriesKind(series_kind)
    return ConvergenceCurve(
        np.arange(max_depth + 1), _batched_norms(_partial_sums(sigma, kind, max_depth)),
        kind, operator_norm(sigma),
    )


def _largest_window(mask):
    best = (0, 0)
    start = None
    for i, ok in enumerate(np.append(mask, False)):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            if i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    return best


def fit_depth_constant(curve: ConvergenceCurve, min_samples: int = MIN_FIT_SAMPLES) -> DepthFit:
    """Least-squares line through ``(d, log err)``; ``tau = -1 / slope``.

    Samples that are non-finite or below the noise floor are excluded and the
    largest contiguous window that remains is fitted.
    """
    errors = np.asarray(curve.errors, dtype=float)
    depths = np.asarray(curve.depths, dtype=float)
    if np.all(errors == 0):
        return DepthFit(np.inf, 0.0, 1.0, curve.series_kind, curve.norm_of_sigma)

    floor = curve.noise_floor()
    valid = np.isfinite(errors) & (errors > floor)
    start, stop = _largest_window(valid)
    if stop - start < min_samples:
        if np.all(errors[np.isfinite(errors)] <= floor) and np.all(np.isfinite(errors)):
            return DepthFit(np.inf, 0.0, 1.0, curve.series_kind, curve.norm_of_sigma)
        raise InsufficientSamples(
            f"only {stop - start} usable samples for the {curve.series_kind.value} fit, need {min_samples}"
        )
    fit = scipy.stats.linregress(depths[start:stop], np.log(errors[start:stop]))
    tau = np.inf if fit.slope == 0 else -1.0 / fit.slope
    log.debug(
        f"{curve.series_kind.value} fit over depths [{start}, {stop}): tau={tau:.4g}, r2={fit.rvalue ** 2:.4f}"
    )
    return DepthFit(
        float(tau), float(np.exp(fit.intercept)), float(fit.rvalue ** 2),
        curve.series_kind, curve.norm_of_sigma, (int(start), int(stop)),
    )


@dataclass(frozen=True)
class SweepRow:
    norm: float
    tau_neumann_mean: float
    tau_pinv_mean: float
    tau_neumann_std: float
    tau_pinv_std: float
    tau_neumann_median: float
    tau_pinv_median: float
    neumann_diverging: int
    pinv_diverging: int
    trials: int

    header = (
        "norm", "tau_neumann_mean", "tau_pinv_mean", "tau_neumann_std",
        "tau_pinv_std", "tau_neumann_median", "tau_pinv_median",
        "neumann_diverging", "pinv_diverging", "trials",
    )

    def as_row(self):
        return [getattr(self, name) for name in self.header]


def _trial_tau(sigma, kind, max_depth, min_samples):
    try:
        curve = convergence_curve(sigma, kind, max_depth)
        return fit_depth_constant(curve, min_samples).tau
    except (InsufficientSamples, SingularReference) as e:
        log.debug(f"Skipping {kind.value} trial at norm {operator_norm(sigma):.3f}: {e}")
        return np.nan


def _stats(taus):
    taus = np.asarray(taus, dtype=float)
    finite = taus[np.isfinite(taus)]
    if finite.size == 0:
        return np.nan, np.nan, np.nan
    return float(finite.mean()), float(finite.std()), float(np.median(finite))


def _sweep_norm(norm_index, norm, dim, trials, seed, max_depth, min_samples):
    tau_i, tau_p = [], []
    for trial in range(trials):
        sigma = random_matrix_with_norm(dim, norm, [seed, norm_index, trial])
        tau_i.append(_trial_tau(sigma, SeriesKind.NEUMANN, max_depth, min_samples))
        tau_p.append(_trial_tau(sigma, SeriesKind.PINV, max_depth, min_samples))
    mean_i, std_i, median_i = _stats(tau_i)
    mean_p, std_p, median_p = _stats(tau_p)
    return SweepRow(
        float(norm), mean_i, mean_p, std_i, std_p, median_i, median_p,
        int(np.sum(np.asarray(tau_i) < 0)), int(np.sum(np.asarray(tau_p) < 0)), trials,
    )


def threshold_sweep(dim: int, norms: Sequence[float], trials: int, seed: int,
                    max_depth: int = 300, threads: int = 1,
                    min_samples: int = SWEEP_MIN_FIT_SAMPLES):
    """Mean depth constants of both series per norm.

    Trial ``k`` at norm index ``i`` draws from ``default_rng([seed, i, k])``,
    so the table does not depend on ``threads``.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    args = [(i, x, dim, trials, seed, max_depth, min_samples) for i, x in enumerate(norms)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda a: _sweep_norm(*a), args))
    else:
        rows = [_sweep_norm(*a) for a in args]
    for prev, row in zip(rows, rows[1:]):
        if prev.tau_pinv_mean > 0 > row.tau_pinv_mean:
            log.info(f"Pseudoinverse depth constant changes sign between {prev.norm:g} and {row.norm:g}")
        if prev.tau_neumann_mean > 0 > row.tau_neumann_mean:
            log.info(f"Neumann depth constant changes sign between {prev.norm:g} and {row.norm:g}")
    return rows


def sign_change_bracket(rows, attr):
    """First ``(norm_before, norm_after)`` where ``attr`` turns negative."""
    for prev, row in zip(rows, rows[1:]):
        if getattr(prev, attr) > 0 and getattr(row, attr) < 0:
            return prev.norm, row.norm
    return None
