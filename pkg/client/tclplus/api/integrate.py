"""Fixed-grid quadrature and Runge-Kutta helpers."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.integrate
import scipy.signal

from tclplus.exceptions import DivergenceDetected
from tclplus.logger import log


def cumint(f, h):
    """Running trapezoid integral ``int_0^{t_i} f`` on a uniform grid."""
    return scipy.integrate.cumulative_trapezoid(f, dx=h, initial=0)


def causal_conv(f, g, h):
    """``(f * g)(t_i) = int_0^{t_i} f(t_i - s) g(s) ds`` by the trapezoid rule."""
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape:
        raise ValueError(f"grids differ: {f.shape} vs {g.shape}")
    full = scipy.signal.convolve(f, g, mode="full", method="direct")[: f.size]
    return h * (full - 0.5 * f * g[0] - 0.5 * f[0] * g)


@dataclass
class Rk4Result:
    times: np.ndarray
    states: np.ndarray
    divergence_time: Optional[float] = None

    @property
    def diverged(self):
        return self.divergence_time is not None


def rk4(fn: Callable[[int, np.ndarray], np.ndarray], y0, t0, h, n_steps, strict=False):
    """Classic fourth order Runge-Kutta on a fixed grid.

    ``fn(k, y)`` is evaluated at half-step index ``k``, i.e. at time
    ``t0 + k * h / 2``, so tabulated coefficients can be looked up exactly.
    A non-finite state stops the integration; the result is truncated there
    unless ``strict`` asks for :class:`DivergenceDetected`.
    """
    y = np.asarray(y0, dtype=np.complex128)
    states = np.empty((n_steps + 1,) + y.shape, dtype=np.complex128)
    states[0] = y
    for j in range(n_steps):
        k1 = h * fn(2 * j, y)
        k2 = h * fn(2 * j + 1, y + k1 / 2)
        k3 = h * fn(2 * j + 1, y + k2 / 2)
        k4 = h * fn(2 * j + 2, y + k3)
        y = y + (k1 + 2 * k2 + 2 * k3 + k4) / 6
        if not np.all(np.isfinite(y)):
            t_fail = t0 + (j + 1) * h
            if strict:
                raise DivergenceDetected(t_fail)
            log.warning(f"Non-finite state at t={t_fail:.6g}, truncating trajectory")
            return Rk4Result(t0 + h * np.arange(j + 1), states[: j + 1], t_fail)
        states[j + 1] = y
    return Rk4Result(t0 + h * np.arange(n_steps + 1), states)
