# -*- coding: utf-8 -*-
import re
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from tclplus.constants import SCHEMA_VERSION

# Run configurations for the tclplus command line driver

DEFAULT_JC_SETTINGS = {
    "schema_version": SCHEMA_VERSION,
    "gamma0": 10.0,
    "omega0": 1.0,
    "nu_b": 1.0,
    "lambda": 1.0,
    "n_modes": 400,
    "bandwidth_factor": 12.0,
    "t_max": 5.0,
    "dt": 1e-3,
    "exact_solver": "kernel",
    "initial_excited": 1.0,
    "methods": ["exact", "tcl2", "tcl6", "tclplus6"],
    "bath_dims": [1, 3, 7],
}

DEFAULT_ISING_SETTINGS = {
    "schema_version": SCHEMA_VERSION,
    "n_bath": 4,
    "beta": 1.0,
    "lambda": 0.25,
    "coupling_seed": 7,
    "coupling_range": [0.5, 1.0],
    "site_energy": 1.0,
    "t_max": 2.0,
    "dt": 0.01,
    "initial_bloch": [1.0, 0.0, 0.0],
    "methods": ["exact", "tcl2", "tcl4", "tcl5", "tclplus5"],
}

DEFAULT_SWEEP_SETTINGS = {
    "schema_version": SCHEMA_VERSION,
    "dim": 16,
    "norms": [round(0.05 * k, 2) for k in range(1, 33)],
    "trials": 50,
    "max_depth": 300,
}

DEFAULT_SINGLE_MATRIX_SETTINGS = {
    "schema_version": SCHEMA_VERSION,
    "sigma": [[1.0, 0.0, 0.0], [0.0, 1.1, 0.0], [0.0, 0.0, 0.7]],
    "max_depth": 5000,
}

_METHOD_RE = re.compile(r"^(exact|brute_force|tclplus|tcl)(\d*)$")


def parse_method_label(label):
    """Split ``"tclplus6"`` into ``("tclplus", 6)``; exact methods get ``None``."""
    match = _METHOD_RE.match(label)
    if not match:
        raise ValueError(f"unknown method label {label!r}")
    kind, order = match.group(1), match.group(2)
    if kind in ("exact", "brute_force"):
        if order:
            raise ValueError(f"method {kind!r} takes no order")
        return kind, None
    if not order:
        raise ValueError(f"method {kind!r} needs an order, e.g. {kind}2")
    return kind, int(order)


class TclSettingsModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True, frozen=True)


class VersionedSettings(TclSettingsModel):
    schema_version: int = Field(
        SCHEMA_VERSION,
        title="Schema Version",
        description="Config format version; must match the installed tool",
    )

    @field_validator("schema_version")
    @classmethod
    def _known_version(cls, value):
        if value != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {value}, expected {SCHEMA_VERSION}")
        return value


class JcModelSettings(TclSettingsModel):
    """Physical parameters of the qubit-in-cavity model."""
    gamma0: float = Field(
        DEFAULT_JC_SETTINGS["gamma0"], gt=0,
        title="Gamma0",
        description="Lorentzian spectral density strength",
    )
    omega0: float = Field(
        DEFAULT_JC_SETTINGS["omega0"],
        title="Omega0",
        description="Qubit frequency, also the centre of the spectral density",
    )
    nu_b: float = Field(
        DEFAULT_JC_SETTINGS["nu_b"], gt=0,
        title="Lorentzian Width",
        description="Spectral width; inverse bath memory time",
    )
    coupling: float = Field(
        DEFAULT_JC_SETTINGS["lambda"], ge=0, alias="lambda",
        title="Coupling",
        description="Perturbative coupling strength",
    )
    n_modes: int = Field(
        DEFAULT_JC_SETTINGS["n_modes"], ge=1,
        title="Bath Modes",
        description="Number of discrete modes for the modes solver",
    )
    bandwidth_factor: float = Field(
        DEFAULT_JC_SETTINGS["bandwidth_factor"], gt=0,
        title="Bandwidth Factor",
        description="Discrete modes cover omega0 +- bandwidth_factor * nu_b",
    )
    t_max: float = Field(DEFAULT_JC_SETTINGS["t_max"], gt=0, title="End Time")
    dt: float = Field(DEFAULT_JC_SETTINGS["dt"], gt=0, title="Time Step")
    exact_solver: Literal["kernel", "modes"] = Field(
        DEFAULT_JC_SETTINGS["exact_solver"],
        title="Exact Solver",
        description="kernel: Lorentzian memory ODE; modes: discretized bath",
    )
    initial_excited: float = Field(
        DEFAULT_JC_SETTINGS["initial_excited"], ge=0, le=1,
        title="Initial Excited Population",
        description="|c1(0)|^2 of the initial pure qubit state",
    )

    @property
    def n_steps(self):
        return int(round(self.t_max / self.dt))


class JcSettings(JcModelSettings):
    """One JC run: a method, an order and the adjoint-term bath dimension."""
    order: Literal[2, 4, 6] = Field(6, title="Order")
    method: Literal["tcl", "tclplus", "exact"] = Field("exact", title="Method")
    bath_dim: int = Field(
        1, ge=1,
        title="Bath Dimension",
        description="Fock truncation of the bath mode entering the traces of the adjoint terms",
    )

    @property
    def label(self):
        return "exact" if self.method == "exact" else f"{self.method}{self.order}"


class JcSimulationSettings(VersionedSettings, JcModelSettings):
    methods: List[str] = Field(
        default_factory=lambda: list(DEFAULT_JC_SETTINGS["methods"]),
        min_length=1,
        title="Methods",
        description="exact, tcl2/4/6 or tclplus2/4/6",
    )
    bath_dims: List[int] = Field(
        default_factory=lambda: list(DEFAULT_JC_SETTINGS["bath_dims"]),
        min_length=1,
        title="Bath Dimensions",
    )

    @field_validator("methods")
    @classmethod
    def _valid_methods(cls, value):
        for label in value:
            kind, order = parse_method_label(label)
            if kind == "brute_force":
                raise ValueError("brute_force is only available for the ising model")
            if order is not None and order not in (2, 4, 6):
                raise ValueError(f"JC orders are 2, 4 or 6, got {label!r}")
        return value

    @field_validator("bath_dims")
    @classmethod
    def _positive_dims(cls, value):
        if any(d < 1 for d in value):
            raise ValueError("bath dimensions must be >= 1")
        return value

    def runs(self):
        """Expand into one :class:`JcSettings` per (method, bath dim)."""
        base = self.model_dump(exclude={"schema_version", "methods", "bath_dims"})
        out = []
        for label in self.methods:
            kind, order = parse_method_label(label)
            for dim in self.bath_dims:
                out.append(JcSettings(**base, method=kind, order=order or 6, bath_dim=dim))
        return out


class IsingModelSettings(TclSettingsModel):
    """Qubit dephasing by N bath spins."""
    n_bath: int = Field(DEFAULT_ISING_SETTINGS["n_bath"], ge=1, title="Bath Spins")
    couplings: Optional[List[float]] = Field(
        None,
        title="Couplings",
        description="g_n per site; drawn from coupling_range with coupling_seed when omitted",
    )
    omegas: Optional[List[float]] = Field(
        None,
        title="Site Energies",
        description="Omega_n per site; site_energy for every site when omitted",
    )
    coupling_seed: int = Field(DEFAULT_ISING_SETTINGS["coupling_seed"], title="Coupling Seed")
    coupling_range: Tuple[float, float] = Field(
        tuple(DEFAULT_ISING_SETTINGS["coupling_range"]), title="Coupling Range",
    )
    site_energy: float = Field(DEFAULT_ISING_SETTINGS["site_energy"], title="Site Energy")
    beta: float = Field(DEFAULT_ISING_SETTINGS["beta"], ge=0, title="Inverse Temperature")
    coupling: float = Field(
        DEFAULT_ISING_SETTINGS["lambda"], ge=0, alias="lambda", title="Coupling",
    )
    t_max: float = Field(DEFAULT_ISING_SETTINGS["t_max"], gt=0, title="End Time")
    dt: float = Field(DEFAULT_ISING_SETTINGS["dt"], gt=0, title="Time Step")
    initial_bloch: Tuple[float, float, float] = Field(
        tuple(DEFAULT_ISING_SETTINGS["initial_bloch"]), title="Initial Bloch Vector",
    )

    @model_validator(mode="before")
    @classmethod
    def _fill_sites(cls, data):
        if not isinstance(data, dict):
            return data
        data = dict(data)
        n = data.get("n_bath", DEFAULT_ISING_SETTINGS["n_bath"])
        if data.get("couplings") is None and isinstance(n, int) and n >= 1:
            lo, hi = data.get("coupling_range", DEFAULT_ISING_SETTINGS["coupling_range"])
            rng = np.random.default_rng(data.get("coupling_seed", DEFAULT_ISING_SETTINGS["coupling_seed"]))
            data["couplings"] = rng.uniform(lo, hi, size=n).tolist()
        if data.get("omegas") is None and isinstance(n, int) and n >= 1:
            data["omegas"] = [data.get("site_energy", DEFAULT_ISING_SETTINGS["site_energy"])] * n
        return data

    @model_validator(mode="after")
    def _check_sites(self):
        if len(self.couplings) != self.n_bath or len(self.omegas) != self.n_bath:
            raise ValueError(
                f"couplings ({len(self.couplings)}) and omegas ({len(self.omegas)}) "
                f"must both have n_bath={self.n_bath} entries"
            )
        if float(np.linalg.norm(self.initial_bloch)) > 1 + 1e-12:
            raise ValueError("initial_bloch must lie inside the Bloch ball")
        return self

    @property
    def n_steps(self):
        return int(round(self.t_max / self.dt))


class IsingSettings(IsingModelSettings):
    order: Literal[2, 4, 5] = Field(5, title="Order")
    method: Literal["tcl", "tclplus", "exact", "brute_force"] = Field("exact", title="Method")

    @property
    def label(self):
        if self.method in ("exact", "brute_force"):
            return self.method
        return f"{self.method}{self.order}"


class IsingSimulationSettings(VersionedSettings, IsingModelSettings):
    methods: List[str] = Field(
        default_factory=lambda: list(DEFAULT_ISING_SETTINGS["methods"]),
        min_length=1,
        title="Methods",
        description="exact, brute_force, tcl2/4/5 or tclplus2/4/5",
    )

    @field_validator("methods")
    @classmethod
    def _valid_methods(cls, value):
        for label in value:
            _, order = parse_method_label(label)
            if order is not None and order not in (2, 4, 5):
                raise ValueError(f"Ising orders are 2, 4 or 5, got {label!r}")
        return value

    def runs(self):
        base = self.model_dump(exclude={"schema_version", "methods"})
        out = []
        for label in self.methods:
            kind, order = parse_method_label(label)
            out.append(IsingSettings(**base, method=kind, order=order or 5))
        return out


class SweepSettings(VersionedSettings):
    """Depth-constant sweep over random matrices."""
    dim: int = Field(DEFAULT_SWEEP_SETTINGS["dim"], ge=1, title="Matrix Dimension")
    norms: List[float] = Field(
        default_factory=lambda: list(DEFAULT_SWEEP_SETTINGS["norms"]),
        min_length=1,
        title="Norms",
        description="Operator norms of Sigma to sample",
    )
    trials: int = Field(DEFAULT_SWEEP_SETTINGS["trials"], ge=1, title="Trials")
    max_depth: int = Field(DEFAULT_SWEEP_SETTINGS["max_depth"], ge=1, title="Max Depth")
    seed: Optional[int] = Field(None, title="Seed", description="Overridden by --seed")

    @field_validator("norms")
    @classmethod
    def _positive_norms(cls, value):
        if any(x <= 0 for x in value):
            raise ValueError("norms must be positive")
        return value


class SingleMatrixSettings(VersionedSettings):
    """Error curves of both series for one explicit Sigma."""
    sigma: List[List[float]] = Field(
        default_factory=lambda: [list(r) for r in DEFAULT_SINGLE_MATRIX_SETTINGS["sigma"]],
        title="Sigma (real part)",
    )
    sigma_imag: Optional[List[List[float]]] = Field(None, title="Sigma (imaginary part)")
    max_depth: int = Field(DEFAULT_SINGLE_MATRIX_SETTINGS["max_depth"], ge=1, title="Max Depth")

    @model_validator(mode="after")
    def _square(self):
        n = len(self.sigma)
        if n == 0 or any(len(r) != n for r in self.sigma):
            raise ValueError("sigma must be a non-empty square matrix")
        if self.sigma_imag is not None and (
            len(self.sigma_imag) != n or any(len(r) != n for r in self.sigma_imag)
        ):
            raise ValueError("sigma_imag must have the shape of sigma")
        return self

    def matrix(self):
        mat = np.asarray(self.sigma, dtype=np.complex128)
        if self.sigma_imag is not None:
            mat = mat + 1j * np.asarray(self.sigma_imag)
        return mat
