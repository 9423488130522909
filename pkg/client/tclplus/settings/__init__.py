from .main import (
    DEFAULT_ISING_SETTINGS,
    DEFAULT_JC_SETTINGS,
    DEFAULT_SINGLE_MATRIX_SETTINGS,
    DEFAULT_SWEEP_SETTINGS,
    IsingSettings,
    IsingSimulationSettings,
    JcSettings,
    JcSimulationSettings,
    SingleMatrixSettings,
    SweepSettings,
    parse_method_label,
)

__all__ = (
    "DEFAULT_ISING_SETTINGS",
    "DEFAULT_JC_SETTINGS",
    "DEFAULT_SINGLE_MATRIX_SETTINGS",
    "DEFAULT_SWEEP_SETTINGS",
    "IsingSettings",
    "IsingSimulationSettings",
    "JcSettings",
    "JcSimulationSettings",
    "SingleMatrixSettings",
    "SweepSettings",
    "parse_method_label",
)
