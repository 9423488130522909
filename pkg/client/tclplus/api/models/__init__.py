from .base import ModelHandler, Trajectory
from .ising import IsingHandler, run_ising
from .jaynes_cummings import JcHandler, run_jc

__all__ = (
    "ModelHandler",
    "Trajectory",
    "IsingHandler",
    "JcHandler",
    "run_ising",
    "run_jc",
)
