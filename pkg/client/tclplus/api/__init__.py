from .simulation_manager import SimulationManager

__all__ = ("SimulationManager",)
