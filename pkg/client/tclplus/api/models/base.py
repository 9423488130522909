# -*- coding: utf-8 -*-
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from tclplus.logger import get_logger


@dataclass
class Trajectory:
    """Time grid plus observables of one method.

    Subclasses list their observable columns in ``columns`` and the
    per-run metadata columns in ``meta_columns``.
    """

    times: np.ndarray
    method: str
    order: Optional[int]
    divergence_time: Optional[float] = field(default=None, kw_only=True)

    columns = ()
    meta_columns = ("method", "order")

    @property
    def truncated(self):
        return self.divergence_time is not None

    def header(self):
        return ["time", *self.columns, *self.meta_columns]

    def meta_values(self):
        return [getattr(self, name) for name in self.meta_columns]

    def rows(self):
        raise NotImplementedError

    def __len__(self):
        return len(self.times)


class ModelHandler:
    """Runs one model configuration and produces a trajectory."""

    model_name = ""

    def __init__(self, settings):
        self.settings = settings
        self.log = get_logger(self.__class__.__name__)

    def run(self):
        raise NotImplementedError

    def time_grid(self):
        return self.settings.dt * np.arange(self.settings.n_steps + 1)

    def file_stem(self):
        """Unique stem for the trajectory file of this run."""
        return f"{self.model_name}_{self.settings.label}"
