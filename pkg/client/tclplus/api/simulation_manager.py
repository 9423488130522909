# -*- coding: utf-8 -*-
import os
from concurrent.futures import ThreadPoolExecutor

from tclplus.api.convergence import (
    SeriesKind,
    SweepRow,
    convergence_curve,
    fit_depth_constant,
    partial_sum_norm_curve,
    reference_inverse,
    threshold_sweep,
)
from tclplus.api.expansion import term_table
from tclplus.api.lib import RunManifest, write_csv, write_json
from tclplus.exceptions import InsufficientSamples, SingularReference
from tclplus.logger import log
from tclplus.settings import IsingSettings, JcSettings


class SimulationManager():
    """Runs experiments and writes their outputs plus a manifest.

    Model runs are delegated to the handler matching their settings type.
    """

    def __init__(self, out_dir, threads=1, seed=None):
        self.out_dir = out_dir
        self.threads = max(1, int(threads))
        self.seed = seed
        self.log = log

    def handler_for(self, run_settings):
        if isinstance(run_settings, JcSettings):
            from tclplus.api.models.jaynes_cummings import JcHandler
            return JcHandler(run_settings)
        if isinstance(run_settings, IsingSettings):
            from tclplus.api.models.ising import IsingHandler
            return IsingHandler(run_settings)
        raise TypeError(f"No model handler for {type(run_settings).__name__}")

    def _path(self, name):
        return os.path.join(self.out_dir, name)

    def _map(self, fn, items):
        if self.threads > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                return list(pool.map(fn, items))
        return [fn(item) for item in items]

    def expand(self, order, method, series_depth=None, out=None):
        manifest = RunManifest(
            "expand", {"order": order, "method": method, "series_depth": series_depth}, self.seed,
        )
        tables = term_table(method, order, series_depth)
        path = out or self._path(f"terms_{method}_order{order}.json")
        write_json(path, {
            "method": method,
            "max_order": order,
            "series_depth": series_depth,
            "orders": tables,
        })
        manifest.add_output(path)
        adjoint_count = sum(len(t["adjoint_terms"]) for t in tables)
        manifest.summary["adjoint_term_count"] = adjoint_count
        self.log.info(f"Expanded {method} terms through order {order} ({adjoint_count} adjoint terms)")
        manifest.write(os.path.dirname(os.path.abspath(path)))
        return manifest

    def simulate(self, model, settings):
        """One trajectory CSV per method (and bath dim for JC)."""
        manifest = RunManifest(
            f"simulate {model}", settings.model_dump(mode="json", by_alias=True), self.seed,
        )
        handlers = [self.handler_for(run) for run in settings.runs()]
        trajectories = self._map(lambda h: h.run(), handlers)
        for handler, traj in zip(handlers, trajectories):
            path = self._path(f"{handler.file_stem()}.csv")
            write_csv(path, traj.header(), traj.rows())
            manifest.add_output(path)
            if traj.truncated:
                manifest.flag_truncated(os.path.basename(path), traj.divergence_time)
        self.log.info(f"Wrote {len(trajectories)} {model} trajectories to {self.out_dir}")
        manifest.write(self.out_dir)
        return manifest

    def convergence_sweep(self, settings):
        seed = self.seed if self.seed is not None else (settings.seed or 0)
        config = settings.model_dump(mode="json")
        config["seed"] = seed
        manifest = RunManifest("convergence sweep", config, seed)
        manifest.summary["ensemble"] = "complex Ginibre, rescaled to the target operator norm"
        rows = threshold_sweep(
            settings.dim, settings.norms, settings.trials, seed,
            max_depth=settings.max_depth, threads=self.threads,
        )
        path = self._path("sweep.csv")
        write_csv(path, SweepRow.header, (r.as_row() for r in rows))
        manifest.add_output(path)
        manifest.write(self.out_dir)
        return manifest

    def convergence_single(self, settings):
        """Both series against one reference: the inverse when it exists."""
        manifest = RunManifest("convergence single", settings.model_dump(mode="json"), self.seed)
        sigma = settings.matrix()
        try:
            reference = reference_inverse(sigma, SeriesKind.NEUMANN)
            manifest.summary["reference"] = "inverse"
        except SingularReference:
            self.log.info("I - Sigma is singular; measuring both series against the pseudoinverse")
            reference = reference_inverse(sigma, SeriesKind.PINV)
            manifest.summary["reference"] = "pseudoinverse"

        curves = {
            kind: convergence_curve(sigma, kind, settings.max_depth, reference=reference)
            for kind in SeriesKind
        }
        neumann_sums = partial_sum_norm_curve(sigma, SeriesKind.NEUMANN, settings.max_depth)
        for kind, curve in curves.items():
            try:
                fit = fit_depth_constant(curve)
                manifest.summary[f"tau_{kind.value}"] = fit.tau
                manifest.summary[f"window_{kind.value}"] = list(fit.window)
            except InsufficientSamples as e:
                self.log.warning(f"No depth fit for {kind.value}: {e}")

        path = self._path("single.csv")
        rows = zip(
            curves[SeriesKind.NEUMANN].depths,
            curves[SeriesKind.NEUMANN].errors,
            curves[SeriesKind.PINV].errors,
            neumann_sums.errors,
        )
        write_csv(path, ["depth", "err_neumann", "err_pinv", "neumann_sum_norm"], rows)
        manifest.add_output(path)
        manifest.summary["final_err_pinv"] = float(curves[SeriesKind.PINV].errors[-1])
        manifest.summary["final_err_neumann"] = float(curves[SeriesKind.NEUMANN].errors[-1])
        manifest.write(self.out_dir)
        return manifest
