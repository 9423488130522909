import numpy as np
import pytest
from pydantic import ValidationError

from tclplus.constants import SCHEMA_VERSION
from tclplus.settings import (
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


@pytest.mark.parametrize(
    ("label", "expected"),
    [("exact", ("exact", None)), ("tcl2", ("tcl", 2)), ("tclplus6", ("tclplus", 6)),
     ("brute_force", ("brute_force", None))],
)
def test_parse_method_label(label, expected):
    assert parse_method_label(label) == expected


@pytest.mark.parametrize("label", ["tcl", "exact2", "magnus4", "TCL2"])
def test_parse_method_label_rejects(label):
    with pytest.raises(ValueError):
        parse_method_label(label)


def test_jc_defaults_expand_into_runs():
    settings = JcSimulationSettings.model_validate(DEFAULT_JC_SETTINGS)
    runs = settings.runs()
    assert len(runs) == 12
    assert {r.label for r in runs} == {"exact", "tcl2", "tcl6", "tclplus6"}
    assert {r.bath_dim for r in runs} == {1, 3, 7}
    assert all(isinstance(r, JcSettings) for r in runs)
    assert runs[0].coupling == DEFAULT_JC_SETTINGS["lambda"]
    assert runs[0].n_steps == 5000


def test_coupling_alias():
    assert JcSettings(**{"lambda": 0.3}).coupling == 0.3
    assert JcSettings(coupling=0.3).coupling == 0.3
    dumped = JcSimulationSettings().model_dump(by_alias=True)
    assert "lambda" in dumped and "coupling" not in dumped


def test_unknown_fields_rejected():
    with pytest.raises(ValidationError):
        JcSimulationSettings.model_validate({"gamma": 1.0})


def test_schema_version_checked():
    assert SweepSettings(schema_version=SCHEMA_VERSION).schema_version == SCHEMA_VERSION
    with pytest.raises(ValidationError):
        SweepSettings(schema_version=SCHEMA_VERSION + 1)


@pytest.mark.parametrize(
    "patch",
    [
        {"methods": ["tcl5"]},
        {"methods": ["brute_force"]},
        {"methods": []},
        {"bath_dims": [0]},
        {"gamma0": -1.0},
        {"initial_excited": 1.5},
        {"exact_solver": "ode"},
    ],
)
def test_invalid_jc_configs(patch):
    with pytest.raises(ValidationError):
        JcSimulationSettings.model_validate({**DEFAULT_JC_SETTINGS, **patch})


def test_ising_defaults_fill_sites():
    settings = IsingSimulationSettings.model_validate(DEFAULT_ISING_SETTINGS)
    assert len(settings.couplings) == settings.n_bath == 4
    assert all(0.5 <= g <= 1.0 for g in settings.couplings)
    assert settings.omegas == [1.0] * 4
    again = IsingSimulationSettings.model_validate(DEFAULT_ISING_SETTINGS)
    assert again.couplings == settings.couplings
    other = IsingSimulationSettings.model_validate({**DEFAULT_ISING_SETTINGS, "coupling_seed": 8})
    assert other.couplings != settings.couplings
    runs = settings.runs()
    assert [r.label for r in runs] == ["exact", "tcl2", "tcl4", "tcl5", "tclplus5"]
    assert all(r.couplings == settings.couplings for r in runs)


def test_ising_explicit_sites():
    cfg = IsingSettings(n_bath=2, couplings=[0.1, 0.2], omegas=[1.0, 2.0])
    assert cfg.couplings == [0.1, 0.2]
    with pytest.raises(ValidationError):
        IsingSettings(n_bath=3, couplings=[0.1, 0.2])


@pytest.mark.parametrize(
    "patch",
    [{"methods": ["tcl6"]}, {"initial_bloch": [1.0, 1.0, 0.0]}, {"n_bath": 0}, {"beta": -1.0}],
)
def test_invalid_ising_configs(patch):
    with pytest.raises(ValidationError):
        IsingSimulationSettings.model_validate({**DEFAULT_ISING_SETTINGS, **patch})


def test_sweep_settings():
    settings = SweepSettings.model_validate(DEFAULT_SWEEP_SETTINGS)
    assert settings.norms[0] == 0.05 and settings.norms[-1] == 1.6
    assert len(settings.norms) == 32
    assert settings.seed is None
    with pytest.raises(ValidationError):
        SweepSettings(norms=[0.5, -0.1])


def test_single_matrix_settings():
    settings = SingleMatrixSettings.model_validate(DEFAULT_SINGLE_MATRIX_SETTINGS)
    np.testing.assert_array_equal(settings.matrix(), np.diag([1.0, 1.1, 0.7]))
    complex_cfg = SingleMatrixSettings(sigma=[[0.0]], sigma_imag=[[0.5]])
    assert complex_cfg.matrix()[0, 0] == 0.5j
    with pytest.raises(ValidationError):
        SingleMatrixSettings(sigma=[[1.0, 0.0]])
    with pytest.raises(ValidationError):
        SingleMatrixSettings(sigma=[[1.0]], sigma_imag=[[1.0, 2.0]])


def test_settings_are_frozen():
    cfg = JcSettings()
    with pytest.raises(ValidationError):
        cfg.gamma0 = 3.0
