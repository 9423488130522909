import numpy as np
import pytest
import scipy.linalg

from tclplus.api.models.ising import (
    BlochTrajectory,
    IsingHandler,
    adjoint_term_superop_value,
    bath_moments,
    binomial_commutator,
    brute_force_dephasing,
    coherence_factor,
    density_from_bloch,
    exact_dephasing,
    ising_hamiltonian,
    ising_problem,
    moments_brute_force,
    nested_commutator,
    odd_even_residuals,
    run_ising,
    tcl_fg,
    tclplus_extra_term5,
)
from tclplus.api.superop import SpaceDims, partial_trace_bath, plp_relations_check
from tclplus.exceptions import CapacityError, InvalidOrder
from tclplus.settings import IsingSettings

from .conftest import random_complex, random_hermitian


def ising(**kwargs):
    return IsingSettings(**kwargs)


def max_deviation(a, b):
    return float(np.max(np.abs(a.coherence - b.coherence)))


def test_infinite_temperature_moments():
    m = bath_moments(ising(n_bath=3, beta=0.0))
    assert m.theta == 0.0
    assert m.tr_b == 0.0
    assert m.moment(1) == 0.0
    assert m.moment(3) == 0.0
    assert m.moment(5) == 0.0
    cfg = ising(n_bath=3, beta=0.0)
    assert m.moment(2) == pytest.approx(sum(g ** 2 for g in cfg.couplings))


def test_single_site_trace():
    cfg = ising(n_bath=1, couplings=[1.0], beta=1.0)
    assert bath_moments(cfg).tr_b == pytest.approx(-2 * np.tanh(-0.5))


@pytest.mark.parametrize("n_bath", [1, 2, 3, 4])
@pytest.mark.parametrize("beta", [0.3, 1.0, 4.0])
def test_factorized_moments_match_enumeration(n_bath, beta):
    cfg = ising(n_bath=n_bath, beta=beta, coupling_seed=n_bath)
    fast, slow = bath_moments(cfg), moments_brute_force(cfg)
    np.testing.assert_allclose(fast.q, slow.q, rtol=1e-10, atol=1e-12)
    for name in ("theta", "tr_b", "tr_b2_rho2", "tr_brho_sq"):
        assert getattr(fast, name) == pytest.approx(getattr(slow, name), rel=1e-10, abs=1e-12)


def test_squared_trace_forms_coincide():
    m = moments_brute_force(ising(n_bath=4))
    assert m.tr_b2_rho2 == pytest.approx(m.tr_brho_sq, rel=1e-12)


@pytest.mark.parametrize("n_bath", range(1, 7))
def test_exact_matches_enumeration_and_dense_evolution(n_bath):
    cfg = ising(n_bath=n_bath, coupling=0.7, initial_bloch=(0.6, -0.3, 0.5))
    times = np.array([0.0, 0.4, 1.3, 2.0])
    exact = exact_dephasing(cfg, times)
    brute = brute_force_dephasing(cfg, times)
    assert max_deviation(exact, brute) < 1e-10

    h, rho_b = ising_hamiltonian(cfg)
    dims = SpaceDims(2, rho_b.shape[0])
    rho0 = np.kron(density_from_bloch(cfg.initial_bloch), rho_b)
    for i, t in enumerate(times):
        u = scipy.linalg.expm(-1j * cfg.coupling * t * h)
        rho_s = partial_trace_bath(u @ rho0 @ u.conj().T, dims)
        assert abs(2 * rho_s[1, 0] - exact.coherence[i]) < 1e-10
        assert 2 * rho_s[0, 0].real - 1 == pytest.approx(exact.vz[i], abs=1e-10)


def test_exact_limits():
    times = np.linspace(0, 2, 21)
    frozen = exact_dephasing(ising(coupling=0.0), times)
    np.testing.assert_allclose(frozen.coherence, 1.0)
    cold = coherence_factor(ising(beta=50.0), times)
    np.testing.assert_allclose(np.abs(cold), 1.0, atol=1e-12)
    traj = exact_dephasing(ising(initial_bloch=(0.5, 0.5, 0.5)), times)
    np.testing.assert_allclose(traj.vz, 0.5)
    assert np.all(traj.vx ** 2 + traj.vy ** 2 + traj.vz ** 2 <= 1 + 1e-12)


def test_tcl_fg_initial_values_and_order_check():
    cfg = ising()
    m = bath_moments(cfg)
    f, g = tcl_fg(5, 0.0, m, cfg)
    assert f == 1.0 and g == 0.0
    with pytest.raises(InvalidOrder):
        tcl_fg(3, 1.0, m, cfg)


def test_no_phase_at_infinite_temperature():
    cfg = ising(beta=0.0)
    m = bath_moments(cfg)
    times = np.linspace(0, 2, 11)
    for order in (2, 4, 5):
        _, g = tcl_fg(order, times, m, cfg)
        np.testing.assert_allclose(g, 0.0, atol=1e-15)
    np.testing.assert_allclose(tclplus_extra_term5(m, times, cfg), 0.0, atol=1e-15)


def test_cumulant_series_matches_exact_log():
    cfg = ising(coupling=1.0)
    m = bath_moments(cfg)

    def residual(t):
        f, g = tcl_fg(5, t, m, cfg)
        return abs(np.log(coherence_factor(cfg, [t])[0]) - (np.log(f) - 1j * g))

    # sixth order remainder
    assert residual(0.05) / residual(0.025) > 40


def test_lower_orders_are_less_accurate_at_short_times():
    cfg = ising(coupling=1.0)
    m = bath_moments(cfg)
    t = 0.05
    exact = np.log(coherence_factor(cfg, [t])[0])
    errs = []
    for order in (2, 4, 5):
        f, g = tcl_fg(order, t, m, cfg)
        errs.append(abs(exact - (np.log(f) - 1j * g)))
    assert errs[0] > errs[1] > errs[2]


def test_trace_of_b_carries_bath_dimension():
    small = bath_moments(ising(n_bath=3, couplings=[0.8] * 3, omegas=[1.0] * 3))
    large = bath_moments(ising(n_bath=6, couplings=[0.8] * 6, omegas=[1.0] * 6))
    assert large.tr_b / small.tr_b == pytest.approx(2 ** 3 * 2)
    products = [
        abs(bath_moments(ising(n_bath=n, couplings=[0.8] * n, omegas=[1.0] * n)).trace_product)
        for n in (2, 4, 8)
    ]
    assert products[0] < products[1] < products[2]


@pytest.mark.parametrize("n_bath", [1, 2, 3, 4])
def test_adjoint_word_closed_form(n_bath):
    cfg = ising(n_bath=n_bath, beta=1.0, initial_bloch=(0.6, 0.2, -0.3))
    value, closed = adjoint_term_superop_value(cfg)
    np.testing.assert_allclose(value, closed, rtol=1e-8, atol=1e-12)


def test_adjoint_word_against_dense_superoperators():
    from tclplus.api.superop import liouvillian, projector_p, projector_p_adjoint, vectorize, devectorize

    cfg = ising(n_bath=2)
    h, rho_b = ising_hamiltonian(cfg)
    problem = ising_problem(cfg)
    p = projector_p(problem.bath).mat
    p_dag = projector_p_adjoint(problem.bath).mat
    lv = liouvillian(h, problem.dims).mat
    word = 2 * p @ lv @ p_dag @ lv @ lv @ p @ lv @ lv @ p
    rho_s = density_from_bloch(cfg.initial_bloch)
    dense = partial_trace_bath(devectorize(word @ vectorize(np.kron(rho_s, rho_b))), problem.dims)
    value, _ = adjoint_term_superop_value(cfg)
    np.testing.assert_allclose(value, dense, atol=1e-10)


def test_odd_even_structure():
    cfg = ising(n_bath=3)
    m = bath_moments(cfg)
    out = odd_even_residuals(cfg)
    for residual, coeff in out.values():
        assert residual <= 1e-10 * max(1.0, abs(coeff))
    assert out[2][1] == pytest.approx(2 * m.moment(2), rel=1e-10)
    assert out[3][1] == pytest.approx(4j * m.moment(3), rel=1e-10)


def test_commutator_forms_agree(rng):
    h = random_hermitian(rng, 4, scale=0.3)
    x = random_complex(rng, (4, 4))
    for n in range(7):
        np.testing.assert_allclose(nested_commutator(h, x, n), binomial_commutator(h, x, n), atol=1e-9)


def test_projector_relations():
    problem = ising_problem(ising(n_bath=2, beta=1.0))
    report = plp_relations_check(problem.hamiltonian(0.0), problem.bath)
    assert report.plp < 1e-10
    assert report.pdag_ldag_pdag < 1e-10
    assert report.pdag_l_p > 1e-3

    pure = ising_problem(ising(n_bath=2, beta=50.0))
    assert plp_relations_check(pure.hamiltonian(0.0), pure.bath).pdag_l_p < 1e-10


def test_capacity_limits():
    with pytest.raises(CapacityError):
        run_ising(ising(n_bath=13, method="brute_force"))
    with pytest.raises(CapacityError):
        ising_problem(ising(n_bath=6))


def test_handler_output():
    cfg = ising(method="tclplus", order=5, t_max=0.1)
    handler = IsingHandler(cfg)
    assert handler.file_stem() == "ising_tclplus5_N4_beta1"
    traj = handler.run()
    assert isinstance(traj, BlochTrajectory)
    assert traj.header() == ["time", "vx", "vy", "vz", "method", "order", "n_bath", "beta"]
    rows = list(traj.rows())
    assert len(rows) == 11
    assert rows[0][1:4] == [1.0, 0.0, 0.0]


def test_tclplus_only_changes_the_phase():
    tcl5 = run_ising(ising(method="tcl", order=5))
    plus5 = run_ising(ising(method="tclplus", order=5))
    np.testing.assert_allclose(np.abs(plus5.coherence), np.abs(tcl5.coherence), rtol=1e-12)
    tcl4 = run_ising(ising(method="tcl", order=4))
    plus4 = run_ising(ising(method="tclplus", order=4))
    np.testing.assert_array_equal(plus4.coherence, tcl4.coherence)


def test_adjoint_term_suppressed_at_low_temperature():
    times = np.array([2.0])
    warm = ising(beta=1.0)
    cold = ising(beta=10.0)
    dg_warm = tclplus_extra_term5(bath_moments(warm), times, warm)[0]
    dg_cold = tclplus_extra_term5(bath_moments(cold), times, cold)[0]
    assert abs(dg_cold) < 1e-3 * abs(dg_warm)


def test_tcl2_error_scales_as_fourth_power():
    errors = []
    for lam in (0.1, 0.05, 0.025, 0.0125):
        exact = run_ising(ising(coupling=lam))
        tcl2 = run_ising(ising(coupling=lam, method="tcl", order=2))
        errors.append(np.max(np.abs(tcl2.vx - exact.vx)))
    slopes = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(slopes >= 3.5)


@pytest.mark.parametrize("n_bath", [4, 15])
def test_adjoint_term_degrades_at_unit_beta(n_bath):
    exact = run_ising(ising(n_bath=n_bath))
    tcl5 = run_ising(ising(n_bath=n_bath, method="tcl", order=5))
    plus5 = run_ising(ising(n_bath=n_bath, method="tclplus", order=5))
    assert max_deviation(plus5, exact) > max_deviation(tcl5, exact)


@pytest.mark.parametrize("beta", [1.0, 10.0])
@pytest.mark.parametrize("n_bath", [4, 15])
def test_tclplus5_never_more_accurate_than_tcl5(n_bath, beta):
    exact = run_ising(ising(n_bath=n_bath, beta=beta))
    tcl5 = run_ising(ising(n_bath=n_bath, beta=beta, method="tcl", order=5))
    plus5 = run_ising(ising(n_bath=n_bath, beta=beta, method="tclplus", order=5))
    assert max_deviation(plus5, exact) >= max_deviation(tcl5, exact)


@pytest.mark.parametrize("beta", [1.0, 10.0])
def test_adjoint_term_degradation_grows_with_bath_size(beta):
    devs = []
    for n_bath in (4, 15):
        exact = run_ising(ising(n_bath=n_bath, beta=beta))
        plus5 = run_ising(ising(n_bath=n_bath, beta=beta, method="tclplus", order=5))
        devs.append(max_deviation(plus5, exact))
    assert devs[1] > devs[0]
