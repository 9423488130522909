import numpy as np
import pytest

from tclplus.api.expansion import (
    MAX_TERM_ORDER,
    drop_vanishing,
    expand_neumann_terms,
    expand_pinv_terms,
    expand_terms,
    generator_words,
    lift_to_operators,
    term_table,
)
from tclplus.api.linalg import pinv_svd
from tclplus.api.ncpoly import L, P, NcPolynomial, NcSymbol, SymbolKind, sigma_sum
from tclplus.exceptions import InvalidOrder

from .conftest import random_complex


def words(poly):
    return {tuple(s.label for s in w): c for w, c in poly.as_dict().items()}


def test_symbol_labels_round_trip():
    for label in ("S1", "S12dag", "P", "Pdag", "L", "Ldag"):
        assert NcSymbol.from_label(label).label == label
    assert NcSymbol.from_label("S3").dagger() == NcSymbol.sigma(3, dagger=True)
    with pytest.raises(ValueError):
        NcSymbol.from_label("Q")
    with pytest.raises(InvalidOrder):
        NcSymbol(SymbolKind.SIGMA, 0)


def test_polynomial_merges_and_drops_zeros():
    s1 = NcPolynomial.symbol(NcSymbol.sigma(1))
    assert (s1 - s1).is_zero()
    assert words(s1 + s1) == {("S1",): 2}
    assert words(3 * s1) == {("S1",): 3}
    assert NcPolynomial.from_labels([(1, ["S1", "S2"]), (-1, ["S1", "S2"])]).is_zero()


def test_polynomial_adjoint_reverses():
    poly = NcPolynomial.from_labels([(2, ["S1", "S2dag", "L"])])
    assert words(poly.adjoint()) == {("Ldag", "S2", "S1dag"): 2}
    assert poly.adjoint().adjoint() == poly


def test_multiply_grade_cap():
    s = sigma_sum(3)
    assert all(len(w) >= 1 for w in s.as_dict())
    capped = s.multiply(s, max_grade=3)
    assert words(capped) == {("S1", "S1"): 1, ("S1", "S2"): 1, ("S2", "S1"): 1}


def test_neumann_low_orders():
    tables = expand_neumann_terms(4)
    assert tables[1].is_zero()
    assert words(tables[2]) == {("S1",): 1}
    assert words(tables[3]) == {("S1", "S1"): 1, ("S2",): 1}
    assert words(tables[4]) == {
        ("S1", "S1", "S1"): 1,
        ("S1", "S2"): 1,
        ("S2", "S1"): 1,
        ("S3",): 1,
    }


@pytest.mark.parametrize("order", range(1, 9))
def test_grading(order):
    for method in ("tcl", "tclplus"):
        poly = expand_terms(method, order)[order]
        assert all(m.grade == order - 1 for m in poly.terms)


def test_untruncated_pinv_equals_neumann():
    neumann = expand_neumann_terms(6)
    pinv = expand_pinv_terms(6)
    for order in range(1, 7):
        assert pinv[order].dagger_part().is_zero()
        assert pinv[order].plain_part() == neumann[order]


def test_truncated_pinv_exposes_adjoint_terms():
    tables = expand_pinv_terms(3, series_depth=0)
    assert words(tables[2]) == {("S1",): 1}
    assert words(tables[3].dagger_part()) == {("S1dag", "S1"): -1}
    with pytest.raises(ValueError):
        expand_pinv_terms(3, series_depth=-1)


def _power_series_resolvent(s, degree):
    """Coefficients of ``S / (1 - S)`` for a scalar series ``S`` with ``S[0] = 0``."""
    total = np.zeros(degree + 1, dtype=complex)
    power = np.zeros(degree + 1, dtype=complex)
    power[0] = 1.0
    for _ in range(degree):
        power = np.convolve(power, s)[: degree + 1]
        total += power
    return total


def test_scalar_generating_function(rng):
    top = 7
    s = np.concatenate([[0.0], rng.uniform(-1, 1, top)])
    expected = _power_series_resolvent(s, top)
    values = {}
    for m in range(1, top + 1):
        values[NcSymbol.sigma(m)] = s[m]
        values[NcSymbol.sigma(m, dagger=True)] = s[m]
    for method in ("tcl", "tclplus"):
        tables = expand_terms(method, top + 1)
        for order in range(2, top + 2):
            got = tables[order].evaluate(values, 0)
            assert got == pytest.approx(expected[order - 1], rel=1e-12, abs=1e-14)


def _mat_poly_mul(a, b, degree):
    out = [np.zeros_like(a[0]) for _ in range(degree + 1)]
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j <= degree:
                out[i + j] = out[i + j] + x @ y
    return out


@pytest.mark.parametrize("depth", [0, 1, 2])
def test_truncated_pinv_matches_matrix_series(rng, depth):
    dim, top = 3, 3
    mats = [np.zeros((dim, dim), dtype=complex)] + [0.3 * random_complex(rng, (dim, dim)) for _ in range(top)]
    mats_dag = [m.conj().T for m in mats]
    s_dag_s = _mat_poly_mul(mats_dag, mats, top)
    x = [a + b - c for a, b, c in zip(mats_dag, mats, s_dag_s)]
    y = [a - c for a, c in zip(mats, s_dag_s)]
    total = [np.zeros((dim, dim), dtype=complex) for _ in range(top + 1)]
    power = [np.eye(dim, dtype=complex)] + [np.zeros((dim, dim), dtype=complex) for _ in range(top)]
    for _ in range(depth + 1):
        total = [t + v for t, v in zip(total, _mat_poly_mul(power, y, top))]
        power = _mat_poly_mul(power, x, top)
    values = {}
    for m in range(1, top + 1):
        values[NcSymbol.sigma(m)] = mats[m]
        values[NcSymbol.sigma(m, dagger=True)] = mats_dag[m]
    tables = expand_pinv_terms(top + 1, series_depth=depth)
    for order in range(2, top + 2):
        np.testing.assert_allclose(tables[order].evaluate(values, dim), total[order - 1], atol=1e-12)


def test_order_four_matches_numeric_pseudoinverse(rng):
    dim = 3
    mats = [0.1 * random_complex(rng, (dim, dim)) for _ in range(3)]
    h = 0.05
    ks = np.arange(-4, 5)
    samples = []
    for k in ks:
        lam = h * k
        sigma = sum(lam ** (m + 1) * mats[m] for m in range(3))
        samples.append((pinv_svd(np.eye(dim) - sigma) @ sigma).ravel())
    coeffs = np.linalg.solve(np.vander(ks.astype(float), increasing=True), np.array(samples))
    numeric = coeffs[3].reshape(dim, dim) / h ** 3
    values = {}
    for m in range(3):
        values[NcSymbol.sigma(m + 1)] = mats[m]
        values[NcSymbol.sigma(m + 1, dagger=True)] = mats[m].conj().T
    symbolic = expand_pinv_terms(4)[4].evaluate(values, dim)
    np.testing.assert_allclose(symbolic, numeric, atol=1e-6)


def test_term_table_json_shape():
    table = term_table("tcl", 4)
    assert [entry["order"] for entry in table] == [1, 2, 3, 4]
    assert table[0]["terms"] == []
    factors = sorted(tuple(t["factors"]) for t in table[3]["terms"])
    assert factors == sorted([("S1", "S1", "S1"), ("S1", "S2"), ("S2", "S1"), ("S3",)])
    assert all(t["coeff"] == 1 for t in table[3]["terms"])
    assert all(entry["adjoint_terms"] == [] for entry in term_table("tclplus", 5))


def test_term_table_order_limits():
    with pytest.raises(InvalidOrder):
        term_table("tcl", MAX_TERM_ORDER + 1)
    with pytest.raises(InvalidOrder):
        expand_neumann_terms(0)
    with pytest.raises(ValueError):
        expand_terms("magnus", 3)


def test_lift_to_operators():
    s1 = NcPolynomial.symbol(NcSymbol.sigma(1))
    assert words(generator_words(s1)) == {("P", "L", "L", "P", "P"): 1}
    assert words(drop_vanishing(generator_words(s1))) == {("P", "L", "L", "P"): 1}
    s1_dag = NcPolynomial.symbol(NcSymbol.sigma(1, dagger=True))
    assert words(lift_to_operators(s1_dag)) == {("Pdag", "Ldag"): 1}
    with pytest.raises(InvalidOrder):
        lift_to_operators(NcPolynomial.symbol(NcSymbol.sigma(3)))


def test_drop_vanishing_removes_plp_words():
    poly = NcPolynomial({(P, L, P, L, L, P): 1, (P, L, L, P): 2})
    assert words(drop_vanishing(poly)) == {("P", "L", "L", "P"): 2}
