"""Series evaluation, root solving, and isoperimetry audits."""

import math
from fractions import Fraction

import pytest

from hyperperc import (
    BracketingError,
    TallyTable,
    check_isoperimetry,
    enumerate_animals,
    eval_Dn,
    eval_fn,
    isoperimetric_constant,
    solve_ph,
)

from oracles import PH_M5_N0, PH_M5_N8, TABLE1, fraction_f, fraction_root

PHI = (1.0 + math.sqrt(5.0)) / 2.0


# ---------------------------------------------------------------- series

def test_eval_Dn_closed_form_n0(m5n8_tally):
    # only the single-vertex row: D_0(p) = (2/5) (q^5 - p^5)
    t0 = m5n8_tally.restricted(0)
    for p in (0.0, 0.1, 0.25, 0.3591, 0.5):
        q = 1.0 - p
        expect = 0.4 * (q ** 5 - p ** 5)
        assert abs(eval_Dn(t0, p) - expect) < 1e-15


def test_eval_Dn_closed_form_n1(m5n8_tally):
    # adds the five single edges: count 5, v = 2, b = 8
    t1 = m5n8_tally.restricted(1)
    assert t1.counts == {(0, 1, 5): 1, (1, 2, 8): 5}
    for p in (0.05, 0.2, 0.35, 0.45):
        q = 1.0 - p
        expect = 0.4 * ((q ** 5 - p ** 5) + 2.5 * (p * q ** 8 - q * p ** 8))
        assert abs(eval_Dn(t1, p) - expect) < 1e-14


def test_eval_Dn_antisymmetry_zero_at_half(m5n8_tally):
    # p = q makes every term vanish identically, not just approximately
    for n in range(9):
        assert eval_Dn(m5n8_tally.restricted(n), 0.5) == 0.0


def test_eval_fn_trivial_root_at_zero(m5n8_tally):
    # only the empty animal survives at p = 0 and it cancels the -2/m
    assert eval_fn(m5n8_tally, 0.0) == 0.0
    assert eval_fn(m5n8_tally.restricted(3), 0.0) == 0.0


def test_eval_Dn_rejects_out_of_range(m5n8_tally):
    for p in (-0.1, 1.0000001, math.inf):
        with pytest.raises(ValueError):
            eval_Dn(m5n8_tally, p)


def test_eval_fn_matches_exact_rational(m5n8_tally):
    # the float pipeline agrees with Fraction arithmetic at the exact
    # binary points, so roundoff is the only source of error
    for x in (0.3, 0.25, 0.125, 0.437):
        exact = float(fraction_f(TABLE1, 5, Fraction(x)))
        assert abs(eval_fn(m5n8_tally, x) - exact) < 1e-13


# ---------------------------------------------------------------- solver

def test_solver_matches_exact_bisection_n8(m5n8_tally):
    oracle = fraction_root(TABLE1, 5, Fraction(29, 100), Fraction(31, 100))
    assert oracle == PH_M5_N8
    result = solve_ph(m5n8_tally)
    assert abs(result.p_h - PH_M5_N8) < 1e-9
    assert result.m == 5 and result.n == 8
    assert result.residual <= 1e-9
    assert result.sign_changes == 1
    assert result.tally_digest == m5n8_tally.digest()


def test_solver_single_vertex_truncation(m5n8_tally):
    t0 = m5n8_tally.restricted(0)
    oracle = fraction_root({(0, 1, 5): 1}, 5, Fraction(35, 100),
                           Fraction(37, 100))
    assert oracle == PH_M5_N0
    result = solve_ph(t0)
    assert abs(result.p_h - PH_M5_N0) < 1e-9


def test_bound_chain_monotone(m5n8_tally):
    chain = [solve_ph(m5n8_tally.restricted(n)).p_h for n in range(9)]
    assert all(a > b for a, b in zip(chain, chain[1:]))
    assert all(0.29 < p <= 0.4 for p in chain)
    assert abs(chain[0] - PH_M5_N0) < 1e-9
    assert abs(chain[8] - PH_M5_N8) < 1e-9


def test_square_lattice_root_is_exactly_half():
    tally = enumerate_animals(4, 5)
    for n in range(6):
        result = solve_ph(tally.restricted(n))
        assert result.p_h == 0.5
        assert result.residual == 0.0
        assert result.sign_changes == 1
        lo, hi = result.bracket
        assert lo < 0.5 and hi == 0.5


def test_roots_never_exceed_two_over_m():
    for m in (5, 6, 7):
        tally = enumerate_animals(m, 4)
        result = solve_ph(tally)
        assert 0.0 < result.p_h <= 2.0 / m + 1e-15


def test_bracket_invariants(m5n8_tally):
    result = solve_ph(m5n8_tally.restricted(2))
    lo, hi = result.bracket
    assert lo < result.p_h <= hi
    assert hi - lo < 1e-9
    assert abs(eval_fn(m5n8_tally.restricted(2), result.p_h)) == result.residual


def test_no_sign_change_raises():
    # inflated edge count keeps f_n positive on the whole grid
    bad = TallyTable(m=5, max_edges=1, counts={(0, 1, 5): 1, (1, 2, 8): 50})
    with pytest.raises(BracketingError):
        solve_ph(bad)


def test_solver_argument_validation(m5n8_tally):
    with pytest.raises(ValueError):
        solve_ph(m5n8_tally, tol=0.0)
    with pytest.raises(ValueError):
        solve_ph(m5n8_tally, tol=-1e-9)
    with pytest.raises(ValueError):
        solve_ph(TallyTable(m=5, max_edges=1, counts={(1, 2, 8): 5}))


# ---------------------------------------------------------- isoperimetry

def test_isoperimetric_constant_pentagonal():
    i5 = isoperimetric_constant(5)
    assert abs(i5 - math.sqrt(5.0)) < 1e-12
    # the associated edge/vertex ratio is the golden ratio exactly
    assert abs(i5 / (2.5 - i5 / 2.0) - PHI) < 1e-12


def test_isoperimetric_constant_rejects_amenable():
    for m in (4, 3, 0, -2):
        with pytest.raises(ValueError):
            isoperimetric_constant(m)


def test_isoperimetric_constant_growth():
    values = [isoperimetric_constant(m) for m in range(5, 21)]
    assert all(a < b for a, b in zip(values, values[1:]))
    # normalized constant tends to 1 from below as m grows
    big = isoperimetric_constant(10 ** 6) / (10 ** 6 - 2)
    assert 0.0 < 1.0 - big < 1e-11


def test_check_isoperimetry_enumerates():
    report = check_isoperimetry(5, 2)
    assert report.ok
    assert report.total_animals == 36
    assert report.violations == 0
    assert report.violating_rows == ()
    assert report.min_ratio == 5.5  # the 30 two-edge animals: b/e = 11/2
    assert abs(report.isoperimetric - math.sqrt(5.0)) < 1e-12


def test_check_isoperimetry_accepts_wider_tally(m5n8_tally):
    # rows beyond max_edges are ignored, not counted
    report = check_isoperimetry(5, 2, tally=m5n8_tally)
    assert report.total_animals == 36
    assert report.min_ratio == 5.5
    full = check_isoperimetry(5, 8, tally=m5n8_tally)
    assert full.ok and full.total_animals == m5n8_tally.total_animals()


def test_check_isoperimetry_validation(m5n8_tally):
    with pytest.raises(ValueError):
        check_isoperimetry(4, 2)
    with pytest.raises(ValueError):
        check_isoperimetry(6, 2, tally=m5n8_tally)  # wrong m
    with pytest.raises(ValueError):
        check_isoperimetry(5, 9, tally=m5n8_tally)  # not covered


def test_check_isoperimetry_edgeless():
    report = check_isoperimetry(5, 0)
    assert report.ok and report.total_animals == 1
    assert report.min_ratio == math.inf
