from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from rungekit import runge_bounds as rb
from rungekit.exact_arith import RationalPoly


def brute_count(delta, p, degs):
    return len(rb.monomials(delta, p, degs))


@pytest.mark.parametrize("p,degs", [(2, (1,)), (2, (3, 1)), (3, (2, 2)), (2, (2, 4)), (3, (3, 6)), (5, (1, 2))])
def test_monomial_counts_agree(p, degs):
    gen = rb.monomial_count_generating(p, degs, 25)
    for delta in range(26):
        assert gen[delta] == brute_count(delta, p, degs)
        if rb.closed_form_valid(delta, p, degs):
            assert rb.monomial_count_closed(delta, p, degs) == gen[delta]


def test_closed_form_rejects_small_delta():
    with pytest.raises(ValueError):
        rb.monomial_count_closed(0, 3, (4, 5))


@given(st.sampled_from([2, 3, 5, 7]), st.lists(st.integers(1, 9), min_size=1, max_size=3))
def test_genus_matches_riemann_hurwitz(p, degs):
    if all(d % p == 0 for d in degs) or len(degs) > 1 and p**len(degs) > 200:
        return
    try:
        g = rb.genus(p, degs)
    except ValueError:
        return
    if sum(degs) % p:
        assert g == rb.riemann_hurwitz_genus(p, degs)


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_hyperelliptic_genus(d):
    assert rb.genus(2, (d,)) == (d - 1) // 2


def test_mainth_params_validation():
    with pytest.raises(ValueError):
        rb.MainthParams(2, (1, 1), t=2)  # t must be below p^(r-1) = 2
    with pytest.raises(ValueError):
        rb.MainthParams(2, (2, 3), t=1, case="all_divisible")
    assert rb.MainthParams(2, (2, 4), t=3).case == "all_divisible"


@pytest.mark.parametrize("p,degs,t", [(2, (3, 1), 1), (3, (1, 2), 2), (2, (2, 4), 3), (2, (1, 1, 1), 3), (3, (3,), 2)])
def test_delta_choice_gives_nontrivial_space(p, degs, t):
    params = rb.MainthParams(p, degs, t)
    delta = rb.delta_choice(params)
    m = rb.count_m(params, delta)
    assert m > (delta + 1) * t
    if params.case == "generic":
        assert m == rb.monomial_count_closed(delta, p, degs)
    bound = rb.height_bound_main(params)
    assert bound.sharp.log_value <= bound.simplified.log_value


def test_par_bound_value():
    cond, b = rb.thm_par(11, 11, 2, 1, 0)
    assert cond
    with mpmath.workprec(600):
        exact = mpmath.mpf(2) ** 33 * 121 * mpmath.log(3872)
        assert b.lower <= exact <= b.log_value
    assert b.relative_width < 1e-60
    assert b.provenance == "par:bound"


def test_precision_env(monkeypatch):
    monkeypatch.setenv("RUNGEKIT_PRECISION", "80")
    _, b = rb.thm_par(11, 11, 2, 1, 0)
    assert b.precision == 80
    assert b.lower <= b.log_value


def test_par_condition_fails_for_small_r():
    assert not rb.thm_par(11, 6, 2, 1, 3)[0]


def test_par2():
    cond, b = rb.thm_par2(11, 11, 2, 1, 0)
    with mpmath.workprec(300):
        assert b.lower <= 2**33 * 121 * mpmath.log(16 * 11 * 11) <= b.log_value
    assert isinstance(cond, bool)
    assert rb.split_count(7, 2) == 2 and rb.split_count(3, 2) == 1 and rb.split_count(2, 2) == 1
    with pytest.raises(ValueError):
        rb.thm_par2(11, 11, 4, 1, 0)


def test_wth():
    x = RationalPoly.x()
    target, cutoff = rb.thm_wth(2, [x, x + RationalPoly.constant(1)])
    assert target == 1
    with mpmath.workprec(300):
        assert cutoff.lower <= 64 * mpmath.log(128) <= cutoff.log_value


def test_sr_epsilon_cases():
    assert rb.sr_epsilon(2, (2, 4)) == 0
    assert rb.sr_epsilon(2, (1, 2)) == 1
    assert rb.sr_epsilon(3, (1, 2)) == 2


def test_sr_condition():
    x = RationalPoly.x()
    gs = [x + RationalPoly.constant(i) for i in range(12)]
    res = rb.thm_sr(2, gs)
    assert res.epsilon == 2 and isinstance(res.condition, bool)
    assert res.bound.lower <= res.bound.log_value


def test_table_values():
    grid = rb.table1_grid()
    assert grid[0] == [61, 125, 1021]
    assert grid[3][1] == 13 and grid[9][2] == 0
    assert grid[6][0] is None


def test_ieq_and_corollary():
    assert rb.ieq_max_omega(11, 11, 0) == 2**7 - 3
    assert rb.ieq_max_omega(11, 11, 1) == 2**6 - 3
    assert rb.ieq_holds(11, 11, 61, 1) and not rb.ieq_holds(11, 11, 62, 1)
    assert rb.corollary_prime_count(11, 0, 0) == 11 - 4 - 0 - 1
    assert rb.corollary_prime_count(17, 6, 1) == 17 - 6 - 1 - 3
    with pytest.raises(ValueError):
        rb.ieq_max_omega(7, 7, 0)


def test_bv_bound():
    b = rb.bv_bound(2, 4, 2, 0)
    with mpmath.workprec(300):
        assert b.lower <= 2 * mpmath.log(2) <= b.log_value


def test_exact_log_less():
    assert rb.exact_log_less(Fraction(7), 2, 3) and not rb.exact_log_less(Fraction(8), 2, 3)
    with pytest.raises(ValueError):
        rb.exact_log_less(Fraction(1), 2, Fraction(1, 2))
