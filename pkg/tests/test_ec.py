import itertools
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from rungekit.ec import (
    INFINITY,
    CurvePoint,
    ModCurve,
    WeierstrassCurve,
    add,
    canonical_height_interval,
    curve_from_quadruple,
    double_x,
    group_order,
    height_constants,
    index_cutoff,
    is_torsion,
    map_F_to_E,
    mod_add,
    naive_log_height,
    neg,
    order_from_multiple,
    point_order_mod,
    reduce_mod,
    scalar_mul,
    torsion_order_bound,
    torsion_subgroup,
    x_E_to_F,
    x_F_to_E,
)
from rungekit.exact_arith import primes_upto

E0 = WeierstrassCurve(18, 32)
P0 = CurvePoint(Fraction(-25), Fraction(35))


def brute_count(A, B, q):
    """Oracle: affine solutions by double loop, plus the point at infinity."""
    return 1 + sum(
        1 for x in range(q) for y in range(q) if (y * y - x * (x + A) * (x + B)) % q == 0
    )


def test_group_law_basics():
    Q = scalar_mul(3, P0, E0)
    assert E0.contains(Q)
    assert add(P0, neg(P0), E0) == INFINITY
    assert add(P0, INFINITY, E0) == P0
    assert scalar_mul(-2, P0, E0) == neg(scalar_mul(2, P0, E0))
    assert double_x(P0.x, E0) == scalar_mul(2, P0, E0).x


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6))
def test_associativity_on_multiples(a, b, c):
    T = CurvePoint(Fraction(0), Fraction(0))
    P, Q, R = scalar_mul(a, P0, E0), add(scalar_mul(b, P0, E0), T, E0), scalar_mul(c, P0, E0)
    assert add(add(P, Q, E0), R, E0) == add(P, add(Q, R, E0), E0)
    assert add(P, Q, E0) == add(Q, P, E0)


@pytest.mark.parametrize("q", [p for p in primes_upto(120) if p > 2 and (E0.discriminant % p)])
def test_group_order_matches_brute_force(q):
    assert group_order(E0.A, E0.B, q) == brute_count(E0.A, E0.B, q)


def test_group_order_matches_pari():
    cypari2 = pytest.importorskip("cypari2")
    pari = cypari2.Pari()
    for q in (1009, 4999, 9973):
        e = pari.ellinit([0, E0.A + E0.B, 0, E0.A * E0.B, 0], q)
        assert group_order(E0.A, E0.B, q) == int(pari.ellcard(e))


@pytest.mark.parametrize("q", [5, 11, 101, 997])
def test_reduction_is_homomorphism(q):
    C = ModCurve(E0.A, E0.B, q)
    for a, b in itertools.product(range(-3, 4), repeat=2):
        P, Q = scalar_mul(a, P0, E0), scalar_mul(b, P0, E0)
        assert reduce_mod(add(P, Q, E0), q) == mod_add(reduce_mod(P, q), reduce_mod(Q, q), C)


@pytest.mark.parametrize("q", [5, 11, 101, 997])
def test_point_order_divides_group_order(q):
    C = ModCurve(E0.A, E0.B, q)
    n = group_order(E0.A, E0.B, q)
    o = point_order_mod(reduce_mod(P0, q), C)
    assert n % o == 0
    assert reduce_mod(scalar_mul(o, P0, E0), q) is None
    assert order_from_multiple(reduce_mod(P0, q), n, C) == o


def test_torsion():
    tors = torsion_subgroup(E0)
    assert len(tors) == 4
    assert all(is_torsion(T, E0) for T in tors)
    assert not is_torsion(P0, E0)
    assert torsion_order_bound(E0) % len(tors) == 0
    full = torsion_subgroup(WeierstrassCurve(1, 4))
    assert len(full) == 8  # Z/2 x Z/4, with points of order 4 at x = 2 and x = -2


def test_torsion_matches_pari(db):
    cypari2 = pytest.importorskip("cypari2")
    pari = cypari2.Pari()
    for rec in list(db.records.values())[::25]:
        _, E = curve_from_quadruple(rec.gammas, rec.aJ)
        e = pari.ellinit([0, E.A + E.B, 0, E.A * E.B, 0])
        assert len(torsion_subgroup(E)) == int(pari.elltors(e)[0])


def test_quartic_map():
    model, E = curve_from_quadruple((0, 1, 2, 3), 6)
    Q = map_F_to_E(CurvePoint(Fraction(48), Fraction(432)), model)
    assert (Q.X, Q.Y) == (1, 2)
    assert model.contains(Q.X, Q.Y)
    for n in range(1, 4):
        R = scalar_mul(n, CurvePoint(Fraction(48), Fraction(432)), E)
        X = x_F_to_E(R.x, model)
        assert x_E_to_F(X, model) == R.x
        img = map_F_to_E(R, model)
        assert model.contains(img.X, img.Y)


def test_height_constant_bounds_duplication():
    C = height_constants(E0.A, E0.B).C
    for n in range(1, 9):
        P = scalar_mul(n, P0, E0)
        diff = naive_log_height(double_x(P.x, E0)) - 4 * naive_log_height(P.x)
        assert abs(diff) <= C


def test_canonical_height_against_pari():
    cypari2 = pytest.importorskip("cypari2")
    pari = cypari2.Pari()
    e = pari.ellinit([0, E0.A + E0.B, 0, E0.A * E0.B, 0])
    h = canonical_height_interval(P0, E0)
    ref = mpmath.mpf(str(pari.ellheight(e, [-25, 35]))) / 2
    assert h.lo <= ref <= h.hi
    # quadratic form: hhat(3P) = 9 hhat(P)
    h3 = canonical_height_interval(scalar_mul(3, P0, E0), E0)
    assert h3.lo <= 9 * h.hi and 9 * h.lo <= h3.hi


def test_index_cutoff_is_sound():
    model, E = curve_from_quadruple((0, 3, 4, 6), 42)
    # pick a non-torsion point by search
    P = next(
        pt
        for x in range(-200, 200)
        for pt in E.lift_x(Fraction(x))
        if not is_torsion(pt, E)
    )
    log_hmax = 40
    N = index_cutoff([P], E, log_hmax, model)
    for T in torsion_subgroup(E):
        for n in range(N, N + 3):
            X = x_F_to_E(add(scalar_mul(n, P, E), T, E).x, model)
            assert X is None or naive_log_height(X) > log_hmax
