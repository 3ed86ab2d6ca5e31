import itertools
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rungekit.ec import torsion_subgroup
from rungekit.exact_arith import is_squarefree, primes_upto
from rungekit.sieve.cases import (
    case1,
    case2,
    combine_residues,
    enumerate_candidates,
    image_x_set,
    is_good_prime,
    on_curve_X,
    x_E_mod,
)
from rungekit.sieve.configs import (
    Configuration,
    a_tuples,
    compatible,
    config_from_solution,
    count_a_tuples,
    curves_for,
    gamma_tuples,
)
from rungekit.sieve.db import DBError, load_db_lines, parse_record
from rungekit.sieve.driver import run, solutions_from_candidates, solve_config
from rungekit.sieve.fixtures import table_pairs
from rungekit.sieve.solutions import (
    admissible_r,
    smooth_offsets,
    square_decomposition,
    verify_solution,
    witness,
    witnesses_by_subsets,
)


# --- solutions --------------------------------------------------------------


def test_classical_identities():
    assert verify_solution(1, 1, range(6), 6) == (5, 12)
    assert verify_solution(1, 1, range(10), 11) == (7, 720)
    assert verify_solution(1, 1, range(6), 5) is None  # b = 5 is not below k = 5
    assert verify_solution(2, 4, range(6), 11) is None  # gcd(x, d) > 1


@given(st.integers(1, 10**12))
def test_square_decomposition(n):
    b, y = square_decomposition(n)
    assert b * y * y == n and is_squarefree(b)


def test_witness_search_agrees_with_subsets():
    for d, x in [(1, 1), (1, 3), (1, 21), (7, 1), (5, 4)]:
        r = admissible_r(d, 11)
        w = witness(x, d, 11, r)
        subsets = list(witnesses_by_subsets(x, d, 11, r))
        assert (w is not None) == bool(subsets)
        if w:
            assert w.gammas in subsets
            assert set(w.gammas) <= set(smooth_offsets(x, d, 11))


def test_table_fixture_shape():
    pairs = table_pairs()
    assert len(pairs) == 145 and (1, 1) in pairs and (23, 16) in pairs


# --- configurations ---------------------------------------------------------


def test_configuration_validation():
    Configuration(11, (0, 1, 2, 3, 4, 5), (1, 2, 3, 5, 1, 7))
    with pytest.raises(ValueError):
        Configuration(11, (0, 1, 2, 3, 4, 11), (1,) * 6)  # gamma >= k
    with pytest.raises(ValueError):
        Configuration(11, (0, 1, 2, 3, 4, 5), (4, 1, 1, 1, 1, 1))  # not squarefree
    with pytest.raises(ValueError):
        Configuration(11, (0, 1, 2, 3, 4, 5), (13, 1, 1, 1, 1, 1))  # prime too large
    with pytest.raises(ValueError):
        Configuration(11, (0, 1, 2, 3, 4, 5), (2, 2, 1, 1, 1, 1))  # 2 divides a_0, a_1 but not 1 - 0


def test_a_tuples_are_compatible_and_counted():
    g = (0, 1, 3, 4, 6, 9)
    tuples = list(a_tuples(g, 8))
    assert len(tuples) == count_a_tuples(g, 8) == len(set(tuples))
    assert all(compatible(g, a) for a in tuples)
    # brute force over all squarefree 7-smooth tuples
    sf = [a for a in range(1, 211) if is_squarefree(a) and all(a % q for q in (11, 13, 17, 19, 23))]
    sf = [a for a in sf if all(q <= 7 for q in primes_upto(a) if a % q == 0)]
    assert len(sf) == 16
    # brute force restricted to 3-smooth values
    small = (1, 2, 3, 6)
    brute = {a for a in itertools.product(small, repeat=6) if compatible(g, a)}
    assert brute == {a for a in tuples if set(a) <= set(small)}
    assert sum(1 for _ in gamma_tuples(11)) == math.comb(10, 5)


def test_config_from_solution():
    c, s = config_from_solution(21, 1, (0, 3, 4, 6, 7, 9), 11)
    assert s == 0 and c.a == (21, 6, 1, 3, 7, 30)
    for cd in curves_for(c):
        assert on_curve_X(Fraction(21), cd)
    c2, s2 = config_from_solution(20, 1, (1, 4, 5, 7, 8, 10), 11)
    assert s2 == 1 and c2 == c


# --- database ---------------------------------------------------------------

GOOD = {"gammas": [0, 1, 2, 3], "aJ": 6, "rank": 1, "gens": [["48", "1", "432", "1"]], "provenance": "test"}


def test_db_parse_and_roundtrip():
    rec = parse_record(GOOD)
    db = load_db_lines([json.dumps(GOOD), "", "# comment"])
    assert db.get(rec.key) == rec
    again = load_db_lines(db.dumps().splitlines())
    assert again.dumps() == db.dumps()


@pytest.mark.parametrize(
    "change,message",
    [
        ({"gens": [["1", "1", "1", "1"]]}, "not on"),
        ({"gens": [["0", "1", "0", "1"]]}, "torsion"),
        ({"rank": 2}, "claimed rank"),
        ({"gammas": [1, 2, 3, 4]}, "starting at 0"),
        ({"rank": 3}, "outside"),
    ],
)
def test_db_errors_name_the_line(change, message):
    bad = {**GOOD, **change}
    with pytest.raises(DBError) as exc:
        load_db_lines([json.dumps(GOOD), json.dumps(bad)])
    assert exc.value.line == 2 and message in str(exc.value)


def test_db_invalid_json():
    with pytest.raises(DBError) as exc:
        load_db_lines(["{"])
    assert exc.value.line == 1


def test_db_corpus_loads(db):
    assert len(db) == 276
    assert all(r.provenance.startswith("PARI/GP") for r in db.records.values())


# --- reductions and residue sets --------------------------------------------


def quartic_x_set(model, q):
    """Oracle: X in P^1(F_q) over which a_J Y^2 = prod (X + gamma) has an F_q-point."""
    squares = {y * y % q for y in range(q)}
    out = set()
    for X in range(q):
        v = math.prod(X + g for g in model.gammas) % q
        # a_J Y^2 = v  <=>  v * a_J is a square (a_J is a unit)
        if v * model.aJ % q in squares:
            out.add(X)
    if model.aJ % q in squares:
        out.add(q)
    return frozenset(out)


def test_image_x_set_matches_quartic(configs_k11):
    cds = curves_for(configs_k11[0])
    for q in (5, 7, 13, 29, 97, 199):
        for cd in cds:
            if is_good_prime(q, [cd]):
                assert image_x_set(cd, q) == quartic_x_set(cd.model, q)


def test_x_E_mod_matches_exact(db, configs_k11):
    cds = curves_for(configs_k11[0])
    cd = next(c for c in cds if db.get(c.key) and db.get(c.key).rank == 1)
    P = db.get(cd.key).gens[0]
    from rungekit.ec import scalar_mul, x_F_to_E, reduce_mod

    for n in range(1, 5):
        R = scalar_mul(n, P, cd.curve)
        X = x_F_to_E(R.x, cd.model)
        for q in (101, 103, 107):
            if not is_good_prime(q, [cd]) or X.denominator % q == 0:
                continue
            assert x_E_mod(reduce_mod(R, q), cd, q) == X.numerator * pow(X.denominator, -1, q) % q


@given(
    st.lists(
        st.tuples(st.integers(2, 30), st.sets(st.integers(0, 29), min_size=1, max_size=10)),
        min_size=1,
        max_size=4,
    ),
    st.integers(1, 400),
)
def test_enumerate_candidates_matches_filtering(raw, bound):
    filters = [(m, frozenset(r % m for r in res)) for m, res in raw]
    expected = [n for n in range(-bound + 1, bound) if all(n % m in res for m, res in filters)]
    assert enumerate_candidates(filters, bound) == expected
    classes, L, rest = combine_residues(filters)
    assert all(c < L for c in classes)


# --- cases and the driver ---------------------------------------------------


def test_case1_returns_torsion_x(db, configs_k11):
    config = next(c for c in configs_k11 if c.gammas == (0, 1, 2, 3, 4, 5))
    cds = curves_for(config)
    cd = next(c for c in cds if db.get(c.key) and db.get(c.key).rank == 0)
    res = case1(cd, db.get(cd.key))
    assert res.case == "I" and res.assumptions
    assert all(on_curve_X(X, cd) for X in res.candidates)
    assert len(res.candidates) <= len(torsion_subgroup(cd.curve))


def test_case2_full_image_agrees_with_mw_image(db, configs_k11):
    cds = curves_for(configs_k11[0])
    (A, ra), (B, rb) = [(c, db.get(c.key)) for c in cds if db.get(c.key) and db.get(c.key).rank == 1][:2]
    mw = case2(A, ra, B, rb, n_bound=40)
    full = case2(A, ra, B, rb, n_bound=40, image_mode="full")
    assert mw.candidates == full.candidates
    assert Fraction(21) in mw.candidates


def test_solutions_from_candidates_shifts_and_discards(db, configs_k11):
    outcome = solve_config(configs_k11[1], db)  # planted x = 6, d = 1 on gammas up to 8
    sols, discarded = solutions_from_candidates(outcome, 11, 6)
    assert {(s.d, s.x) for s in sols} <= table_pairs()
    assert (1, 6) in {(s.d, s.x) for s in sols}
    for s in sols:
        assert verify_solution(s.x, s.d, s.gammas, 11) == (s.b, s.y)
    assert all("reason" in d for d in discarded)


def test_skipped_configuration_is_reported(db):
    from rungekit.sieve.db import GeneratorDB

    outcome = solve_config(Configuration(11, (0, 1, 2, 3, 4, 5), (1,) * 6), GeneratorDB())
    assert outcome.status == "skipped" and outcome.failures


def test_run_is_deterministic_across_jobs(db, configs_k11):
    subset = [configs_k11[0], configs_k11[10], configs_k11[15]]
    one = run(11, 5, db, subset, jobs=1)
    two = run(11, 5, db, subset, jobs=2)
    assert one.dumps() == two.dumps()
    assert one.complete and one.pairs() <= table_pairs()
    assert one.to_csv().splitlines()[0].startswith("x,d,k")


def test_run_rejects_bad_parameters(db, configs_k11):
    with pytest.raises(ValueError):
        run(11, 6, db, configs_k11[:1])
    with pytest.raises(ValueError):
        run(13, 5, db, configs_k11[:1])
