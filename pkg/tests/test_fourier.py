import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opsat.fourier import (
    MultilinearPoly, clause_poly, evaluate, fmt_fraction, indicator_poly, mask_of, multiply,
    parse_poly, poly_from_json, transform,
)
from opsat.model import F, R13, T, BooleanRelation, clause_relation, cube
from opsat.model import dumps

H = Fraction(1, 2)
Q = Fraction(1, 4)


def naive_coefficients(table: dict, n: int) -> dict[int, Fraction]:
    """Direct sum 2^-n sum_a f(a) prod_{i in S} a_i, one subset at a time."""
    out = {}
    for mask in range(1 << n):
        total = Fraction(0)
        for a, v in table.items():
            chi = 1
            for i in range(n):
                if mask >> i & 1:
                    chi *= a[i]
            total += v * chi
        if total:
            out[mask] = total / (1 << n)
    return out


def test_and2_polynomial():
    p = transform({a: (-1 if a == (-1, -1) else 1) for a in cube(2)}, 2)
    assert dict(p.coeffs) == {0: H, 1: H, 2: H, 3: -H}
    assert evaluate(p, (-1, -1)) == -1


def test_constant_function():
    assert dict(transform(lambda *a: -1, 3).coeffs) == {0: -1}


def test_one_in_three_footnote_polynomial():
    p = indicator_poly(R13)
    expected = {0: Q, 1: -Q, 2: -Q, 4: -Q, 3: Q, 5: Q, 6: Q, 7: Fraction(3, 4)}
    assert dict(p.coeffs) == expected
    assert evaluate(p, (1, 1, 1)) == 1


def test_indicator_of_full_and_empty():
    assert dict(indicator_poly(T).coeffs) == {0: -1}
    assert dict(indicator_poly(F).coeffs) == {0: 1}


def test_clause_examples():
    assert dict(clause_poly([(1, 1), (2, 1)]).coeffs) == {0: -H, 1: H, 2: H, 3: H}
    assert clause_poly([(1, 1)]) == MultilinearPoly.variable(1, 1)
    assert clause_poly([(1, -1)]) == -MultilinearPoly.variable(1, 1)


@pytest.mark.parametrize("signs", [s for r in (1, 2, 3) for s in itertools.product((1, -1), repeat=r)])
def test_clause_poly_matches_indicator(signs):
    lits = [(i + 1, s) for i, s in enumerate(signs)]
    assert clause_poly(lits) == indicator_poly(clause_relation(signs))


def test_clause_poly_on_larger_space():
    p = clause_poly([(3, 1), (1, -1)], nvars=4)
    for a in cube(4):
        expected = -1 if (a[2] == -1 or a[0] == 1) else 1
        assert evaluate(p, a) == expected


def test_multiply_examples():
    p = indicator_poly(R13)
    one = MultilinearPoly.constant(3, 1)
    assert multiply(p, one) == p
    x1 = MultilinearPoly.variable(3, 1)
    assert multiply(x1, x1) == one
    assert multiply(p, p) == one


def test_exhaustive_round_trip_small():
    for n in (0, 1, 2):
        points = list(cube(n))
        for values in itertools.product((1, -1), repeat=len(points)):
            table = dict(zip(points, values))
            p = transform(table, n)
            assert dict(p.coeffs) == naive_coefficients(table, n)
            assert all(evaluate(p, a) == table[a] for a in points)


def test_sampled_round_trip_three():
    rng = random.Random(9)
    points = list(cube(3))
    for _ in range(500):
        table = {a: rng.choice((1, -1)) for a in points}
        p = transform(table, 3)
        assert all(evaluate(p, a) == table[a] for a in points)


def test_multiply_is_pointwise_product():
    for n in (1, 2, 3):
        points = list(cube(n))
        rng = random.Random(n)
        for _ in range(60):
            f = {a: rng.choice((1, -1)) for a in points}
            g = {a: Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for a in points}
            prod = multiply(transform(f, n), transform(g, n))
            assert all(evaluate(prod, a) == f[a] * g[a] for a in points)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 4), st.dictionaries(st.integers(0, 15), st.fractions(max_denominator=7), max_size=8))
def test_uniqueness(n, raw):
    p = MultilinearPoly(n, {m & ((1 << n) - 1): c for m, c in raw.items()} if n else {0: raw.get(0, 0)})
    table = {a: evaluate(p, a) for a in cube(n)}
    assert transform(table, n) == p


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.dictionaries(st.integers(0, 15), st.fractions(max_denominator=9), max_size=6))
def test_json_round_trip(n, raw):
    p = MultilinearPoly(n, {m & ((1 << n) - 1): c for m, c in raw.items()})
    assert parse_poly(dumps(p.to_json())) == p


def test_json_format():
    doc = transform({a: (-1 if a == (-1, -1) else 1) for a in cube(2)}, 2).to_json()
    assert doc == {"nvars": 2, "terms": [
        {"vars": [], "coef": "1/2"}, {"vars": [1], "coef": "1/2"},
        {"vars": [2], "coef": "1/2"}, {"vars": [1, 2], "coef": "-1/2"},
    ]}
    assert fmt_fraction(Fraction(3)) == "3/1"
    assert poly_from_json(doc).coefficient([1, 2]) == -H


def test_partial_table_rejected():
    with pytest.raises(ValueError):
        transform({(1,): 1}, 1)
    with pytest.raises(ValueError):
        clause_poly([(1, 1), (1, -1)])


def test_mask_helpers():
    assert mask_of([1, 3]) == 0b101
    rel = BooleanRelation(2, [(-1, -1)])
    assert indicator_poly(rel) == transform({a: (-1 if a == (-1, -1) else 1) for a in cube(2)}, 2)
