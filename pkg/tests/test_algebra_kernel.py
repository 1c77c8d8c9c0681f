"""Exact polynomials, factorisation and number-field arithmetic.

sympy is the independent oracle for expansion, factorisation, resultants and
discriminants.
"""
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from autfield.algebra.factor import (
    canonical_integers,
    canonical_points,
    discriminant,
    factor_over_Q,
    is_irreducible_over_QT,
    resultant,
    specialization_check,
)
from autfield.algebra.numberfield import KPoly, NumberField, factor_over_number_field, roots_in_field
from autfield.algebra.poly import ExactPoly, as_poly, parse_poly
from autfield.errors import (
    DegreeCapExceeded,
    DegreeTooLow,
    Inconclusive,
    NotIrreducibleDefiningPoly,
    PolySyntaxError,
    ZeroPolynomial,
)

X, T = sp.symbols("X T")
small = st.integers(min_value=-6, max_value=6)


def to_sympy(p: ExactPoly):
    return sp.sympify(str(p).replace("^", "**"), locals={"X": X, "T": T, "Z": sp.Symbol("Z")})


def poly_strategy(max_deg_x=3, max_deg_t=2):
    return st.lists(
        st.tuples(st.integers(0, max_deg_x), st.integers(0, max_deg_t), small), min_size=1, max_size=6
    ).map(lambda terms: " + ".join(f"({c})*X^{i}*T^{j}" for i, j, c in terms))


# ---------------------------------------------------------------------------
# parsing and arithmetic


@settings(max_examples=60, deadline=None)
@given(poly_strategy(), poly_strategy())
def test_arithmetic_matches_sympy(a, b):
    pa, pb = parse_poly(a), parse_poly(b)
    sa, sb = sp.expand(sp.sympify(a.replace("^", "**"))), sp.expand(sp.sympify(b.replace("^", "**")))
    assert sp.expand(to_sympy(pa * pb) - sa * sb) == 0
    assert sp.expand(to_sympy(pa - pb) - (sa - sb)) == 0


@settings(max_examples=60, deadline=None)
@given(poly_strategy())
def test_print_parse_round_trip(text):
    p = parse_poly(text)
    assert parse_poly(str(p)) == p


def test_printing_puts_main_variable_first():
    assert str(as_poly("T + X*T + X^3")) == "X^3 + X*T + T"


def test_rational_coefficients():
    p = parse_poly("1/6*X^4 - 1/2*X")
    assert p.coefficients("X")[4].constant_value() == Fraction(1, 6)
    assert p.coefficients("X")[1].constant_value() == Fraction(-1, 2)


@pytest.mark.parametrize("bad", ["X^^2", "X +", "(X", "X^-1", "2X$", "X/2"])
def test_syntax_errors(bad):
    with pytest.raises(PolySyntaxError):
        parse_poly(bad)


def test_subs_and_evaluate():
    p = as_poly("X^3 + T*X + T")
    assert p.subs({"T": 1}) == as_poly("X^3 + X + 1")
    assert p.evaluate({"X": 2, "T": 3}) == 17


# ---------------------------------------------------------------------------
# factorisation, resultants, discriminants


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(small, min_size=2, max_size=4), min_size=1, max_size=3))
def test_factor_over_Q_reassembles(factor_coeffs):
    f = ExactPoly.constant(1)
    for cs in factor_coeffs:
        if all(c == 0 for c in cs[1:]):
            continue
        f = f * ExactPoly.from_coefficients(cs)
    if f.degree("X") < 1:
        return
    fl = factor_over_Q(f)
    assert fl.expand() == f
    oracle = sp.factor_list(to_sympy(f), X)[1]
    assert sorted(fl.degrees()) == sorted(sp.degree(g, X) for g, m in oracle for _ in range(m))


def test_resultant_matches_sympy():
    f, g = as_poly("X^3 + T*X + T"), as_poly("X^2 - 2*T*X + 5")
    assert sp.expand(to_sympy(resultant(f, g, "X")) - sp.resultant(to_sympy(f), to_sympy(g), X)) == 0


@pytest.mark.parametrize("y", [0, 1, -2, 5, Fraction(27, 4)])
def test_gadget_discriminant_matches_sympy(y):
    f = as_poly(f"X^3 + (T - ({y}))*X + (T - ({y}))")
    assert sp.expand(to_sympy(discriminant(f, "X")) - sp.discriminant(to_sympy(f), X)) == 0


def test_canonical_enumeration():
    gen = canonical_integers()
    assert [next(gen) for _ in range(7)] == [0, 1, -1, 2, -2, 3, -3]
    pts = canonical_points(2, 1)
    assert pts[:4] == [(0, 0), (0, 1), (0, -1), (1, 0)]
    assert len(pts) == 9
    assert all(max(map(abs, a)) <= max(map(abs, b)) for a, b in zip(pts, pts[1:]))


def test_irreducibility_over_QT_witness():
    v = is_irreducible_over_QT(as_poly("X^2 - T"))
    assert v and v.witness == {"T": -1}
    v = is_irreducible_over_QT(as_poly("X^3 + T*X + T"))
    assert v and v.witness == {"T": 1}


def test_irreducibility_over_QT_factorisation():
    v = is_irreducible_over_QT(as_poly("X^2 - T^2"))
    assert not v
    assert len(v.factorization) == 2


def test_irreducibility_errors():
    with pytest.raises(ZeroPolynomial):
        is_irreducible_over_QT(ExactPoly.constant(0))
    with pytest.raises(DegreeTooLow):
        is_irreducible_over_QT(as_poly("T + 1"))


def test_inconclusive_when_budget_too_small():
    # irreducible over Q(T), but X^2 is inseparable at the only allowed point t = 0
    with pytest.raises(Inconclusive):
        is_irreducible_over_QT(as_poly("X^2 - T*X + T^2 - T"), budget=0)


def test_specialization_check_reasons():
    f = as_poly("X^2 - T")
    assert specialization_check(f, {"T": 0})[1] == "inseparable"
    assert specialization_check(f, {"T": 4})[1] == "reducible"
    assert specialization_check(as_poly("T*X^2 + 1"), {"T": 0})[1] == "degree drop"
    assert specialization_check(f, {"T": 2})[0]


# ---------------------------------------------------------------------------
# number fields


def test_number_field_tower_degree():
    K = NumberField.from_steps([("a", "X^2 - 2"), ("b", "X^2 - 3")])
    assert K.degree == 4
    a, b = K.gen("a"), K.gen("b")
    assert (a * a).rational_value() == 2
    s = a + b
    assert ExactPoly.from_fmpq_poly(s.minpoly()) == as_poly("X^4 - 10*X^2 + 1")


def test_reducible_step_rejected():
    K = NumberField.from_poly("X^2 - 2", "a")
    with pytest.raises(NotIrreducibleDefiningPoly):
        K.extend("X^2 - 8", "b")
    with pytest.raises(NotIrreducibleDefiningPoly):
        NumberField.from_poly("X^2 - 4")


def test_degree_cap():
    with pytest.raises(DegreeCapExceeded):
        NumberField.from_steps([("a", "X^3 - 2"), ("b", "X^2 + 3")], cap=4)


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=3, max_size=3).filter(any))
def test_inverse_in_cubic_field(cs):
    K = NumberField.from_poly("X^3 - 2", "a")
    a = K.gen("a")
    e = a * a * cs[2] + a * cs[1] + cs[0]
    assert (e * e.inverse()).rational_value() == 1


def test_factor_over_number_field_splits():
    K = NumberField.from_poly("X^2 - 2", "a")
    fl = factor_over_number_field(KPoly.from_expr(K, as_poly("X^4 - 4")), K)
    assert sorted(fl.degrees()) == [1, 1, 2]
    roots = roots_in_field(KPoly.from_expr(K, as_poly("X^2 - 8")), K)
    assert len(roots) == 2 and all((r * r).rational_value() == 8 for r in roots)


def test_cube_root_polynomial_over_cyclotomic_field():
    K = NumberField.from_poly("X^2 + X + 1", "u")
    L = K.extend("X^3 - 2", "c")
    fl = factor_over_number_field(KPoly.from_expr(L, as_poly("X^3 - 2")), L)
    assert fl.degrees() == [1, 1, 1]


def test_express_round_trip():
    K = NumberField.from_steps([("a", "X^2 - 2"), ("b", "X^3 - a")])
    e = K.gen("a") * K.gen("b") + 3
    assert K.element(K.express(e)) == e
