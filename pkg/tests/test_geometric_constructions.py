"""The trinomial gadget, the realization catalog and the killed tower.

sympy supplies the discriminant, resultant and factorisation oracles.
"""
import json
from fractions import Fraction

import pytest
import sympy as sp

from autfield.catalog import RealizationEntry, catalog_self_check, check_catalog, find_entry, get_entry, load_catalog
from autfield.errors import CatalogMiss, CheckFailed, EqualParameters
from autfield.gadgets import branch_points, difference_poly, gadget_distinctness, gadget_poly, make_gadget
from autfield.groups import standard_group
from autfield.tower import kill_automorphisms

X, T, D = sp.symbols("X T D")
Y_VALUES = [0, 1, -3, Fraction(1, 2), 7]


def sym(p):
    return sp.sympify(str(p).replace("^", "**"), locals={"X": X, "T": T})


def sym_gadget(y):
    y = sp.Rational(str(y))
    return X ** 3 + (T - y) * X + (T - y)


# ---------------------------------------------------------------------------
# gadget


@pytest.mark.parametrize("y", Y_VALUES)
def test_gadget_certificate(y):
    g = make_gadget(y)
    assert sp.expand(sym(g.poly) - sym_gadget(y)) == 0
    assert sp.expand(sym(g.discriminant) - sp.discriminant(sym_gadget(y), X)) == 0
    # discriminant is not a square in Q(T), so the group is S3 rather than A3
    _, factors = sp.factor_list(sp.discriminant(sym_gadget(y), X), T)
    assert any(m % 2 for _, m in factors)
    # the witness specialisation is irreducible over Q
    t = sp.Rational(str(g.witness["T"]))
    assert sp.Poly(sym_gadget(y).subs(T, t), X).is_irreducible
    assert g.galois_group == "S3"


@pytest.mark.parametrize("y", Y_VALUES)
def test_branch_points(y):
    y = Fraction(y)
    assert branch_points(y) == sorted({y, y - Fraction(27, 4)})
    roots = sp.roots(sp.Poly(sp.discriminant(sym_gadget(y), X), T))
    assert {Fraction(str(r)) for r in roots} == set(branch_points(y))


@pytest.mark.parametrize("y", [0, 2, Fraction(-5, 3)])
def test_difference_poly_matches_resultant(y):
    f = sym_gadget(y)
    res = sp.expand(sp.resultant(f, f.subs(X, X + D), X))
    # the roots in D are all x_j - x_i: three zeros and the six differences
    expected = sym(difference_poly(y)).subs(X, D) * D ** 3
    ratio = sp.cancel(res / expected)
    assert ratio.free_symbols == set()
    assert sp.Poly(sym(difference_poly(y)).subs(T, 1), X).is_irreducible


def test_difference_poly_is_even():
    p = difference_poly(0)
    assert p.degree("X") == 6
    coeffs = p.coefficients("X")
    assert all(c.is_zero() for i, c in enumerate(coeffs) if i % 2)
    assert gadget_poly(0) == make_gadget(0).poly


def test_distinct_parameters():
    cert = gadget_distinctness(0, 1)
    assert cert and cert.method == "branch loci"
    assert cert.to_json()["distinct"] is True
    with pytest.raises(EqualParameters):
        gadget_distinctness(2, Fraction(4, 2))


def test_gadget_json():
    data = make_gadget(0).to_json()
    assert data["polynomial"] == "X^3 + X*T + T"
    assert data["branch_points"] == ["-27/4", "0"]
    json.dumps(data)


# ---------------------------------------------------------------------------
# catalog


def test_catalog_contents():
    names = [e.name for e in load_catalog()]
    assert names == ["C1", "C2", "C3", "V4", "C4", "S3", "C6", "S3-kummer"]


@pytest.mark.parametrize("entry", load_catalog(), ids=lambda e: e.name)
def test_catalog_entry_self_check(entry):
    verdict = catalog_self_check(entry)
    assert verdict.passed
    assert set(verdict.subtests) == {"automorphisms", "irreducibility", "group", "regularity"}
    assert len(entry.field.automorphisms) == entry.group.order


def test_check_catalog_rows():
    rows = check_catalog()
    assert all(r["passed"] for r in rows) and len(rows) == 8


def test_catalog_miss():
    with pytest.raises(CatalogMiss):
        find_entry(standard_group("C7"))
    with pytest.raises(CatalogMiss):
        get_entry("A5")
    entry, iso = find_entry(standard_group("S3"), constant_degree=2)
    assert entry.name == "S3-kummer" and iso.is_isomorphism()


def test_tampered_entry_fails_automorphisms():
    data = get_entry("C2").to_json()
    data["automorphisms"][1] = {"X": "X + 1"}
    bad = RealizationEntry.from_json(data)
    with pytest.raises(CheckFailed) as info:
        catalog_self_check(bad)
    assert info.value.subtest == "automorphisms"
    rows = check_catalog([bad])
    assert rows[0]["passed"] is False and rows[0]["failed_subtest"] == "automorphisms"


def test_mislabelled_group_fails():
    data = get_entry("C4").to_json()
    data["standard_name"] = "V4"
    with pytest.raises(CheckFailed) as info:
        catalog_self_check(RealizationEntry.from_json(data))
    assert info.value.subtest == "automorphisms"


@pytest.mark.parametrize("entry", load_catalog(), ids=lambda e: e.name)
def test_catalog_json_round_trip(entry):
    data = json.loads(json.dumps(entry.to_json()))
    again = RealizationEntry.from_json(data)
    assert again.to_json() == entry.to_json()


# ---------------------------------------------------------------------------
# killed tower


@pytest.mark.parametrize("name", ["C1", "C2", "C3", "V4", "S3"])
def test_kill_automorphisms_degrees(name):
    entry = get_entry(name)
    tower = kill_automorphisms(entry)
    ledger = tower.degree_ledger()
    n = entry.group.order
    assert ledger["E_over_QZT"] == 3 * n == ledger["expected_E_over_QZT"]
    assert ledger["Ehat_over_QZT"] == 6 * n == ledger["expected_Ehat_over_QZT"]
    assert ledger["E_over_NT"] == 3
    json.dumps(tower.to_json())


def test_kill_automorphisms_other_y():
    tower = kill_automorphisms(get_entry("C2"), y=5)
    assert tower.degree == 6 and tower.gadget.y == 5
