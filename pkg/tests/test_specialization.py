"""Hilbert search, specialisation reports, the regularity proxy and transfer
of function-field solutions to number fields."""
import json

import pytest
import sympy as sp

from autfield.catalog import load_catalog
from autfield.embedding import EmbeddingProblem, verify_solution
from autfield.errors import BudgetExhausted, DegreeDrop
from autfield.groups import standard_group
from autfield.pipeline import _direct
from autfield.specialization import (
    GeometricSolution,
    hilbert_search,
    regularity_spot_check,
    specialize,
    specialize_solution,
)
from autfield.tower import kill_automorphisms

X = sp.Symbol("X")


def geometric_solution(name):
    ep = EmbeddingProblem.build(standard_group(name))
    entry, beta, _ = _direct(ep, load_catalog())
    return GeometricSolution(ep, kill_automorphisms(entry), beta, {})


# ---------------------------------------------------------------------------
# Hilbert search


def test_hilbert_search_first_point_in_canonical_order():
    point, rejections = hilbert_search(["X^2 - T"])
    assert point.values == (-1,)
    assert [r.point for r in rejections] == [(0,), (1,)]
    assert [r.reason for r in rejections] == ["inseparable", "reducible"]


def test_hilbert_search_matches_sympy_oracle():
    poly = "X^3 + T*X + T"
    point, _ = hilbert_search([poly])
    t = point.values[0]
    assert sp.Poly(X ** 3 + t * X + t, X).is_irreducible
    for s in [0, 1, -1, 2, -2]:
        if s == t:
            break
        p = sp.Poly(X ** 3 + s * X + s, X)
        assert not p.is_irreducible or sp.discriminant(p) == 0


def test_hilbert_search_two_parameters_and_guards():
    point, _ = hilbert_search(["X^2 - Z*T"], variables=("Z", "T"), guards=["Z + 1"])
    assert point.as_dict() != {"Z": -1, "T": -1}
    z, t = point.values
    assert z != -1 and not sp.sqrt(z * t).is_rational


def test_budget_exhausted():
    with pytest.raises(BudgetExhausted) as info:
        hilbert_search(["X^2 - T^2"], budget=2)
    assert len(info.value.rejections) == 5


# ---------------------------------------------------------------------------
# specialize


def test_specialize_accepted():
    rep = specialize("X^2 - T", 2)
    assert rep.ok
    assert rep.E_t.degree == 2 and rep.Ehat_t.degree == 2


def test_specialize_degraded_report():
    rep = specialize("X^2 - T", 4)
    assert not rep.accepted and rep.reason == "reducible"
    assert len(rep.factorization) == 2
    json.dumps(rep.to_json())


def test_specialize_cubic_closure():
    rep = specialize("X^3 + T*X + T", 1)
    assert rep.ok
    assert rep.E_t.degree == 3
    assert rep.Ehat_t.degree == 6 == rep.generic_closure_degree
    assert rep.aut_order == 6
    # oracle: discriminant -31 is not a square, so the closure has degree 6
    assert sp.discriminant(X ** 3 + X + 1, X) == -31


def test_specialize_non_monic():
    rep = specialize("T*X^2 - 3", {"T": 2})
    assert rep.ok and rep.E_t.degree == 2


# ---------------------------------------------------------------------------
# regularity proxy


def test_regularity_proxy_passes_for_regular_extension():
    verdict = regularity_spot_check("X^2 - Z")
    assert verdict.ok
    assert all(r["status"] == "irreducible" for r in verdict.results)


def test_regularity_proxy_detects_constants():
    # X^2 - 2 Z^2 has the constant sqrt 2 in its splitting field
    verdict = regularity_spot_check("X^2 - 2*Z^2")
    assert not verdict.ok
    bad = [r["field"] for r in verdict.results if r["status"] == "factors"]
    assert bad == ["2"]


def test_regularity_proxy_skips_known_constants():
    from autfield.algebra.numberfield import NumberField

    K = NumberField.from_poly("X^2 - 2", "s")
    verdict = regularity_spot_check("X^2 - 2*Z^2", known_constants=K)
    assert verdict.ok
    assert any(r["status"] == "contained in constant field" for r in verdict.results)


# ---------------------------------------------------------------------------
# transfer of solutions


@pytest.mark.parametrize("name,degree", [("C1", 3), ("C2", 6)])
def test_specialize_solution(name, degree):
    cert = specialize_solution(geometric_solution(name))
    assert cert.E.degree == degree
    assert verify_solution(cert).ok
    assert cert.regularity["status"] == "certified"
    # non-normality: fewer roots of the minimal polynomial than the degree
    aut_order = len(cert.automorphisms)
    assert aut_order == standard_group(name).order < cert.E.degree


def test_specialize_solution_c2_point():
    cert = specialize_solution(geometric_solution("C2"))
    assert cert.function_field["point"] == {"Z": "-1", "T": "1"}
    assert cert.transfer["h_t"] == [0, 1]


def test_forced_rejected_point():
    with pytest.raises(DegreeDrop):
        specialize_solution(geometric_solution("C2"), point=(1, 1))


def test_transfer_is_deterministic():
    a = specialize_solution(geometric_solution("C2")).to_json()
    b = specialize_solution(geometric_solution("C2")).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_geometric_solution_verify():
    gsol = geometric_solution("C3")
    info = gsol.verify()
    assert info["beta"] == list(gsol.beta.images)
    assert gsol.tower.degree == 9
