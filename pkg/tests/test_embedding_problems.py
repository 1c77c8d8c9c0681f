"""Embedding problems, base change, fiber-product reduction and verification."""
import json

import pytest

from autfield.algebra.numberfield import NumberField
from autfield.embedding import (
    EmbeddingProblem,
    FunctionFieldSolution,
    SolutionCertificate,
    base_change,
    is_split,
    push_solution,
    reduce_via_fiber_product,
    verify_solution,
)
from autfield.errors import (
    CompatibilityFailure,
    NotEpimorphism,
    NotGalois,
    NotLinearlyDisjoint,
    PresentationIncomplete,
    UpstreamUnverified,
)
from autfield.fields import Embedding, automorphism_group
from autfield.groups import GroupHom, all_homomorphisms, is_isomorphic, standard_group

S3 = standard_group("S3")


def sign_images():
    C2 = standard_group("C2")
    return next(h for h in all_homomorphisms(S3, C2) if h.is_surjective()).images


def quadratic(d, label="s"):
    return NumberField.from_poly(f"X^2 - ({d})", label)


def certificate_for(G, E, L=None, beta_images=None, alpha=None):
    ep = EmbeddingProblem.build(G, L, alpha)
    aut = automorphism_group(E)
    emb = Embedding(ep.L, E, E.element(0)) if ep.L.is_rational() else Embedding.inclusion(ep.L, E)
    beta_images = beta_images if beta_images is not None else is_isomorphic(aut.group, G).images
    beta = GroupHom(aut.group, G, beta_images, check=False)
    return SolutionCertificate(ep, E, emb, list(aut.images), beta)


# ---------------------------------------------------------------------------
# problems


def test_build_requires_alpha_for_nontrivial_L():
    with pytest.raises(PresentationIncomplete):
        EmbeddingProblem.build(standard_group("C2"), quadratic(5))


def test_build_rejects_non_epimorphism():
    with pytest.raises(NotEpimorphism):
        EmbeddingProblem.build(standard_group("C2"), quadratic(5), [0, 0])


def test_galois_flag_and_json_round_trip():
    ep = EmbeddingProblem.build(S3, quadratic(-3), sign_images())
    assert ep.is_galois
    again = EmbeddingProblem.from_json(json.loads(json.dumps(ep.to_json())))
    assert again.alpha.images == ep.alpha.images


def test_tampered_aut_table_rejected():
    data = EmbeddingProblem.build(S3, quadratic(-3), sign_images()).to_json()
    data["aut_L"]["action"] = list(reversed(data["aut_L"]["action"]))
    with pytest.raises(PresentationIncomplete):
        EmbeddingProblem.from_json(data)


def test_split_and_non_split():
    assert is_split(EmbeddingProblem.build(S3, quadratic(2), sign_images())) is not None
    C4 = standard_group("C4")
    assert is_split(EmbeddingProblem.build(C4, quadratic(2), [0, 1, 0, 1])) is None


# ---------------------------------------------------------------------------
# base change


def test_base_change_to_rational_function_field():
    ep = EmbeddingProblem.build(S3, quadratic(2), sign_images())
    bc = base_change(ep)
    assert bc.problem.base == "Q(T)" and bc.restriction == "identity"


def test_base_change_disjoint_number_field():
    ep = EmbeddingProblem.build(S3, quadratic(2), sign_images())
    bc = base_change(ep, quadratic(3, "m"))
    assert bc.problem.L.degree == 4
    assert bc.problem.alpha.is_surjective()


def test_base_change_not_disjoint():
    L = NumberField.from_poly("X^3 - 2", "c")
    # Aut(Q(2^(1/3))) is trivial, so take G = C1 and the trivial alpha
    ep = EmbeddingProblem.build(standard_group("C1"), L)
    with pytest.raises(NotLinearlyDisjoint):
        base_change(ep, NumberField.from_poly("X^2 + X + 1", "u"))


# ---------------------------------------------------------------------------
# reduction


def test_reduction_to_split_problem():
    ep = EmbeddingProblem.build(S3, quadratic(2), sign_images())
    pkg = reduce_via_fiber_product(ep, quadratic(2, "l"))
    assert pkg.G_prime.order == 6
    assert is_isomorphic(pkg.G_prime, S3) is not None
    assert all(v for v in pkg.checks.values() if v is not None)
    json.dumps(pkg.to_json())


def test_reduction_with_bigger_L_prime():
    ep = EmbeddingProblem.build(S3, quadratic(2), sign_images())
    Lp = NumberField.from_steps([("a", "X^2 - 2"), ("b", "X^2 - 3")])
    pkg = reduce_via_fiber_product(ep, Lp, embedding=Embedding(ep.L, Lp, Lp.gen("a")))
    assert pkg.G_prime.order == 12
    assert pkg.checks["order_formula"]
    assert pkg.checks["kernel_first_projection"]


def test_reduction_requires_galois_L_prime():
    ep = EmbeddingProblem.build(standard_group("C1"), NumberField.rationals())
    with pytest.raises(NotGalois):
        reduce_via_fiber_product(ep, NumberField.from_poly("X^3 - 2", "c"))


def test_reduction_rejects_bad_gamma():
    ep = EmbeddingProblem.build(S3, quadratic(2), sign_images())
    with pytest.raises(CompatibilityFailure):
        reduce_via_fiber_product(ep, quadratic(2, "l"), gamma_prime=[0, 0])


# ---------------------------------------------------------------------------
# verification


def test_quadratic_field_solves_C2():
    cert = certificate_for(standard_group("C2"), quadratic(2, "a"))
    report = verify_solution(cert)
    assert report.ok
    assert [c.name for c in report.checks] == ["a", "b", "c", "d", "e"]


def test_cube_root_field_does_not_solve_C3():
    E = NumberField.from_poly("X^3 - 2", "c")
    ep = EmbeddingProblem.build(standard_group("C3"))
    aut = automorphism_group(E)
    fake = [aut.images[0]] * 3
    beta = GroupHom(aut.group, standard_group("C3"), [0], check=False)
    cert = SolutionCertificate(ep, E, Embedding(ep.L, E, E.element(0)), fake, beta)
    report = verify_solution(cert)
    assert report.failed_check == "c"


def test_non_homomorphism_beta_fails_c():
    G = standard_group("C4")
    E = NumberField.from_poly("X^4 + X^3 + X^2 + X + 1", "z")
    base = certificate_for(G, E)
    assert verify_solution(base).ok
    images = list(base.beta.images)
    images[1], images[2] = images[2], images[1]
    cert = certificate_for(G, E, beta_images=images)
    report = verify_solution(cert)
    assert report.failed_check == "c"
    assert "homomorphism" in report.checks[-1].detail["error"] or "bijective" in report.checks[-1].detail["error"]


def test_wrong_commutation_fails_d():
    G = standard_group("V4")
    E = NumberField.from_steps([("a", "X^2 - 2"), ("b", "X^2 - 3")])
    aut = automorphism_group(E)
    iso = is_isomorphic(G, aut.group)
    ep = EmbeddingProblem.build(G, E, iso.images)
    good = iso.inverse()
    swap = next(h for h in all_homomorphisms(G, G) if h.is_isomorphism() and h.images != tuple(range(4)))
    cert = SolutionCertificate(ep, E, Embedding.identity(E), list(aut.images), swap.after(good))
    assert verify_solution(SolutionCertificate(ep, E, Embedding.identity(E), list(aut.images), good)).ok
    assert verify_solution(cert).failed_check == "d"


def test_certificate_json_round_trip():
    cert = certificate_for(standard_group("C2"), quadratic(2, "a"))
    data = json.loads(json.dumps(cert.to_json()))
    again = SolutionCertificate.from_json(data)
    assert verify_solution(again).ok
    assert again.to_json() == cert.to_json()


def test_missing_field_is_presentation_incomplete():
    data = certificate_for(standard_group("C2"), quadratic(2, "a")).to_json()
    del data["E"]
    with pytest.raises(PresentationIncomplete):
        SolutionCertificate.from_json(data)


# ---------------------------------------------------------------------------
# push-forward


def test_push_solution_rejects_unverified_upstream():
    from autfield.catalog import get_entry

    ep = EmbeddingProblem.build(S3, quadratic(-3), sign_images())
    pkg = reduce_via_fiber_product(ep, quadratic(-3, "l"))
    entry = get_entry("S3")  # constant field Q: restriction to L is trivial
    gal = entry.field.galois_group()
    beta = is_isomorphic(gal, pkg.G_prime)
    trivial = GroupHom.trivial(gal, pkg.gal_L_prime.group)
    sol = FunctionFieldSolution(entry.field, pkg.alpha_prime, beta, trivial)
    with pytest.raises(UpstreamUnverified):
        push_solution(pkg, sol)
