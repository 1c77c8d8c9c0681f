"""Embedding problems, their solutions, and the fiber-product reduction.

An embedding problem is an epimorphism alpha: G -> Aut(L/k).  A solution is
a field E containing L with an isomorphism beta: Aut(E/k) -> G such that
alpha o beta is restriction to L.  Certificates carry every table needed to
re-check that statement from scratch.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from flint import fmpq_poly

from .algebra.factor import DEFAULT_FACTOR_CAP
from .algebra.numberfield import (
    OVERRIDE_DEGREE_CAP,
    KPoly,
    NFElem,
    NumberField,
    factor_over_number_field,
)
from .algebra.poly import ExactPoly, as_poly
from .errors import (
    AutfieldError,
    CompatibilityFailure,
    NotAHomomorphism,
    NotEmbedded,
    NotEpimorphism,
    NotGalois,
    NotIrreducibleDefiningPoly,
    NotLinearlyDisjoint,
    PresentationIncomplete,
    UpstreamUnverified,
)
from .fields import (
    AutGroup,
    Embedding,
    automorphism_group,
    galois_closure,
    restriction_map,
)
from .groups import (
    FiberProduct,
    FiniteGroup,
    GroupHom,
    SearchLog,
    Subgroup,
    build_delta,
    fiber_product,
    find_lift,
    find_section,
    kernel_of_first_projection,
)

CAP = OVERRIDE_DEGREE_CAP


# ---------------------------------------------------------------------------
# problems


@dataclass
class EmbeddingProblem:
    """alpha: G -> Aut(L/base); base is Q, a number field M, or Q(T)."""

    G: FiniteGroup
    L: NumberField
    aut: AutGroup
    alpha: GroupHom
    base: str = "Q"

    def __post_init__(self):
        if self.alpha.source.table != self.G.table or self.alpha.target.table != self.aut.group.table:
            raise PresentationIncomplete("alpha must map G to the automorphism group of L")
        if not self.alpha.is_surjective():
            raise NotEpimorphism("alpha is not surjective")

    @classmethod
    def build(cls, G: FiniteGroup, L: NumberField | None = None, alpha_images: Sequence[int] | None = None) -> "EmbeddingProblem":
        L = L if L is not None else NumberField.rationals()
        aut = automorphism_group(L, cap=max(CAP, L.degree))
        if alpha_images is None:
            if aut.order != 1:
                raise PresentationIncomplete("alpha is required when Aut(L/k) is nontrivial")
            alpha = GroupHom.trivial(G, aut.group)
        else:
            alpha = GroupHom(G, aut.group, alpha_images)
        return cls(G, L, aut, alpha)

    @property
    def is_galois(self) -> bool:
        return self.aut.order == self.L.degree

    def to_json(self):
        return {
            "base": self.base,
            "G": self.G.to_json(),
            "L": self.L.to_json(),
            "aut_L": self.aut.to_json(),
            "alpha": self.alpha.to_json(),
        }

    @classmethod
    def from_json(cls, data) -> "EmbeddingProblem":
        try:
            G = FiniteGroup.from_json(data["G"])
            L = NumberField.from_json(data["L"])
            aut = automorphism_group(L, cap=max(CAP, L.degree))
            if aut.to_json()["action"] != data["aut_L"]["action"]:
                raise PresentationIncomplete("stored Aut(L/k) does not match the recomputed group")
            alpha = GroupHom(G, aut.group, data["alpha"])
        except KeyError as exc:
            raise PresentationIncomplete(f"missing field {exc}") from None
        return cls(G, L, aut, alpha, data.get("base", "Q"))


def is_split(ep: EmbeddingProblem, log: SearchLog | None = None) -> GroupHom | None:
    return find_section(ep.alpha, log)


@dataclass
class BaseChange:
    problem: EmbeddingProblem
    restriction: object  # RestrictionMap or the literal "identity"
    note: str

    def to_json(self):
        out = {"problem": self.problem.to_json(), "note": self.note}
        if hasattr(self.restriction, "to_json"):
            out["restriction"] = self.restriction.to_json()
        return out


def base_change(ep: EmbeddingProblem, M: NumberField | str = "Q(T)") -> BaseChange:
    """alpha_M = res^{-1} o alpha for M = Q(T) or a number field disjoint from Lhat."""
    if isinstance(M, str):
        # Aut(L(T)/Q(T)) -> Aut(L/Q) is an isomorphism; the tables coincide
        new = EmbeddingProblem(ep.G, ep.L, ep.aut, ep.alpha, base=M)
        return BaseChange(new, "identity", f"restriction Aut(L{M[1:]}/{M}) -> Aut(L/Q) is the identity on tables")
    if ep.L.is_rational():
        new = EmbeddingProblem(ep.G, M, automorphism_group(M, over=M, cap=max(CAP, M.degree)), GroupHom.trivial(ep.G, FiniteGroup([[0]])), base=repr(M))
        return BaseChange(new, "identity", "L = k")
    Lhat, _ = galois_closure(ep.L, cap=CAP)
    label = "l"
    while label in M.gens:
        label += "l"
    try:
        M.extend(ExactPoly.from_fmpq_poly(Lhat.minpoly), label + "hat", cap=CAP * 4)
    except NotIrreducibleDefiningPoly:
        raise NotLinearlyDisjoint("M is not linearly disjoint from the Galois closure of L") from None
    LM = M.extend(ExactPoly.from_fmpq_poly(ep.L.minpoly), label, cap=CAP)
    autLM = automorphism_group(LM, over=M, cap=max(CAP, LM.degree))
    emb = Embedding(ep.L, LM, LM.gen(label))
    res = restriction_map(autLM, ep.aut, emb)
    if not res.partial.is_total() or not res.partial.as_hom().is_isomorphism():
        raise NotLinearlyDisjoint("restriction Aut(LM/M) -> Aut(L/k) is not an isomorphism")
    inv = res.partial.as_hom().inverse()
    alpha_M = inv.after(ep.alpha)
    new = EmbeddingProblem(ep.G, LM, autLM, alpha_M, base=repr(M))
    return BaseChange(new, res, "restriction is a total isomorphism")


# ---------------------------------------------------------------------------
# reduction to a split problem


@dataclass
class ReductionPackage:
    problem: EmbeddingProblem
    L_prime: NumberField
    gal_L_prime: AutGroup
    embedding: Embedding  # L -> L'
    rho: GroupHom  # res: Gal(L'/k) -> Aut(L/k)
    gamma_prime: GroupHom
    fiber: FiberProduct
    delta: GroupHom
    checks: dict

    @property
    def G_prime(self) -> FiniteGroup:
        return self.fiber.group

    @property
    def alpha_prime(self) -> GroupHom:
        return self.fiber.second

    @property
    def beta_proj(self) -> GroupHom:
        return self.fiber.first

    def to_json(self):
        return {
            "L_prime": self.L_prime.to_json(),
            "gal_L_prime": self.gal_L_prime.to_json(),
            "rho": self.rho.to_json(),
            "gamma_prime": self.gamma_prime.to_json(),
            "G_prime": {"order": self.G_prime.order, "table": [list(r) for r in self.G_prime.table], "pairs": [list(p) for p in self.fiber.pairs]},
            "alpha_prime": self.alpha_prime.to_json(),
            "beta_proj": self.beta_proj.to_json(),
            "delta": self.delta.to_json(),
            "checks": self.checks,
        }


def _embed_into(L: NumberField, F: NumberField, embedding: Embedding | None) -> Embedding:
    if embedding is not None:
        return embedding
    if L.is_rational():
        return Embedding(L, F, F.element(0))
    if any(f is L for f in F.tower()):
        return Embedding.inclusion(L, F)
    fl = factor_over_number_field(KPoly.from_fmpq_poly(F, L.minpoly), F)
    roots = [p for p, _ in fl.factors if p.degree() == 1]
    if not roots:
        raise NotEmbedded("L does not embed in L'")
    return Embedding(L, F, NFElem(F, -roots[0].coeffs[0]))


def reduce_via_fiber_product(
    ep: EmbeddingProblem,
    L_prime: NumberField,
    gamma_prime: GroupHom | Sequence[int] | None = None,
    embedding: Embedding | None = None,
) -> ReductionPackage:
    """The split problem alpha': G' -> Gal(L'/k) dominating alpha."""
    gal = automorphism_group(L_prime, cap=max(CAP, L_prime.degree))
    if gal.order != L_prime.degree:
        raise NotGalois(f"L' is not Galois: |Aut| = {gal.order}, degree {L_prime.degree}")
    emb = _embed_into(ep.L, L_prime, embedding)
    res = restriction_map(gal, ep.aut, emb)
    if not res.partial.is_total():
        raise NotGalois("L is not stable under Gal(L'/k)")
    rho = res.partial.as_hom()
    if gamma_prime is None:
        gp = find_lift(rho, ep.alpha)
        if gp is None:
            raise CompatibilityFailure("no gamma' with alpha o gamma' = res exists")
    else:
        gp = gamma_prime if isinstance(gamma_prime, GroupHom) else GroupHom(gal.group, ep.G, gamma_prime)
        bad = [s for s in range(gal.order) if ep.alpha(gp(s)) != rho(s)]
        if bad:
            raise CompatibilityFailure(f"alpha o gamma' differs from res at {bad}")
    fp = fiber_product(ep.alpha, rho)
    delta = build_delta(gp, fp)
    alpha_p = fp.second
    if not alpha_p.is_surjective():
        raise CompatibilityFailure("alpha' is not surjective")
    fixing_L = gal.fixed_subgroup([emb.theta_image]) if not ep.L.is_rational() else gal.group.whole()
    ker = kernel_of_first_projection(fp)
    ker_expected = {fp.index(0, s) for s in fixing_L.sorted()}
    checks = {
        "order_formula": fp.group.order * ep.L.degree == ep.G.order * L_prime.degree if rho.is_surjective() else None,
        "alpha_prime_surjective": alpha_p.is_surjective(),
        "alpha_prime_delta_identity": all(alpha_p(delta(s)) == s for s in range(gal.order)),
        "kernel_first_projection": set(ker.sorted()) == ker_expected,
    }
    if not all(v for v in checks.values() if v is not None):
        raise CompatibilityFailure(f"reduction invariants fail: {checks}")
    return ReductionPackage(ep, L_prime, gal, emb, rho, gp, fp, delta, checks)


# ---------------------------------------------------------------------------
# solutions over a number field


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self):
        return {"check": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class VerificationReport:
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed_check(self) -> str | None:
        for c in self.checks:
            if not c.passed:
                return c.name
        return None

    def to_json(self):
        return {"ok": self.ok, "failed_check": self.failed_check, "checks": [c.to_json() for c in self.checks]}


@dataclass
class SolutionCertificate:
    """A claimed solution (E, beta) of an embedding problem over Q.

    ``automorphisms`` lists the claimed elements of Aut(E/k) as images of the
    primitive element; ``beta`` maps their indices to G.
    """

    problem: EmbeddingProblem
    E: NumberField
    embedding: Embedding
    automorphisms: list
    beta: GroupHom
    regularity: dict = field(default_factory=lambda: {"status": "not applicable"})
    function_field: dict | None = None
    transfer: dict | None = None

    def claimed_group(self) -> AutGroup:
        return AutGroup(self.E, self.automorphisms)

    def to_json(self):
        out = {
            "problem": self.problem.to_json(),
            "E": self.E.to_json(),
            "embedding_L_to_E": self.embedding.to_json(),
            "automorphisms": [_action(self.E, r) for r in self.automorphisms],
            "beta": list(self.beta.images),
            "regularity": self.regularity,
        }
        if self.function_field is not None:
            out["function_field"] = self.function_field
        if self.transfer is not None:
            out["transfer"] = self.transfer
        return out

    @classmethod
    def from_json(cls, data) -> "SolutionCertificate":
        try:
            problem = EmbeddingProblem.from_json(data["problem"])
            E = NumberField.from_json(data["E"])
            emb_img = E.element(as_poly(data["embedding_L_to_E"]["theta_image"]))
            emb = _unchecked_embedding(problem.L, E, emb_img)
            auts = [_from_action(E, a) for a in data["automorphisms"]]
            source = _loose_group(E, auts)
            beta = GroupHom(source, problem.G, data["beta"], check=False)
        except KeyError as exc:
            raise PresentationIncomplete(f"missing field {exc}") from None
        return cls(problem, E, emb, auts, beta, data.get("regularity", {}), data.get("function_field"), data.get("transfer"))


def _action(E: NumberField, image: fmpq_poly) -> dict:
    return {g: str(E.express(E.gen(g).apply(image))) for g in E.generator_labels} if E.steps else {}


def _from_action(E: NumberField, action: dict) -> fmpq_poly:
    if not E.steps:
        return fmpq_poly([0, 1])
    from .fields import _eval_in

    if set(action) != set(E.generator_labels):
        return None  # does not act on this presentation; rejected in check (c)
    imgs = {g: E.element(as_poly(action[g])) for g in E.generator_labels}
    return _eval_in(E, E.prim_expr, imgs).poly


class _Unchecked(Embedding):
    def __init__(self, source, target, theta_image):  # noqa: D401 - verification happens in check (a)
        self.source = source
        self.target = target
        self.theta_image = target.element(theta_image)


def _unchecked_embedding(L, E, img) -> Embedding:
    return _Unchecked(L, E, img)


class _LooseGroup:
    """Stand-in source for a claimed group that may not be closed."""

    def __init__(self, order: int):
        self.order = order
        self.table = None


def _loose_group(E: NumberField, auts: list):
    if any(a is None for a in auts):
        return _LooseGroup(len(auts))
    try:
        return AutGroup(E, auts).group
    except AutfieldError:
        return _LooseGroup(len(auts))


def count_roots_oracle(E: NumberField) -> int:
    """Number of roots of E's absolute minimal polynomial lying in E."""
    if E.is_rational():
        return 1
    f = KPoly.from_fmpq_poly(E, E.minpoly)
    fl = factor_over_number_field(f, E, cap=max(DEFAULT_FACTOR_CAP, E.degree ** 2))
    return sum(1 for p, _ in fl.factors if p.degree() == 1)


def verify_solution(cert: SolutionCertificate, regularity_check=None) -> VerificationReport:
    """Checks (a)-(e) in order; each recomputes its facts from the presentation.

    (a) L embeds in E; (b) every automorphism of E stabilises L; (c) beta is a
    bijective homomorphism from the recomputed Aut(E/k); (d) alpha o beta =
    res; (e) regularity bookkeeping.  ``regularity_check`` (optional) is a
    callable re-running the proxy for function-field certificates.
    """
    ep, E = cert.problem, cert.E
    checks = []

    # (a)
    try:
        emb = Embedding(ep.L, E, cert.embedding.theta_image)
        checks.append(CheckResult("a", True, {"theta_L_image": str(E.express(cert.embedding.theta_image))}))
    except AutfieldError as exc:
        checks.append(CheckResult("a", False, {"error": str(exc)}))
        return VerificationReport(checks)

    # (b)
    real = automorphism_group(E, cap=max(CAP, E.degree))
    res = restriction_map(real, ep.aut, emb)
    total = res.partial.is_total()
    checks.append(CheckResult("b", total, {"aut_E_order": real.order, "domain_order": res.domain.order}))
    if not total:
        return VerificationReport(checks)

    # (c)
    detail = {"aut_E_order": real.order, "G_order": ep.G.order}
    ok = True
    claimed = [p % E.minpoly for p in cert.automorphisms if p is not None]
    if len(claimed) != len(cert.automorphisms):
        ok = False
        detail["error"] = "claimed automorphisms do not act on the generators of E"
    elif sorted(map(str, claimed)) != sorted(map(str, real.images)) or len(claimed) != real.order:
        ok = False
        detail["error"] = "claimed automorphisms differ from the recomputed Aut(E/k)"
    roots = count_roots_oracle(E) if ok else None
    detail["oracle_root_count"] = roots
    if ok and roots != real.order:
        ok = False
        detail["error"] = "root-count oracle disagrees with the automorphism search"
    if ok:
        claimed_group = AutGroup(E, claimed)
        try:
            beta = GroupHom(claimed_group.group, ep.G, cert.beta.images)
            if not beta.is_isomorphism():
                ok = False
                detail["error"] = "beta is not bijective"
        except NotAHomomorphism as exc:
            ok = False
            detail["error"] = f"beta is not a homomorphism: {exc}"
    checks.append(CheckResult("c", ok, detail))
    if not ok:
        return VerificationReport(checks)

    # (d)
    res_claimed = restriction_map(claimed_group, ep.aut, emb).partial.as_hom()
    bad = [i for i in range(claimed_group.order) if ep.alpha(beta(i)) != res_claimed(i)]
    checks.append(CheckResult("d", not bad, {"mismatches": bad, "res": list(res_claimed.images)}))
    if bad:
        return VerificationReport(checks)

    # (e)
    reg = dict(cert.regularity or {})
    if regularity_check is not None and cert.function_field is not None:
        verdict = regularity_check(cert)
        passed = verdict.ok
        checks.append(CheckResult("e", passed, {"status": "certified" if passed else "proxy check failed", "proxy": verdict.to_json()}))
    else:
        status = reg.get("status", "not applicable")
        checks.append(CheckResult("e", status != "proxy check failed", {"status": status}))
    return VerificationReport(checks)


# ---------------------------------------------------------------------------
# solutions over Q(Z): the split problem and the push-forward


@dataclass
class FunctionFieldSolution:
    """beta': Gal(N/Q(Z)) -> G' with alpha' o beta' = restriction to the constants."""

    N: object  # GaloisFunctionField
    alpha: GroupHom  # G' -> Gal(L'/k)
    beta: GroupHom  # Gal(N) -> G'
    constant_res: GroupHom  # Gal(N) -> Gal(L'/k)

    def verify(self) -> bool:
        self.N.verify()
        return self.beta.is_isomorphism() and all(
            self.alpha(self.beta(g)) == self.constant_res(g) for g in range(self.beta.source.order)
        )


@dataclass
class PushedSolution:
    N: object
    kernel: Subgroup
    degree: int
    epsilon: GroupHom | None
    materialized: bool
    checks: dict

    def to_json(self):
        return {
            "kernel": self.kernel.sorted(),
            "degree_over_QZ": self.degree,
            "epsilon": self.epsilon.to_json() if self.epsilon is not None else None,
            "materialized": self.materialized,
            "checks": self.checks,
        }


def push_solution(pkg: ReductionPackage, sol: FunctionFieldSolution, res_to_L: GroupHom | None = None) -> PushedSolution:
    """E' = fixed field of ker(beta_proj o beta') with epsilon: Gal(E'/k(Z)) -> G.

    The field is materialised when the kernel is trivial (E' = N); otherwise
    the degree and the group data are returned.
    """
    try:
        ok = sol.verify()
    except AutfieldError as exc:
        raise UpstreamUnverified(f"upstream solution does not verify: {exc}") from exc
    if not ok:
        raise UpstreamUnverified("upstream solution does not verify")
    composite = pkg.beta_proj.after(sol.beta)
    K = composite.kernel()
    degree = sol.beta.source.order // K.order
    checks = {
        "restriction_compatible": all(pkg.problem.alpha(composite(g)) == pkg.rho(sol.constant_res(g)) for g in range(composite.source.order)),
        "surjective": composite.is_surjective(),
    }
    if not all(checks.values()):
        raise UpstreamUnverified(f"push-forward identities fail: {checks}")
    if K.order == 1:
        return PushedSolution(sol.N, K, degree, composite, True, checks)
    return PushedSolution(sol.N, K, degree, None, False, checks)
