"""End-to-end realisation of a prescribed automorphism group over Q.

Stages: problem -> route -> (reduction) -> catalog -> tower -> geometric
solution -> specialisation -> verification -> non-normality.  Each stage
failure is re-raised as StageFailure carrying the stage id; CatalogMiss and
BudgetExhausted propagate unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra.numberfield import KPoly, NumberField, roots_in_field
from .catalog import RealizationEntry, find_entry, load_catalog
from .embedding import (
    EmbeddingProblem,
    FunctionFieldSolution,
    SolutionCertificate,
    count_roots_oracle,
    push_solution,
    reduce_via_fiber_product,
    verify_solution,
)
from .errors import AutfieldError, BudgetExhausted, CatalogMiss, StageFailure
from .fields import Embedding
from .groups import FiniteGroup, GroupHom, find_lift, find_section, is_isomorphic
from .specialization import (
    DEFAULT_BATTERY,
    DEFAULT_BUDGET,
    GeometricSolution,
    function_field_regularity,
    specialize_solution,
)
from .tower import kill_automorphisms

ROUTES = ("direct", "galois-degenerate", "split-reduction")


@dataclass
class PipelineRequest:
    G: FiniteGroup
    L: NumberField | None = None
    alpha: Sequence[int] | None = None
    y: object = 0
    budget: int = DEFAULT_BUDGET
    battery: Sequence[str] = DEFAULT_BATTERY
    point: tuple | None = None
    group_spec: str = ""

    def to_json(self):
        return {
            "group": self.group_spec or self.G.name,
            "G": self.G.to_json(),
            "L": (self.L or NumberField.rationals()).to_json(),
            "alpha": list(self.alpha) if self.alpha is not None else None,
            "y": str(self.y),
            "budget": self.budget,
            "battery": list(self.battery),
            "point": [str(v) for v in self.point] if self.point is not None else None,
        }


@dataclass
class PipelineCertificate:
    request: PipelineRequest
    route: str
    solution: SolutionCertificate
    verification: dict
    stages: list = field(default_factory=list)
    catalog_entry: str | None = None
    reduction: dict | None = None
    killed_tower: dict | None = None
    non_normality: dict | None = None
    label: str = ""

    @property
    def ok(self) -> bool:
        return self.verification["ok"] and all(s["verdict"] == "pass" for s in self.stages)

    def to_json(self):
        out = {
            "format": "autfield-certificate",
            "version": 1,
            "request": self.request.to_json(),
            "route": self.route,
            "label": self.label,
            "stages": self.stages,
            "catalog_entry": self.catalog_entry,
            "reduction": self.reduction,
            "killed_tower": self.killed_tower,
            "solution": self.solution.to_json(),
            "verification": self.verification,
            "non_normality": self.non_normality,
        }
        return out


class _Stages:
    def __init__(self):
        self.log = []

    def run(self, stage: str, fn, *args, **kw):
        try:
            out = fn(*args, **kw)
        except (CatalogMiss, BudgetExhausted):
            raise
        except AutfieldError as exc:
            raise StageFailure(stage, exc) from exc
        self.log.append({"stage": stage, "verdict": "pass"})
        return out


def choose_route(ep: EmbeddingProblem) -> str:
    if ep.L.is_rational():
        return "direct"
    if ep.alpha.is_isomorphism() and ep.is_galois:
        return "galois-degenerate"
    return "split-reduction"


def _galois_solution(ep: EmbeddingProblem) -> SolutionCertificate:
    """E = L with beta = alpha^{-1}."""
    emb = Embedding.identity(ep.L)
    beta = ep.alpha.inverse()
    return SolutionCertificate(ep, ep.L, emb, list(ep.aut.images), beta, {"status": "not applicable", "note": "solution is Galois"})


def _direct(ep: EmbeddingProblem, entries) -> tuple[RealizationEntry, GeometricSolution, dict | None]:
    entry, iso = find_entry(ep.G, 1, entries)
    gal = entry.field.galois_group()
    to_entry = is_isomorphic(gal, entry.group)
    beta = iso.after(to_entry)
    return entry, beta, None


def _split(ep: EmbeddingProblem, entries):
    """L' = L with a section gamma'; the fiber product G' is then a copy of G."""
    if not ep.is_galois:
        raise CatalogMiss("the split-reduction route needs L/Q Galois")
    section = find_section(ep.alpha)
    if section is None:
        raise CatalogMiss("alpha has no section; no catalog route for non-split problems")
    for entry in entries:
        K = entry.field.constant_field
        if entry.group.order != ep.G.order or K.degree != ep.L.degree:
            continue
        roots = roots_in_field(KPoly.from_fmpq_poly(K, ep.L.minpoly), K)
        if not roots:
            continue
        emb = Embedding(ep.L, K, roots[0])
        gal = entry.field.galois_group()
        # res_N: Gal(N/Q(Z)) -> Aut(L/Q) through the constant field
        targets = {str(emb(ep.aut.apply(j, ep.L.gen())).poly): j for j in range(ep.aut.order)}
        res_N = []
        for sigma in entry.field.automorphisms:
            s = Embedding.from_generators(K, K, sigma.const_map())
            res_N.append(targets[str(s(emb.theta_image).poly)])
        pkg = reduce_via_fiber_product(ep, ep.L, section, Embedding.identity(ep.L))
        # Gal(L'/Q) is Aut(L/Q) here; its table is the one of ep.aut
        res_hom = GroupHom(gal, pkg.gal_L_prime.group, res_N)
        beta_p = find_lift(res_hom, pkg.alpha_prime, injective=True)
        if beta_p is None:
            continue
        sol = FunctionFieldSolution(entry.field, pkg.alpha_prime, beta_p, res_hom)
        pushed = push_solution(pkg, sol)
        images = {g: K.express(v) for g, v in emb.generator_images().items()}
        red = {"package": pkg.to_json(), "beta_prime": beta_p.to_json(), "pushforward": pushed.to_json(), "L_in_constants": {k: str(v) for k, v in images.items()}}
        return entry, pushed.epsilon, red, images
    raise CatalogMiss(f"no catalog entry of order {ep.G.order} whose constant field contains L")


def realize_aut(req: PipelineRequest, entries: Sequence[RealizationEntry] | None = None) -> PipelineCertificate:
    st = _Stages()
    ep = st.run("problem", EmbeddingProblem.build, req.G, req.L, req.alpha)
    route = choose_route(ep)
    st.log.append({"stage": "route", "verdict": "pass", "route": route})

    if route == "galois-degenerate":
        cert = st.run("solution", _galois_solution, ep)
        report = st.run("verification", verify_solution, cert)
        if not report.ok:
            raise StageFailure("verification", AutfieldError(f"check {report.failed_check} failed"))
        return PipelineCertificate(req, route, cert, report.to_json(), st.log, label="solution is Galois")

    entries = load_catalog() if entries is None else entries
    reduction = None
    L_images = {}
    if route == "direct":
        entry, beta, _ = _direct(ep, entries)
    else:
        entry, beta, reduction, L_images = st.run("reduction", _split, ep, entries)
    st.log.append({"stage": "catalog", "verdict": "pass", "entry": entry.name})

    ep_T = EmbeddingProblem(ep.G, ep.L, ep.aut, ep.alpha, base="Q(Z,T)")
    tower = st.run("tower", kill_automorphisms, entry, req.y, req.budget)
    gsol = GeometricSolution(ep_T, tower, beta, L_images, route)
    st.run("geometric_solution", gsol.verify)
    cert = st.run("specialization", specialize_solution, gsol, req.point, req.budget, req.battery)
    report = st.run("verification", verify_solution, cert, function_field_regularity)
    if not report.ok:
        raise StageFailure("verification", AutfieldError(f"check {report.failed_check} failed"))

    roots = count_roots_oracle(cert.E)
    non_normal = {
        "degree": cert.E.degree,
        "roots_in_F": roots,
        "aut_order": len(cert.automorphisms),
        "G_order": ep.G.order,
        "non_normal": roots < cert.E.degree and len(cert.automorphisms) == ep.G.order,
    }
    if not non_normal["non_normal"]:
        raise StageFailure("non_normality", AutfieldError(f"field is normal or |Aut| differs: {non_normal}"))
    st.log.append({"stage": "non_normality", "verdict": "pass"})
    return PipelineCertificate(
        req,
        route,
        cert,
        report.to_json(),
        st.log,
        catalog_entry=entry.name,
        reduction=reduction,
        killed_tower=tower.to_json(),
        non_normality=non_normal,
        label="non-normal solution",
    )
