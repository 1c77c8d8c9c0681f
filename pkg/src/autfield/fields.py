"""Automorphism groups, splitting fields, embeddings and restriction maps.

An automorphism of L = Q[theta]/(m) is stored as the image of theta, a
polynomial in theta.  Composition of automorphisms is polynomial
composition modulo m.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from flint import fmpq_mat, fmpq_poly

from .algebra.factor import DEFAULT_FACTOR_CAP
from .algebra.numberfield import (
    _prime,
    _reduce_coeff,
    DEFAULT_DEGREE_CAP,
    KPoly,
    NFElem,
    NumberField,
    factor_over_number_field,
)
from .algebra.poly import ExactPoly, as_poly, to_fmpq, to_fraction
from .errors import DegreeCapExceeded, InclusionNotProvided, NotEmbedded, NotGalois
from .groups import FiniteGroup, PartialHom, Subgroup, normalizer


# ---------------------------------------------------------------------------
# embeddings


class Embedding:
    """A field homomorphism source -> target, certified on the defining polynomials."""

    def __init__(self, source: NumberField, target: NumberField, theta_image: NFElem):
        self.source = source
        self.target = target
        self.theta_image = target.element(theta_image)
        if not source.is_rational():
            v = KPoly.from_fmpq_poly(target, source.minpoly).evaluate(self.theta_image)
            if not v.is_zero():
                raise NotEmbedded("image does not satisfy the minimal polynomial of the source")

    @classmethod
    def from_generators(cls, source: NumberField, target: NumberField, images: Mapping[str, object]) -> "Embedding":
        """Embedding given by images of the tower generators, checked step by step."""
        imgs = {k: target.element(v) for k, v in images.items()}
        missing = set(source.generator_labels) - set(imgs)
        if missing:
            raise NotEmbedded(f"no image for generators {sorted(missing)}")
        done: dict[str, NFElem] = {}
        for step in source.steps:
            coeffs = [_eval_in(target, c, done) for c in step.poly.coefficients("X")]
            value = KPoly(target, [c.poly for c in coeffs]).evaluate(imgs[step.generator])
            if not value.is_zero():
                raise NotEmbedded(f"image of {step.generator} is not a root of {step.poly}")
            done[step.generator] = imgs[step.generator]
        theta = _eval_in(target, source.prim_expr, done)
        return cls(source, target, theta)

    @classmethod
    def inclusion(cls, source: NumberField, target: NumberField) -> "Embedding":
        """The tower inclusion when ``source`` is a stage of ``target``'s tower."""
        if not any(f is source for f in target.tower()):
            raise InclusionNotProvided("source is not a stage of the target tower")
        return cls.from_generators(source, target, {g: target.gen(g) for g in source.generator_labels})

    @classmethod
    def identity(cls, F: NumberField) -> "Embedding":
        return cls(F, F, F.gen())

    def __call__(self, a) -> NFElem:
        a = self.source.element(a)
        return NFElem(self.target, a.poly(self.theta_image.poly))

    def generator_images(self) -> dict[str, NFElem]:
        return {g: self(self.source.gen(g)) for g in self.source.generator_labels}

    def after(self, other: "Embedding") -> "Embedding":
        """self o other."""
        return Embedding(other.source, self.target, self(other.theta_image))

    def preimage(self, a: NFElem) -> NFElem | None:
        """The source element mapping to ``a``, or None when a is not in the image."""
        n, N = self.source.degree, self.target.degree
        cols = []
        p = self.target.one()
        for _ in range(n):
            cols.append(self.target.basis_vector(p))
            p = p * self.theta_image
        M = fmpq_mat(N, n, [to_fmpq(cols[j][i]) for i in range(N) for j in range(n)])
        rhs = self.target.basis_vector(self.target.element(a))
        aug = fmpq_mat(N, n + 1, [to_fmpq(cols[j][i]) if j < n else to_fmpq(rhs[i]) for i in range(N) for j in range(n + 1)])
        if aug.rank() != M.rank():
            return None
        rref, rank = aug.rref()
        coeffs = [0] * n
        # read solution from reduced row echelon form
        for r in range(rank):
            row = [rref[r, j] for j in range(n + 1)]
            pivot = next(j for j in range(n + 1) if row[j] != 0)
            if pivot < n:
                coeffs[pivot] = row[n]
        return NFElem(self.source, fmpq_poly(coeffs))

    def to_json(self):
        return {"theta_image": str(self.target.express(self.theta_image))}


def _eval_in(target: NumberField, expr: ExactPoly, images: Mapping[str, NFElem]) -> NFElem:
    total = target.zero()
    for exps, c in expr.terms.items():
        term = target.element(c)
        for v, e in zip(expr.variables, exps):
            if e:
                term = term * images[v] ** e
        total = total + term
    return total


# ---------------------------------------------------------------------------
# automorphism groups


class AutGroup:
    """Aut(L/k) as a Cayley table with the action theta -> images[i]."""

    def __init__(self, field_: NumberField, images: Sequence[fmpq_poly], over: NumberField | None = None):
        self.field = field_
        self.over = over
        self.images = [p % field_.minpoly for p in images]
        self.group = FiniteGroup(_composition_table(field_, self.images), [f"s{i}" for i in range(len(self.images))])

    @property
    def order(self) -> int:
        return self.group.order

    def apply(self, i: int, a) -> NFElem:
        a = self.field.element(a)
        return NFElem(self.field, a.poly(self.images[i]))

    def generator_action(self, i: int) -> dict[str, str]:
        return {g: str(self.field.express(self.apply(i, self.field.gen(g)))) for g in self.field.generator_labels}

    def fixes(self, i: int, a) -> bool:
        a = self.field.element(a)
        return self.apply(i, a) == a

    def index_of(self, image: NFElem) -> int:
        for i, p in enumerate(self.images):
            if p == image.poly:
                return i
        raise KeyError("not an automorphism in this group")

    def fixed_subgroup(self, elems) -> Subgroup:
        return Subgroup(self.group, [i for i in range(self.order) if all(self.fixes(i, a) for a in elems)])

    def to_json(self):
        return {
            "order": self.order,
            "table": [list(r) for r in self.group.table],
            "action": [self.generator_action(i) for i in range(self.order)],
        }


def _composition_table(L: NumberField, images: list[fmpq_poly]) -> list[list[int]]:
    """table[i][j] = index of s_i o s_j, i.e. of r_j(r_i) mod m.

    The exact composite is always one of the images (the set is closed), so
    it is identified modulo a prime at which all images stay distinct.
    """
    n = len(images)
    m = L.minpoly
    for k in range(64):
        p = _prime(k)
        mp = _reduce_coeff(m, p, None)
        if mp is None or mp.degree() != m.degree():
            continue
        red = [_reduce_coeff(r, p, mp) for r in images]
        if any(r is None for r in red):
            continue
        index = {tuple(int(c) for c in r.coeffs()): i for i, r in enumerate(red)}
        if len(index) != n:
            continue
        table = []
        for i in range(n):
            row = []
            for j in range(n):
                comp = red[j].compose_mod(red[i], mp)
                key = tuple(int(c) for c in comp.coeffs())
                if key not in index:
                    raise NotGalois("automorphism images are not closed under composition")
                row.append(index[key])
            table.append(row)
        return table
    raise NotGalois("no suitable prime for the composition table")


def _base_generators(L: NumberField, over: NumberField | None) -> list[NFElem]:
    if over is None or over.is_rational():
        return []
    if not any(f is over for f in L.tower()):
        raise InclusionNotProvided("base field is not a stage of the tower")
    return [L.gen(g) for g in over.generator_labels]


def automorphism_group(L: NumberField, over: NumberField | None = None, cap: int = DEFAULT_DEGREE_CAP) -> AutGroup:
    """Aut(L/over) with identity first, then images of theta in canonical order.

    Each automorphism sends every tower generator to a root (in L) of that
    generator's minimal polynomial; candidates are found by factorisation
    over L and filtered step by step through the tower relations.
    """
    if L.degree > cap:
        raise DegreeCapExceeded(f"[L:Q] = {L.degree} exceeds cap {cap}")
    cache = L.__dict__.get("_aut_roots")
    if cache is None:
        cache = _all_automorphisms(L)
        L._aut_roots = cache
    base = _base_generators(L, over)
    images = [r for r in cache if all(NFElem(L, b.poly(r)) == b for b in base)]
    return AutGroup(L, images, over)


def _all_automorphisms(L: NumberField) -> list[fmpq_poly]:
    ident = fmpq_poly([0, 1]) % L.minpoly
    if L.is_rational():
        return [ident]
    roots_cache: dict[str, list[NFElem]] = {}
    candidates = []
    for g in L.generator_labels:
        mu = L.gen(g).minpoly()
        key = str(mu)
        if key not in roots_cache:
            f = KPoly.from_fmpq_poly(L, mu)
            fl = factor_over_number_field(f, L, cap=max(DEFAULT_FACTOR_CAP, L.degree * mu.degree()))
            roots_cache[key] = [NFElem(L, -p.coeffs[0]) for p, _ in fl.factors if p.degree() == 1]
        candidates.append(roots_cache[key])
    steps = L.steps
    found = []

    def rec(k: int, assigned: dict):
        if k == len(steps):
            found.append(_eval_in(L, L.prim_expr, assigned).poly)
            return
        step = steps[k]
        coeffs = [_eval_in(L, c, assigned) for c in step.poly.coefficients("X")]
        poly = KPoly(L, [c.poly for c in coeffs])
        for r in candidates[k]:
            if poly.evaluate(r).is_zero():
                assigned[step.generator] = r
                rec(k + 1, assigned)
                del assigned[step.generator]

    rec(0, {})
    found.sort(key=lambda r: (r != ident, [to_fraction(c) for c in reversed(r.coeffs())]))
    return found


def splitting_field(f, base: NumberField | None = None, cap: int = DEFAULT_DEGREE_CAP, prefix: str = "r") -> NumberField:
    """A tower over ``base`` in which f splits, certified Galois by |Aut| = degree."""
    K = base or NumberField.rationals()
    f = as_poly(f) if not isinstance(f, KPoly) else f
    k = 1
    while True:
        if isinstance(f, KPoly):
            g = f if f.field is K else _transport(f, K)
        else:
            g = KPoly.from_expr(K, f)
        fl = factor_over_number_field(g, K)
        if any(m > 1 for _, m in fl.factors):
            raise NotGalois("polynomial is not separable")
        nonlinear = [p for p, _ in fl.factors if p.degree() > 1]
        if not nonlinear:
            break
        label = f"{prefix}{k}"
        while label in K.gens:
            k += 1
            label = f"{prefix}{k}"
        K = K.extend(nonlinear[0], label, cap=cap)
        k += 1
    rel = K.degree // (base.degree if base else 1)
    aut = automorphism_group(K, over=base, cap=max(cap, K.degree))
    if aut.order != rel:
        raise NotGalois(f"|Aut| = {aut.order} but relative degree is {rel}")
    return K


def _transport(f: KPoly, K: NumberField) -> KPoly:
    """Move a polynomial over a tower stage up to K (K contains f.field)."""
    emb = Embedding.inclusion(f.field, K)
    return KPoly(K, [emb(NFElem(f.field, c)).poly for c in f.coeffs])


def galois_closure(L: NumberField, cap: int = DEFAULT_DEGREE_CAP) -> tuple[NumberField, Embedding]:
    """The Galois closure of L/Q with an embedding L -> closure (first root in canonical order)."""
    Lhat = splitting_field(ExactPoly.from_fmpq_poly(L.minpoly), cap=cap)
    fl = factor_over_number_field(KPoly.from_fmpq_poly(Lhat, L.minpoly), Lhat)
    root = NFElem(Lhat, -fl.factors[0][0].coeffs[0])
    return Lhat, Embedding(L, Lhat, root)


# ---------------------------------------------------------------------------
# restriction maps


@dataclass
class RestrictionMap:
    big: AutGroup
    small: AutGroup
    embedding: Embedding
    partial: PartialHom

    @property
    def domain(self) -> Subgroup:
        return self.partial.domain

    def to_json(self):
        return {
            "big_order": self.big.order,
            "small_order": self.small.order,
            "domain": self.domain.sorted(),
            "images": {str(k): v for k, v in self.partial.images.items()},
            "image": self.partial.image().sorted(),
            "total": self.partial.is_total(),
        }


def restriction_map(big: AutGroup, small: AutGroup, embedding: Embedding | None = None) -> RestrictionMap:
    """res: Aut(F/M) -> Aut(L/k) on the setwise stabiliser of L."""
    F, L = big.field, small.field
    if embedding is None:
        try:
            embedding = Embedding.inclusion(L, F)
        except InclusionNotProvided:
            raise InclusionNotProvided("no embedding L -> F supplied and none derivable from the tower")
    if embedding.source.minpoly != L.minpoly or embedding.target.minpoly != F.minpoly:
        raise InclusionNotProvided("embedding does not connect the given fields")
    e = embedding.theta_image
    targets = {}
    for j, r in enumerate(small.images):
        targets[str(NFElem(F, r(e.poly)).poly)] = j
    images = {}
    for i in range(big.order):
        moved = big.apply(i, e)
        j = targets.get(str(moved.poly))
        if j is not None:
            images[i] = j
    partial = PartialHom(big.group, small.group, images)
    return RestrictionMap(big, small, embedding, partial)


@dataclass
class NormalizerModel:
    ok: bool
    galois_order: int
    fixing: list
    domain: list
    normalizer: list
    aut_order: int

    def __bool__(self):
        return self.ok

    def to_json(self):
        return dict(self.__dict__)


def normalizer_model_check(L: NumberField, cap: int = DEFAULT_DEGREE_CAP) -> NormalizerModel:
    """H/Gal(Lhat/L) = Aut(L/Q) via restriction, with H the normaliser of Gal(Lhat/L)."""
    Lhat, emb = galois_closure(L, cap=cap)
    gal = automorphism_group(Lhat, cap=max(cap, Lhat.degree))
    aut = automorphism_group(L, cap=max(cap, L.degree))
    res = restriction_map(gal, aut, emb)
    fixing = gal.fixed_subgroup([emb.theta_image])
    N = normalizer(gal.group, fixing)
    ok = (
        res.domain == N
        and res.partial.image().order == aut.order
        and res.partial.kernel() == fixing
        and N.order // fixing.order == aut.order
    )
    return NormalizerModel(ok, gal.order, fixing.sorted(), res.domain.sorted(), N.sorted(), aut.order)


def linear_disjointness_check(a: Embedding, b: Embedding) -> bool:
    """[AB:Q] == [A:Q][B:Q] for two subfields embedded in one field."""
    if a.target is not b.target and a.target.minpoly != b.target.minpoly:
        raise NotEmbedded("the two fields are not embedded in a common field")
    F = a.target
    da, db = a.source.degree, b.source.degree
    x, y = a.theta_image, F.element(b.theta_image)
    vecs = []
    xi = F.one()
    for _ in range(da):
        yj = xi
        for _ in range(db):
            vecs.append(F.basis_vector(yj))
            yj = yj * y
        xi = xi * x
    M = fmpq_mat(len(vecs), F.degree, [to_fmpq(c) for v in vecs for c in v])
    return M.rank() == da * db


def compositum_degree(a: Embedding, b: Embedding) -> int:
    F = a.target
    vecs = []
    xi = F.one()
    for _ in range(a.source.degree):
        yj = xi
        for _ in range(b.source.degree):
            vecs.append(F.basis_vector(yj))
            yj = yj * b.theta_image
        xi = xi * a.theta_image
    return fmpq_mat(len(vecs), F.degree, [to_fmpq(c) for v in vecs for c in v]).rank()


# ---------------------------------------------------------------------------
# fixed fields


def fixed_field(aut: AutGroup, sub: Subgroup, label: str = "u") -> tuple[NumberField, Embedding]:
    """The fixed field of a subgroup, presented by an orbit-invariant primitive element."""
    F = aut.field
    target_degree = F.degree // sub.order
    elems = sub.sorted()
    theta = F.gen()
    candidates = []
    for k in range(1, F.degree + 1):
        candidates.append(("sum", k))
    for c in range(0, F.degree + 2):
        candidates.append(("prod", c))
    for kind, k in candidates:
        if kind == "sum":
            y = F.zero()
            for i in elems:
                y = y + aut.apply(i, theta**k)
        else:
            y = F.one()
            for i in elems:
                y = y * (aut.apply(i, theta) + k)
        mp = y.minpoly()
        if mp.degree() == target_degree:
            E = NumberField.from_poly(ExactPoly.from_fmpq_poly(mp), label, cap=max(F.cap, target_degree))
            return E, Embedding(E, F, y)
    raise NotGalois("no primitive element found for the fixed field")
