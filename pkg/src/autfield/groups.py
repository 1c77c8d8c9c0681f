"""Finite groups as Cayley tables, homomorphisms and the fiber-product algebra.

Elements are the ids ``0 .. order-1`` with 0 the identity.  All searches
(sections, lifts, isomorphisms) are deterministic: generators are taken by
increasing element order, candidate images by increasing id.
"""
from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    CompatibilityFailure,
    NotAHomomorphism,
    NotASubgroup,
    NotEpimorphism,
    OrderMismatch,
    TargetMismatch,
)

SEARCH_CAP = 64


class FiniteGroup:
    """A finite group given by its multiplication table."""

    def __init__(self, table: Sequence[Sequence[int]], labels: Sequence[str] | None = None, name: str | None = None):
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        self.order = len(self.table)
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(self.order))
        self.name = name
        self._validate()
        self._inv = tuple(row.index(0) for row in self.table)
        self._orders = None
        self._gens = None

    def _validate(self):
        n = self.order
        if n == 0:
            raise ValueError("a group needs at least one element")
        full = set(range(n))
        for i, row in enumerate(self.table):
            if len(row) != n or set(row) != full:
                raise ValueError(f"row {i} is not a permutation of the elements")
        for j in range(n):
            if {self.table[i][j] for i in range(n)} != full:
                raise ValueError(f"column {j} is not a permutation of the elements")
        if self.table[0] != tuple(range(n)) or any(self.table[i][0] != i for i in range(n)):
            raise ValueError("element 0 must be the identity")
        if len(self.labels) != n:
            raise ValueError("label count does not match order")
        # Light's test: associativity on a generating set suffices
        t = self.table
        for g in self._greedy_generators():
            for x in range(n):
                xg = t[x][g]
                for y in range(n):
                    if t[xg][y] != t[x][t[g][y]]:
                        raise ValueError("table is not associative")

    def _greedy_generators(self) -> list[int]:
        span = {0}
        gens = []
        for g in range(1, self.order):
            if g not in span:
                gens.append(g)
                span = self._closure_raw(span | {g})
        return gens

    def _closure_raw(self, elems) -> set[int]:
        span = set(elems) | {0}
        frontier = list(span)
        gens = list(span)
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in span:
                        span.add(y)
                        new.append(y)
            frontier = new
        return span

    # ----- basic operations -------------------------------------------------
    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        r = 0
        for _ in range(k):
            r = self.table[r][a]
        return r

    def conj(self, g: int, h: int) -> int:
        """g h g^-1."""
        return self.table[self.table[g][h]][self._inv[g]]

    def element_order(self, a: int) -> int:
        return self.element_orders()[a]

    def element_orders(self) -> tuple[int, ...]:
        if self._orders is None:
            out = []
            for a in range(self.order):
                k, x = 1, a
                while x != 0:
                    x = self.table[x][a]
                    k += 1
                out.append(k)
            self._orders = tuple(out)
        return self._orders

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def center(self) -> frozenset[int]:
        t = self.table
        return frozenset(a for a in range(self.order) if all(t[a][b] == t[b][a] for b in range(self.order)))

    def elements(self) -> range:
        return range(self.order)

    def closure(self, elems: Iterable[int]) -> frozenset[int]:
        return frozenset(self._closure_raw(set(elems)))

    def generators(self) -> list[int]:
        """A deterministic generating set: greedily by decreasing order, then id."""
        if self._gens is None:
            orders = self.element_orders()
            span: set[int] = {0}
            gens = []
            for g in sorted(range(1, self.order), key=lambda g: (-orders[g], g)):
                if g not in span:
                    gens.append(g)
                    span = self._closure_raw(span | {g})
                if len(span) == self.order:
                    break
            self._gens = sorted(gens, key=lambda g: (orders[g], g))
        return list(self._gens)

    def is_subgroup(self, elems: Iterable[int]) -> bool:
        s = set(elems)
        if 0 not in s:
            return False
        return all(self.table[a][self._inv[b]] in s for a in s for b in s)

    def subgroup(self, elems: Iterable[int]) -> "Subgroup":
        return Subgroup(self, elems)

    def whole(self) -> "Subgroup":
        return Subgroup(self, range(self.order))

    def trivial_subgroup(self) -> "Subgroup":
        return Subgroup(self, [0])

    def order_statistics(self) -> tuple:
        return tuple(sorted(Counter(self.element_orders()).items()))

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.table == other.table

    def __hash__(self):
        return hash(self.table)

    def __repr__(self):
        return f"FiniteGroup({self.name or 'order ' + str(self.order)})"

    # ----- serialisation ----------------------------------------------------
    def to_json(self):
        out = {"order": self.order, "table": [list(r) for r in self.table]}
        if self.name:
            out["name"] = self.name
        if any(lbl != str(i) for i, lbl in enumerate(self.labels)):
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_json(cls, data) -> "FiniteGroup":
        if isinstance(data, str):
            data = json.loads(data)
        if "standard_name" in data:
            return standard_group(data["standard_name"])
        table = data["table"]
        if "order" in data and data["order"] != len(table):
            raise ValueError("declared order does not match the table")
        return cls(table, data.get("labels"), data.get("name"))


# ---------------------------------------------------------------------------
# standard groups


def group_from_permutations(perms: Iterable[tuple[int, ...]], name: str | None = None) -> FiniteGroup:
    """Group of the given permutations (closed under composition), ids in sorted order."""
    perms = sorted(set(tuple(p) for p in perms))
    ident = tuple(range(len(perms[0])))
    perms.remove(ident)
    perms = [ident] + perms
    index = {p: i for i, p in enumerate(perms)}
    # (p*q)(i) = p(q(i))
    table = [[index[tuple(p[q[i]] for i in range(len(p)))] for q in perms] for p in perms]
    labels = ["".join(str(x) for x in p) for p in perms]
    return FiniteGroup(table, labels, name)


def _perm_closure(gens: list[tuple[int, ...]]) -> set[tuple[int, ...]]:
    n = len(gens[0])
    out = {tuple(range(n))}
    frontier = list(out)
    while frontier:
        new = []
        for p in frontier:
            for g in gens:
                q = tuple(p[g[i]] for i in range(n))
                if q not in out:
                    out.add(q)
                    new.append(q)
        frontier = new
    return out


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([[(i + j) % n for j in range(n)] for i in range(n)], name=f"C{n}")


def symmetric_group(n: int) -> FiniteGroup:
    return group_from_permutations(itertools.permutations(range(n)), name=f"S{n}")


def alternating_group(n: int) -> FiniteGroup:
    def even(p):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        return inv % 2 == 0

    return group_from_permutations([p for p in itertools.permutations(range(n)) if even(p)], name=f"A{n}")


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of an n-gon (order 2n)."""
    r = tuple((i + 1) % n for i in range(n))
    s = tuple((-i) % n for i in range(n))
    return group_from_permutations(_perm_closure([r, s]), name=f"D{n}")


def direct_product(G: FiniteGroup, H: FiniteGroup, name: str | None = None) -> FiniteGroup:
    pairs = [(g, h) for g in range(G.order) for h in range(H.order)]
    index = {p: i for i, p in enumerate(pairs)}
    table = [[index[(G.mul(a, c), H.mul(b, d))] for (c, d) in pairs] for (a, b) in pairs]
    labels = [f"({G.labels[a]},{H.labels[b]})" for a, b in pairs]
    return FiniteGroup(table, labels, name)


def standard_group(name: str) -> FiniteGroup:
    key = name.strip()
    if key == "V4":
        G = direct_product(cyclic_group(2), cyclic_group(2))
        G.name = "V4"
        return G
    if key == "S3":
        return symmetric_group(3)
    if key == "S4":
        return symmetric_group(4)
    if key == "A4":
        return alternating_group(4)
    if key == "D4":
        return dihedral_group(4)
    if key.startswith("C") and key[1:].isdigit() and int(key[1:]) >= 1:
        return cyclic_group(int(key[1:]))
    raise ValueError(f"unknown group literal {name!r}")


def parse_group(spec: str) -> FiniteGroup:
    """A standard name (C2, V4, S3, ...) or a path to a Cayley-table JSON file."""
    try:
        return standard_group(spec)
    except ValueError:
        pass
    try:
        with open(spec) as fh:
            return FiniteGroup.from_json(json.load(fh))
    except OSError:
        raise ValueError(f"unknown group literal {spec!r} and no such Cayley-table file") from None


# ---------------------------------------------------------------------------
# subgroups and homomorphisms


class Subgroup:
    def __init__(self, parent: FiniteGroup, elems: Iterable[int]):
        self.parent = parent
        self.elements = frozenset(int(e) for e in elems)
        if not parent.is_subgroup(self.elements):
            raise NotASubgroup(f"{sorted(self.elements)} is not a subgroup")

    @property
    def order(self) -> int:
        return len(self.elements)

    def sorted(self) -> list[int]:
        return sorted(self.elements)

    def __contains__(self, g):
        return g in self.elements

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        return f"Subgroup({self.sorted()})"

    def is_normal(self) -> bool:
        G = self.parent
        return all(G.conj(g, h) in self.elements for g in G.elements() for h in self.elements)

    def as_group(self) -> tuple[FiniteGroup, "GroupHom"]:
        elems = self.sorted()
        index = {e: i for i, e in enumerate(elems)}
        G = self.parent
        table = [[index[G.mul(a, b)] for b in elems] for a in elems]
        H = FiniteGroup(table, [G.labels[e] for e in elems])
        return H, GroupHom(H, G, elems)


def normalizer(G: FiniteGroup, S) -> Subgroup:
    elems = S.elements if isinstance(S, Subgroup) else frozenset(S)
    if not G.is_subgroup(elems):
        raise NotASubgroup(f"{sorted(elems)} is not a subgroup")
    return Subgroup(G, [g for g in G.elements() if all(G.conj(g, h) in elems for h in elems)])


def quotient(G: FiniteGroup, N) -> tuple[FiniteGroup, "GroupHom"]:
    elems = N.elements if isinstance(N, Subgroup) else frozenset(N)
    sub = Subgroup(G, elems)
    if not sub.is_normal():
        raise NotASubgroup("quotient needs a normal subgroup")
    cosets: list[frozenset] = []
    which = {}
    for g in G.elements():
        if g in which:
            continue
        c = frozenset(G.mul(g, n) for n in elems)
        for x in c:
            which[x] = len(cosets)
        cosets.append(c)
    reps = [min(c) for c in cosets]
    table = [[which[G.mul(a, b)] for b in reps] for a in reps]
    Q = FiniteGroup(table, [G.labels[r] for r in reps])
    return Q, GroupHom(G, Q, [which[g] for g in G.elements()])


class GroupHom:
    """A homomorphism given by the image of every source element."""

    def __init__(self, source: FiniteGroup, target: FiniteGroup, images: Sequence[int], check: bool = True):
        self.source = source
        self.target = target
        self.images = tuple(int(x) for x in images)
        if check:
            self._validate()

    def _validate(self):
        S, T = self.source, self.target
        if len(self.images) != S.order:
            raise NotAHomomorphism("image table has the wrong length")
        if any(not 0 <= x < T.order for x in self.images):
            raise NotAHomomorphism("image out of range")
        if self.images[0] != 0:
            raise NotAHomomorphism("identity must map to identity")
        im = self.images
        for a in range(S.order):
            for b in range(S.order):
                if im[S.mul(a, b)] != T.mul(im[a], im[b]):
                    raise NotAHomomorphism(f"map is not multiplicative at ({a}, {b})")

    def __call__(self, g: int) -> int:
        return self.images[g]

    def after(self, other: "GroupHom") -> "GroupHom":
        """self o other."""
        if other.target.table != self.source.table:
            raise TargetMismatch("cannot compose: target and source differ")
        return GroupHom(other.source, self.target, [self.images[x] for x in other.images], check=False)

    def kernel(self) -> Subgroup:
        return Subgroup(self.source, [g for g in self.source.elements() if self.images[g] == 0])

    def image(self) -> Subgroup:
        return Subgroup(self.target, set(self.images))

    def is_injective(self) -> bool:
        return len(set(self.images)) == self.source.order

    def is_surjective(self) -> bool:
        return len(set(self.images)) == self.target.order

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def inverse(self) -> "GroupHom":
        if not self.is_isomorphism():
            raise NotAHomomorphism("map is not invertible")
        inv = [0] * self.target.order
        for g, h in enumerate(self.images):
            inv[h] = g
        return GroupHom(self.target, self.source, inv, check=False)

    def __eq__(self, other):
        return isinstance(other, GroupHom) and self.images == other.images and self.source == other.source and self.target == other.target

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"GroupHom({list(self.images)})"

    def to_json(self):
        return list(self.images)

    @classmethod
    def identity(cls, G: FiniteGroup) -> "GroupHom":
        return cls(G, G, range(G.order), check=False)

    @classmethod
    def trivial(cls, source: FiniteGroup, target: FiniteGroup) -> "GroupHom":
        return cls(source, target, [0] * source.order, check=False)


def kernel(h: GroupHom) -> tuple[FiniteGroup, GroupHom]:
    """The kernel as an abstract group with its inclusion."""
    return h.kernel().as_group()


class PartialHom:
    """A homomorphism defined on a subgroup of the source."""

    def __init__(self, source: FiniteGroup, target: FiniteGroup, images: Mapping[int, int]):
        self.source = source
        self.target = target
        self.images = dict(sorted((int(a), int(b)) for a, b in images.items()))
        self.domain = Subgroup(source, self.images)
        for a in self.images:
            for b in self.images:
                if self.images[source.mul(a, b)] != target.mul(self.images[a], self.images[b]):
                    raise NotAHomomorphism(f"not multiplicative on the domain at ({a}, {b})")

    def __call__(self, g: int) -> int:
        return self.images[g]

    def is_total(self) -> bool:
        return self.domain.order == self.source.order

    def image(self) -> Subgroup:
        return Subgroup(self.target, set(self.images.values()))

    def kernel(self) -> Subgroup:
        return Subgroup(self.source, [g for g, h in self.images.items() if h == 0])

    def as_hom(self) -> GroupHom:
        if not self.is_total():
            raise NotAHomomorphism("partial map is not total")
        return GroupHom(self.source, self.target, [self.images[g] for g in range(self.source.order)], check=False)

    def to_json(self):
        return {"domain": self.domain.sorted(), "images": {str(k): v for k, v in self.images.items()}}


# ---------------------------------------------------------------------------
# searches


@dataclass
class SearchLog:
    generators: list = field(default_factory=list)
    candidates: dict = field(default_factory=dict)
    attempts: int = 0
    failures: int = 0
    exhaustive: bool = False

    def to_json(self):
        return {
            "generators": self.generators,
            "candidates": {str(k): v for k, v in self.candidates.items()},
            "attempts": self.attempts,
            "failures": self.failures,
            "exhaustive": self.exhaustive,
        }


def _backtrack(S: FiniteGroup, T: FiniteGroup, gens: list[int], candidates: list[list[int]], injective: bool, log: SearchLog):
    def rec(i: int, mapping: dict, assigned: list[int]):
        if i == len(gens):
            return mapping
        g = gens[i]
        for c in candidates[i]:
            log.attempts += 1
            if g in mapping:
                if mapping[g] != c:
                    log.failures += 1
                    continue
                result = rec(i + 1, mapping, assigned + [g])
                if result is not None:
                    return result
                continue
            ext = _close(S, T, mapping, assigned + [g], {g: c}, injective)
            if ext is None:
                log.failures += 1
                continue
            result = rec(i + 1, ext, assigned + [g])
            if result is not None:
                return result
        return None

    return rec(0, {0: 0}, [])


def _close(S, T, mapping, gens, new, injective):
    m = dict(mapping)
    m.update(new)
    used = {v: k for k, v in m.items()} if injective else {}
    if injective and len(used) != len(m):
        return None
    frontier = list(m)
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = S.mul(x, s)
                v = T.mul(m[x], m[s])
                if y in m:
                    if m[y] != v:
                        return None
                else:
                    if injective and v in used:
                        return None
                    m[y] = v
                    if injective:
                        used[v] = y
                    nxt.append(y)
        frontier = nxt
    return m


def find_lift(rho: GroupHom, alpha: GroupHom, log: SearchLog | None = None, injective: bool = False) -> GroupHom | None:
    """A homomorphism gamma: rho.source -> alpha.source with alpha o gamma = rho.

    With ``injective`` only embeddings are accepted (an isomorphism when the
    orders agree).
    """
    if rho.target.table != alpha.target.table:
        raise TargetMismatch("rho and alpha must share their target")
    B, G = rho.source, alpha.source
    log = log if log is not None else SearchLog()
    gens = B.generators()
    orders_B, orders_G = B.element_orders(), G.element_orders()
    def order_ok(b, x):
        return orders_B[b] == orders_G[x] if injective else orders_B[b] % orders_G[x] == 0

    candidates = [[x for x in range(G.order) if alpha(x) == rho(b) and order_ok(b, x)] for b in gens]
    log.generators = gens
    log.candidates = {b: c for b, c in zip(gens, candidates)}
    m = _backtrack(B, G, gens, candidates, injective, log)
    if m is None or len(m) != B.order:
        log.exhaustive = True
        return None
    return GroupHom(B, G, [m[b] for b in range(B.order)])


def find_section(alpha: GroupHom, log: SearchLog | None = None) -> GroupHom | None:
    """A homomorphism s with alpha o s = id, or None (exhaustive)."""
    if not alpha.is_surjective():
        raise NotEpimorphism("alpha is not surjective")
    return find_lift(GroupHom.identity(alpha.target), alpha, log)


def _invariants(G: FiniteGroup):
    return (G.order, G.order_statistics(), G.is_abelian(), len(G.center()))


def is_isomorphic(G: FiniteGroup, H: FiniteGroup) -> GroupHom | None:
    """An explicit isomorphism G -> H, or None."""
    if G.order != H.order:
        raise OrderMismatch(f"orders differ: {G.order} vs {H.order}")
    if _invariants(G) != _invariants(H):
        return None
    gens = G.generators()
    oG, oH = G.element_orders(), H.element_orders()
    candidates = [[x for x in range(H.order) if oH[x] == oG[g]] for g in gens]
    m = _backtrack(G, H, gens, candidates, True, SearchLog())
    if m is None or len(m) != G.order:
        return None
    return GroupHom(G, H, [m[g] for g in range(G.order)])


def all_homomorphisms(S: FiniteGroup, T: FiniteGroup) -> list[GroupHom]:
    """Every homomorphism S -> T (small groups only)."""
    gens = S.generators()
    oS, oT = S.element_orders(), T.element_orders()
    candidates = [[x for x in range(T.order) if oS[g] % oT[x] == 0] for g in gens]
    out = []

    def rec(i, mapping):
        if i == len(gens):
            out.append(GroupHom(S, T, [mapping[g] for g in range(S.order)], check=False))
            return
        for c in candidates[i]:
            ext = _close(S, T, mapping, gens[: i + 1], {gens[i]: c}, False)
            if ext is not None:
                rec(i + 1, ext)

    rec(0, {0: 0})
    return out


# ---------------------------------------------------------------------------
# fiber products


@dataclass
class FiberProduct:
    group: FiniteGroup
    first: GroupHom
    second: GroupHom
    pairs: list
    alpha: GroupHom
    rho: GroupHom

    def index(self, g: int, b: int) -> int:
        return self.pairs.index((g, b))


def fiber_product(alpha: GroupHom, rho: GroupHom) -> FiberProduct:
    """G' = {(g, b) : alpha(g) = rho(b)} with both projections."""
    if alpha.target.table != rho.target.table:
        raise TargetMismatch("alpha and rho must have the same target")
    G, B = alpha.source, rho.source
    pairs = [(g, b) for g in range(G.order) for b in range(B.order) if alpha(g) == rho(b)]
    index = {p: i for i, p in enumerate(pairs)}
    table = [[index[(G.mul(a, c), B.mul(b, d))] for (c, d) in pairs] for (a, b) in pairs]
    labels = [f"({G.labels[g]},{B.labels[b]})" for g, b in pairs]
    Gp = FiniteGroup(table, labels)
    first = GroupHom(Gp, G, [g for g, _ in pairs], check=False)
    second = GroupHom(Gp, B, [b for _, b in pairs], check=False)
    return FiberProduct(Gp, first, second, pairs, alpha, rho)


def kernel_of_first_projection(fp: FiberProduct) -> Subgroup:
    """{(1, b) : rho(b) = 1}."""
    return fp.first.kernel()


def build_delta(gamma_prime: GroupHom, fp: FiberProduct) -> GroupHom:
    """delta(b) = (gamma'(b), b), requiring alpha o gamma' = rho."""
    alpha, rho = fp.alpha, fp.rho
    if gamma_prime.source.table != rho.source.table or gamma_prime.target.table != alpha.source.table:
        raise CompatibilityFailure("gamma' has the wrong source or target")
    bad = [b for b in range(rho.source.order) if alpha(gamma_prime(b)) != rho(b)]
    if bad:
        raise CompatibilityFailure(f"alpha o gamma' differs from rho at {bad}")
    index = {p: i for i, p in enumerate(fp.pairs)}
    delta = GroupHom(rho.source, fp.group, [index[(gamma_prime(b), b)] for b in range(rho.source.order)])
    if any(fp.second(delta(b)) != b for b in range(rho.source.order)):
        raise CompatibilityFailure("second projection o delta is not the identity")
    return delta
