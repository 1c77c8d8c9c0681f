"""Explicit regular Galois extensions of Q(Z) used as starting points.

Each entry lists a defining polynomial over L'(Z) (usually L' = Q) together
with all of its automorphisms as rational expressions in X.  Entries are
checked rather than trusted: ``catalog_self_check`` re-verifies the
automorphisms symbolically, certifies irreducibility and the group by
specialisation, and runs the regularity proxy battery.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

from .algebra.factor import canonical_points, is_irreducible_over_QT, specialization_check
from .algebra.numberfield import OVERRIDE_DEGREE_CAP
from .algebra.poly import ExactPoly
from .errors import AutfieldError, CatalogMiss, CheckFailed
from .fields import Embedding, automorphism_group
from .funcfield import ROOT_LABEL, GaloisFunctionField, norm_to_QZ
from .groups import FiniteGroup, is_isomorphic, standard_group
from .specialization import DEFAULT_BATTERY, regularity_spot_check


@dataclass
class RealizationEntry:
    name: str
    group_name: str
    group: FiniteGroup
    field: GaloisFunctionField
    regularity_note: str = ""
    notes: str = ""
    entry_polynomial: str | None = None
    verified: bool = False

    @property
    def poly_over_QZ(self) -> ExactPoly:
        return self.field.poly

    @property
    def constant_field(self):
        return self.field.constant_field

    @property
    def is_regular_over_Q(self) -> bool:
        return self.field.constant_field.degree == 1

    def to_json(self):
        out = {
            "name": self.name,
            "standard_name": self.group_name,
            "order": self.group.order,
        }
        out.update(self.field.to_json())
        if not self.field.const_steps:
            out.pop("constant_steps")
        out["regularity"] = self.regularity_note
        out["notes"] = self.notes
        if self.entry_polynomial:
            out["entry_polynomial"] = self.entry_polynomial
        return out

    @classmethod
    def from_json(cls, data) -> "RealizationEntry":
        if "cayley_table" in data:
            group = FiniteGroup(data["cayley_table"], name=data.get("standard_name") or data["name"])
        else:
            group = standard_group(data["standard_name"])
        ff = GaloisFunctionField.from_json(data, name=data["name"])
        return cls(
            data["name"],
            data.get("standard_name", data["name"]),
            group,
            ff,
            data.get("regularity", ""),
            data.get("notes", ""),
            data.get("entry_polynomial"),
        )


def default_catalog_path() -> Path:
    return Path(str(resources.files("autfield") / "data" / "catalog.json"))


def load_catalog(path: str | Path | None = None) -> list[RealizationEntry]:
    path = Path(path) if path is not None else default_catalog_path()
    data = json.loads(path.read_text())
    items = data["entries"] if isinstance(data, dict) else data
    return [RealizationEntry.from_json(e) for e in items]


def find_entry(group: FiniteGroup, constant_degree: int = 1, entries: Sequence[RealizationEntry] | None = None):
    """First entry whose group is isomorphic to ``group`` (with the given constant-field degree)."""
    entries = load_catalog() if entries is None else entries
    for e in entries:
        if e.group.order != group.order or e.field.constant_field.degree != constant_degree:
            continue
        iso = is_isomorphic(e.group, group)
        if iso is not None:
            return e, iso
    raise CatalogMiss(f"no catalog entry with group of order {group.order} and constant degree {constant_degree}")


def get_entry(name: str, entries: Sequence[RealizationEntry] | None = None) -> RealizationEntry:
    entries = load_catalog() if entries is None else entries
    for e in entries:
        if e.name == name:
            return e
    raise CatalogMiss(f"no catalog entry named {name!r}")


# ---------------------------------------------------------------------------
# self-check


@dataclass
class CatalogVerdict:
    entry: str
    passed: bool
    subtests: dict = field(default_factory=dict)

    def to_json(self):
        return {"entry": self.entry, "passed": self.passed, "subtests": self.subtests}


def _good_point(ff: GaloisFunctionField, prim: ExactPoly, budget: int):
    """First z making the primitive polynomial irreducible with defined automorphisms."""
    dens = [a.x_image.den for a in ff.automorphisms]
    for (z,) in canonical_points(1, budget):
        if any(d.subs({"Z": z}).is_zero() for d in dens):
            continue
        if prim.degree("X") <= 1:
            return z
        ok, _, _ = specialization_check(prim, {"Z": z})
        if ok:
            return z
    return None


def catalog_self_check(
    entry: RealizationEntry,
    budget: int = 10,
    battery: Sequence = DEFAULT_BATTERY,
) -> CatalogVerdict:
    """Verify an entry; raises CheckFailed naming the failing sub-test."""
    ff = entry.field
    sub = {}

    try:
        info = ff.verify()
    except AutfieldError as exc:
        raise CheckFailed(f"{entry.name}: {exc}", "automorphisms") from exc
    table_group = ff.galois_group()
    iso = is_isomorphic(table_group, entry.group)
    if iso is None:
        raise CheckFailed(f"{entry.name}: automorphism table is not {entry.group_name}", "automorphisms")
    sub["automorphisms"] = {"count": info["automorphisms"], "degree": info["degree"], "table": info["table"]}

    prim, shift = norm_to_QZ(ff)
    if prim.degree("X") >= 1:
        verdict = is_irreducible_over_QT(prim, "X", budget=budget)
        if not verdict:
            raise CheckFailed(f"{entry.name}: polynomial factors over Q(Z)", "irreducibility")
        sub["irreducibility"] = {
            "primitive_polynomial": str(prim),
            "shift": shift,
            "witness": {k: str(v) for k, v in verdict.witness.items()},
        }
    else:
        sub["irreducibility"] = {"primitive_polynomial": str(prim), "witness": {}}

    # group identification: at a good point the listed maps specialise to
    # |G| automorphisms of a field of degree |G|, hence a Galois group of order |G|
    z = _good_point(ff, prim, budget)
    if z is None:
        raise CheckFailed(f"{entry.name}: no good specialisation", "group")
    Nz = ff.specialize(z, cap=OVERRIDE_DEGREE_CAP)
    images = []
    for a in ff.automorphisms:
        emb = Embedding.from_generators(Nz, Nz, ff.specialized_images(z, a))
        images.append(emb.theta_image.poly)
    aut = automorphism_group(Nz, cap=OVERRIDE_DEGREE_CAP)
    if aut.order != Nz.degree or sorted(map(str, images)) != sorted(str(p) for p in aut.images):
        raise CheckFailed(f"{entry.name}: specialised automorphisms do not match the field", "group")
    if is_isomorphic(aut.group, entry.group) is None:
        raise CheckFailed(f"{entry.name}: specialised group differs", "group")
    sub["group"] = {"point": {"Z": str(z)}, "specialized_degree": Nz.degree, "aut_order": aut.order, "group": entry.group_name}

    reg = regularity_spot_check(
        ff.poly, battery, constant_field=ff.constant_field if ff.const_steps else None, budget=max(3, budget // 2)
    )
    if not reg.ok:
        raise CheckFailed(f"{entry.name}: regularity proxy failed {reg.to_json()}", "regularity")
    sub["regularity"] = reg.to_json()
    sub["regularity"]["note"] = entry.regularity_note
    return CatalogVerdict(entry.name, True, sub)


def check_catalog(entries: Sequence[RealizationEntry] | None = None, budget: int = 10, battery=DEFAULT_BATTERY):
    """Run every self-check; returns a list of (verdict or failure) rows."""
    entries = load_catalog() if entries is None else entries
    rows = []
    for e in entries:
        try:
            v = catalog_self_check(e, budget, battery)
            rows.append({"entry": e.name, "group": e.group_name, "passed": True, "subtests": v.subtests})
        except CheckFailed as exc:
            rows.append({"entry": e.name, "group": e.group_name, "passed": False, "failed_subtest": exc.subtest, "message": str(exc)})
    return rows


def verified(entry: RealizationEntry, **kw) -> RealizationEntry:
    catalog_self_check(entry, **kw)
    return replace(entry, verified=True)
