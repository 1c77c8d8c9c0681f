"""Certificate files: deterministic serialisation and stateless re-verification.

A certificate embeds every presentation it relies on (L, E, the tower over
Q(Z, T), the point, the battery), so ``verify_certificate`` needs no catalog
or cache.  Check order: "specialization" (function-field certificates only),
then (a)-(e) from ``verify_solution``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .algebra.poly import as_poly
from .embedding import CheckResult, SolutionCertificate, VerificationReport, verify_solution
from .errors import AutfieldError, PresentationIncomplete
from .funcfield import GaloisFunctionField
from .gadgets import gadget_poly
from .specialization import check_point, function_field_regularity


def dumps(data, pretty: bool = False) -> str:
    """Canonical JSON text (sorted keys, fixed separators, trailing newline)."""
    if pretty:
        return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def save(data, path, pretty: bool = False) -> Path:
    path = Path(path)
    path.write_text(dumps(data, pretty))
    return path


def load(path) -> dict:
    return json.loads(Path(path).read_text())


def solution_part(data: dict) -> dict:
    """The SolutionCertificate JSON inside a pipeline certificate (or the whole thing)."""
    if "solution" in data and isinstance(data["solution"], dict):
        return data["solution"]
    return data


def _point_values(ff: dict):
    point = ff["point"]
    return {k: Fraction(v) for k, v in point.items()}


def specialization_check(ff: dict) -> CheckResult:
    """The stored point must be accepted for both the E-level and closure polynomials."""
    try:
        polys = [as_poly(ff["Ehat_polynomial"]), as_poly(ff["E_polynomial"])]
        guards = [as_poly(g) for g in ff.get("guards", [])]
        point = _point_values(ff)
    except (KeyError, AutfieldError, ValueError) as exc:
        return CheckResult("specialization", False, {"error": f"malformed function-field data: {exc}"})
    bad = check_point(polys, point, guards)
    if bad is not None:
        idx, reason, evidence = bad
        return CheckResult(
            "specialization",
            False,
            {"point": ff["point"], "rejected_polynomial": ["Ehat", "E"][idx] if idx in (0, 1) else "guard", "reason": reason, "evidence": evidence},
        )
    return CheckResult("specialization", True, {"point": ff["point"]})


def tower_consistency(cert: SolutionCertificate) -> dict:
    """E must be the tower N_z(x) with x a root of P_y(t, X)."""
    ff = cert.function_field
    N = GaloisFunctionField.from_json(ff["N"])
    point = _point_values(ff)
    z, t = point["Z"], point["T"]
    fz = N.poly.subs({"Z": z})
    expected = [(s.generator, str(s.poly)) for s in N.constant_field.steps]
    expected.append(("w", str(fz)))
    expected.append(("x", str(gadget_poly(Fraction(ff["y"])).subs({"T": t}))))
    found = [(s.generator, str(s.poly)) for s in cert.E.steps]
    return {"consistent": found == expected, "expected_steps": [list(e) for e in expected], "found_steps": [list(f) for f in found]}


class _FunctionFieldBookkeeping:
    """Result of check (e) for a function-field certificate."""

    def __init__(self, cert: SolutionCertificate):
        self.proxy = function_field_regularity(cert)
        try:
            self.tower = tower_consistency(cert)
        except (AutfieldError, KeyError, ValueError) as exc:
            self.tower = {"consistent": False, "error": str(exc)}

    @property
    def ok(self) -> bool:
        return self.proxy.ok and self.tower["consistent"]

    def to_json(self):
        return {"proxy": self.proxy.to_json(), "tower": self.tower}


def verify_certificate(data: dict) -> VerificationReport:
    """Stateless re-verification of certificate JSON."""
    sol = solution_part(data)
    checks = []
    ff = sol.get("function_field")
    if ff is not None:
        spec = specialization_check(ff)
        checks.append(spec)
        if not spec.passed:
            return VerificationReport(checks)
    try:
        cert = SolutionCertificate.from_json(sol)
    except (AutfieldError, ValueError, KeyError) as exc:
        checks.append(CheckResult("a", False, {"error": f"cannot load certificate: {exc}"}))
        return VerificationReport(checks)
    report = verify_solution(cert, _FunctionFieldBookkeeping if ff is not None else None)
    return VerificationReport(checks + report.checks)


def verify_file(path) -> VerificationReport:
    try:
        data = load(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise PresentationIncomplete(f"cannot read certificate: {exc}") from exc
    return verify_certificate(data)
