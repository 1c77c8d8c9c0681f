"""End-to-end realisation, certificate files and the command-line interface."""
import copy
import json
import subprocess
import sys

import pytest

from autfield.algebra.numberfield import NumberField
from autfield.algebra.poly import as_poly
from autfield.certificate import dumps, load, verify_certificate
from autfield.cli import main
from autfield.embedding import count_roots_oracle
from autfield.errors import CatalogMiss, StageFailure
from autfield.groups import standard_group
from autfield.pipeline import PipelineRequest, realize_aut

S3_SIGN = [0, 1, 1, 0, 0, 1]


def run_cli(*args):
    proc = subprocess.run([sys.executable, "-m", "autfield", *args], capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


def cli_json(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


# ---------------------------------------------------------------------------
# pipeline


def test_realize_trivial_group():
    pc = realize_aut(PipelineRequest(standard_group("C1"), group_spec="C1"))
    assert pc.ok and pc.route == "direct"
    E = pc.solution.E
    assert E.degree == 3
    assert E.steps[-1].poly == as_poly("X^3 + X + 1")
    assert count_roots_oracle(E) == 1
    assert pc.non_normality["non_normal"]


def test_realize_C2():
    pc = realize_aut(PipelineRequest(standard_group("C2"), group_spec="C2"))
    assert pc.ok and pc.label == "non-normal solution"
    assert pc.solution.E.degree == 6
    assert pc.non_normality == {"G_order": 2, "aut_order": 2, "degree": 6, "non_normal": True, "roots_in_F": 2}


def test_realize_C2_at_forced_point():
    # (z, t) = (2, 1) gives F = Q(sqrt 2, theta) with theta^3 + theta + 1 = 0
    pc = realize_aut(PipelineRequest(standard_group("C2"), point=(2, 1), group_spec="C2"))
    assert pc.ok
    steps = [(s.generator, str(s.poly)) for s in pc.solution.E.steps]
    assert steps == [("w", "X^2 - 2"), ("x", "X^3 + X + 1")]
    assert count_roots_oracle(pc.solution.E) == 2


def test_realize_C3():
    pc = realize_aut(PipelineRequest(standard_group("C3"), group_spec="C3"))
    assert pc.ok and pc.solution.E.degree == 9
    assert count_roots_oracle(pc.solution.E) == 3


def test_galois_degenerate_route():
    L = NumberField.from_poly("X^2 - 5", "s")
    pc = realize_aut(PipelineRequest(standard_group("C2"), L, [0, 1], group_spec="C2"))
    assert pc.ok and pc.route == "galois-degenerate"
    assert pc.label == "solution is Galois"
    assert pc.solution.E.degree == 2


def test_split_reduction_route():
    L = NumberField.from_poly("X^2 + 3", "s")
    pc = realize_aut(PipelineRequest(standard_group("S3"), L, S3_SIGN, group_spec="S3"))
    assert pc.ok and pc.route == "split-reduction"
    assert pc.catalog_entry == "S3-kummer"
    pushed = pc.reduction["pushforward"]
    assert pushed["materialized"] and pushed["kernel"] == [0]
    assert pushed["checks"] == {"restriction_compatible": True, "surjective": True}
    assert pc.solution.E.degree == 18
    assert count_roots_oracle(pc.solution.E) == 6


def test_catalog_miss():
    with pytest.raises(CatalogMiss):
        realize_aut(PipelineRequest(standard_group("C5"), group_spec="C5"))


def test_bad_alpha_is_stage_failure():
    L = NumberField.from_poly("X^2 - 5", "s")
    with pytest.raises(StageFailure) as info:
        realize_aut(PipelineRequest(standard_group("C2"), L, [0, 0], group_spec="C2"))
    assert info.value.stage == "problem"


# ---------------------------------------------------------------------------
# certificates


@pytest.fixture(scope="module")
def c2_certificate():
    pc = realize_aut(PipelineRequest(standard_group("C2"), group_spec="C2"))
    return json.loads(dumps(pc.to_json()))


def test_certificate_round_trip(tmp_path, c2_certificate):
    path = tmp_path / "c2.json"
    path.write_text(dumps(c2_certificate))
    data = load(path)
    assert data == c2_certificate
    report = verify_certificate(data)
    assert report.ok
    assert [c.name for c in report.checks] == ["specialization", "a", "b", "c", "d", "e"]


def test_verify_rejects_non_homomorphism(c2_certificate):
    bad = copy.deepcopy(c2_certificate)
    bad["solution"]["beta"] = [1, 0]
    assert verify_certificate(bad).failed_check == "c"


def test_verify_rejects_rejected_point(c2_certificate):
    bad = copy.deepcopy(c2_certificate)
    bad["solution"]["function_field"]["point"] = {"Z": "1", "T": "1"}
    assert verify_certificate(bad).failed_check == "specialization"


# ---------------------------------------------------------------------------
# CLI


def test_cli_gadget_check(capsys):
    code, data = cli_json(capsys, "gadget", "check", "--y", "0")
    assert code == 0
    assert data["polynomial"] == "X^3 + X*T + T"
    assert data["galois_group"] == "S3"


def test_cli_gadget_distinct(capsys):
    code, data = cli_json(capsys, "gadget", "distinct", "--y", "0", "--y", "5")
    assert code == 0 and data[0]["distinct"] is True


def test_cli_realize_and_verify(tmp_path, capsys):
    out = tmp_path / "c1.json"
    assert main(["realize-aut", "--group", "C1", "--out", str(out)]) == 0
    capsys.readouterr()
    code, data = cli_json(capsys, "verify", str(out))
    assert code == 0 and data["ok"]


def test_cli_tampered_certificate_exit_1(tmp_path, capsys):
    out = tmp_path / "v4.json"
    args = ["realize-aut", "--group", "V4", "--L", "a:X^2-2;b:X^2-3", "--alpha", "0,1,2,3", "--out", str(out)]
    assert main(args) == 0
    data = json.loads(out.read_text())
    assert data["route"] == "galois-degenerate"
    data["solution"]["beta"] = [0, 2, 1, 3]
    out.write_text(json.dumps(data))
    capsys.readouterr()
    code, report = cli_json(capsys, "verify", str(out))
    assert code == 1 and report["failed_check"] == "d"


def test_cli_usage_errors_exit_2():
    assert run_cli("realize-aut")[0] == 2
    assert run_cli("realize-aut", "--group", "Q8")[0] == 2
    assert run_cli("specialize", "--poly", "X/2", "--point", "1")[0] == 2


def test_cli_catalog_miss_exit_1(capsys):
    code, data = cli_json(capsys, "realize-aut", "--group", "C7")
    assert code == 1
    assert data["ok"] is False and data["error"] == "CatalogMiss"


def test_cli_specialize_degraded_exits_0(capsys):
    code, data = cli_json(capsys, "specialize", "--poly", "X^2 - T", "--point", "4")
    assert code == 0 and data["accepted"] is False


def test_cli_catalog_check(capsys):
    code, data = cli_json(capsys, "catalog", "check", "--entry", "S3")
    assert code == 0
    assert data[0]["entry"] == "S3" and data[0]["passed"]


def test_cli_restriction(capsys):
    code, data = cli_json(capsys, "restriction", "--F", "a:X^2-2;b:X^2-3", "--L", "X^2-2")
    assert code == 0
    assert data["total"] and data["big_order"] == 4 and data["image"] == [0, 1]
    assert sorted(data["images"].values()) == [0, 0, 1, 1]


def test_cli_fiber_product(capsys):
    code, data = cli_json(
        capsys, "fiber-product", "--group", "S3", "--L", "X^2+3", "--alpha", "0,1,1,0,0,1", "--L-prime", "X^2+3"
    )
    assert code == 0
    assert data["G_prime"]["order"] == 6
    assert all(data["checks"].values())


def test_cli_output_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["realize-aut", "--group", "C2", "--out", str(a)]) == 0
    assert main(["realize-aut", "--group", "C2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
