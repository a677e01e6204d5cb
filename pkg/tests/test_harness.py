import math

import numpy as np
import pytest

from hyptype.constants import bp_constant_k
from hyptype.density import DensityKind, beta
from hyptype.geometry import DomainError, domain_from_json, punctured_disk, two_point_domain, unit_ball
from hyptype.harness import (
    SUITES,
    DomainTag,
    GridSpec,
    VerifyReport,
    _repro,
    field,
    field_csv,
    reference_hyperbolic_density,
    run_suite,
    verify_theorem_A,
)


def test_reference_density():
    assert reference_hyperbolic_density(DomainTag.UNIT_DISK, [0, 0]) == 1
    assert reference_hyperbolic_density("unit_disk", [0.5, 0]) == pytest.approx(4 / 3)
    assert reference_hyperbolic_density(DomainTag.PUNCTURED_DISK, [0.1, 0]) == pytest.approx(1 / (0.2 * math.log(10)))
    with pytest.raises(DomainError):
        reference_hyperbolic_density(DomainTag.PUNCTURED_DISK, [0, 0])
    with pytest.raises(DomainError):
        reference_hyperbolic_density(DomainTag.UNIT_DISK, [1, 0])


def test_theorem_a_examples():
    k = bp_constant_k()
    z = np.zeros(2)
    assert reference_hyperbolic_density("unit_disk", z) * 1.0 * (beta(unit_ball(2), z) + k) == pytest.approx(5.7627, abs=1e-4)
    z = np.array([0.1, 0.0])
    val = reference_hyperbolic_density("punctured_disk", z) * 0.1 * (beta(punctured_disk(), z) + k)
    # closed form: eta = 1/(2 r log(1/r)), d = r, beta = log(1/r) at r = 0.1
    assert val == pytest.approx((math.log(10) + k) / (2 * math.log(10)), rel=1e-12)
    assert val == pytest.approx(1.75136, abs=1e-5)


def test_theorem_a_sweep():
    rep = verify_theorem_A(200, seed=0)
    assert rep.passed
    assert rep.cases == 400


def test_field_two_point():
    rows = field(two_point_domain(), DensityKind.LAMBDA_PPRIME, GridSpec([-0.5, -0.5], [0.5, 0.5], [3, 3]))
    assert len(rows) == 9
    for r in rows:
        assert r["status"] == "ok"
        assert r["value"] * r["d_boundary"] <= 1 + 1e-9


def test_field_ball_collapse():
    for kind in DensityKind:
        rows = field(unit_ball(2), kind, GridSpec([-1.2, -1.2], [1.2, 1.2], [9, 9]))
        inside = [r for r in rows if r["status"] == "ok"]
        assert inside and len(inside) < len(rows)
        for r in inside:
            assert r["value"] == pytest.approx(1 / r["d_boundary"], abs=1e-10)


def test_field_outside_and_errors():
    rows = field(unit_ball(2), "lambda", GridSpec([2, 2], [3, 3], [2, 2]))
    assert all(r["status"] == "outside" and math.isnan(r["value"]) for r in rows)
    with pytest.raises(ValueError):
        field(unit_ball(2), "lambda", GridSpec([0, 0], [1, 1], [0, 3]))
    with pytest.raises(ValueError):
        field(unit_ball(2), "lambda", GridSpec([0, 0, 0], [1, 1, 1], [2, 2, 2]))


def test_field_marks_unresolvable_rows():
    from hyptype.geometry import DomainSpec, RemovedBall, WholeSpace

    D = DomainSpec(2, WholeSpace(), (RemovedBall([-0.6, 1.1], 0.15), RemovedBall([1.0, 0.0], 0.2)))
    rows = field(D, "lambda", GridSpec([-0.95, 1.1], [-0.75, 1.1], [2, 1]))
    assert [r["status"] for r in rows] == ["ok", "boundary"]


def test_field_csv():
    rows = field(two_point_domain(), "lambda2", GridSpec([-0.5, 1.0], [0.5, 1.0], [2, 1]))
    lines = field_csv(rows).strip().split("\n")
    assert lines[0] == "x0,x1,d_boundary,reciprocal,value,exceptional,status"
    assert len(lines) == 3


def test_report_sorting_and_repro():
    rep = VerifyReport("demo")
    D = two_point_domain()
    rep.check(False, (2, "b"), 1, 2, **_repro(D, 7, z=[0.5, 0.5]))
    rep.check(False, (1, "a"), 1, 2, **_repro(D, 7, z=[0.5, 0.5]))
    rep.check(True, (0, "ok"), 1, 1)
    d = rep.to_dict()
    assert not d["passed"] and d["cases"] == 3
    assert [f["case"] for f in d["failures"]] == [(1, "a"), (2, "b")]
    f = d["failures"][0]
    assert f["seed"] == 7 and f["z"] == [0.5, 0.5]
    assert domain_from_json(f["domain"]).dim == 2


def test_suite_names():
    assert list(SUITES) == [
        "lemma2-chain", "lemma3-monotonicity", "lemma5-example", "lemma4-example",
        "lemma6-distance-chain", "lemma7-witness", "lemma8-continuity", "lemma-le1-monotone",
        "theorem-A", "qc1", "qc2", "roots",
    ]
    with pytest.raises(ValueError):
        run_suite("lemma9")


def test_example_reports():
    r4 = run_suite("lemma4-example")
    assert r4.passed
    for n in (2, 3):
        vals = r4.info[f"n={n}"]["lambda_D2"]
        for kind in DensityKind:
            assert vals[kind.value] == pytest.approx(1.0, abs=1e-9)
    r5 = run_suite("lemma5-example")
    assert r5.passed
    assert 1.009 <= r5.info["n=2"]["1/lambda''"] <= 1.011


def test_suites_deterministic():
    a = run_suite("lemma2-chain", seed=3, cases=20).to_dict()
    b = run_suite("lemma2-chain", seed=3, cases=20).to_dict()
    assert a == b


@pytest.mark.parametrize("name", ["lemma3-monotonicity", "lemma7-witness", "lemma8-continuity", "qc1"])
def test_small_suites_pass(name):
    assert run_suite(name, seed=1, cases=20).passed
