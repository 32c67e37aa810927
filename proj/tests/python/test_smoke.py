import math

import pytest

import steinb


def by_id(results):
    return {r["scenario"]: r for r in results}


def test_builtin_scenarios_round_trip():
    specs = steinb.builtin_scenarios()
    assert len(specs) == 18
    results = steinb.run(specs, jobs=2)
    assert [r["scenario"] for r in results] == sorted(s["id"] for s in specs)
    assert not any(r["failed"] for r in results)


def test_exponential_sqrt_chain():
    r = by_id(steinb.run(steinb.builtin_scenarios()))["exp-sca-h-sqrt"]
    assert abs(r["lower"] - math.pi / 16) < 1e-8
    assert abs(r["variance"] - (1 - math.pi / 4)) < 1e-8
    assert abs(r["upper"] - 0.25) < 1e-8


def test_custom_scenario_and_infinite_upper():
    spec = {
        "id": "skew",
        "family": "sas-gaussian",
        "role": {"kind": "skew", "value": 0.0},
        "test_function": "x",
    }
    (r,) = steinb.run([spec])
    assert r["upper"] == "inf"
    assert r["witness"] is not None
    assert all(c["pass"] for c in r["identity_checks"])


def test_wrong_law_is_detected():
    spec = {
        "id": "poisson-wrong",
        "family": "poisson",
        "value": 1.0,
        "law": {"family": "poisson", "role": {"kind": "theta", "value": 2.0}},
    }
    (r,) = steinb.run([spec], identity_only=True)
    assert not all(c["pass"] for c in r["identity_checks"])


def test_errors_carry_kind():
    with pytest.raises(steinb.SteinError) as info:
        steinb.run([{"id": "a", "family": "cauchy", "role": {"kind": "location", "value": 0}}])
    assert info.value.kind == "Parse"
    with pytest.raises(steinb.SteinError):
        steinb.table(tol=-1.0)


def test_table_passes_and_is_deterministic():
    first = steinb.table()
    assert first["all_pass"]
    assert [row["id"] for row in first["rows"]] == steinb.table_row_ids()
    assert first == steinb.table()
