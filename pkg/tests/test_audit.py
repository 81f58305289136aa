import json

import pytest

from ladderkit.audit import SUITES, run_suites

FLAGGED = {
    "COMM_OSC_PAPER",
    "HA_ORDER_COULOMB_PAPER",
    "INTERTWINE_OSC_PAPER",
    "NORMALFORM_HALF",
    "NORMALIZATION_SIGN_COULOMB",
    "NORMALIZATION_SIGN_OSC",
    "RICCATI_OSC_PAPER_SQRT_KR",
    "ROBERTSON_SPHERICAL_PAPER",
    "ROLE_ASSIGNMENT",
    "SYSTEMS_COUNT",
}


@pytest.fixture(scope="module")
def checks():
    return run_suites(SUITES, seed=0)


def test_no_check_fails(checks):
    assert [c.id for c in checks if c.status == "fail"] == []


def test_ids_unique_and_sorted(checks):
    ids = [c.id for c in checks]
    assert len(set(ids)) == len(ids)
    assert ids == sorted(ids)


def test_discrepancies_are_flagged(checks):
    assert {c.id for c in checks if c.status == "flagged"} == FLAGGED


def test_records_serialize(checks):
    for c in checks:
        rec = c.to_json()
        assert rec["status"] in ("pass", "fail", "flagged")
        json.dumps(rec)
