import json

import jsonschema
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prodsys import amalgam as am
from prodsys import ccr
from prodsys import cluster as cl
from prodsys import inclusion as inc
from prodsys import linalg as la
from prodsys import serialize as ser
from prodsys import units
from prodsys.suites import SuiteConfig, run_suite

seeds = st.integers(0, 2**32 - 1)


def test_ccr_system_round_trip(tmp_path):
    E = ccr.build(2, 2)
    again = ser.load(ser.dump(E, tmp_path / "e.json"))
    assert isinstance(again, ccr.GridCCR) and (again.k, again.level) == (2, 2)


def test_explicit_system_round_trip_is_bitwise(tmp_path):
    tr = ccr.truncate(ccr.build(1, 2), 1)
    again = ser.load(ser.dump(tr, tmp_path / "t.json"))
    assert again.kind == "inclusion"
    for a, b in tr.pairs():
        assert ser.arrays_identical(again.beta(a, b), tr.beta(a, b))


@given(seeds)
def test_unit_round_trip_is_bitwise(seed):
    E = ccr.build(1, 2)
    u = units.unit_from_cell(E, la.haar_vector(np.random.default_rng(seed), 2))
    again = ser.from_json(json.loads(json.dumps(ser.to_json(u))))
    assert all(ser.arrays_identical(again[m], u[m]) for m in u.times())


@given(seeds)
def test_cpmap_round_trip_is_bitwise(seed):
    phi = am.ad(la.random_unitary(np.random.default_rng(seed), 3))
    again = ser.from_json(json.loads(json.dumps(ser.to_json(phi))))
    assert ser.arrays_identical(again.choi, phi.choi)


def test_distribution_file_has_all_subsets(tmp_path):
    E = ccr.build(1, 2)
    dist = cl.random_set_distribution(E, cl.unit_line(E, ccr.vacuum(E)), cl.FaithfulState.diagonal(16, 2))
    path = ser.dump(dist, tmp_path / "d.json")
    raw = json.loads(path.read_text())
    assert len(raw["data"]["probs"]) == 2**4
    assert ser.arrays_identical(ser.load(path).probs, dist.probs)


def test_report_matches_schema():
    rep, wall = run_suite(SuiteConfig(suite="powers", level=2))
    doc = ser.report_to_json(rep, {"suite": "powers"}, wall)
    ser.validate_report(json.loads(json.dumps(doc)))
    assert all(c["paper_ref"] for c in doc["checks"])
    del doc["checks"][0]["paper_ref"]
    with pytest.raises(jsonschema.ValidationError):
        ser.validate_report(doc)


def test_unknown_objects():
    with pytest.raises(TypeError):
        ser.to_json(object())
    with pytest.raises(ValueError):
        ser.from_json({"object": "nope", "data": {}})


def test_trivial_system_is_tensor_power():
    d = ser.system_to_json(inc.trivial_system(2))
    assert d == {"type": "tensor_power", "cell_dim": 1, "level": 2}
