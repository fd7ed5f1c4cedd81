import json

import numpy as np
import pytest

from rhcube.builders import gen
from rhcube.documents import (
    DocumentError,
    canonical_json,
    matrix_from_json,
    node_label,
    parse,
    parse_filtration,
    parse_node_label,
    serialize,
    serialize_filtration,
)
from rhcube.objects import max_entry_deviation
from rhcube.predmod import constant, delta, esnault, extension, extension_filtration
from rhcube.rh import rh
from rhcube.strata import PolydiskContext

CTX1 = PolydiskContext(1, 1)


def test_serialize_delta_document_shape():
    doc = serialize(delta(CTX1))
    assert doc["kind"] == "pre-d-module"
    assert doc["context"] == {"d": 1, "r": 1}
    assert doc["nodes"]["[]"]["dim"] == 0
    assert doc["nodes"]["[1]"]["dim"] == 1
    assert doc["t"]["[1]|1"] == [[]]  # 1 x 0 matrix
    assert doc["s"]["[1]|1"] == []    # 0 x 1 matrix


def test_round_trip_esnault():
    e = esnault()
    doc = serialize(e)
    back = parse(doc)
    assert max_entry_deviation(back, e) == 0.0
    assert canonical_json(serialize(back)) == canonical_json(doc)


def test_round_trip_verdier():
    v = rh(constant(CTX1, 0.25))
    doc = serialize(v)
    assert doc["kind"] == "verdier-object"
    assert "mono" in doc["nodes"]["[]"]
    back = parse(doc)
    assert max_entry_deviation(back, v) == 0.0


def test_round_trip_preserves_metadata():
    e = gen("local-system", {"r": 2, "n": 2}, seed=3)
    doc = serialize(e)
    assert doc["metadata"]["name"] == "local-system"
    back = parse(doc)
    assert back.metadata["name"] == "local-system"


def test_arrow_key_direction_must_be_member():
    doc = serialize(constant(CTX1, 0.3))
    doc["t"]["[1]|2"] = [[[0.0, 0.0]]]
    with pytest.raises(DocumentError) as exc:
        parse(doc)
    assert "not a member" in str(exc.value)


def test_unknown_kind_rejected():
    with pytest.raises(DocumentError):
        parse({"kind": "mystery", "context": {"d": 1, "r": 1}})


def test_nonfinite_rejected():
    doc = serialize(constant(CTX1, 0.3))
    doc["nodes"]["[]"]["theta"]["1"] = [[[float("inf"), 0.0]]]
    with pytest.raises(DocumentError) as exc:
        parse(doc)
    assert "finite" in str(exc.value)


def test_wrong_shape_rejected_with_path():
    doc = serialize(constant(CTX1, 0.3))
    doc["nodes"]["[1]"]["theta"]["1"] = [[[0.0, 0.0]], [[0.0, 0.0]]]
    with pytest.raises(DocumentError) as exc:
        parse(doc)
    assert "nodes.[1].theta.1" in str(exc.value)


def test_bad_node_labels_rejected():
    with pytest.raises(DocumentError):
        parse_node_label("[2,1]", 2, "x")
    with pytest.raises(DocumentError):
        parse_node_label("[0]", 2, "x")
    with pytest.raises(DocumentError):
        parse_node_label("themask", 2, "x")
    assert parse_node_label("[]", 2, "x") == 0
    assert parse_node_label("[1,2]", 2, "x") == 0b11


def test_matrix_from_json_diagnostics():
    with pytest.raises(DocumentError):
        matrix_from_json([[0.5]], 1, 1, "p")  # entries must be [re, im]
    with pytest.raises(DocumentError):
        matrix_from_json("nope", 1, 1, "p")
    out = matrix_from_json([[[1.0, -2.0]]], 1, 1, "p")
    assert out[0, 0] == 1.0 - 2.0j


def test_canonical_json_deterministic():
    e = gen("local-system", {"r": 1, "n": 3}, seed=11)
    a = canonical_json(serialize(e))
    b = canonical_json(serialize(gen("local-system", {"r": 1, "n": 3}, seed=11)))
    assert a == b
    assert a.endswith("\n")
    json.loads(a)  # well formed


def test_filtration_round_trip():
    e = extension(CTX1, 1.0)
    filt = extension_filtration(e)
    doc = serialize_filtration(filt, e.ctx)
    back = parse_filtration(doc, e)
    assert back.grades == filt.grades
    for p in filt.grades:
        for a in e.node_order:
            assert np.allclose(back.steps[p].get(a, np.zeros((e.dims[a], 0))),
                               filt.steps[p].get(a, np.zeros((e.dims[a], 0))))


def test_node_label_rendering():
    assert node_label(()) == "[]"
    assert node_label((1, 3)) == "[1,3]"
