import pytest
from fastapi.testclient import TestClient

from rhcube.documents import parse, serialize
from rhcube.objects import max_entry_deviation
from rhcube.predmod import constant, esnault, extension, extension_filtration
from rhcube.rh import rh
from rhcube.service import app
from rhcube.strata import PolydiskContext
from rhcube.documents import serialize_filtration

CTX1 = PolydiskContext(1, 1)


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_validate_ok(client):
    doc = serialize(esnault())
    resp = client.post("/validate", json={"object": doc})
    assert resp.status_code == 200
    body = resp.json()
    assert body["ok"] is True
    assert body["violations"] == []


def test_validate_reports_violations(client):
    bad = constant(CTX1, 0.3).perturbed("up", (1, 1), 0.5)
    resp = client.post("/validate", json={"object": serialize(bad)})
    assert resp.status_code == 200
    body = resp.json()
    assert body["ok"] is False
    assert body["violations"][0]["axiom"].startswith("euler")


def test_validate_malformed_422(client):
    resp = client.post("/validate", json={"object": {"kind": "nope"}})
    assert resp.status_code == 422
    assert resp.json()["detail"]["code"] == "malformed"


def test_good_eig_esnault(client):
    resp = client.post("/good-eig", json={"object": serialize(esnault())})
    assert resp.status_code == 200
    body = resp.json()
    assert body["good"] is False
    eigs = {round(body["witness"]["eig_a"][0]), round(body["witness"]["eig_b"][0])}
    assert eigs == {0, 1}


def test_good_eig_invalid_object_code(client):
    bad = constant(CTX1, 0.3).perturbed("up", (1, 1), 0.5)
    resp = client.post("/good-eig", json={"object": serialize(bad)})
    assert resp.status_code == 422
    assert resp.json()["detail"]["code"] == "invalid-object"


def test_rh_and_inverse_round_trip(client):
    doc = serialize(constant(CTX1, 0.25))
    rh_resp = client.post("/rh", json={"object": doc})
    assert rh_resp.status_code == 200
    v_doc = rh_resp.json()["object"]
    assert v_doc["kind"] == "verdier-object"
    inv_resp = client.post("/inv-rh", json={"object": v_doc, "sigma": 0.0})
    assert inv_resp.status_code == 200
    back = parse(inv_resp.json()["object"])
    assert max_entry_deviation(back, constant(CTX1, 0.25)) <= 1e-10


def test_inv_rh_rejects_bad_sigma(client):
    v_doc = serialize(rh(constant(CTX1, 0.25)))
    resp = client.post("/inv-rh", json={"object": v_doc, "sigma": 0.5})
    assert resp.status_code == 422


def test_jh_endpoint(client):
    from rhcube.predmod import delta

    obj = delta(CTX1).direct_sum(constant(CTX1, 0.25))
    resp = client.post("/jh", json={"object": serialize(obj), "seed": 1})
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert body["length"] == 2
    assert sorted(f["multiplicity"] for f in body["factors"]) == [1, 1]


def test_sequiv_endpoint(client):
    e = extension(CTX1, 1.0)
    filt = extension_filtration(e)
    deg_resp = client.post("/degenerate", json={
        "object": serialize(e),
        "filtration": serialize_filtration(filt, e.ctx),
        "tau": 0.0,
    })
    assert deg_resp.status_code == 200
    graded = deg_resp.json()["object"]
    resp = client.post("/sequiv", json={"object_a": serialize(e), "object_b": graded})
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "decided"
    assert body["equivalent"] is True


def test_stable_endpoint(client):
    resp = client.post("/stable", json={"object": serialize(constant(CTX1, 0.5))})
    assert resp.json() == {"status": "decided", "stable": True}
    resp2 = client.post("/stable", json={"object": serialize(extension(CTX1, 1.0))})
    assert resp2.json() == {"status": "decided", "stable": False}


def test_degenerate_identity_at_tau_one(client):
    e = extension(CTX1, 1.0)
    filt = extension_filtration(e)
    resp = client.post("/degenerate", json={
        "object": serialize(e),
        "filtration": serialize_filtration(filt, e.ctx),
        "tau": 1.0,
    })
    assert resp.status_code == 200
    out = parse(resp.json()["object"])
    assert max_entry_deviation(out, e) < 1e-12


def test_jacobian_endpoint_object(client):
    resp = client.post("/jacobian", json={"object": serialize(constant(CTX1, 0.3))})
    assert resp.status_code == 200
    body = resp.json()
    assert body["all_full"] is True
    assert body["arrows"]["[1]|1"]["rank"] == 4


def test_jacobian_endpoint_pair(client):
    resp = client.post("/jacobian", json={
        "s": [[[1.0, 0.0]], [[0.0, 0.0]]],   # 2 x 1
        "t": [[[1.0, 0.0], [0.0, 0.0]]],     # 1 x 2
    })
    assert resp.status_code == 200
    body = resp.json()["arrows"]["pair"]
    assert body["expected"] == 8
    assert body["full"] is False


def test_gen_endpoint(client):
    resp = client.post("/gen", json={"builder": "local-system",
                                     "params": {"r": 2, "n": 2}, "seed": 5})
    assert resp.status_code == 200
    doc = resp.json()["object"]
    check = client.post("/validate", json={"object": doc})
    assert check.json()["ok"] is True


def test_gen_unknown_builder(client):
    resp = client.post("/gen", json={"builder": "mystery"})
    assert resp.status_code == 422


def test_strata_endpoint(client):
    resp = client.post("/strata", json={"d": 2, "r": 2})
    assert resp.status_code == 200
    body = resp.json()
    assert [s["subset"] for s in body["strata"]] == [[], [1], [2], [1, 2]]
    assert body["cover_y_star"]["1"] == [[[1], 1], [[2], 2]]
    assert body["cover_z"]["2"] == [[[1, 2], [1, 2]]]
    assert len(body["cover_z_star"]["2"]) == 2


def test_monodromy_consistency_endpoint(client):
    v_doc = serialize(rh(constant(CTX1, 0.25)))
    resp = client.post("/monodromy-consistency", json={"object": v_doc})
    assert resp.status_code == 200
    assert resp.json()["ok"] is True
