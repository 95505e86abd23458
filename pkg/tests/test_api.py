from fastapi.testclient import TestClient

from gcm_lab.main import app


client = TestClient(app)


def test_health() -> None:
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_evaluate_family_at_sampled_point() -> None:
    response = client.post("/v1/family/evaluate", json={"lambda": [-1.0, -3.0], "seed": 3})
    assert response.status_code == 200
    data = response.json()
    assert data["n"] == 2
    assert data["lambda"] == [-1.0, -3.0]
    assert list(data["values"]) == ["thimm(1,1)", "g(0,1)", "g_last(0)", "g_last(1)"]
    assert -3.0 <= data["values"]["thimm(1,1)"] <= 0.0


def test_evaluate_family_from_matrix_literal() -> None:
    payload = {"variant": "g", "matrix": {"n": 1, "entries": [[0.0, 0.0, 1.0, 0.0]]}}
    response = client.post("/v1/family/evaluate", json=payload)
    assert response.status_code == 200
    data = response.json()
    assert data["lambda"] == [-1.0]
    assert abs(data["values"]["g_last(0)"]) < 1e-12


def test_evaluate_rejects_bad_input() -> None:
    not_skew = {"matrix": {"n": 1, "entries": [[1.0, 0.0, 0.0, 0.0]]}}
    assert client.post("/v1/family/evaluate", json=not_skew).status_code == 400
    assert client.post("/v1/family/evaluate", json={"lambda": [1.0]}).status_code == 400
    assert client.post("/v1/family/evaluate", json={}).status_code == 400


def test_pattern_count() -> None:
    response = client.get("/v1/patterns/count", params={"kind": "sp", "top": "-1,-1"})
    assert response.status_code == 200
    data = response.json()
    assert data["count"] == data["weyl_dim"] == 5
    assert "patterns" not in data

    listed = client.get("/v1/patterns/count", params={"kind": "gl", "top": "1,0", "list": "true"}).json()
    assert listed["patterns"] == [[[1, 0], [0]], [[1, 0], [1]]]

    assert client.get("/v1/patterns/count", params={"kind": "gl", "top": "0,1"}).status_code == 400


def test_explain_labels() -> None:
    response = client.get("/v1/explain/g(0,1)")
    assert response.status_code == 200
    assert response.json()["kind"] == "function"
    assert response.json()["citation"]
    assert client.get("/v1/explain/commute").json()["kind"] == "suite"
    missing = client.get("/v1/explain/nope")
    assert missing.status_code == 404


def test_presets() -> None:
    names = [p["name"] for p in client.get("/v1/presets").json()]
    assert {"desk-n2", "desk-n3", "smoke"} <= set(names)
    assert client.get("/v1/presets/desk-n2").json()["lambda"] == [-1.0, -3.0]
    assert client.get("/v1/presets/missing").status_code == 404


def test_run_experiments() -> None:
    response = client.post("/v1/experiments/run", json={"suites": ["patterns"]})
    assert response.status_code == 200
    data = response.json()
    assert data["summary"]["pass"] is True
    assert data["summary"]["suites"][0]["report_file"] is None
    assert data["reports"]["patterns"]["pass"] is True


def test_run_experiments_reports_config_issues() -> None:
    response = client.post("/v1/experiments/run", json={"n": 2, "lambda": [-1.0, -1.0], "suites": ["commute"]})
    assert response.status_code == 400
    issues = response.json()["detail"]["issues"]
    assert [i["code"] for i in issues] == ["LAMBDA_NOT_STRICT"]
