import pytest
from fastapi.testclient import TestClient

import main
from models.settings import settings


@pytest.fixture
def client(tmp_path, monkeypatch):
    monkeypatch.setattr(settings, "temp_dir", str(tmp_path))
    main.job_storage.clear()
    return TestClient(main.app)


def _upload(path):
    return (path.name, path.read_bytes(), "text/plain")


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "healthy"
    assert body["version"] == "1.0.0"


def test_estimate_job_lifecycle(client, configs_dir, tmp_path):
    response = client.post("/estimate", files={"config": _upload(configs_dir / "estimate.cfg")})
    assert response.status_code == 200
    job_id = response.json()["job_id"]

    status = client.get(f"/status/{job_id}").json()
    assert status["status"] == "COMPLETED"
    assert status["result_available"]

    result = client.get(f"/result/{job_id}").json()
    assert "critical_density" in result["report"]["estimates"]
    assert "estimate_manifest.json" in result["files"]
    assert result["job_metadata"]["command"] == "estimate"
    assert (tmp_path / job_id / "estimate_estimate.json").is_file()

    listing = client.get("/jobs").json()
    assert listing["total_jobs"] == 1

    deleted = client.delete(f"/jobs/{job_id}")
    assert deleted.status_code == 200
    assert not (tmp_path / job_id).exists()
    assert client.get(f"/status/{job_id}").status_code == 404


def test_simulate_and_fit_jobs(client, configs_dir, fig1_csv):
    response = client.post("/simulate", files={"config": _upload(configs_dir / "fig1.cfg")}, params={"seed": 3})
    job_id = response.json()["job_id"]
    assert client.get(f"/status/{job_id}").json()["status"] == "COMPLETED"
    assert client.get(f"/result/{job_id}").json()["report"]["provenance"]["seed"] == 3

    response = client.post(
        "/fit",
        files={"config": _upload(configs_dir / "fig1.cfg"), "trace": ("trace.csv", fig1_csv.read_bytes(), "text/csv")},
    )
    assert response.status_code == 200
    job_id = response.json()["job_id"]
    status = client.get(f"/status/{job_id}").json()
    assert status["status"] == "COMPLETED", status
    report = client.get(f"/result/{job_id}").json()["report"]
    assert abs(report["derived"]["orientation"]) == pytest.approx(0.346, abs=1e-2)


def test_failed_job_reports_exit_code(client, configs_dir):
    response = client.post("/pulsed", files={"config": _upload(configs_dir / "fig1.cfg")})
    job_id = response.json()["job_id"]
    status = client.get(f"/status/{job_id}").json()
    assert status["status"] == "FAILED"
    assert status["error_details"]["exit_code"] == 2
    assert client.get(f"/result/{job_id}").status_code == 400


def test_invalid_config_is_rejected_with_line(client):
    bad = ("bad.cfg", b"schema_version = 1\n[grid]\npoints = 1\n", "text/plain")
    response = client.post("/simulate", files={"config": bad})
    assert response.status_code == 422
    assert response.json()["detail"]["line"] == 3


def test_upload_extension_is_checked(client, configs_dir):
    response = client.post("/estimate", files={"config": ("estimate.json", b"{}", "application/json")})
    assert response.status_code == 400


def test_unknown_job(client):
    assert client.get("/status/nope").status_code == 404
    assert client.get("/result/nope").status_code == 404
    assert client.delete("/jobs/nope").status_code == 404


def test_oldest_finished_jobs_are_evicted(client, configs_dir, tmp_path, monkeypatch):
    monkeypatch.setattr(settings, "max_stored_jobs", 2)
    ids = [
        client.post("/estimate", files={"config": _upload(configs_dir / "estimate.cfg")}).json()["job_id"]
        for _ in range(3)
    ]
    assert len(main.job_storage) == 2
    assert client.get(f"/status/{ids[0]}").status_code == 404
    assert not (tmp_path / ids[0]).exists()
    assert client.get(f"/status/{ids[2]}").json()["status"] == "COMPLETED"
