import math

import pytest
from fastapi.testclient import TestClient

from wirenoise.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


class TestHealth:
    def test_health(self, client):
        r = client.get("/health")
        assert r.status_code == 200
        assert r.json() == {"status": "ok"}


class TestSweepEndpoint:
    def test_macronode_sweep_constant_column(self, client):
        r = client.post("/sweep-rotation",
                        json={"protocol": "macronode", "n": 2, "db": 5, "grid": 12})
        assert r.status_code == 200
        body = r.json()
        assert body["header"] == ["theta", "sv", "protocol", "n"]
        assert len(body["rows"]) == 12
        sv_values = {row[1] for row in body["rows"]}
        assert len(sv_values) == 1

    def test_cvw3_contains_divergent_points(self, client):
        # Grid size 3 forces a point exactly at pi/2.
        r = client.post("/sweep-rotation",
                        json={"protocol": "cvw", "n": 3, "db": 5, "grid": 3})
        body = r.json()
        thetas = [float(row[0]) for row in body["rows"]]
        # Serialized at 12 significant digits, so compare at that precision.
        assert any(abs(t - math.pi / 2) < 1e-10 for t in thetas)
        assert any(row[1] == "inf" for row in body["rows"])

    def test_determinism(self, client):
        payload = {"protocol": "dictionary", "n": 4, "db": 5, "grid": 9}
        a = client.post("/sweep-rotation", json=payload).json()
        b = client.post("/sweep-rotation", json=payload).json()
        assert a == b

    def test_bad_grid_rejected(self, client):
        r = client.post("/sweep-rotation",
                        json={"protocol": "cvw", "n": 3, "db": 5, "grid": 1})
        assert r.status_code == 422

    def test_db_and_alpha_together_rejected(self, client):
        r = client.post("/sweep-rotation",
                        json={"protocol": "cvw", "n": 3, "db": 5, "alpha": 0.5, "grid": 8})
        assert r.status_code == 422

    def test_missing_squeezing_rejected(self, client):
        r = client.post("/sweep-rotation", json={"protocol": "macronode", "n": 2, "grid": 8})
        assert r.status_code == 422

    def test_override_rejected_off_cvw(self, client):
        r = client.post("/sweep-rotation",
                        json={"protocol": "macronode", "n": 2, "db": 5, "g": 0.4, "grid": 8})
        assert r.status_code == 422

    def test_macronode_needs_two_measurements(self, client):
        r = client.post("/sweep-rotation",
                        json={"protocol": "macronode", "n": 3, "db": 5, "grid": 8})
        assert r.status_code == 400

    def test_cvw_with_full_override(self, client):
        r = client.post("/sweep-rotation",
                        json={"protocol": "cvw", "n": 3, "g": 1.0, "epsilon": 0.1, "grid": 8})
        assert r.status_code == 200


class TestGateNoiseEndpoint:
    def test_identity_closed_form(self, client):
        r = client.post("/gate-noise",
                        json={"protocol": "cvw", "db": 5, "gate": "R(0)S(1)R(0)"})
        assert r.status_code == 200
        body = r.json()
        alpha = 5 * math.log(10) / 20
        t = math.tanh(2 * alpha)
        eps = 1 / math.cosh(2 * alpha)
        assert body["sv_min"] == pytest.approx(eps * (4 + t * t) / t**2, rel=1e-9)
        assert body["n"] == 4
        assert len(body["plan_angles"]) == 4

    def test_matrix_gate(self, client):
        r = client.post("/gate-noise",
                        json={"protocol": "macronode", "db": 5, "gate": [1.0, 0.0, 0.0, 1.0]})
        assert r.status_code == 200
        assert r.json()["n"] == 2

    def test_non_symplectic_matrix_names_determinant(self, client):
        r = client.post("/gate-noise",
                        json={"protocol": "cvw", "db": 5, "gate": [1.0, 0.0, 0.0, 1.1]})
        assert r.status_code == 400
        assert "1.1" in r.json()["detail"]

    def test_unparseable_gate(self, client):
        r = client.post("/gate-noise",
                        json={"protocol": "cvw", "db": 5, "gate": "Hadamard"})
        assert r.status_code == 400

    def test_bound_checks_present(self, client):
        r = client.post("/gate-noise",
                        json={"protocol": "dictionary", "db": 5, "gate": "R(1)S(1.5)R(0.2)"})
        checks = r.json()["bound_checks"]
        assert checks["floor_satisfied"] is True
        assert checks["gap_satisfied"] is True
        assert checks["macronode_gap_margin"] >= 0

    def test_report_deterministic_given_seed(self, client):
        payload = {"protocol": "cvw", "db": 5, "gate": "R(0.7)S(1.4)R(-0.3)", "seed": 9}
        a = client.post("/gate-noise", json=payload).json()
        b = client.post("/gate-noise", json=payload).json()
        assert a == b


class TestVerifyEndpoint:
    def test_small_clean_run(self, client):
        r = client.post("/verify",
                        json={"samples": 25, "seed": 42, "db": 5, "oracle_samples": 10})
        assert r.status_code == 200
        body = r.json()
        assert body["passed"] is True
        v = body["violations"]
        assert v["bound53"] == 0 and v["bound_dict"] == 0 and v["appendixB"] == 0
        assert v["oracle_max_abs_dev"] < 1e-8

    def test_corrupt_kernel_negative_control(self, client):
        r = client.post("/verify",
                        json={"samples": 25, "seed": 42, "db": 5,
                              "oracle_samples": 5, "corrupt_kernel": True})
        body = r.json()
        assert body["passed"] is False
        assert sum(v for k, v in body["violations"].items()
                   if k != "oracle_max_abs_dev") > 0

    def test_zero_samples_rejected(self, client):
        r = client.post("/verify", json={"samples": 0, "seed": 1, "db": 5})
        assert r.status_code == 422


class TestOracleCheckEndpoint:
    def test_passes(self, client):
        r = client.post("/oracle-check", json={"samples": 15, "seed": 3})
        body = r.json()
        assert body["passed"] is True
        assert body["max_abs_dev"] < 1e-8

    def test_with_monte_carlo(self, client):
        r = client.post("/oracle-check", json={"samples": 5, "seed": 3, "mc_samples": 500})
        body = r.json()
        assert body["mc_max_sigma_dev"] is not None
        assert body["mc_max_sigma_dev"] < 5.0


class TestRemodelEndpoint:
    def test_alternating(self, client):
        r = client.post("/remodel",
                        json={"g": 0.5, "epsilon": 0.1, "mode": "alternating-selfloop"})
        body = r.json()
        assert body["epsilon_odd"] == pytest.approx(0.1)
        assert body["epsilon_even"] == pytest.approx(0.4)

    def test_bad_mode_rejected(self, client):
        r = client.post("/remodel", json={"g": 0.5, "epsilon": 0.1, "mode": "other"})
        assert r.status_code == 422

    def test_bad_wire_rejected(self, client):
        r = client.post("/remodel",
                        json={"g": 0.0, "epsilon": 0.1, "mode": "uniform-rescaled"})
        assert r.status_code == 400
