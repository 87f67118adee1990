"""Tests for the command-line front end."""

import json

import numpy as np
import pytest

from pdoenc.cli import (
    EXIT_CONFIG,
    EXIT_FAIL,
    EXIT_PASS,
    EXIT_RESOURCE,
    build_encoding,
    circuit_from_text,
    circuit_to_text,
    load_config,
    main,
)
from pdoenc.simcore import Circuit, circuit_unitary


def write_config(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


SEPARABLE_CFG = {
    "grid": {"p": 2, "d": 1},
    "pipeline": "separable",
    "epsilon": 0.05,
    "symbol": {"alpha": [1.0], "beta": [1.0], "c_alpha": 1.0, "c_beta": 1.0},
}

FULLSEP_CFG = {
    "grid": {"p": 2, "d": 1},
    "pipeline": "fully-separable",
    "epsilon": 1e-3,
    "symbol": {
        "x_factors": [{"kind": "even", "coeffs": [1.0]}],
        "xi_factors": [{"kind": "odd", "coeffs": [0.0, 0.5], "constant": 1.0}],
    },
}

ELLIPTIC_CFG = {
    "grid": {"p": 2, "d": 1},
    "pipeline": "elliptic",
    "epsilon": 1e-3,
    "symbol": {
        "coefficients": [2.0, [0.0, -0.5], [0.0, 0.5]],
        "q": [[0], [1], [-1]],
    },
}


class TestCircuitListing:
    def test_round_trip_all_gate_kinds(self):
        rng = np.random.default_rng(4)
        c = Circuit(3)
        c.h(0)
        c.x(1, [(0, 1)])
        c.s(2)
        c.ry(1, 0.7, [(2, 0)])
        c.rz(0, -1.3)
        c.swap(0, 2)
        c.gphase(1, 0.25, [(0, 1), (2, 0)])
        c.oracle_perm((0, 1), [2, 0, 3, 1])
        c.oracle_diag((2,), np.exp(1j * rng.uniform(-np.pi, np.pi, size=2)))
        q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        c.unitary((1, 2), q)
        c.global_phase = np.exp(0.3j)
        back = circuit_from_text(circuit_to_text(c))
        assert back.wire_count == 3
        assert np.max(np.abs(circuit_unitary(back) - circuit_unitary(c))) < 1e-12

    def test_encode_output_resimulates(self, tmp_path):
        # Small grid and loose tolerance keep the wire count inside the dense
        # unitary cap while still exercising the oracle gates in the listing.
        small = dict(SEPARABLE_CFG, grid={"p": 1, "d": 1}, epsilon=2.0)
        run = load_config(_Args(write_config(tmp_path, small)))
        be = build_encoding(run)
        back = circuit_from_text(circuit_to_text(be.circuit))
        u0 = circuit_unitary(be.circuit)
        assert np.max(np.abs(circuit_unitary(back) - u0)) < 1e-12

    def test_bad_listing_rejected(self):
        from pdoenc.cli import ConfigError

        with pytest.raises(ConfigError):
            circuit_from_text("H 0 -\n")  # no header
        with pytest.raises(ConfigError):
            circuit_from_text("# wires=2\nFOO 0 - -\n")


class _Args:
    def __init__(self, config, pipeline=None, epsilon=None, max_wires=None, out=None):
        self.config = config
        self.pipeline = pipeline
        self.epsilon = epsilon
        self.max_wires = max_wires
        self.out = out
        self.seed = 7


class TestConfig:
    def test_flag_overrides(self, tmp_path):
        path = write_config(tmp_path, SEPARABLE_CFG)
        run = load_config(_Args(path, epsilon=0.1))
        assert run["epsilon"] == pytest.approx(0.1)

    def test_missing_field(self, tmp_path):
        from pdoenc.cli import ConfigError

        bad = dict(SEPARABLE_CFG)
        del bad["epsilon"]
        with pytest.raises(ConfigError, match="epsilon"):
            load_config(_Args(write_config(tmp_path, bad)))

    def test_unknown_pipeline(self, tmp_path):
        from pdoenc.cli import ConfigError

        bad = dict(SEPARABLE_CFG, pipeline="frobnicate")
        with pytest.raises(ConfigError, match="pipeline"):
            load_config(_Args(write_config(tmp_path, bad)))


class TestVerifyCommand:
    def test_separable_identity_passes(self, tmp_path):
        path = write_config(tmp_path, SEPARABLE_CFG)
        out = str(tmp_path / "run")
        code = main(["verify", "--config", path, "--out", out])
        assert code == EXIT_PASS
        rep = json.loads((tmp_path / "run.report.json").read_text())
        assert rep["passed"] is True
        assert "success_probability" in rep
        assert rep["gamma"] == pytest.approx(1.0)

    def test_fully_separable_passes(self, tmp_path):
        path = write_config(tmp_path, FULLSEP_CFG)
        out = str(tmp_path / "run")
        assert main(["verify", "--config", path, "--out", out]) == EXIT_PASS

    def test_undersized_constant_rejected(self, tmp_path):
        bad = dict(
            SEPARABLE_CFG,
            symbol={"alpha": [3.0], "beta": [1.0], "c_alpha": 1.0, "c_beta": 1.0},
        )
        path = write_config(tmp_path, bad)
        assert main(["verify", "--config", path]) == EXIT_CONFIG

    def test_resource_cap(self, tmp_path):
        path = write_config(tmp_path, SEPARABLE_CFG)
        code = main(["verify", "--config", path, "--max-wires", "4"])
        assert code == EXIT_RESOURCE

    def test_wire_cap_exceeded_inside_pipeline(self, tmp_path):
        tight = dict(SEPARABLE_CFG, epsilon=1e-5)
        path = write_config(tmp_path, tight)
        assert main(["verify", "--config", path]) == EXIT_RESOURCE


class TestEncodeCommand:
    def test_elliptic_metadata_gamma(self, tmp_path):
        path = write_config(tmp_path, ELLIPTIC_CFG)
        out = str(tmp_path / "ell")
        assert main(["encode", "--config", path, "--out", out]) == EXIT_PASS
        meta = json.loads((tmp_path / "ell.json").read_text())
        assert meta["gamma"] == pytest.approx(1 + 208 * np.pi**2)
        listing = (tmp_path / "ell.circuit").read_text()
        assert listing.startswith("# wires=")

    def test_inverse_expsum_artifact(self, tmp_path):
        cfg = {"grid": {"p": 3, "d": 1}, "pipeline": "inverse", "epsilon": 0.01}
        path = write_config(tmp_path, cfg)
        out = str(tmp_path / "inv")
        assert main(["encode", "--config", path, "--out", out]) == EXIT_PASS
        lines = (tmp_path / "inv.expsum").read_text().strip().splitlines()
        header = lines[0]
        assert header.startswith("# form=gaussian")
        assert len(lines) - 1 == int(header.split("M=")[1].split()[0])


class TestPhasesCommand:
    def test_t1_round_trip(self, tmp_path):
        path = write_config(tmp_path, {"coeffs": [0.0, 1.0], "parity": "odd"})
        out = tmp_path / "phases.txt"
        assert main(["phases", "--config", path, "--out", str(out)]) == EXIT_PASS
        body = out.read_text()
        angles = [float(s) for s in body.splitlines() if not s.startswith("#")]
        assert len(angles) == 2
        residual = float(body.splitlines()[-1].split("=")[1])
        assert residual <= 1e-8

    def test_parity_mismatch_rejected(self, tmp_path):
        path = write_config(tmp_path, {"coeffs": [0.1, 1.0], "parity": "odd"})
        assert main(["phases", "--config", path]) == EXIT_CONFIG

    def test_deterministic_output(self, tmp_path):
        path = write_config(
            tmp_path, {"coeffs": [0.0, 0.3, 0.0, 0.4], "parity": "odd"}
        )
        out1, out2 = tmp_path / "a.txt", tmp_path / "b.txt"
        assert main(["phases", "--config", path, "--out", str(out1)]) == EXIT_PASS
        assert main(["phases", "--config", path, "--out", str(out2)]) == EXIT_PASS
        assert out1.read_bytes() == out2.read_bytes()
