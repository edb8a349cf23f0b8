"""Presets, matrix file format, config validation, run manifests."""

import json

import numpy as np
import pytest

from matflow import ConfigError, emit_config, parse_config
from matflow.linalg import hs_norm_sq, min_eigenvalue
from matflow.matrixio import (
    MatrixFormatError,
    fmt_float,
    load_matrix,
    matrix_to_json,
    parse_matrix_json,
    save_matrix,
)
from matflow.presets import preset
from matflow.sampling import rng_from_seed


class TestPresets:
    def test_eigen_zero_is_scaled_identity(self, model):
        for n in (2, 4):
            a = preset("eigen:0", model(n))
            assert np.abs(a - np.eye(n) / np.sqrt(n)).max() <= 1e-10

    def test_random_tracefree_unit(self, model):
        a = preset("random-tracefree-unit", model(3), seed=11)
        assert abs(np.trace(a)) <= 1e-12
        assert hs_norm_sq(a) == pytest.approx(1.0, abs=1e-12)
        assert np.abs(a - a.conj().T).max() <= 1e-12

    def test_random_pd_unit(self, model):
        a = preset("random-pd-unit", model(4), seed=12)
        assert hs_norm_sq(a) == pytest.approx(1.0, abs=1e-12)
        assert min_eigenvalue(a) > 0.0

    def test_two_mode_n2(self, model, paulis):
        sx, sy, _ = paulis
        assert np.abs(preset("two-mode", model(2)) - (sx + sy) / 2.0).max() == 0.0

    def test_two_mode_larger_n(self, model):
        m = model(3)
        a = preset("two-mode", m)
        basis = m.eigenbasis()
        expected = (basis.eigenmatrices[1] + basis.eigenmatrices[2]) / np.sqrt(2.0)
        assert np.abs(a - expected).max() <= 1e-12
        assert hs_norm_sq(a) == pytest.approx(1.0, abs=1e-10)

    def test_seed_determinism(self, model):
        a = preset("random-tracefree-unit", model(3), seed=5)
        b = preset("random-tracefree-unit", model(3), seed=5)
        c = preset("random-tracefree-unit", model(3), seed=6)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_unknown_rejected(self, model):
        with pytest.raises(ValueError):
            preset("nope", model(2))
        with pytest.raises(ValueError):
            preset("eigen:99", model(2))


class TestMatrixIO:
    def test_round_trip(self, tmp_path):
        rng = rng_from_seed(80)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        path = tmp_path / "m.json"
        save_matrix(path, a)
        assert np.abs(load_matrix(path) - a).max() <= 1e-15

    def test_ragged_rejected(self):
        doc = {"n": 2, "re": [[1.0, 2.0], [3.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}
        with pytest.raises(MatrixFormatError):
            parse_matrix_json(doc)

    def test_missing_field_rejected(self):
        with pytest.raises(MatrixFormatError):
            parse_matrix_json({"n": 2, "re": [[1.0, 0.0], [0.0, 1.0]]})

    def test_json_layout(self):
        doc = matrix_to_json(np.array([[1.0 + 2.0j]]))
        assert doc == {"n": 1, "re": [[1.0]], "im": [[2.0]]}

    def test_float_format_round_trip(self):
        values = [1.0, np.pi, 1e-17, -2.0 / 3.0, 12345.6789]
        for v in values:
            assert float(fmt_float(v)) == v
        assert fmt_float(None) == ""
        assert fmt_float(float("nan")) == ""


class TestConfig:
    def test_minimal_spectrum_config(self):
        cfg = parse_config(
            '{"kind":"spectrum","model":{"n":2,"variant":"clock-shift"},'
            '"output":{"paths":["s.csv"],"formats":["csv"]}}'
        )
        assert cfg.kind == "spectrum"
        assert cfg.model.n == 2
        assert cfg.seed == 0
        assert cfg.output.paths == ("s.csv",)

    def test_missing_model_reported(self):
        with pytest.raises(ConfigError) as err:
            parse_config('{"kind":"spectrum"}')
        assert any("model" in p for p in err.value.problems)

    def test_n_below_two_rejected(self):
        with pytest.raises(ConfigError) as err:
            parse_config('{"kind":"spectrum","model":{"n":1}}')
        assert any("model.n" in p for p in err.value.problems)

    def test_all_errors_collected(self):
        doc = {
            "kind": "evolve",
            "model": {"n": 1},
            "init": {"preset": "nope"},
            "solver": {"solver": "magic", "dt": -1.0},
            "checks": ["bogus-check"],
            "seed": "zero",
        }
        with pytest.raises(ConfigError) as err:
            parse_config(json.dumps(doc))
        text = "\n".join(err.value.problems)
        for needle in ("model.n", "init", "solver.solver", "solver.dt", "bogus-check", "seed"):
            assert needle in text
        assert len(err.value.problems) >= 6

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            parse_config('{"kind":"frobnicate"}')

    def test_unreadable_matrix_file(self, tmp_path):
        doc = {
            "kind": "evolve",
            "model": {"n": 2},
            "init": {"file": str(tmp_path / "missing.json")},
        }
        with pytest.raises(ConfigError) as err:
            parse_config(json.dumps(doc))
        assert any("not readable" in p for p in err.value.problems)

    def test_round_trip(self):
        doc = {
            "kind": "evolve",
            "model": {"n": 3, "variant": "clock-shift"},
            "init": {"preset": "two-mode"},
            "solver": {"solver": "rk4", "dt": 0.01, "t_end": 2.0},
            "checks": ["rayleigh-monotone"],
            "output": {"paths": ["t.csv"], "formats": ["csv"]},
            "seed": 7,
        }
        cfg = parse_config(json.dumps(doc))
        again = parse_config(emit_config(cfg))
        assert again == cfg

    def test_convexity_needs_dim_and_trials(self):
        with pytest.raises(ConfigError) as err:
            parse_config('{"kind":"convexity","function":"square"}')
        text = "\n".join(err.value.problems)
        assert "dim" in text and "trials" in text

    def test_defaults_applied(self):
        cfg = parse_config('{"kind":"spectrum","model":{"n":2}}')
        assert cfg.checks == ["kernel-dimension-1", "psd-spectrum"]
        assert cfg.solver.solver == "spectral"
