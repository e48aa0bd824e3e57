import json
import math
import pathlib

import numpy as np
import pytest

import nuhawkes


def test_version():
    assert isinstance(nuhawkes.__version__, str)
    assert nuhawkes.__version__.count(".") == 2


def test_kernel_and_stability():
    k = nuhawkes.Kernel.exponential(0.5, 2.0)
    assert k.dimension == 1
    assert k.l1()[0, 0] == pytest.approx(0.25)
    assert k.laplace(1.0)[0, 0] == pytest.approx(0.5 / 3.0)
    s = nuhawkes.stability(k)
    assert s["stable"] and s["spectral_radius"] == pytest.approx(0.25)
    m = nuhawkes.Kernel.exponential(np.array([[0.3, 0.2], [0.1, 0.4]]), np.full((2, 2), 2.0))
    # ||phi|| = alpha / beta has Perron root 0.25
    assert nuhawkes.stability(m)["spectral_radius"] == pytest.approx(0.25)
    back = nuhawkes.Kernel.from_json(m.to_json())
    assert np.allclose(back.eval(0.3), m.eval(0.3))


def test_resolvent_matches_closed_form():
    r = nuhawkes.resolvent_grid(nuhawkes.Kernel.exponential(1.0, 2.0), 5.0, 1e-3)
    assert r["psi"].shape == (5000, 1, 1)
    assert r["cumulative"].shape == (5001, 1, 1)
    err = np.max(np.abs(r["psi"][:, 0, 0] - np.exp(-r["t_mid"])))
    assert err < 1e-3
    assert r["warnings"] == []


def test_simulation_mean_count():
    k = nuhawkes.Kernel.exponential(1.0, 2.0)
    counts = np.array([len(nuhawkes.simulate_thinning(np.array([1.0]), k, 1.0, 5, i)[0]) for i in range(4000)])
    se = counts.std(ddof=1) / math.sqrt(counts.size)
    assert abs(counts.mean() - (1.0 + math.exp(-1.0))) < 4 * se
    times, comps = nuhawkes.simulate_cluster(np.array([1.0]), k, 1.0, 5, 0)
    assert np.all(np.diff(times) >= 0) and np.all(comps == 0)


def test_cir_and_statistics():
    t, x = nuhawkes.solve_cir(1.0, 1.0, 0.5, horizon=1.0, step=1e-2, seed=3)
    assert t.shape == x.shape == (101,)
    assert np.all(x >= 0)
    assert nuhawkes.ks_distance([1, 2, 3], [4, 5, 6])["statistic"] == 1.0
    assert nuhawkes.wasserstein1([0.0], [2.0])["statistic"] == pytest.approx(2.0)
    e = nuhawkes.exchangeable_moment([1.0, 2.0, 3.0], lambda v: v, 2)
    assert e["lhs"] == pytest.approx(4.0) and e["rhs"] == pytest.approx(4.0)
    assert nuhawkes.holder_exponent(list(np.linspace(0, 1, 512)))["exponent"] == pytest.approx(1.0)


def test_config_validation_and_run(tmp_path):
    with pytest.raises(ValueError, match=r"grid\.h"):
        nuhawkes.validate_config(json.dumps({"kind": "resolvent", "seed": 1, "grid": {"h": -1}}))
    cfg = {
        "kind": "resolvent",
        "seed": 1,
        "grid": {"T": 2, "h": 0.01},
        "kernel": {"form": "exponential", "params": {"alpha": 1, "beta": 2}},
    }
    normalized = nuhawkes.validate_config(json.dumps(cfg))
    assert normalized["paths"] == 10000
    manifest = nuhawkes.run_experiment(json.dumps(cfg), output=str(tmp_path / "run"))
    assert manifest["pass"] is True
    files = {a["file"] for a in manifest["artifacts"]}
    assert {"resolvent.csv", "resolvent_error.csv", "reports.jsonl"} <= files
    assert (tmp_path / "run" / "manifest.json").exists()


def test_example_configs_match_schema_and_tool():
    jsonschema = pytest.importorskip("jsonschema")
    root = pathlib.Path(__file__).resolve().parents[2]
    schema = json.loads((root / "docs" / "config.schema.json").read_text())
    validator = jsonschema.Draft202012Validator(schema)
    examples = sorted((root / "configs").glob("*.json"))
    assert examples
    for path in examples:
        text = path.read_text()
        assert not list(validator.iter_errors(json.loads(text))), path.name
        nuhawkes.validate_config(text)
    bad = json.loads((root / "tests" / "data" / "bad_step.json").read_text())
    assert list(validator.iter_errors(bad))
