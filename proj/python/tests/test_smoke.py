import json
import math
import os
import subprocess

import numpy as np
import pytest

import ddbs

CONFIG_A = {"cfg": {"preset": "config_a"}, "gamma": 1.0, "alpha_p_override": 0.5}


def test_version():
    assert isinstance(ddbs.__version__, str) and ddbs.__version__


def test_design_config_a():
    plan, summary = ddbs.design(CONFIG_A)
    assert plan["K"] == 2
    assert plan["pM"] == 15 and plan["p1"] == 12
    assert abs(plan["theta_p"] - 1.68) < 1e-3
    assert "K = 2" in summary


def test_delays_match_csv():
    plan, _ = ddbs.design(CONFIG_A)
    d, bits = ddbs.delays(plan)
    assert d.shape == (128, 2)
    assert bits == 1
    rows = ddbs.delays_csv(plan).strip().splitlines()[1:]
    parsed = np.array([[float(v) for v in r.split(",")[1:]] for r in rows])
    assert np.array_equal(parsed, d)


def test_pattern_roundtrip_is_byte_identical():
    plan, _ = ddbs.design(CONFIG_A)
    csv = ddbs.pattern_csv(plan)
    assert csv.startswith("k,m,freq_hz,theta,alpha,r_m,far_field\n")
    assert ddbs.roundtrip_pattern_csv(csv) == csv


def test_kernel_and_fresnel():
    cfg = {"preset": "main"}
    assert ddbs.gain_kernel(cfg, 0.0, 0.0) == pytest.approx(1.0)
    assert ddbs.fresnel_amplitude(1.318) == pytest.approx(1 / math.sqrt(2), abs=1e-3)
    assert ddbs.angle_beamwidth(cfg, 30e9) == pytest.approx(0.88 / 256)


def test_train_and_sweep_are_reproducible():
    a = ddbs.train("aux_pair", 0.2, 20.0, snr_db=20.0)
    b = ddbs.train("aux_pair", 0.2, 20.0, snr_db=20.0)
    assert a == b
    assert a["pilots_used"] == 3
    assert 0 < a["rate"] <= math.log2(1 + 100) + 1e-9

    spec = ddbs.preset("desk")
    spec.update({"schemes": ["ongrid", "ff_rainbow"], "axis_values": [10.0], "n_trials": 6})
    csv1, summary = ddbs.sweep(spec)
    csv2, _ = ddbs.sweep(spec)
    assert csv1 == csv2
    assert len(summary["points"]) == 2
    assert all(p["n_trials"] == 6 for p in summary["points"])


def test_invalid_inputs_raise():
    with pytest.raises(ValueError):
        ddbs.design({"cfg": {"preset": "main"}, "gamma": 3.0})
    with pytest.raises(ValueError):
        ddbs.design({"cfg": {"preset": "main", "typo": 1}})
    with pytest.raises(ValueError):
        ddbs.train("ongrid", 1.5, 10.0)


@pytest.mark.skipif("DDBS_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_error_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"cfg": {"preset": "main"}, "gamma": 0}))
    proc = subprocess.run([os.environ["DDBS_CLI"], "design", str(bad)], capture_output=True, text=True)
    assert proc.returncode != 0
    err = json.loads(proc.stderr)
    assert err["error"]["type"] == "invalid_spec"
