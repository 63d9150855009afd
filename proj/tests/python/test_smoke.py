"""Smoke tests for the python bindings."""

import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import augsize


def test_version():
    assert augsize.__version__ == "0.1.0"


def test_digamma_reference_values():
    euler = 0.5772156649015329
    assert augsize.digamma(1.0) == pytest.approx(-euler, abs=1e-10)
    assert augsize.digamma(2.0) == pytest.approx(1.0 - euler, abs=1e-10)
    with pytest.raises(Exception):
        augsize.digamma(-1.0)


def test_ksg_mi_gaussian():
    rng = np.random.default_rng(1)
    n, r = 1500, 0.9
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    x = z1.reshape(-1, 1)
    y = (r * z1 + math.sqrt(1 - r * r) * z2).reshape(-1, 1)
    value, raw = augsize.ksg_mi(x, y, 5)
    assert value == pytest.approx(-0.5 * math.log(1 - r * r), abs=0.08)
    assert raw == pytest.approx(value)


def test_ksg_mi_labels_cluster_entropy():
    rng = np.random.default_rng(2)
    centers = np.array([[0.0, 0.0], [8.0, 0.0], [0.0, 8.0]])
    labels = [int(i % 3) for i in range(450)]
    x = centers[labels] + 0.3 * rng.standard_normal((450, 2))
    value, _ = augsize.ksg_mi_labels(x, labels, 5)
    assert value == pytest.approx(math.log(3.0), abs=0.06)


def test_discrete_entropy_and_minmax():
    assert augsize.discrete_entropy([0, 1, 2]) == pytest.approx(math.log(3.0))
    out = augsize.minmax_normalize(np.array([[2.0], [4.0], [6.0]]))
    assert out.ravel().tolist() == [0.0, 0.5, 1.0]


def test_bound_inversion_and_interval():
    n_eff = augsize.invert_generalization_bound(0.0, 1.0, 0.05, 0.03)
    assert n_eff == pytest.approx(1664.3, abs=0.5)
    lower, upper, saturated = augsize.itle_interval(0.062, 552.0, 198, 1.50, 1.0)
    assert (lower, upper, saturated) == (354, 531, False)
    assert augsize.itle_interval(0.0, 552.0, 198, 1.5, 1.0)[2] is True


def test_mgee_pipeline_pieces():
    assert augsize.effective_sample_size(0.0, 0.5, 70.0) == 70.0
    a_star, ceiling = augsize.saturation_ratio(9.729, 0.5, 70.0)
    assert a_star > 0.0 and not ceiling
    lower, upper, _ = augsize.mgee_interval(70, 3.659, 1.225)
    assert (lower, upper) == (256, 314)
    beta = augsize.beta_correction(0.0, 10, 1.0, [1.0, 1.0])
    assert beta["beta_rho"] == pytest.approx(1.25)


def test_icd_scoring():
    assert augsize.reference_quantile(198) == 100
    assert augsize.snap_true(480, 100) == 500
    cov, dev = augsize.icd_score(354, 530, 500, 100)
    assert cov == 1
    assert dev == pytest.approx(0.116)


def test_run_command_icd(tmp_path: Path):
    out = tmp_path / "icd.json"
    code = augsize.run_command(
        ["icd", "--interval", "354", "530", "--true", "480", "--n", "198",
         "--out", str(out)]
    )
    assert code == 0
    report = json.loads(out.read_text())
    assert report["payload"]["icd_cov"] == 1
    assert report["payload"]["icd_dev"] == pytest.approx(0.116)


def test_run_command_usage_error():
    assert augsize.run_command(["definitely-not-a-command"]) == 1
