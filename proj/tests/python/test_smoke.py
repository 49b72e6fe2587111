# Copyright (c) 2026 rejsamp contributors
# SPDX-License-Identifier: Apache-2.0
import math

import numpy as np
import pytest

import rejsamp


def test_version():
    assert rejsamp.__version__


def test_run_sinusoid_small():
    out = rejsamp.run("sinusoid", d=1, T=300, seed=1)
    samples = out["samples"]
    report = out["report"]
    assert samples.shape == (300, 1)
    assert np.all(samples >= 0.0) and np.all(samples <= 1.0)
    assert 0.0 < report["acceptance_rate"] <= 1.0
    assert report["audit"]["pass"] is True
    assert report["f_evals"] >= report["accepted_total"]


def test_run_is_deterministic():
    a = rejsamp.run("sinusoid", d=1, T=200, seed=42)
    b = rejsamp.run("sinusoid", d=1, T=200, seed=42)
    assert np.array_equal(a["samples"], b["samples"])
    assert a["report"]["epochs"] == b["report"]["epochs"]


def test_log_density_matches_closed_form():
    x = np.array([[1.0]])
    got = rejsamp.log_density("peakiness", 1.0, 1, 0.5, x)
    assert got[0] == pytest.approx(-1.0 - math.log(2.0), rel=1e-12)


def test_oracle_and_ks():
    x = rejsamp.oracle_sample("sinusoid", d=1, n=4000, seed=3)
    y = rejsamp.oracle_sample("sinusoid", d=1, n=4000, seed=4)
    stat, p = rejsamp.ks_two_sample(x.ravel(), y.ravel())
    assert 0.0 <= stat <= 1.0
    assert p > 0.01


def test_run_matches_oracle():
    out = rejsamp.run("sinusoid", d=1, T=2000, seed=5)
    oracle = rejsamp.oracle_sample("sinusoid", d=1, n=2000, seed=6)
    _, p = rejsamp.ks_two_sample(out["samples"].ravel(), oracle.ravel())
    assert p > 0.01


def test_cramer():
    x = rejsamp.oracle_sample("sinusoid", d=3, n=300, seed=7)
    y = rejsamp.oracle_sample("sinusoid", d=3, n=300, seed=8)
    stat, p = rejsamp.cramer_two_sample(x, y, permutations=200, seed=9)
    assert p > 0.01
    shifted = x + 5.0
    _, p_bad = rejsamp.cramer_two_sample(x, shifted, permutations=200, seed=10)
    assert p_bad <= 1.0 / 201.0 + 1e-12


def test_custom_target():
    out = rejsamp.run_custom(
        log_density=lambda x: -0.5 * x[0] * x[0],
        gradient=lambda x: [-x[0]],
        lower=[-math.inf],
        upper=[math.inf],
        T=500,
        seed=11,
    )
    samples = out["samples"].ravel()
    assert samples.shape == (500,)
    assert abs(float(np.mean(samples))) < 0.2
    assert 0.7 < float(np.std(samples)) < 1.4
    assert out["report"]["audit"]["pass"] is True


def test_init_failure_raises():
    with pytest.raises(rejsamp.InitFailure):
        rejsamp.run_custom(
            log_density=lambda x: -math.inf,
            gradient=lambda x: [0.0],
            lower=[-math.inf],
            upper=[math.inf],
            T=10,
            seed=1,
            config_json='{"zero_search_max": 30}',
        )
