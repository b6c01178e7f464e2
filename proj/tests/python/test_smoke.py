import math
import os
import subprocess

import numpy as np
import pytest

latetail = pytest.importorskip("latetail")


def test_tortoise_round_trip():
    assert latetail.tortoise(3.0) == pytest.approx(3.0)
    assert latetail.inverse_tortoise(latetail.tortoise(7.5)) == pytest.approx(7.5, rel=1e-12)
    with pytest.raises(ValueError):
        latetail.tortoise(1.0)


def test_profile_integral_closed_form():
    for v in (0.0, 2.0, 100.0):
        assert latetail.profile_integral(v) == pytest.approx(2 * math.pi * (v + 1) / (v + 2) ** 2, rel=1e-8)


def test_tail_fit_planted():
    x = np.arange(200.0, 2001.0)
    rep = latetail.tail_fit(x, 5 * x**-3 + 20 * x**-4, target_exponent=3.0, predicted_coeff=5.0)
    assert rep["p_inf"] == pytest.approx(3.0, abs=0.02)
    assert rep["within_tolerance"]


def test_local_power_index_shape():
    x = np.linspace(10.0, 100.0, 91)
    px, p = latetail.local_power_index(x, 2.0 * x**-4)
    assert px.shape == p.shape == (91,)
    assert np.allclose(p, 4.0)


def test_predicted_constant_sign():
    c, at_obs = latetail.predicted_constant(latetail.RadialProfile.gaussian(1.0, 15.0, 1.5), 10.0)
    assert c < 0 and c == at_obs


def test_model_methods_agree():
    r = np.linspace(0.1, 10.0, 25)
    q = latetail.model_solution(r, "quadrature")
    o = latetail.model_solution(r, "ode")
    assert np.max(np.abs(q - o)) < 1e-6


@pytest.mark.skipif("LATETAIL_CLI" not in os.environ, reason="command-line tool not located")
def test_cli_model(tmp_path):
    cfg = tmp_path / "m.ini"
    cfg.write_text("[model]\nrhat_min = 0.5\nrhat_max = 2\nn = 5\nmethod = quadrature\n")
    out = subprocess.run([os.environ["LATETAIL_CLI"], "model", "--config", str(cfg), "--out", str(tmp_path)])
    assert out.returncode == 0
    lines = (tmp_path / "model.csv").read_text().splitlines()
    assert lines[0] == "rhat,re_u,im_u"
    assert len([l for l in lines if l and not l.startswith("#")]) == 6
