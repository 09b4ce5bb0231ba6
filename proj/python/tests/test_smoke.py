import json
import os
import subprocess

import numpy as np
import pytest

import toalab


def test_special_functions():
    assert toalab.bessel_j1(1.0) == pytest.approx(0.44005058574493355, rel=1e-14)
    assert toalab.hyp2f1_row(0, 0.5).real == pytest.approx(2 / (1 + np.sqrt(0.5)), rel=1e-14)
    above = toalab.hyp2f1_row(1, 3.0, toalab.CutSide.above)
    assert above == np.conj(toalab.hyp2f1_row(1, 3.0))


def test_semiclassical_reference_state():
    p = toalab.PhysicalParams.natural()
    s = toalab.WavepacketSpec(-5, 0.1, 30)
    le = toalab.leading_expansion(s, p)
    assert abs(le["tau0"]) == pytest.approx(0.166206, abs=1e-6)
    assert abs(le["alpha2_hbar2"]) == pytest.approx(0.000455, abs=1e-6)
    assert toalab.alpha_r(3, s, p) == 0


def test_kernel_is_imaginary_and_hermitian():
    p = toalab.PhysicalParams.natural()
    a = toalab.kernel_value(1.0, 0.0, p)
    assert a.real == 0
    assert a.imag == pytest.approx(0.2200252929, rel=1e-9)
    assert toalab.kernel_value(0.0, 1.0, p) == np.conj(a)


def test_expectation_small_state():
    p = toalab.PhysicalParams.natural()
    s = toalab.WavepacketSpec(-1, 0.1, 6)
    a = toalab.expect_toa(s, p)
    b = toalab.expect_toa(s, p, centered=True)
    assert a["value"] == pytest.approx(b["value"], rel=1e-7)
    assert a["imag_residue"] < 1e-6


def test_spectrum_and_distribution():
    p = toalab.PhysicalParams.natural()
    sp = toalab.spectrum(p, -1.0, 1.0, 200)
    ev = np.array(sp.eigenvalues)
    assert len(sp) == 200
    assert np.all(np.diff(ev) >= 0)
    assert ev[0] == pytest.approx(-ev[-1], rel=1e-10)
    assert sp.orthonormality_residual() < 1e-10
    v = np.asarray(sp.vectors)
    assert v.shape == (200, 200)

    s = toalab.WavepacketSpec(-3, 0.1, 20)
    big = toalab.spectrum(p, -7.0, 1.0, 800, threads=2)
    d = toalab.toa_distribution(s, p, big, np.linspace(0.05, 0.3, 501).tolist())
    assert d["total_weight"] == pytest.approx(1.0, abs=1e-6)
    assert min(d["density"]) >= 0
    cov = toalab.covariance_check(s, p, 0.0, big)
    assert cov["ks"] < 1e-14


def test_invalid_input_raises():
    with pytest.raises(ValueError):
        toalab.PhysicalParams(hbar=1, g=-1)
    with pytest.raises(ValueError):
        toalab.hyp2f1_row(-1, 0.2)


def test_in_process_cli(tmp_path):
    code, _, _ = toalab.run("reproduce", target="sec4-semiclassical", out=str(tmp_path / "a"))
    assert code == 0
    m = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert m["status"] == "ok"
    code, _, err = toalab.run("reproduce", target="nope", out=str(tmp_path / "b"))
    assert code == 2
    assert json.loads(err)["kind"] == "config"


@pytest.mark.skipif("TOALAB_CLI" not in os.environ, reason="CLI binary path not provided")
def test_cli_binary(tmp_path):
    cli = os.environ["TOALAB_CLI"]
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"state": {"q0": -5, "v0": 30, "sigma2": 0.1}}))
    r = subprocess.run([cli, "semiclassical", "--config", str(cfg), "--out", str(tmp_path / "o")],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    header = (tmp_path / "o" / "terms.csv").read_text().splitlines()[0]
    assert "[time/hbar^r]" in header
    r = subprocess.run([cli, "semiclassical", "--config", str(tmp_path / "missing.json"),
                        "--out", str(tmp_path / "x")], capture_output=True, text=True)
    assert r.returncode == 2
