import json
import os
import subprocess
from pathlib import Path

import jsonschema
import pytest

import sicyig

SCHEMA_DIR = Path(os.environ.get("SICYIG_SCHEMA_DIR", Path(__file__).resolve().parents[2] / "schema"))


def schema(name):
    return json.loads((SCHEMA_DIR / name).read_text())


def test_gradient_optimum():
    o = sicyig.find_xopt()
    assert o["x_opt_nm"] == pytest.approx(150, abs=10)
    assert o["g_max_G_per_nm"] == pytest.approx(0.5, rel=0.1)
    assert sicyig.homogeneity(o["x_opt_nm"]) <= 0.1
    assert len(sicyig.stripe_field(150.0, 0.0)) == 3


def test_spectra_and_swr():
    lines = sicyig.resonance_fields("v2")
    assert len(lines) == 3
    swr = sicyig.swr_lines()
    assert swr and all(l["resonance_field_G"] > 0 for l in swr)


def test_deer_round_trip():
    td = [0.1 * i for i in range(81)]
    v = sicyig.deer_signal(td, dx_nm=8.0, C2D_per_nm2=1 / 36)
    assert v[0] == 1.0 and v[-1] < v[10]
    fit = sicyig.deer_fit(td, v)
    assert fit["dx_nm"] == pytest.approx(8.0, rel=0.02)
    with pytest.raises(sicyig.SicyigError, match="insufficient points"):
        sicyig.deer_fit([0, 1], [1, 0.9])


def test_snr_yield_photonics():
    assert 5000 / 4 < sicyig.r_opt() < 5000 * 4
    assert [h["rounded"] for h in sicyig.poisson_histogram(1.0)][:4] == [37, 37, 18, 6]
    assert round(sicyig.usable_yield(1.0, 0.14)) == 5
    d = sicyig.lattice_from_zpl(915.0, 0.68)
    assert (d["a_drawn_nm"], d["hole_diameter_drawn_nm"]) == (622, 360)
    res = sicyig.tm_bands(n_planewaves=169, k_points_per_segment=4, n_bands=6)
    assert res["bands"].shape == (13, 6)


def test_default_config_validates():
    cfg = json.loads(sicyig.default_config_json())
    jsonschema.validate(cfg, schema("config.schema.json"))
    code, out, _ = sicyig.run_cli(["defaults"])
    assert code == 0 and json.loads(out) == cfg


def test_reproduce_rows_validate():
    rows = sicyig.reproduce(["snr", "yield"])
    assert all(r["pass"] for r in rows)


@pytest.mark.skipif("SICYIG_CLI" not in os.environ, reason="CLI binary not provided")
def test_cli_outputs_validate(tmp_path):
    cli = os.environ["SICYIG_CLI"]
    out = tmp_path / "run"
    subprocess.run([cli, "--out", str(out), "--format", "json", "reproduce", "--rows", "snr,yield"], check=True)
    jsonschema.validate(json.loads((out / "reproduce.json").read_text()), schema("report.schema.json"))
    jsonschema.validate(json.loads((out / "manifest.json").read_text()), schema("manifest.schema.json"))
    bad = subprocess.run([cli, "snr", "--nope"], capture_output=True, text=True)
    assert bad.returncode == 1
