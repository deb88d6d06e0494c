import json
from pathlib import Path

from eulerwave import cli


def run(args):
    return cli.main(args)


def read_csv(path):
    lines = Path(path).read_text().splitlines()
    header_rows = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    return header_rows, body[0].split(","), [ln.split(",") for ln in body[1:]]


def test_eos_check_runs(tmp_path):
    out = tmp_path / "out"
    assert run(["eos-check", "--out", str(out)]) == 0
    header, columns, rows = read_csv(out / "eos_check.csv")
    assert columns == ["rho_log", "s", "h", "max_rel_error", "pass"]
    assert len(rows) == 25
    assert any(line.startswith("# config_hash:") for line in header)
    assert all(row[-1] == "true" for row in rows)


def test_malformed_config_exits_2_without_output(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    out = tmp_path / "out"
    assert run(["eos-check", "--config", str(cfg), "--out", str(out)]) == 2
    assert not out.exists()

    cfg.write_text(json.dumps({"eos": {"kind": "polytropic", "gamma": 0.5}}))
    assert run(["eos-check", "--config", str(cfg), "--out", str(out)]) == 2
    assert not out.exists()

    missing = tmp_path / "nope.json"
    assert run(["eos-check", "--config", str(missing), "--out", str(out)]) == 2
    assert not out.exists()


def test_geometry_check(tmp_path):
    out = tmp_path / "out"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trials": 100}))
    assert run(["geometry-check", "--config", str(cfg), "--out", str(out)]) == 0
    _, columns, rows = read_csv(out / "geometry_check.csv")
    assert columns[:5] == ["trial", "c", "v1", "v2", "v3"]
    assert len(rows) == 100


def test_nullframe_check_schema_and_determinism(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trials": 50}))
    out_a, out_b, out_c = (tmp_path / x for x in ("a", "b", "c"))
    assert run(["nullframe-check", "--config", str(cfg), "--out",
                str(out_a)]) == 0
    assert run(["nullframe-check", "--config", str(cfg), "--out",
                str(out_b)]) == 0
    assert run(["nullframe-check", "--config", str(cfg), "--out",
                str(out_c), "--seed", "7"]) == 0
    _, columns, rows = read_csv(out_a / "nullframe_check.csv")
    assert columns == ["trial", "c", "v1", "v2", "v3", "max_frame_residual",
                       "qg_diag_uLuL", "qg_diag_LL", "pass"]
    bytes_a = (out_a / "nullframe_check.csv").read_bytes()
    bytes_b = (out_b / "nullframe_check.csv").read_bytes()
    bytes_c = (out_c / "nullframe_check.csv").read_bytes()
    assert bytes_a == bytes_b
    assert bytes_a != bytes_c


def test_reform_verify_constant_fixture(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"fixture": "constant", "ns": [16],
                               "grid": {"n": 16, "order": 4}}))
    out = tmp_path / "out"
    assert run(["reform-verify", "--config", str(cfg), "--out", str(out)]) == 0
    _, columns, rows = read_csv(out / "residuals.csv")
    assert columns == ["equation", "n", "dt", "sup_norm", "l2_norm",
                       "order_vs_prev", "pass"]
    assert len(rows) == 9
    for row in rows:
        assert float(row[3]) <= 1e-12
    payload = json.loads((out / "residuals.json").read_text())
    assert len(payload["rows"]) == 9


def test_reform_verify_orders_only_with_three_resolutions(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"ns": [16, 32]}))
    out = tmp_path / "out"
    assert run(["reform-verify", "--config", str(cfg), "--out", str(out)]) == 0
    _, _, rows = read_csv(out / "residuals.csv")
    smooth_rows = [r for r in rows if r[0] == "wave_v"]
    assert all(r[5] in ("", "exact") for r in smooth_rows)


def test_shock1d_chaplygin(tmp_path):
    out = tmp_path / "out"
    assert run(["shock1d", "--eos", "chaplygin", "--out", str(out)]) == 0
    _, columns, rows = read_csv(out / "shock1d_series.csv")
    assert columns == ["t", "mu_star", "max_abs_dxv1", "product_mu_dxv1"]
    assert all(float(r[1]) >= 0.5 for r in rows)
    _, pcolumns, prows = read_csv(out / "shock1d_profile.csv")
    assert pcolumns == ["x", "R_plus", "v1", "rho_log", "u", "mu"]
    assert len(prows) == 256


def test_shock1d_polytropic_passes(tmp_path):
    out = tmp_path / "out"
    assert run(["shock1d", "--out", str(out)]) == 0
    _, _, rows = read_csv(out / "shock1d_series.csv")
    growth = float(rows[-1][2]) / float(rows[0][2])
    assert growth >= 50.0


def test_export_field_dumps(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid": {"n": 8, "order": 4}}))
    out = tmp_path / "out"
    assert run(["export", "--config", str(cfg), "--out", str(out)]) == 0
    scalar = (out / "smooth-default" / "rho_log_0000.csv").read_text()
    lines = scalar.splitlines()
    assert lines[0] == "i,j,k,value"
    assert len(lines) == 1 + 8 ** 3
    vector = (out / "smooth-default" / "v_0000.csv").read_text().splitlines()
    assert vector[0] == "i,j,k,v1,v2,v3"
    assert len(vector) == 1 + 8 ** 3


def test_unknown_fixture_rejected(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"fixture": "bogus"}))
    assert run(["export", "--config", str(cfg), "--out",
                str(tmp_path / "out")]) == 2
