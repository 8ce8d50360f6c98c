import csv
import hashlib
import json
import math
import xml.etree.ElementTree as ET

import pytest

from dnlslab import artifacts, cli
from dnlslab.artifacts import MANIFEST_NAME, OutputDir, csv_text, format_value, read_csv, svg_line_plot
from dnlslab.config import ConfigError, build_config, load_toml, parse_row


def run_cli(*args):
    return cli.main(list(args))


def manifest(path):
    with open(path / MANIFEST_NAME) as fh:
        return json.load(fh)


class TestFormats:
    @pytest.mark.parametrize("v", [math.pi, 1e-300, -2.5e17, 0.1 + 0.2, 5e-324])
    def test_floats_round_trip(self, v):
        assert float(format_value(v)) == v

    def test_special_values(self):
        assert format_value(True) == "true" and format_value(None) == "" and format_value(3) == "3"
        assert format_value(math.nan) == "nan"

    def test_rfc4180(self):
        text = csv_text(["a", "note"], [[1.5, 'error: "x", y'], {"a": 2, "note": "ok"}])
        assert text.endswith("\r\n") and text.count("\r\n") == 3
        assert '"error: ""x"", y"' in text
        rows = list(csv.reader(text.splitlines()))
        assert rows[1] == ["1.5", 'error: "x", y']

    def test_svg_is_well_formed(self):
        svg = svg_line_plot([("a & b", [1, 2, 3], [1e-3, 1e-2, math.nan]), ("", [1, 2], [0, -1])],
                            title="<t>", logx=True, logy=True)
        root = ET.fromstring(svg)
        assert root.tag.endswith("svg") and root.get("version") == "1.1"

    def test_svg_handles_empty_series(self):
        ET.fromstring(svg_line_plot([("empty", [], [])]))


class TestOutputDir:
    def test_manifest_lists_files_with_digests(self, tmp_path):
        out = OutputDir(tmp_path)
        out.write_csv("a.csv", ["x"], [[1.0]])
        out.write_svg("p.svg", svg_line_plot([("s", [0, 1], [0, 1])]))
        out.finalize({"value": math.inf})
        m = manifest(tmp_path)
        assert {f["name"] for f in m["files"]} == {"a.csv", "p.svg"}
        for f in m["files"]:
            assert hashlib.sha256((tmp_path / f["name"]).read_bytes()).hexdigest() == f["sha256"]
        assert m["value"] == "inf"

    def test_stale_manifest_removed(self, tmp_path):
        (tmp_path / MANIFEST_NAME).write_text("{}")
        OutputDir(tmp_path)
        assert not (tmp_path / MANIFEST_NAME).exists()

    def test_missing_file_blocks_manifest(self, tmp_path):
        out = OutputDir(tmp_path)
        out.write_csv("a.csv", ["x"], [[1.0]])
        (tmp_path / "a.csv").unlink()
        with pytest.raises(FileNotFoundError):
            out.finalize({})
        assert not (tmp_path / MANIFEST_NAME).exists()


class TestConfig:
    def test_unknown_key(self, tmp_path):
        p = tmp_path / "c.toml"
        p.write_text("omgea = 2.0\n")
        with pytest.raises(ConfigError, match="omgea"):
            load_toml(p)

    def test_layering(self, tmp_path):
        p = tmp_path / "c.toml"
        p.write_text('omega = 2.0\nb = 0.5\nc = "degenerate"\nalphas = [0.1]\n')
        cfg = build_config("evolve", load_toml(p), {"b": 1.0, "omega": None})
        assert cfg.omega == 2.0 and cfg.b == 1.0 and cfg.c is None and cfg.alphas == (0.1,)

    @pytest.mark.parametrize("over", [dict(c=3.0), dict(b=-1.0), dict(omega=0.0), dict(num_points=64), dict(threads=0),
                                      dict(preconditioner="h2"), dict(rows=((1.0, 5.0, 0.0),))])
    def test_invalid(self, over):
        with pytest.raises(ConfigError):
            build_config("evolve", {}, over)

    def test_kind_mismatch(self):
        with pytest.raises(ConfigError):
            build_config("evolve", {"kind": "kappa0-table"})

    def test_rows(self):
        assert parse_row("1, degenerate, 0.5") == (1.0, None, 0.5)
        assert parse_row([2, 1, 0]) == (2.0, 1.0, 0.0)
        with pytest.raises(ConfigError):
            parse_row("1,2")

    def test_bad_types(self, tmp_path):
        p = tmp_path / "c.toml"
        p.write_text('steps = 1.5\n')
        with pytest.raises(ConfigError):
            load_toml(p)


class TestCommands:
    def test_kappa0_table(self, tmp_path, capsys):
        assert run_cli("kappa0-table", "--out", str(tmp_path)) == 0
        rows = read_csv(tmp_path / "kappa0.csv")
        assert rows and all(0 < float(r["kappa0"]) <= 1 and float(r["corollary_constant"]) < 0.5 for r in rows)
        zero = next(r for r in rows if float(r["b"]) == 0)
        assert float(zero["corollary_constant"]) == pytest.approx(0.414214, abs=1e-6)
        assert "PASS" in capsys.readouterr().out

    def test_root_failure_is_recorded_per_row(self, tmp_path, monkeypatch):
        from dnlslab import experiments
        from dnlslab.soliton import BracketError

        real = experiments.kappa0

        def flaky(b, tol=1e-12):
            if b == 0.25:
                raise BracketError("no sign change")
            return real(b, tol=tol)

        monkeypatch.setattr(experiments, "kappa0", flaky)
        assert run_cli("kappa0-table", "--bs", "0,0.25,1", "--out", str(tmp_path)) == 1
        rows = read_csv(tmp_path / "kappa0.csv")
        assert [r["status"] for r in rows] == ["ok", "error: no sign change", "ok"]

    def test_soliton_dump_degenerate(self, tmp_path):
        out = tmp_path / "nested" / "dir"
        assert run_cli("soliton-dump", "--b", "0.5", "--out", str(out)) == 0
        table = {r["quantity"]: r for r in read_csv(out / "soliton_functionals.csv")}
        for q in ("E", "P", "K"):
            assert abs(float(table[q]["grid"])) < 1e-6
        m = manifest(out)
        assert {f["name"] for f in m["files"]} == {"soliton_field.csv", "soliton_functionals.csv"}
        assert m["seed"] == 0 and m["config"]["b"] == 0.5 and m["passed"] is True

    def test_evolve_drift(self, tmp_path):
        assert run_cli("evolve", "--c", "1", "--b", "0.5", "--horizon", "0.5", "--out", str(tmp_path)) == 0
        rows = read_csv(tmp_path / "trajectory.csv")
        for r in rows:
            assert max(float(r[k]) for k in ("energy_drift", "mass_drift", "momentum_drift")) < 1e-7
        ET.parse(tmp_path / "trajectory.svg")

    def test_stability_sweep_short(self, tmp_path):
        code = run_cli("stability-sweep", "--b", "0.5", "--alphas", "0.02,0.01", "--horizon", "0.5", "--out", str(tmp_path))
        assert code == 0
        rows = read_csv(tmp_path / "stability.csv")
        assert [r["preflight"] for r in rows] == ["pass", "pass"]
        assert float(rows[1]["sup_distance"]) <= 1.1 * float(rows[0]["sup_distance"])

    def test_remark33_failure_sets_exit_code(self, tmp_path, capsys):
        # at b = 0 the gap c(50) - 1/2 equals 1/50 exactly, on the open interval's edge
        assert run_cli("remark33-sweep", "--b", "0", "--out", str(tmp_path)) == 1
        assert "FAIL  c(50) - 1/2 in (0, 0.02)" in capsys.readouterr().out
        assert manifest(tmp_path)["passed"] is False

    def test_empty_variational_grid(self, tmp_path):
        cfg = tmp_path / "v.toml"
        cfg.write_text("rows = []\n")
        out = tmp_path / "out"
        assert run_cli("variational-check", "--config", str(cfg), "--out", str(out)) == 0
        assert read_csv(out / "variational.csv") == []
        assert manifest(out)["checks"] == []

    def test_unknown_config_key_is_usage_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.toml"
        cfg.write_text("alpha = [0.1]\n")
        with pytest.raises(SystemExit) as exc:
            run_cli("stability-sweep", "--config", str(cfg), "--out", str(tmp_path))
        assert exc.value.code == 2
        assert "unknown config key" in capsys.readouterr().err

    def test_inadmissible_speed_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run_cli("soliton-dump", "--c", "3", "--out", str(tmp_path))
        assert exc.value.code == 2

    def test_determinism(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for d in (a, b):
            assert run_cli("variational-check", "--rows", "1,1,0.5", "--seed", "7", "--out", str(d)) == 0
            assert run_cli("soliton-dump", "--c", "1", "--b", "0.5", "--out", str(d / "dump")) == 0
        assert (a / "variational.csv").read_bytes() == (b / "variational.csv").read_bytes()
        for name in ("soliton_field.csv", "soliton_functionals.csv"):
            assert (a / "dump" / name).read_bytes() == (b / "dump" / name).read_bytes()

    def test_seed_changes_perturbation(self, tmp_path):
        run_cli("variational-check", "--rows", "1,1,0.5", "--seed", "1", "--out", str(tmp_path / "s1"))
        run_cli("variational-check", "--rows", "1,1,0.5", "--seed", "2", "--out", str(tmp_path / "s2"))
        r1 = read_csv(tmp_path / "s1" / "variational.csv")[0]
        r2 = read_csv(tmp_path / "s2" / "variational.csv")[0]
        assert r1["iterations"] != r2["iterations"] or r1["orbit_distance"] != r2["orbit_distance"]

    def test_interrupted_run_leaves_no_manifest(self, tmp_path, monkeypatch):
        (tmp_path / MANIFEST_NAME).write_text("{}")

        def boom(self, name, svg):
            raise KeyboardInterrupt

        monkeypatch.setattr(artifacts.OutputDir, "write_svg", boom)
        with pytest.raises(KeyboardInterrupt):
            run_cli("remark33-sweep", "--out", str(tmp_path))
        assert (tmp_path / "remark33.csv").exists()
        assert not (tmp_path / MANIFEST_NAME).exists()

    def test_threads_do_not_change_results(self, tmp_path):
        run_cli("kappa0-table", "--threads", "1", "--out", str(tmp_path / "one"))
        run_cli("kappa0-table", "--threads", "4", "--out", str(tmp_path / "four"))
        assert (tmp_path / "one" / "kappa0.csv").read_bytes() == (tmp_path / "four" / "kappa0.csv").read_bytes()

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli("--version")
        assert exc.value.code == 0
        assert "dnlslab" in capsys.readouterr().out
