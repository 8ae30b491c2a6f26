"""Tests for config parsing, SVG rendering, sweep drivers, and the CLI."""

import json
import os

import numpy as np
import pytest

from repeller_lab.cli import main
from repeller_lab.config import (ConfigError, SweepConfig, config_hash,
                                 parse_config)
from repeller_lab.svgplot import SvgPlot
from repeller_lab.sweeps import (cache_dir, cache_get, cache_put, cmd_a2,
                                 cmd_bounds, cmd_dim, cmd_induced,
                                 make_family, sweep_all)


# ------------------------------------------------------------------ config

def test_parse_config_coercion(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("""
# comment line
family = hopf2d
mu_values = 0.1, 0.05   # trailing comment
grid_n = 256
cache = on
label = fine run
ratio = 2.5
""")
    got = parse_config(cfg)
    assert got["family"] == "hopf2d"
    assert got["mu_values"] == (0.1, 0.05)
    assert got["grid_n"] == 256 and isinstance(got["grid_n"], int)
    assert got["cache"] is True
    assert got["label"] == "fine run"
    assert got["ratio"] == 2.5


def test_parse_config_include_overrides(tmp_path):
    (tmp_path / "base.cfg").write_text("grid_n = 64\nseed = 1\n")
    child = tmp_path / "child.cfg"
    child.write_text("include base.cfg\ngrid_n = 128\n")
    got = parse_config(child)
    assert got == {"grid_n": 128, "seed": 1}


def test_parse_config_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("this is not a setting\n")
    with pytest.raises(ConfigError, match="key = value"):
        parse_config(bad)
    bad.write_text(" = 3\n")
    with pytest.raises(ConfigError, match="empty key"):
        parse_config(bad)
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config(tmp_path / "absent.cfg")


def test_config_hash_sensitivity():
    base = {"family": "hopf2d", "seed": 1, "mu_values": (0.1,)}
    h = config_hash(base)
    assert len(h) == 12 and h == config_hash(dict(base))
    assert config_hash({**base, "seed": 2}) != h
    assert config_hash({**base, "mu_values": (0.1, 0.05)}) != h


def test_sweep_config_defaults_and_caps():
    sc = SweepConfig.from_mapping({"family": "hopf2d", "seed": 3})
    assert sc.eps_base == 2 and sc.k_values == tuple(range(3, 11))
    assert sc.grid_n == 1024 and sc.horizon == 500
    assert sc.mu_values == (0.1, 0.05, 0.02, 0.01, 0.005)

    sc3 = SweepConfig.from_mapping({"family": "hopf3d", "seed": 0,
                                    "grid_n": 4096, "horizon": 900})
    assert sc3.grid_n == 128 and sc3.horizon == 100  # coarse budget caps

    trip = SweepConfig.from_mapping({"family": "tripling", "seed": 0})
    assert trip.eps_base == 3 and trip.k_values == tuple(range(1, 9))


def test_sweep_config_validation():
    with pytest.raises(ConfigError, match="unknown family"):
        SweepConfig.from_mapping({"family": "lorenz", "seed": 0})
    with pytest.raises(ConfigError, match="seed"):
        SweepConfig.from_mapping({"family": "hopf2d"})
    with pytest.raises(ConfigError, match="k_max"):
        SweepConfig.from_mapping({"family": "hopf2d", "seed": 0,
                                  "k_min": 6, "k_max": 3})
    with pytest.raises(ConfigError, match="mu_count"):
        SweepConfig.from_mapping({"family": "hopf2d", "seed": 0,
                                  "mu_count": -2})
    with pytest.raises(ConfigError, match="mu_spacing"):
        SweepConfig.from_mapping({"family": "hopf2d", "seed": 0,
                                  "mu_count": 3, "mu_spacing": "cubic"})


def test_mu_grid_construction():
    lin = SweepConfig.from_mapping({"family": "hopf2d", "seed": 0,
                                    "mu_count": 3, "mu_start": 0.01,
                                    "mu_stop": 0.03})
    np.testing.assert_allclose(lin.mu_values, (0.01, 0.02, 0.03))
    logg = SweepConfig.from_mapping({"family": "hopf2d", "seed": 0,
                                     "mu_count": 3, "mu_start": 0.01,
                                     "mu_stop": 0.04, "mu_spacing": "log"})
    np.testing.assert_allclose(logg.mu_values, (0.01, 0.02, 0.04), rtol=1e-12)
    empty = SweepConfig.from_mapping({"family": "hopf2d", "seed": 0,
                                      "mu_count": 0})
    assert empty.mu_values == ()


def test_make_family_forwards_profile_knobs():
    model = make_family("hopf2d", 0.05, {"delta0": 0.04, "delta1": 0.02})
    assert model.delta0 == 0.04 and model.delta1 == 0.02
    with pytest.raises(ConfigError):
        make_family("unknown", 0.1)


# --------------------------------------------------------------------- svg

def test_svg_render_deterministic():
    def build():
        plot = SvgPlot(title="demo", xlabel="x", ylabel="y")
        plot.line([0, 1, 2], [1.0, 2.0, 1.5], label="series")
        plot.scatter([0.5, 1.5], [1.2, 1.8], label="points", open_marker=True)
        plot.errorbars([1.0], [1.5], [0.2], label="bars")
        return plot.render()

    a, b = build(), build()
    assert a == b
    assert a.startswith("<svg ") and a.rstrip().endswith("</svg>")
    assert "<polyline" in a and "<circle" in a and "demo" in a


def test_svg_log_axis_ticks():
    plot = SvgPlot(ylog=True)
    plot.scatter([1, 2, 3], [1e-4, 1e-2, 1.0])
    text = plot.render()
    assert "1e-2" in text or "1e-3" in text


def test_svg_empty_plot_renders():
    assert "</svg>" in SvgPlot().render()


# ----------------------------------------------------------------- cmd_dim

def _dim_cfg(tmp_path, **over):
    cfg = {"family": "hopf2d", "mu_values": (0.1,), "grid_n": 96,
           "horizon": 40, "k_min": 3, "k_max": 6, "seed": 3,
           "out": str(tmp_path / "out")}
    cfg.update(over)
    return cfg


def _data_files(outdir):
    return {p.name: p.read_bytes() for p in sorted(outdir.rglob("*"))
            if p.is_file() and p.suffix != ".log" and ".cache" not in p.parts}


def test_dim_empty_grid_header_only(tmp_path):
    cfg = _dim_cfg(tmp_path, mu_values=None, mu_count=0)
    del cfg["mu_values"]
    assert cmd_dim(cfg, cache=False) == 0
    lines = (tmp_path / "out" / "dim.csv").read_text().splitlines()
    data = [ln for ln in lines if not ln.startswith("#")]
    assert data == ["mu,mu_f,rho_inv,dimension,ci,slope_raw,residual,"
                    "survivors,badset_ref,flags,config_hash"]


def test_dim_negative_mu_flagged_no_hole(tmp_path):
    cfg = _dim_cfg(tmp_path, mu_values=(-0.02,))
    assert cmd_dim(cfg, cache=False) == 0
    row = (tmp_path / "out" / "dim.csv").read_text().splitlines()[-1]
    cells = row.split(",")
    assert cells[0] == "-0.02"
    assert "no-hole" in cells[9]
    assert abs(float(cells[3]) - 2.0) < 0.03  # full torus survives


def test_dim_rows_sorted_and_hash_consistent(tmp_path):
    cfg = _dim_cfg(tmp_path, mu_values=(0.1, 0.05))
    assert cmd_dim(cfg, cache=False, jobs=2) == 0
    lines = (tmp_path / "out" / "dim.csv").read_text().splitlines()
    header_hash = [ln for ln in lines if ln.startswith("# config_hash")][0].split()[-1]
    rows = [ln.split(",") for ln in lines if not ln.startswith("#")][1:]
    assert [float(r[0]) for r in rows] == [0.05, 0.1]
    assert all(r[-1] == header_hash for r in rows)


def test_dim_byte_identical_reruns(tmp_path):
    cfg = _dim_cfg(tmp_path)
    assert cmd_dim(cfg, cache=False) == 0
    first = _data_files(tmp_path / "out")
    assert cmd_dim(cfg, cache=False) == 0
    assert _data_files(tmp_path / "out") == first


def test_dim_cache_hit_and_corruption_recovery(tmp_path):
    cfg = _dim_cfg(tmp_path)
    assert cmd_dim(cfg, cache=True) == 0
    first = _data_files(tmp_path / "out")
    log = (tmp_path / "out" / "dim.log").read_text()
    assert "computed" in log and "cache hit" not in log

    assert cmd_dim(cfg, cache=True) == 0
    log = (tmp_path / "out" / "dim.log").read_text()
    assert "cache hit" in log
    assert _data_files(tmp_path / "out") == first

    # a tampered entry must fail its checksum and be recomputed
    cache = tmp_path / "out" / ".cache"
    victim = next(cache.glob("dim-*.json"))
    blob = json.loads(victim.read_text())
    blob["payload"]["dimension"] = 0.123
    victim.write_text(json.dumps(blob, sort_keys=True))
    assert cmd_dim(cfg, cache=True) == 0
    assert _data_files(tmp_path / "out") == first
    log = (tmp_path / "out" / "dim.log").read_text()
    assert "computed" in log


def test_cache_env_override(tmp_path, monkeypatch):
    alt = tmp_path / "elsewhere"
    monkeypatch.setenv("REPELLER_LAB_CACHE", str(alt))
    cfg = _dim_cfg(tmp_path)
    assert cmd_dim(cfg, cache=True) == 0
    assert list(alt.glob("dim-*.json"))
    assert not (tmp_path / "out" / ".cache").exists()


def test_cache_roundtrip_helpers(tmp_path):
    cdir = cache_dir(tmp_path, True)
    assert cache_get(cdir, "absent") is None
    cache_put(cdir, "k", {"a": 1.5})
    assert cache_get(cdir, "k") == {"a": 1.5}
    assert cache_dir(tmp_path, False) is None


def test_dim_tripling_matches_cantor_slope(tmp_path):
    # horizon must stay below the grid exponent: every center hits the
    # midpoint 1/2 (inside the hole) after exactly grid-exponent steps
    cfg = {"family": "tripling", "mu_values": (0.0,), "grid_n": 2187,
           "horizon": 6, "k_max": 6, "seed": 0, "out": str(tmp_path / "out")}
    assert cmd_dim(cfg, cache=False) == 0
    row = (tmp_path / "out" / "dim.csv").read_text().splitlines()[-1].split(",")
    assert abs(float(row[3]) - np.log(2) / np.log(3)) < 0.02


# -------------------------------------------------------------- cmd_bounds

_SMALL_BOUNDS = {"cp_n_max": 8, "st_l_max": 60, "en_l_max": 60,
                 "lemma_l_max": 200}


def test_bounds_small_grid_passes(tmp_path, capsys):
    cfg = {**_SMALL_BOUNDS, "out": str(tmp_path / "b")}
    assert cmd_bounds(cfg) == 0
    assert "BOUNDS: PASS" in capsys.readouterr().out
    summary = json.loads((tmp_path / "b" / "bounds.json").read_text())
    assert summary["passed"] and not summary["failed"]
    # the sharpness probe fails by design without failing the suite
    assert len(summary["expected_failures"]) == 1
    assert summary["expected_failures"][0]["check"] == "entropy-probe"


def test_bounds_csv_schema(tmp_path):
    cfg = {**_SMALL_BOUNDS, "out": str(tmp_path / "b")}
    cmd_bounds(cfg)
    lines = (tmp_path / "b" / "bounds.csv").read_text().splitlines()
    cols = [ln for ln in lines if not ln.startswith("#")][0]
    assert cols == "check,n,l,t,mu,exact,bound,pass"
    assert any(",xfail" in ln for ln in lines)


def test_bounds_known_false_cell_exits_nonzero(tmp_path, capsys):
    # the (13/32) cell inequality genuinely fails at admissible cells for
    # larger parameter values; pointing the grid there must exit 1
    cfg = {**_SMALL_BOUNDS, "lemma_l_max": 400, "lemma_mu_values": (0.1,),
           "out": str(tmp_path / "b")}
    assert cmd_bounds(cfg) == 1
    assert "BOUNDS: FAIL" in capsys.readouterr().out
    summary = json.loads((tmp_path / "b" / "bounds.json").read_text())
    assert any(r["check"] == "lemma-cell" and r["l"] == 369 and r["t"] == 4
               for r in summary["failed"])


def test_bounds_cap_violation_reported_as_skipped(tmp_path):
    cfg = {**_SMALL_BOUNDS, "cp_n_max": 10_000, "out": str(tmp_path / "b")}
    cmd_bounds(cfg)
    summary = json.loads((tmp_path / "b" / "bounds.json").read_text())
    assert any("exceeds exactness cap" in s for s in summary["skipped"])


# ------------------------------------------------------------------ cmd_a2

def test_a2_hopf_rows_pass(tmp_path):
    cfg = {"family": "hopf2d", "mu_values": (0.1,), "n_values": (4, 6),
           "samples": 20_000, "seed": 1, "out": str(tmp_path / "a")}
    assert cmd_a2(cfg) == 0
    lines = (tmp_path / "a" / "a2.csv").read_text().splitlines()
    cols = [ln for ln in lines if not ln.startswith("#")][0].split(",")
    assert cols == ["n", "mu", "mu_f", "threshold", "kept", "pruned",
                    "vol_lo", "vol_hi", "delta", "pass", "flag", "vol_mc",
                    "mc_ci"]
    rows = [ln.split(",") for ln in lines if not ln.startswith("#")][1:]
    assert [r[0] for r in rows] == ["4", "6"]
    assert all(r[9] == "true" and r[10] == "ok" for r in rows)
    assert (tmp_path / "a" / "a2-mu0.1.svg").exists()


def test_a2_diaz_viana_measures_zero(tmp_path):
    cfg = {"family": "diaz-viana", "mu_values": (0.25,), "n_values": (4, 8),
           "samples": 10_000, "seed": 1, "out": str(tmp_path / "a")}
    assert cmd_a2(cfg) == 0
    rows = [ln.split(",") for ln in
            (tmp_path / "a" / "a2.csv").read_text().splitlines()
            if not ln.startswith("#")][1:]
    assert all(r[4] == "0" and r[11] == "0.0" for r in rows)  # kept, vol_mc


def test_a2_enumeration_cap_marks_inconclusive(tmp_path):
    # a threshold above every branch floor keeps all 10^n words, so a tiny
    # cap trips immediately and the row must come back inconclusive
    cfg = {"family": "hopf2d", "mu_values": (0.1,), "n_values": (6,),
           "samples": 5_000, "max_words": 5, "threshold": 2.0, "seed": 1,
           "out": str(tmp_path / "a")}
    assert cmd_a2(cfg) == 0  # advisory, not a violation
    rows = [ln.split(",") for ln in
            (tmp_path / "a" / "a2.csv").read_text().splitlines()
            if not ln.startswith("#")][1:]
    assert rows[0][10] == "inconclusive"
    svg = (tmp_path / "a" / "a2-mu0.1.svg").read_text()
    assert "inconclusive (cap)" in svg


def test_a2_rejects_family_without_symbols(tmp_path):
    with pytest.raises(ConfigError, match="symbol-coded"):
        cmd_a2({"family": "hopf3d", "seed": 0, "out": str(tmp_path)})


# ------------------------------------------------------------- cmd_induced

def test_induced_report_passes(tmp_path):
    cfg = {"family": "hopf2d", "mu": 0.1, "n0": 8, "samples": 4000,
           "seed": 2, "out": str(tmp_path / "i")}
    assert cmd_induced(cfg) == 0
    report = json.loads((tmp_path / "i" / "induced.json").read_text())
    assert report["passed"] and not report["degenerate_domain"]
    assert report["domain_pieces"] == 9 * 8
    assert report["floor_margin_min"] > 0.9
    assert report["sampled"]["passed"] and report["hole"]["passed"]
    assert report["return_time_histogram"]["1"] == 9


def test_induced_degenerate_threshold_exit_zero(tmp_path):
    cfg = {"family": "tripling", "threshold": 5.0, "n0": 3, "samples": 1000,
           "seed": 1, "out": str(tmp_path / "i")}
    assert cmd_induced(cfg) == 0
    report = json.loads((tmp_path / "i" / "induced.json").read_text())
    assert report["degenerate_domain"] and report["domain_pieces"] == 0
    assert report["hole"]["measured"] == 1.0


def test_induced_needs_symbols(tmp_path):
    with pytest.raises(ConfigError, match="symbol-coded"):
        cmd_induced({"family": "hopf3d", "mu": 0.1, "seed": 0,
                     "out": str(tmp_path)})


# ----------------------------------------------------------------- the CLI

def test_cli_dim_roundtrip(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("family = hopf2d\nmu_values = 0.1\ngrid_n = 96\n"
                   "horizon = 40\nk_min = 3\nk_max = 6\n"
                   f"out = {tmp_path / 'out'}\n")
    assert main(["dim", "--config", str(cfg), "--seed", "3"]) == 0
    assert (tmp_path / "out" / "dim.csv").exists()


def test_cli_config_errors_exit_two(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("family = lorenz\nseed = 0\n")
    assert main(["dim", "--config", str(cfg)]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["dim", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert main(["dim"]) == 2  # no seed anywhere


def test_cli_requires_subcommand():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_cli_flag_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("family = hopf2d\nmu_values = 0.1\ngrid_n = 96\n"
                   "horizon = 40\nk_min = 3\nk_max = 6\nseed = 1\n"
                   "out = ignored\n")
    out = tmp_path / "flagged"
    assert main(["dim", "--config", str(cfg), "--out", str(out),
                 "--cache", "off", "--jobs", "2"]) == 0
    assert (out / "dim.csv").exists()


def test_sweep_all_runs_everything(tmp_path):
    cfg = {"family": "hopf2d", "mu_values": (0.1,), "mu": 0.1, "n0": 6,
           "n_values": (4, 5), "grid_n": 96, "horizon": 40, "k_min": 3,
           "k_max": 6, "samples": 10_000, "seed": 4, **_SMALL_BOUNDS,
           "out": str(tmp_path / "all")}
    assert sweep_all(cfg) == 0
    names = {p.name for p in (tmp_path / "all").iterdir()}
    assert {"dim.csv", "dim.svg", "bounds.csv", "bounds.json", "a2.csv",
            "induced.json"} <= names
