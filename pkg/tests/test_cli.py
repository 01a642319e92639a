"""Tests for the command-line front end: config parsing, CSV emission,
determinism, and exit-code discipline."""

import math

import pytest
import yaml
from click.testing import CliRunner

from gpscatter.cli import RunConfig, load_config, main, parse_config
from gpscatter.errors import ConfigError
from gpscatter.model import PhysicalParams, RectangularWell
from gpscatter.scatter import source_strength

import oracles


def _base_mapping(**extra):
    cfg = {
        "potential": {"kind": "rectangular_well", "V0": 50.0, "a": 20.0},
        "params": {"mu": 2.0, "g": -1.0},
    }
    cfg.update(extra)
    return cfg


def _write_config(tmp_path, mapping, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(mapping))
    return str(path)


def _outputs(result) -> str:
    return result.output + (result.stderr or "")


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


class TestParseConfig:
    def test_minimal(self):
        cfg = parse_config(_base_mapping())
        assert cfg.pot == RectangularWell(50.0, 20.0)
        assert cfg.params == PhysicalParams(mu=2.0, g=-1.0)
        assert cfg.threads == 1 and cfg.seed == 0

    @pytest.mark.parametrize("mapping,fragment", [
        ("not a dict", "root"),
        ({"params": {"mu": 1.0}}, "potential"),
        (_base_mapping(bogus=1), "bogus"),
        (_base_mapping(C="one"), "C"),
        (_base_mapping(direction="up"), "direction"),
        (_base_mapping(mu_range=[1.0]), "mu_range"),
        (_base_mapping(mu_range=[2.4, 1.9]), "lo < hi"),
        (_base_mapping(bracket=[1.0, 1.0]), "lo < hi"),
        (_base_mapping(n_points="many"), "n_points"),
        (_base_mapping(conjugate=1), "boolean"),
        ({"potential": {"kind": "harmonic"}, "params": {"mu": 1.0}}, "kind"),
        ({"potential": {"kind": "zero", "V0": 1.0}, "params": {"mu": 1.0}}, "V0"),
        ({"potential": {"kind": "zero"}, "params": {"g": 0.0}}, "mu"),
        ({"potential": {"kind": "zero"}, "params": {"mu": 1.0, "mass": 2.0}},
         "mass"),
        (_base_mapping(td={"x_lo": 0.0}), "td"),
        (_base_mapping(td={"x_lo": -40.0, "x_hi": 40.0, "n": 64, "dt": 0.01,
                           "absorber": {"width": 5.0, "radius": 1.0}}),
         "radius"),
    ])
    def test_rejects_malformed(self, mapping, fragment):
        with pytest.raises(ConfigError, match=fragment):
            parse_config(mapping)

    def test_roundtrip_through_canonical_mapping(self):
        mapping = _base_mapping(
            C=[0.5, -0.25],
            direction="right_to_left",
            mu_range=[0.5, 4.0],
            n_points=17,
            bracket=[1.9, 2.4],
            xprime=[-10.0, 3.5],
            random_cuts=4,
            seed=11,
            threads=3,
            integrator={"rel_tol": 1e-11, "max_steps": 500000},
            td={
                "x_lo": -90.0, "x_hi": 70.0, "n": 2048, "dt": 0.004,
                "absorber": {"width": 20.0, "strength": 5.0},
                "f0": [0.1, 2.5], "x0": -22.0, "t_final": 100.0,
                "probe": [25.0, 50.0], "snapshot_every": 25.0,
            },
            out="results.csv",
        )
        cfg = parse_config(mapping)
        again = parse_config(cfg.to_mapping())
        assert again == cfg
        assert again.config_hash() == cfg.config_hash()

    def test_hash_is_stable_and_sensitive(self):
        a = parse_config(_base_mapping())
        b = parse_config(_base_mapping())
        c = parse_config(_base_mapping(seed=1))
        assert a.config_hash() == b.config_hash()
        assert len(a.config_hash()) == 64
        assert a.config_hash() != c.config_hash()

    def test_hash_ignores_output_path_and_threads(self):
        a = parse_config(_base_mapping())
        b = parse_config(_base_mapping(out="elsewhere.csv", threads=8))
        assert a.config_hash() == b.config_hash()
        assert a.to_mapping() != b.to_mapping()

    def test_load_config_rejects_bad_yaml(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("potential: [unclosed\n")
        with pytest.raises(ConfigError, match="YAML"):
            load_config(str(path))
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(str(tmp_path / "absent.yaml"))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


@pytest.fixture()
def runner():
    return CliRunner()


class TestSweepCommand:
    def test_csv_output_and_byte_determinism(self, runner, tmp_path):
        config = _write_config(
            tmp_path,
            _base_mapping(mu_range=[1.8, 2.2], n_points=5),
        )
        out = tmp_path / "curve.csv"
        r1 = runner.invoke(main, ["sweep", "--config", config, "--out", str(out)])
        assert r1.exit_code == 0, _outputs(r1)
        assert "5/5 points ok" in r1.output
        first = out.read_bytes()

        lines = first.decode().splitlines()
        assert lines[0].startswith("# config-hash: ")
        assert lines[1] == "mu,T2,status"
        assert len(lines) == 7
        mu0, t2_0, status0 = lines[2].split(",")
        assert float(mu0) == 1.8 and status0 == "ok"
        assert 0.0 < float(t2_0) < 1.0

        r2 = runner.invoke(main, ["sweep", "--config", config, "--out", str(out)])
        assert r2.exit_code == 0
        assert out.read_bytes() == first

    def test_thread_count_does_not_change_data_rows(self, runner, tmp_path):
        config = _write_config(
            tmp_path, _base_mapping(mu_range=[1.8, 2.2], n_points=5)
        )
        out1, out4 = tmp_path / "t1.csv", tmp_path / "t4.csv"
        r1 = runner.invoke(
            main, ["sweep", "--config", config, "--out", str(out1)]
        )
        r4 = runner.invoke(
            main,
            ["sweep", "--config", config, "--out", str(out4), "--threads", "4"],
        )
        assert r1.exit_code == 0 and r4.exit_code == 0
        rows1 = out1.read_text().splitlines()[1:]
        rows4 = out4.read_text().splitlines()[1:]
        assert rows1 == rows4  # only the hash line may differ

    def test_mostly_failing_sweep_exits_1_but_writes_file(self, runner, tmp_path):
        config = _write_config(
            tmp_path,
            {
                "potential": {
                    "kind": "double_gaussian", "V0": 1.0, "b": 7.35,
                    "alpha": 1.47,
                },
                "params": {"mu": 0.7, "g": 0.005},
                "mu_range": [0.60, 0.65],
                "n_points": 4,
            },
        )
        out = tmp_path / "bad.csv"
        result = runner.invoke(
            main, ["sweep", "--config", config, "--out", str(out)]
        )
        assert result.exit_code == 1
        assert "compute failure" in _outputs(result)
        rows = out.read_text().splitlines()[2:]
        assert len(rows) == 4
        assert all(row.endswith(",NonFiniteState") for row in rows)
        assert all(row.split(",")[1] == "" for row in rows)

    def test_missing_mu_range_is_usage_error(self, runner, tmp_path):
        config = _write_config(tmp_path, _base_mapping())
        result = runner.invoke(
            main, ["sweep", "--config", config, "--out", "x.csv"]
        )
        assert result.exit_code == 2
        assert "mu_range" in _outputs(result)

    def test_missing_out_is_usage_error(self, runner, tmp_path):
        config = _write_config(tmp_path, _base_mapping(mu_range=[1.8, 2.2]))
        result = runner.invoke(main, ["sweep", "--config", config])
        assert result.exit_code == 2

    def test_unknown_config_key_is_usage_error(self, runner, tmp_path):
        config = _write_config(
            tmp_path, _base_mapping(mu_range=[1.8, 2.2], speed="fast")
        )
        result = runner.invoke(
            main, ["sweep", "--config", config, "--out", "x.csv"]
        )
        assert result.exit_code == 2
        assert "speed" in _outputs(result)

    def test_nonexistent_config_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(
            main, ["sweep", "--config", str(tmp_path / "nope.yaml")]
        )
        assert result.exit_code == 2


class TestResonanceCommand:
    def test_linear_level_and_report_line(self, runner, tmp_path):
        e = oracles.E_128
        config = _write_config(
            tmp_path,
            {
                "potential": {"kind": "rectangular_well", "V0": 50.0, "a": 20.0},
                "params": {"mu": 0.5, "g": 0.0},
                "bracket": [e - 0.3, e + 0.3],
            },
        )
        out = tmp_path / "res.csv"
        result = runner.invoke(
            main, ["resonance", "--config", config, "--out", str(out)]
        )
        assert result.exit_code == 0, _outputs(result)
        line = next(
            ln for ln in result.output.splitlines() if ln.startswith("mu_res=")
        )
        mu_res = float(line.removeprefix("mu_res="))
        assert abs(mu_res - e) < 1e-8
        lines = out.read_text().splitlines()
        assert lines[1] == "mu_res,T2"
        row_mu, row_t2 = lines[2].split(",")
        assert float(row_mu) == mu_res
        assert abs(1.0 - float(row_t2)) < 1e-6

    def test_empty_bracket_exits_1(self, runner, tmp_path):
        config = _write_config(
            tmp_path,
            {
                "potential": {"kind": "rectangular_well", "V0": 50.0, "a": 20.0},
                "params": {"mu": 0.8, "g": 0.0},
                "bracket": [0.6, 1.2],
            },
        )
        result = runner.invoke(main, ["resonance", "--config", config])
        assert result.exit_code == 1
        assert "NoResonanceInBracket" in _outputs(result)


class TestSplitCheckCommand:
    def test_fixed_and_random_cuts(self, runner, tmp_path, mu_res_well):
        mapping = _base_mapping(xprime=[-10.0], random_cuts=2, seed=7)
        mapping["params"]["mu"] = mu_res_well
        config = _write_config(tmp_path, mapping)
        out = tmp_path / "split.csv"
        result = runner.invoke(
            main, ["split-check", "--config", config, "--out", str(out)]
        )
        assert result.exit_code == 0, _outputs(result)
        assert "18/18 sub-solves ok" in result.output
        lines = out.read_text().splitlines()
        assert lines[1] == (
            "xprime,mu,T2_full_LR,T2_full_RL,T2_L_LR,T2_L_RL,T2_R_LR,T2_R_RL,"
            "r1,r2,errors"
        )
        rows = [ln.split(",") for ln in lines[2:]]
        assert len(rows) == 3
        assert float(rows[0][0]) == -10.0
        for row in rows:
            assert -20.0 < float(row[0]) < 20.0
            assert float(row[8]) < 1e-6  # r1 at transparency, every cut
            assert row[10] == ""

    def test_seed_changes_random_cuts(self, runner, tmp_path):
        mapping = _base_mapping(random_cuts=2)
        config = _write_config(tmp_path, mapping)
        outs = []
        for seed in (1, 2):
            out = tmp_path / f"split{seed}.csv"
            result = runner.invoke(
                main,
                ["split-check", "--config", config, "--out", str(out),
                 "--seed", str(seed)],
            )
            assert result.exit_code == 0, _outputs(result)
            outs.append(
                [ln.split(",")[0] for ln in out.read_text().splitlines()[2:]]
            )
        assert outs[0] != outs[1]

    def test_no_cuts_is_usage_error(self, runner, tmp_path):
        config = _write_config(tmp_path, _base_mapping())
        result = runner.invoke(
            main, ["split-check", "--config", config, "--out", "x.csv"]
        )
        assert result.exit_code == 2


class TestWavefunctionCommand:
    def test_samples_ascending_and_consistent(self, runner, tmp_path):
        config = _write_config(
            tmp_path,
            {
                "potential": {"kind": "rectangular_well", "V0": 2.0, "a": 3.0},
                "params": {"mu": 1.0, "g": 0.0},
                "n_samples": 32,
                "conjugate": True,
            },
        )
        out = tmp_path / "wave.csv"
        result = runner.invoke(
            main, ["wavefunction", "--config", config, "--out", str(out)]
        )
        assert result.exit_code == 0, _outputs(result)
        lines = out.read_text().splitlines()
        assert lines[1] == "x,re_psi,im_psi,density,current,re_chi,im_chi"
        rows = [list(map(float, ln.split(","))) for ln in lines[2:]]
        assert len(rows) == 32
        xs = [r[0] for r in rows]
        assert xs == sorted(xs)
        for x, re_p, im_p, dens, cur, re_c, im_c in rows:
            assert math.isclose(dens, re_p**2 + im_p**2, rel_tol=1e-12)
            assert math.isfinite(cur) and math.isfinite(re_c + im_c)


class TestPropagateCommand:
    def test_steady_state_transmission_line(self, runner, tmp_path):
        params = PhysicalParams(mu=1.0, g=0.0)
        f0 = source_strength(1.0 + 0.0j, params)
        config = _write_config(
            tmp_path,
            {
                "potential": {"kind": "rectangular_well", "V0": 2.0, "a": 3.0},
                "params": {"mu": 1.0, "g": 0.0},
                "td": {
                    "x_lo": -40.0, "x_hi": 40.0, "n": 512, "dt": 0.02,
                    "absorber": {"width": 10.0, "strength": 2.0},
                    "f0": [f0.real, f0.imag],
                    "probe": [6.0, 25.0],
                    "convergence": 0.003,
                },
            },
        )
        result = runner.invoke(main, ["propagate", "--config", config])
        assert result.exit_code == 0, _outputs(result)
        line = next(
            ln for ln in result.output.splitlines() if ln.startswith("T2=")
        )
        t2 = float(line.removeprefix("T2="))
        closed = oracles.rect_T2_closed_form(1.0, 2.0, 3.0)
        assert abs(t2 - closed) < 0.02

    def test_no_steady_state_exits_1(self, runner, tmp_path):
        params = PhysicalParams(mu=1.0, g=0.0)
        f0 = source_strength(1.0 + 0.0j, params)
        config = _write_config(
            tmp_path,
            {
                "potential": {"kind": "rectangular_well", "V0": 2.0, "a": 3.0},
                "params": {"mu": 1.0, "g": 0.0},
                "td": {
                    "x_lo": -40.0, "x_hi": 40.0, "n": 512, "dt": 0.02,
                    "absorber": {"width": 10.0, "strength": 2.0},
                    "f0": [f0.real, f0.imag],
                    "probe": [6.0, 25.0],
                    "convergence": 0.003,
                    "t_max": 45.0,
                },
            },
        )
        result = runner.invoke(main, ["propagate", "--config", config])
        assert result.exit_code == 1
        assert "T2=nan" in result.output

    def test_snapshot_series_from_zero_source(self, runner, tmp_path):
        config = _write_config(
            tmp_path,
            {
                "potential": {"kind": "zero"},
                "params": {"mu": 1.0, "g": 0.0},
                "td": {
                    "x_lo": -40.0, "x_hi": 40.0, "n": 512, "dt": 0.02,
                    "absorber": {"width": 10.0, "strength": 2.0},
                    "f0": 0.0,
                    "t_final": 1.0,
                    "snapshot_every": 0.5,
                },
            },
        )
        out = tmp_path / "snap.csv"
        result = runner.invoke(
            main, ["propagate", "--config", config, "--out", str(out)]
        )
        assert result.exit_code == 0, _outputs(result)
        assert "T2=nan" in result.output  # no drive, no transmission defined
        files = sorted(tmp_path.glob("snap_*.csv"))
        assert [f.name for f in files] == [
            "snap_0000.csv", "snap_0001.csv", "snap_0002.csv"
        ]
        lines = files[-1].read_text().splitlines()
        assert lines[0].startswith("# config-hash: ")
        assert lines[1].startswith("# t: ")
        assert lines[2] == "x,re_psi,im_psi,density"
        assert len(lines) == 3 + 512
        assert all(ln.endswith(",0") for ln in lines[3:])


class TestLinearOracleCommand:
    def test_matrix_and_ode_routes_agree(self, runner, tmp_path):
        config = _write_config(
            tmp_path,
            {
                "potential": {"kind": "rectangular_well", "V0": 50.0, "a": 20.0},
                "params": {"mu": 1.0, "g": 0.0},
                "e_range": [0.5, 2.0],
                "n_energies": 8,
                "n_segments": 512,
            },
        )
        out = tmp_path / "oracle.csv"
        result = runner.invoke(
            main, ["linear-oracle", "--config", config, "--out", str(out)]
        )
        assert result.exit_code == 0, _outputs(result)
        line = next(
            ln for ln in result.output.splitlines()
            if ln.startswith("max_abs_diff=")
        )
        assert float(line.removeprefix("max_abs_diff=")) < 1e-8
        lines = out.read_text().splitlines()
        assert lines[1] == "E,T2_ode,T2_matrix,abs_diff,status"
        assert len(lines) == 2 + 8
        assert all(ln.endswith(",ok") for ln in lines[2:])

    def test_requires_linear_params(self, runner, tmp_path):
        config = _write_config(tmp_path, _base_mapping())  # g = -1
        result = runner.invoke(
            main, ["linear-oracle", "--config", config, "--out", "x.csv"]
        )
        assert result.exit_code == 2
        assert "g = 0" in _outputs(result)
