"""Config parsing, exit codes, output formats, override flags."""

import json
import math

import pytest

from ergoflux import GADC, BlochVector, ConfigError, Pauli, QutritDiagonal
from ergoflux.cli import main, parse_config

GADC_BLOCK = {"kind": "gadc", "gamma_minus": 0.1, "n_bose": 0.0, "h_z": 1.0}


def cfg_path(tmp_path, obj, name="run.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def parse_err(obj):
    with pytest.raises(ConfigError) as info:
        parse_config(json.dumps(obj))
    return info.value


class TestParseConfig:
    def test_full_round_trip(self):
        config = parse_config(json.dumps({
            "command": "traj",
            "channel": GADC_BLOCK,
            "states": [
                {"bloch": [0.6, 0.0, 0.5]},
                {"pure": [1.0471975511965976]},
                {"pure": [0.5, 0.25]},
            ],
            "horizon": 30.0,
            "n_points": 301,
            "output": "runs/traj.csv",
            "format": "json",
            "seed": 4,
        }))
        assert config.command == "traj"
        assert config.channel == GADC(gamma_minus=0.1, n_bose=0.0, h_z=1.0)
        assert config.states[0] == BlochVector(0.6, 0.0, 0.5)
        assert config.states[1].m_z == pytest.approx(0.5)
        assert config.states[2].m_y == pytest.approx(math.sin(0.5) * math.sin(0.25))
        assert config.horizon == 30.0
        assert config.n_points == 301
        assert config.output == "runs/traj.csv"
        assert config.format == "json"
        assert config.seed == 4

    def test_defaults(self):
        config = parse_config(json.dumps({
            "command": "traj",
            "channel": GADC_BLOCK,
            "states": [{"bloch": [0.0, 0.0, 0.5]}],
        }))
        assert config.horizon is None
        assert config.n_points == 2001
        assert config.output == "out"
        assert config.format == "csv"
        assert config.seed == 0

    def test_temperature_route(self):
        config = parse_config(json.dumps({
            "command": "traj",
            "channel": {"kind": "gadc", "gamma_minus": 0.1, "temperature": 2.0},
            "states": [{"bloch": [0.0, 0.0, 0.5]}],
        }))
        assert config.channel.n_bose == pytest.approx(1.0 / (math.e - 1.0))

    def test_all_channel_kinds(self):
        base = {"command": "spectrum", "channel": None}
        for block, typ in [
            ({"kind": "pauli", "gamma_perp": 0.05, "gamma_z": 0.1}, Pauli),
            ({"kind": "qutrit_adc", "gamma": 0.1}, None),
            ({"kind": "nonmarkov_adc", "gamma": 0.3, "lam": 0.03, "delta": 0.13}, None),
        ]:
            config = parse_config(json.dumps({**base, "channel": block}))
            if typ is not None:
                assert isinstance(config.channel, typ)

    def test_syntax_error_carries_position(self):
        with pytest.raises(ConfigError) as info:
            parse_config('{"command": "traj",\n  "channel": }')
        assert info.value.kind == "syntax"
        assert "line 2" in str(info.value)

    def test_unknown_key_dotted_path(self):
        err = parse_err({
            "command": "traj",
            "channel": {**GADC_BLOCK, "gamma": 0.1},
            "states": [{"bloch": [0, 0, 0.5]}],
        })
        assert err.kind == "schema"
        assert "channel.gamma" in str(err)

    def test_unknown_top_level_key(self):
        err = parse_err({
            "command": "traj",
            "channel": GADC_BLOCK,
            "states": [{"bloch": [0, 0, 0.5]}],
            "horizons": 10.0,
        })
        assert err.kind == "schema"
        assert "horizons" in str(err)

    def test_missing_required_key(self):
        err = parse_err({
            "command": "traj",
            "channel": {"kind": "gadc"},
            "states": [{"bloch": [0, 0, 0.5]}],
        })
        assert err.kind == "schema"
        assert "gamma_minus" in str(err)

    def test_unknown_channel_kind(self):
        err = parse_err({
            "command": "traj",
            "channel": {"kind": "depolarizing", "gamma": 0.1},
            "states": [{"bloch": [0, 0, 0.5]}],
        })
        assert err.kind == "schema"

    def test_temperature_and_n_bose_conflict(self):
        err = parse_err({
            "command": "traj",
            "channel": {"kind": "gadc", "gamma_minus": 0.1, "n_bose": 0.2,
                        "temperature": 1.0},
            "states": [{"bloch": [0, 0, 0.5]}],
        })
        assert err.kind == "schema"
        assert "not both" in str(err)

    def test_negative_rate_is_physics(self):
        err = parse_err({
            "command": "traj",
            "channel": {"kind": "gadc", "gamma_minus": -0.1},
            "states": [{"bloch": [0, 0, 0.5]}],
        })
        assert err.kind == "physics"

    def test_state_outside_ball_is_physics(self):
        err = parse_err({
            "command": "traj",
            "channel": GADC_BLOCK,
            "states": [{"bloch": [0.9, 0.0, 0.9]}],
        })
        assert err.kind == "physics"

    def test_state_shape_errors(self):
        for bad in (
            {"bloch": [0.0, 0.5]},
            {"qutrit": [0.5, 0.3, 0.1]},
            {"pure": []},
            {"bloch": [0, 0, 0.5], "pure": [0.0]},
            {"spin": [0.5]},
        ):
            err = parse_err({
                "command": "traj", "channel": GADC_BLOCK, "states": [bad],
            })
            assert err.kind == "schema"

    def test_arity_rules(self):
        for obj in (
            {"command": "traj", "channel": GADC_BLOCK},
            {"command": "crossings", "channel": GADC_BLOCK,
             "states": [{"bloch": [0, 0, 0.5]}]},
            {"command": "region", "channel": GADC_BLOCK,
             "states": [{"bloch": [0, 0, 0.5]}]},
            {"command": "verify", "channel": GADC_BLOCK},
        ):
            assert parse_err(obj).kind == "schema"

    def test_mpemba_pure_scan_takes_no_state(self):
        grid = {
            "scan": "mpemba_pure",
            "axis1": {"name": "theta1", "start": 0.0, "stop": 3.14, "n": 3},
            "axis2": {"name": "theta2", "start": 0.0, "stop": 3.14, "n": 3},
        }
        err = parse_err({
            "command": "region", "channel": GADC_BLOCK, "grid": grid,
            "states": [{"bloch": [0, 0, 0.5]}],
        })
        assert "no reference state" in str(err)
        config = parse_config(json.dumps({
            "command": "region", "channel": GADC_BLOCK, "grid": grid,
        }))
        assert config.states == ()

    def test_value_type_checks(self):
        assert parse_err({
            "command": "traj", "channel": GADC_BLOCK,
            "states": [{"bloch": [0, 0, 0.5]}], "n_points": 1,
        }).kind == "schema"
        assert parse_err({
            "command": "traj", "channel": GADC_BLOCK,
            "states": [{"bloch": [0, 0, 0.5]}], "seed": True,
        }).kind == "schema"
        assert parse_err({
            "command": "traj", "channel": GADC_BLOCK,
            "states": [{"bloch": [0, 0, 0.5]}], "format": "parquet",
        }).kind == "schema"
        assert parse_err({
            "command": "traj", "channel": GADC_BLOCK,
            "states": [{"bloch": [0, 0, 0.5]}], "horizon": -2.0,
        }).kind == "physics"
        assert parse_err({
            "command": "verify", "channel": GADC_BLOCK,
            "verify": {"properties": ["L9"]},
        }).kind == "schema"


class TestExitCodes:
    def run(self, capsys, *argv):
        code = main(list(argv))
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    def stderr_record(self, err):
        lines = err.strip().splitlines()
        assert len(lines) == 1
        return json.loads(lines[0])

    def test_syntax_exit_2(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{nope")
        code, _, err = self.run(capsys, "traj", "--config", str(p))
        assert code == 2
        assert self.stderr_record(err)["error"] == "syntax"

    def test_schema_exit_3(self, tmp_path, capsys):
        path = cfg_path(tmp_path, {"command": "traj", "channel": GADC_BLOCK})
        code, _, err = self.run(capsys, "traj", "--config", path)
        assert code == 3
        assert self.stderr_record(err)["error"] == "schema"

    def test_physics_exit_4(self, tmp_path, capsys):
        path = cfg_path(tmp_path, {
            "command": "traj",
            "channel": {"kind": "gadc", "gamma_minus": -1.0},
            "states": [{"bloch": [0, 0, 0.5]}],
        })
        code, _, err = self.run(capsys, "traj", "--config", path)
        assert code == 4
        assert self.stderr_record(err)["error"] == "physics"

    def test_ordering_exit_7(self, tmp_path, capsys):
        path = cfg_path(tmp_path, {
            "command": "crossings",
            "channel": GADC_BLOCK,
            "states": [{"bloch": [0, 0, 0.5]}, {"bloch": [0, 0, 0.5]}],
            "output": str(tmp_path / "r.json"),
        })
        code, _, err = self.run(capsys, "crossings", "--config", path)
        assert code == 7
        assert self.stderr_record(err)["error"] == "ordering"

    def test_model_exit_9(self, tmp_path, capsys):
        # the structured-bath evolution has no static generator to dump
        path = cfg_path(tmp_path, {
            "command": "spectrum",
            "channel": {"kind": "nonmarkov_adc", "gamma": 0.3, "lam": 0.03},
            "output": str(tmp_path / "s.json"),
        })
        code, _, err = self.run(capsys, "spectrum", "--config", path)
        assert code == 9
        assert self.stderr_record(err)["error"] == "model"

    def test_missing_config_file(self, tmp_path, capsys):
        code, _, err = self.run(capsys, "traj", "--config", str(tmp_path / "gone.json"))
        assert code == 3
        assert "cannot read" in self.stderr_record(err)["message"]

    def test_command_mismatch(self, tmp_path, capsys):
        path = cfg_path(tmp_path, {
            "command": "traj",
            "channel": GADC_BLOCK,
            "states": [{"bloch": [0, 0, 0.5]}],
        })
        code, _, err = self.run(capsys, "crossings", "--config", path)
        assert code == 3
        assert "command" in self.stderr_record(err)["message"]


class TestCommands:
    def run_ok(self, capsys, *argv):
        code = main(list(argv))
        captured = capsys.readouterr()
        assert code == 0, captured.err
        return captured.out.strip().splitlines()

    def test_traj_csv(self, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        path = cfg_path(tmp_path, {
            "command": "traj",
            "channel": GADC_BLOCK,
            "states": [{"bloch": [0.6, 0.0, 0.5]}],
            "horizon": 20.0,
            "n_points": 51,
            "output": str(out),
        })
        printed = self.run_ok(capsys, "traj", "--config", path)
        assert printed == [str(out)]
        raw = out.read_bytes()
        assert b"\r" not in raw
        lines = raw.decode().splitlines()
        assert lines[0] == "t,ergotropy,ergotropy_incoherent,ergotropy_coherent,trace_distance"
        assert len(lines) == 52
        # 17-significant-digit floats: the second time stamp is 0.4 exactly
        assert lines[2].startswith("0.40000000000000002,")

    def test_traj_multi_state_suffixes(self, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        path = cfg_path(tmp_path, {
            "command": "traj",
            "channel": GADC_BLOCK,
            "states": [{"bloch": [0.6, 0.0, 0.5]}, {"pure": [0.7]}],
            "horizon": 5.0,
            "n_points": 11,
            "output": str(out),
        })
        printed = self.run_ok(capsys, "traj", "--config", path)
        assert printed == [str(tmp_path / "traj_0.csv"), str(tmp_path / "traj_1.csv")]
        for p in printed:
            assert (tmp_path / p.split("/")[-1]).exists()

    def test_traj_json_format(self, tmp_path, capsys):
        out = tmp_path / "traj.json"
        path = cfg_path(tmp_path, {
            "command": "traj",
            "channel": GADC_BLOCK,
            "states": [{"bloch": [0.6, 0.0, 0.5]}],
            "horizon": 5.0,
            "n_points": 11,
            "output": str(out),
            "format": "json",
        })
        self.run_ok(capsys, "traj", "--config", path)
        record = json.loads(out.read_text())
        assert set(record) == {"t", "ergotropy", "ergotropy_incoherent",
                               "ergotropy_coherent", "trace_distance"}
        assert len(record["t"]) == 11
        assert record["t"][-1] == 5.0

    def test_crossings_worked_pair(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        path = cfg_path(tmp_path, {
            "command": "crossings",
            "channel": GADC_BLOCK,
            "states": [{"pure": [0.0]}, {"pure": [1.5707963267948966]}],
            "output": str(out),
        })
        self.run_ok(capsys, "crossings", "--config", path)
        rep = json.loads(out.read_text())
        assert rep["count"] == 1
        assert rep["parity"] == "odd"
        assert rep["crossing_times"][0] == pytest.approx(4.7000362923814993, abs=1e-8)
        assert rep["mpemba_parameter"] == pytest.approx(0.60965152423478597, rel=1e-8)
        assert rep["tangency_flags"] == [False]

    def test_region_qutrit_with_meta(self, tmp_path, capsys):
        out = tmp_path / "region.csv"
        path = cfg_path(tmp_path, {
            "command": "region",
            "channel": {"kind": "qutrit_adc", "gamma": 0.1},
            "states": [{"qutrit": [0.481, 0.103]}],
            "grid": {
                "scan": "qutrit",
                "axis1": {"name": "p1", "start": 0.465, "stop": 0.505, "n": 5},
                "axis2": {"name": "p2", "start": 0.322, "stop": 0.402, "n": 5},
            },
            "output": str(out),
        })
        printed = self.run_ok(capsys, "region", "--config", path)
        meta_path = str(tmp_path / "region.meta.json")
        assert printed == [str(out), meta_path]
        lines = out.read_text().splitlines()
        assert lines[0] == ("p1,p2,valid,crossing_count,emc,state_mpemba,"
                            "mpemba_parameter,iso_flag")
        assert len(lines) == 26
        worked = [l for l in lines if l.startswith("0.48499999999999999,0.38")]
        assert len(worked) == 1
        fields = worked[0].split(",")
        assert fields[2] == "true" and fields[3] == "1" and fields[4] == "true"
        meta = json.loads((tmp_path / "region.meta.json").read_text())
        assert meta["scan"] == "qutrit"
        assert meta["anomalies"] == []
        assert meta["reference"] == {"qutrit": [0.481, 0.103]}
        assert meta["grid"]["axis1"]["n"] == 5

    def test_verify_command(self, tmp_path, capsys):
        out = tmp_path / "verify.json"
        path = cfg_path(tmp_path, {
            "command": "verify",
            "channel": GADC_BLOCK,
            "verify": {"properties": ["L1", "L2"], "samples": 300},
            "seed": 3,
            "output": str(out),
        })
        self.run_ok(capsys, "verify", "--config", path)
        rep = json.loads(out.read_text())
        assert rep["seed"] == 3
        for prop in ("L1", "L2"):
            assert rep["results"][prop]["samples"] == 300
            assert rep["results"][prop]["violations"] == 0
            assert rep["results"][prop]["pass"] is True

    def test_spectrum_command(self, tmp_path, capsys):
        out = tmp_path / "spectrum.json"
        path = cfg_path(tmp_path, {
            "command": "spectrum",
            "channel": {"kind": "gadc", "gamma_minus": 0.1, "n_bose": 0.5},
            "output": str(out),
        })
        self.run_ok(capsys, "spectrum", "--config", path)
        rep = json.loads(out.read_text())
        assert rep["dim"] == 2
        assert len(rep["eigenvalues"]) == 4
        reals = sorted(ev[0] for ev in rep["eigenvalues"])
        assert reals[-1] == pytest.approx(0.0, abs=1e-12)
        assert rep["condition_number"] < 5.0
        # thermal fixed point at n = 0.5: populations 1/4 excited, 3/4 ground
        ss = rep["steady_state"]
        assert ss[0][0] == pytest.approx(0.25, abs=1e-10)
        assert ss[3][0] == pytest.approx(0.75, abs=1e-10)
        assert len(rep["right_eigenmatrices"]) == 4


class TestOverrides:
    def run_ok(self, capsys, *argv):
        code = main(list(argv))
        captured = capsys.readouterr()
        assert code == 0, captured.err
        return captured.out.strip().splitlines()

    def crossings_config(self, tmp_path, out_name="r.json"):
        return cfg_path(tmp_path, {
            "command": "crossings",
            "channel": GADC_BLOCK,
            "states": [{"pure": [0.0]}, {"pure": [1.5707963267948966]}],
            "output": str(tmp_path / out_name),
        })

    def test_gamma_override_rescales_crossing(self, tmp_path, capsys):
        path = self.crossings_config(tmp_path)
        self.run_ok(capsys, "crossings", "--config", path, "--gamma", "0.2")
        rep = json.loads((tmp_path / "r.json").read_text())
        assert rep["crossing_times"][0] == pytest.approx(
            4.7000362923814993 / 2.0, abs=1e-7
        )

    def test_gamma_override_rejected_for_pauli(self, tmp_path, capsys):
        path = cfg_path(tmp_path, {
            "command": "crossings",
            "channel": {"kind": "pauli", "gamma_perp": 0.05, "gamma_z": 0.1},
            "states": [{"bloch": [0.8, 0, 0.3]}, {"bloch": [0.2, 0, 0.45]}],
            "output": str(tmp_path / "r.json"),
        })
        code = main(["crossings", "--config", path, "--gamma", "0.2"])
        err = capsys.readouterr().err
        assert code == 3
        assert "ambiguous" in err

    def test_gamma_override_still_physical(self, tmp_path, capsys):
        path = self.crossings_config(tmp_path)
        code = main(["crossings", "--config", path, "--gamma", "-0.2"])
        capsys.readouterr()
        assert code == 4

    def test_t_max_override(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        path = cfg_path(tmp_path, {
            "command": "traj",
            "channel": GADC_BLOCK,
            "states": [{"bloch": [0.6, 0.0, 0.5]}],
            "horizon": 20.0,
            "n_points": 11,
            "output": str(out),
        })
        self.run_ok(capsys, "traj", "--config", path, "--t-max", "5.0")
        last = out.read_text().splitlines()[-1]
        assert last.startswith("5,")
        code = main(["traj", "--config", path, "--t-max", "-1.0"])
        capsys.readouterr()
        assert code == 4

    def test_out_and_format_and_seed_overrides(self, tmp_path, capsys):
        path = cfg_path(tmp_path, {
            "command": "verify",
            "channel": GADC_BLOCK,
            "verify": {"properties": ["L1"], "samples": 50},
            "output": str(tmp_path / "a.json"),
        })
        other = tmp_path / "b.json"
        self.run_ok(capsys, "verify", "--config", path,
                    "--out", str(other), "--seed", "11")
        assert not (tmp_path / "a.json").exists()
        rep = json.loads(other.read_text())
        assert rep["seed"] == 11

        tpath = cfg_path(tmp_path, {
            "command": "traj",
            "channel": GADC_BLOCK,
            "states": [{"bloch": [0.6, 0.0, 0.5]}],
            "horizon": 5.0,
            "n_points": 11,
            "output": str(tmp_path / "t.csv"),
        }, name="t.json")
        self.run_ok(capsys, "traj", "--config", tpath, "--format", "json")
        json.loads((tmp_path / "t.csv").read_text())  # payload is JSON now


class TestDeterminism:
    def test_traj_rerun_byte_identical(self, tmp_path, capsys):
        path = cfg_path(tmp_path, {
            "command": "traj",
            "channel": GADC_BLOCK,
            "states": [{"bloch": [0.6, 0.0, 0.5]}],
            "horizon": 20.0,
            "n_points": 101,
            "output": str(tmp_path / "a.csv"),
        })
        assert main(["traj", "--config", path]) == 0
        first = (tmp_path / "a.csv").read_bytes()
        assert main(["traj", "--config", path, "--out", str(tmp_path / "b.csv")]) == 0
        capsys.readouterr()
        assert first == (tmp_path / "b.csv").read_bytes()

    def test_region_rerun_byte_identical(self, tmp_path, capsys):
        path = cfg_path(tmp_path, {
            "command": "region",
            "channel": GADC_BLOCK,
            "states": [{"bloch": [0.4, 0.0, 0.15]}],
            "grid": {
                "scan": "emc",
                "axis1": {"name": "m_x", "start": 0.0, "stop": 0.9, "n": 7},
                "axis2": {"name": "m_z", "start": -0.9, "stop": 0.9, "n": 7},
            },
            "output": str(tmp_path / "a.csv"),
        })
        assert main(["region", "--config", path]) == 0
        csv1 = (tmp_path / "a.csv").read_bytes()
        meta1 = (tmp_path / "a.meta.json").read_bytes()
        assert main(["region", "--config", path]) == 0
        capsys.readouterr()
        assert csv1 == (tmp_path / "a.csv").read_bytes()
        assert meta1 == (tmp_path / "a.meta.json").read_bytes()
