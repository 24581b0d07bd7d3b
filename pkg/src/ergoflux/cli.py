"""Command line front end: config parsing and CSV/JSON emission.

`ergoflux <command> --config <path> [overrides]` with commands

* ``traj``       sample ergotropy/distance columns, one CSV per state
* ``crossings``  crossing census of exactly two states (JSON)
* ``region``     grid scan to CSV plus a JSON metadata sidecar
* ``verify``     sampled monotonicity audits (JSON)
* ``spectrum``   generator eigen-decomposition dump (JSON)

Configs are JSON; unknown keys are rejected so typos cannot silently fall
back to defaults. Flag overrides win over file values. All output files
are written atomically (temp file in the target directory, then rename)
with LF newlines and 17-significant-digit floats, so identical runs give
byte-identical artifacts.

Errors leave a single-line JSON record on stderr and a category-specific
exit code (see `errors.EXIT_CODES`).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, replace
from typing import Any, Optional, Sequence, Union

import numpy as np

from .channels import (
    GADC,
    ChannelSpec,
    NonMarkovADC,
    Pauli,
    QutritADC,
    default_horizon,
    hamiltonian,
    jump_operators,
)
from .errors import ConfigError, ErgofluxError
from .liouville import build_liouvillian
from .mpemba import CrossingReport, ergotropy_crossings, trajectory, verify_lemma_monotonicity
from .regions import (
    AxisSpec,
    GridSpec,
    RegionMap,
    scan_crossing_count_nm,
    scan_emc_qubit,
    scan_mpemba_parameter_pure,
    scan_qutrit_simplex,
    scan_state_vs_emc,
)
from .states import BlochVector, DensityMatrix, QutritDiagonal, bloch_to_density

StateSpec = Union[BlochVector, QutritDiagonal]

COMMANDS = ("traj", "crossings", "region", "verify", "spectrum")
SCAN_KINDS = ("emc", "state_vs_emc", "qutrit", "nm_counts", "mpemba_pure")
DEFAULT_N_POINTS = 2001
FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class RunConfig:
    """Fully validated run description."""

    command: str
    channel: ChannelSpec
    states: tuple[StateSpec, ...]
    grid: Optional[GridSpec] = None
    scan: Optional[str] = None
    horizon: Optional[float] = None
    n_points: int = DEFAULT_N_POINTS
    output: str = "out"
    format: str = "csv"
    seed: int = 0
    verify_properties: tuple[str, ...] = ()
    verify_samples: int = 1000


def _schema(path: str, message: str) -> ConfigError:
    return ConfigError("schema", f"{path}: {message}")


def _expect(obj: Any, typ, path: str, what: str):
    if typ is float and isinstance(obj, int) and not isinstance(obj, bool):
        return float(obj)
    if not isinstance(obj, typ) or isinstance(obj, bool) and typ is not bool:
        raise _schema(path, f"expected {what}, got {type(obj).__name__}")
    return obj


def _take(d: dict, path: str, allowed: dict[str, bool]) -> None:
    """Reject keys outside the allowed set; flag missing required ones."""
    unknown = set(d) - set(allowed)
    if unknown:
        key = sorted(unknown)[0]
        raise _schema(f"{path}.{key}" if path else key, "unknown key")
    for key, required in allowed.items():
        if required and key not in d:
            raise _schema(f"{path}.{key}" if path else key, "missing required key")


def _physics(path: str, exc: Exception) -> ConfigError:
    return ConfigError("physics", f"{path}: {exc}")


def _parse_channel(obj: Any, path: str) -> ChannelSpec:
    obj = _expect(obj, dict, path, "an object")
    kind = _expect(obj.get("kind"), str, f"{path}.kind", "a string") if "kind" in obj \
        else None
    if kind is None:
        raise _schema(f"{path}.kind", "missing required key")
    common = {"kind": True, "h_z": False}
    try:
        if kind == "gadc":
            _take(obj, path, {**common, "gamma_minus": True, "n_bose": False,
                              "temperature": False})
            n = obj.get("n_bose", 0.0)
            h_z = float(obj.get("h_z", 1.0))
            if "temperature" in obj:
                if "n_bose" in obj:
                    raise _schema(f"{path}.temperature", "give n_bose or temperature, not both")
                from .channels import n_bose_from_temperature

                n = n_bose_from_temperature(float(obj["temperature"]), h_z)
            return GADC(
                gamma_minus=float(obj["gamma_minus"]), n_bose=float(n), h_z=h_z
            )
        if kind == "pauli":
            _take(obj, path, {**common, "gamma_perp": True, "gamma_z": True})
            return Pauli(
                gamma_perp=float(obj["gamma_perp"]),
                gamma_z=float(obj["gamma_z"]),
                h_z=float(obj.get("h_z", 1.0)),
            )
        if kind == "qutrit_adc":
            _take(obj, path, {**common, "gamma": True})
            return QutritADC(gamma=float(obj["gamma"]), h_z=float(obj.get("h_z", 1.0)))
        if kind == "nonmarkov_adc":
            _take(obj, path, {**common, "gamma": True, "lam": True, "delta": False})
            return NonMarkovADC(
                gamma=float(obj["gamma"]),
                lam=float(obj["lam"]),
                delta=float(obj.get("delta", 0.0)),
                h_z=float(obj.get("h_z", 1.0)),
            )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise _schema(path, f"bad channel value: {exc}") from exc
    except ErgofluxError as exc:
        raise _physics(path, exc) from exc
    raise _schema(f"{path}.kind", f"unknown channel kind {kind!r}")


def _parse_state(obj: Any, path: str) -> StateSpec:
    obj = _expect(obj, dict, path, "an object")
    keys = set(obj)
    if len(keys) != 1 or not keys <= {"bloch", "qutrit", "pure"}:
        raise _schema(path, "state must be exactly one of bloch/qutrit/pure")
    key = next(iter(keys))
    val = _expect(obj[key], list, f"{path}.{key}", "a list of numbers")
    try:
        nums = [float(v) for v in val]
    except (TypeError, ValueError) as exc:
        raise _schema(f"{path}.{key}", f"non-numeric entry: {exc}") from exc
    try:
        if key == "bloch":
            if len(nums) != 3:
                raise _schema(f"{path}.bloch", "expected [m_x, m_y, m_z]")
            return BlochVector(*nums)
        if key == "qutrit":
            if len(nums) != 2:
                raise _schema(f"{path}.qutrit", "expected [p1, p2]")
            return QutritDiagonal(*nums)
        if len(nums) not in (1, 2):
            raise _schema(f"{path}.pure", "expected [theta] or [theta, phi]")
        return BlochVector.from_angles(*nums)
    except ConfigError:
        raise
    except ErgofluxError as exc:
        raise _physics(f"{path}.{key}", exc) from exc


def _parse_axis(obj: Any, path: str) -> AxisSpec:
    obj = _expect(obj, dict, path, "an object")
    _take(obj, path, {"name": True, "start": True, "stop": True, "n": True})
    try:
        return AxisSpec(
            name=_expect(obj["name"], str, f"{path}.name", "a string"),
            start=float(obj["start"]),
            stop=float(obj["stop"]),
            n=int(obj["n"]),
        )
    except ErgofluxError as exc:
        raise _physics(path, exc) from exc
    except (TypeError, ValueError) as exc:
        raise _schema(path, f"bad axis value: {exc}") from exc


def parse_config(source: str) -> RunConfig:
    """Parse and validate a JSON run configuration.

    Raises ConfigError with kind "syntax" (malformed JSON, with line and
    column), "schema" (unknown/missing/mistyped keys, wrong state arity)
    or "physics" (values outside the physical domain).
    """
    try:
        raw = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            "syntax", f"line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    raw = _expect(raw, dict, "<root>", "an object")
    _take(
        raw,
        "",
        {
            "command": True,
            "channel": True,
            "states": False,
            "grid": False,
            "horizon": False,
            "n_points": False,
            "output": False,
            "format": False,
            "seed": False,
            "verify": False,
        },
    )
    command = _expect(raw["command"], str, "command", "a string")
    if command not in COMMANDS:
        raise _schema("command", f"unknown command {command!r}")
    channel = _parse_channel(raw["channel"], "channel")

    states: list[StateSpec] = []
    for k, item in enumerate(_expect(raw.get("states", []), list, "states", "a list")):
        states.append(_parse_state(item, f"states[{k}]"))

    grid = None
    scan = None
    if "grid" in raw:
        gobj = _expect(raw["grid"], dict, "grid", "an object")
        _take(gobj, "grid", {"scan": True, "axis1": True, "axis2": True})
        scan = _expect(gobj["scan"], str, "grid.scan", "a string")
        if scan not in SCAN_KINDS:
            raise _schema("grid.scan", f"unknown scan kind {scan!r}")
        grid = GridSpec(
            axis1=_parse_axis(gobj["axis1"], "grid.axis1"),
            axis2=_parse_axis(gobj["axis2"], "grid.axis2"),
        )

    horizon = None
    if "horizon" in raw:
        horizon = _expect(raw["horizon"], float, "horizon", "a number")
        if not horizon > 0.0:
            raise _physics("horizon", ValueError(f"must be > 0, got {horizon}"))
    n_points = int(_expect(raw.get("n_points", DEFAULT_N_POINTS), float, "n_points", "a number"))
    if n_points < 2:
        raise _schema("n_points", f"must be >= 2, got {n_points}")
    output = _expect(raw.get("output", "out"), str, "output", "a string")
    fmt = _expect(raw.get("format", "csv"), str, "format", "a string")
    if fmt not in ("csv", "json"):
        raise _schema("format", f"format must be csv or json, got {fmt!r}")
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise _schema("seed", "expected an integer")

    verify_props: tuple[str, ...] = ()
    verify_samples = 1000
    if "verify" in raw:
        vobj = _expect(raw["verify"], dict, "verify", "an object")
        _take(vobj, "verify", {"properties": True, "samples": False})
        props = _expect(vobj["properties"], list, "verify.properties", "a list")
        for k, p in enumerate(props):
            if p not in ("L1", "L2", "L3", "L4"):
                raise _schema(f"verify.properties[{k}]", f"unknown property {p!r}")
        verify_props = tuple(props)
        verify_samples = int(
            _expect(vobj.get("samples", 1000), float, "verify.samples", "a number")
        )
        if verify_samples < 1:
            raise _schema("verify.samples", "must be >= 1")

    config = RunConfig(
        command=command,
        channel=channel,
        states=tuple(states),
        grid=grid,
        scan=scan,
        horizon=horizon,
        n_points=n_points,
        output=output,
        format=fmt,
        seed=seed,
        verify_properties=verify_props,
        verify_samples=verify_samples,
    )
    _check_arity(config)
    return config


def _check_arity(config: RunConfig) -> None:
    n = len(config.states)
    cmd = config.command
    if cmd == "traj" and n < 1:
        raise _schema("states", "traj needs at least one state")
    if cmd == "crossings" and n != 2:
        raise _schema("states", f"crossings needs exactly two states, got {n}")
    if cmd == "region":
        if config.grid is None:
            raise _schema("grid", "region needs a grid")
        if config.scan == "mpemba_pure":
            if n != 0:
                raise _schema("states", "the pure-pair scan takes no reference state")
        elif n != 1:
            raise _schema("states", f"region needs exactly one reference state, got {n}")
    if cmd == "verify" and not config.verify_properties:
        raise _schema("verify", "verify needs a verify block with properties")


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".ergoflux-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if math.isnan(f):
        return "nan"
    return FLOAT_FMT % f


def _csv(header: Sequence[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt_value(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _channel_record(c: ChannelSpec) -> dict:
    if isinstance(c, GADC):
        return {"kind": "gadc", "gamma_minus": c.gamma_minus, "n_bose": c.n_bose, "h_z": c.h_z}
    if isinstance(c, Pauli):
        return {"kind": "pauli", "gamma_perp": c.gamma_perp, "gamma_z": c.gamma_z, "h_z": c.h_z}
    if isinstance(c, QutritADC):
        return {"kind": "qutrit_adc", "gamma": c.gamma, "h_z": c.h_z}
    return {"kind": "nonmarkov_adc", "gamma": c.gamma, "lam": c.lam, "delta": c.delta,
            "h_z": c.h_z}


def _state_record(s: StateSpec) -> dict:
    if isinstance(s, BlochVector):
        return {"bloch": [s.m_x, s.m_y, s.m_z]}
    return {"qutrit": [s.p1, s.p2]}


def _report_record(rep: CrossingReport) -> dict:
    return {
        "crossing_times": list(rep.crossing_times),
        "count": rep.count,
        "parity": rep.parity,
        "mpemba_parameter": rep.mpemba_parameter,
        "tangency_flags": list(rep.tangency_flags),
        "tangency_times": list(rep.tangency_times),
    }


def _to_density(state: StateSpec, c: ChannelSpec) -> DensityMatrix:
    if isinstance(state, QutritDiagonal):
        return state.to_density()
    if isinstance(c, QutritADC):
        raise ConfigError("schema", "states: qutrit channel needs qutrit states")
    return bloch_to_density(state)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _traj_paths(output: str, n: int) -> list[str]:
    if n == 1:
        return [output]
    root, ext = os.path.splitext(output)
    return [f"{root}_{k}{ext}" for k in range(n)]


def _run_traj(config: RunConfig) -> list[str]:
    t_max = config.horizon or default_horizon(config.channel)
    paths = _traj_paths(config.output, len(config.states))
    header = ("t", "ergotropy", "ergotropy_incoherent", "ergotropy_coherent",
              "trace_distance")
    for state, path in zip(config.states, paths):
        rho = _to_density(state, config.channel)
        traj = trajectory(rho, config.channel, t_max, config.n_points)
        cols = (traj.times, traj.ergotropy_total, traj.ergotropy_incoherent,
                traj.ergotropy_coherent, traj.trace_distance_to_ss)
        if config.format == "csv":
            _atomic_write(path, _csv(header, zip(*cols)))
        else:
            record = {name: [float(v) for v in col] for name, col in zip(header, cols)}
            _atomic_write(path, _json_text(record))
    return paths


def _run_crossings(config: RunConfig) -> list[str]:
    s1, s2 = config.states
    rep = ergotropy_crossings(s1, s2, config.channel, config.horizon)
    _atomic_write(config.output, _json_text(_report_record(rep)))
    return [config.output]


def _run_region(config: RunConfig) -> list[str]:
    c, grid = config.channel, config.grid
    if config.scan == "emc":
        region = scan_emc_qubit(config.states[0], c, grid)
    elif config.scan == "state_vs_emc":
        region = scan_state_vs_emc(config.states[0], c, grid)
    elif config.scan == "qutrit":
        region = scan_qutrit_simplex(config.states[0], c, grid)
    elif config.scan == "nm_counts":
        region = scan_crossing_count_nm(config.states[0], c, grid)
    else:
        region = scan_mpemba_parameter_pure(c, grid)
    header = (grid.axis1.name, grid.axis2.name, "valid", "crossing_count", "emc",
              "state_mpemba", "mpemba_parameter", "iso_flag")
    rows = (
        (
            r[grid.axis1.name], r[grid.axis2.name], r["valid_state"],
            r["crossing_count"], r["emc"], r["state_mpemba"],
            r["mpemba_parameter"], r["iso_flag"],
        )
        for r in region.flatten_rows()
    )
    _atomic_write(config.output, _csv(header, rows))
    meta = {
        "scan": config.scan,
        "grid": {
            "axis1": {"name": grid.axis1.name, "start": grid.axis1.start,
                      "stop": grid.axis1.stop, "n": grid.axis1.n},
            "axis2": {"name": grid.axis2.name, "start": grid.axis2.start,
                      "stop": grid.axis2.stop, "n": grid.axis2.n},
        },
        "channel": _channel_record(c),
        "reference": _state_record(config.states[0]) if config.states else None,
        "anomalies": list(region.anomalies),
    }
    meta_path = os.path.splitext(config.output)[0] + ".meta.json"
    _atomic_write(meta_path, _json_text(meta))
    return [config.output, meta_path]


def _run_verify(config: RunConfig) -> list[str]:
    results = {}
    for prop in config.verify_properties:
        rep = verify_lemma_monotonicity(
            prop, config.verify_samples, config.channel, seed=config.seed
        )
        results[prop] = {
            "samples": rep.samples,
            "violations": rep.violations,
            "worst": rep.worst,
            "pass": rep.violations == 0,
        }
    _atomic_write(config.output, _json_text({"seed": config.seed, "results": results}))
    return [config.output]


def _complex_list(arr) -> list:
    a = np.asarray(arr)
    return [[float(z.real), float(z.imag)] for z in a.ravel()]


def _run_spectrum(config: RunConfig) -> list[str]:
    c = config.channel
    liou = build_liouvillian(hamiltonian(c), jump_operators(c))
    d = liou.dim
    record = {
        "dim": d,
        "condition_number": liou.condition_number,
        "eigenvalues": _complex_list(liou.eigenvalues),
        "right_eigenmatrices": [
            _complex_list(m) for m in liou.right_eigenmatrices
        ],
        "left_eigenmatrices": [
            _complex_list(m) for m in liou.left_eigenmatrices
        ],
        "steady_state": _complex_list(liou.steady_state.matrix),
    }
    _atomic_write(config.output, _json_text(record))
    return [config.output]


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    if args.gamma is not None:
        c = config.channel
        try:
            if isinstance(c, GADC):
                c = replace(c, gamma_minus=args.gamma)
            elif isinstance(c, (QutritADC, NonMarkovADC)):
                c = replace(c, gamma=args.gamma)
            else:
                raise ConfigError(
                    "schema", "--gamma is ambiguous for the two-rate flip channel"
                )
        except ErgofluxError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("physics", f"--gamma: {exc}") from exc
        config = replace(config, channel=c)
    if args.t_max is not None:
        if not args.t_max > 0.0:
            raise ConfigError("physics", f"--t-max must be > 0, got {args.t_max}")
        config = replace(config, horizon=args.t_max)
    if args.out is not None:
        config = replace(config, output=args.out)
    if args.format is not None:
        config = replace(config, format=args.format)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    return config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergoflux",
        description="Ergotropy decay and crossing analysis for small dissipative batteries",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to a JSON run config")
    parser.add_argument("--gamma", type=float, help="override the channel decay rate")
    parser.add_argument("--t-max", type=float, dest="t_max", help="override the horizon")
    parser.add_argument("--out", help="override the output path")
    parser.add_argument("--format", choices=("csv", "json"), help="override traj format")
    parser.add_argument("--seed", type=int, help="override the verify seed")
    return parser


def _fail(exc: ErgofluxError) -> int:
    record = {"error": exc.category, "message": str(exc)}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return exc.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                source = fh.read()
        except OSError as exc:
            raise ConfigError("schema", f"--config: cannot read {args.config}: {exc}") \
                from exc
        config = parse_config(source)
        if config.command != args.command:
            raise ConfigError(
                "schema",
                f"command: config says {config.command!r}, "
                f"command line says {args.command!r}",
            )
        config = _apply_overrides(config, args)
        runner = {
            "traj": _run_traj,
            "crossings": _run_crossings,
            "region": _run_region,
            "verify": _run_verify,
            "spectrum": _run_spectrum,
        }[config.command]
        paths = runner(config)
    except ErgofluxError as exc:
        return _fail(exc)
    except OSError as exc:
        err = ErgofluxError(str(exc))
        err.category = "io"
        return _fail(err)
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
