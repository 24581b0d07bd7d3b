"""Parameter-plane scans classifying crossing behaviour per grid point.

The engine compares whole curve families at once: state parameters shaped
(npts, 1) broadcast against a shared time row, and sign changes are counted
per row with a dead band so decayed tails cannot alias into crossings.
Counts are computed at two grid resolutions; points where they disagree
fall back to the adaptive detector. A final asymptotic-ordering audit
compares the sign at the horizon with the analytically known tail ordering
and records any mismatch as an anomaly instead of silently clamping.

Scans parallelize over point chunks (capped by ERGOFLUX_THREADS) and
aggregate by index, so output is identical regardless of scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .channels import (
    GADC,
    ChannelSpec,
    NonMarkovADC,
    Pauli,
    QutritADC,
    default_horizon,
    gadc_components,
    gadc_distance_kernel,
    nm_components,
    nm_damping_factor,
    nm_distance_kernel,
    pauli_components,
    pauli_distance_kernel,
    pauli_slow_rate,
    qubit_ergotropy_from_components,
    qutrit_distance_kernel,
    qutrit_ergotropy_kernel,
)
from .errors import DomainError, OrderingError
from .mpemba import (
    SIGN_BAND,
    TAIL_FRACTION,
    _grid,
    ergotropy_crossings,
    state_mpemba_crossings,
)
from .states import BlochVector, QutritDiagonal

SCAN_NT = 4096
CHUNK = 128
ISO_REL_TOL = 1e-3
_trapz = getattr(np, "trapezoid", None) or np.trapz


def max_workers() -> int:
    """Worker cap for scans; ERGOFLUX_THREADS overrides machine parallelism."""
    raw = os.environ.get("ERGOFLUX_THREADS", "")
    try:
        k = int(raw)
    except ValueError:
        k = 0
    if k < 1:
        k = os.cpu_count() or 1
    return max(1, min(k, 64))


@dataclass(frozen=True)
class AxisSpec:
    """One scan axis, sampled inclusively at both ends."""

    name: str
    start: float
    stop: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"axis {self.name!r} needs n >= 2, got {self.n}")
        if not self.start < self.stop:
            raise DomainError(f"axis {self.name!r} needs start < stop")

    @property
    def values(self) -> NDArray[np.float64]:
        return np.linspace(self.start, self.stop, self.n)


@dataclass(frozen=True)
class GridSpec:
    """Two scan axes plus any fixed parameters carried for provenance."""

    axis1: AxisSpec
    axis2: AxisSpec
    fixed: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RegionMap:
    """Per-point classification on the (axis1, axis2) grid.

    Arrays are indexed [i, j] with i over axis1 and j over axis2. Points
    with valid_state False carry no classification: crossing_count -1,
    mpemba_parameter nan, all flags False. ``anomalies`` is the audit
    trail of the scan (tail-ordering mismatches, containment violations,
    unexpected parities); an empty tuple means the scan was clean.
    """

    grid: GridSpec
    valid_state: NDArray[np.bool_]
    crossing_count: NDArray[np.int64]
    emc: NDArray[np.bool_]
    state_mpemba: NDArray[np.bool_]
    mpemba_parameter: NDArray[np.float64]
    iso_flag: NDArray[np.bool_]
    anomalies: tuple[str, ...] = ()

    def __post_init__(self):
        shape = (self.grid.axis1.n, self.grid.axis2.n)
        for name in (
            "valid_state",
            "crossing_count",
            "emc",
            "state_mpemba",
            "mpemba_parameter",
            "iso_flag",
        ):
            arr = np.asarray(getattr(self, name))
            if arr.shape != shape:
                raise DomainError(f"{name} must have shape {shape}, got {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def flatten_rows(self):
        """Yield one record per grid point, row-major, for tabular output."""
        v1 = self.grid.axis1.values
        v2 = self.grid.axis2.values
        for i in range(self.grid.axis1.n):
            for j in range(self.grid.axis2.n):
                yield {
                    self.grid.axis1.name: float(v1[i]),
                    self.grid.axis2.name: float(v2[j]),
                    "valid_state": bool(self.valid_state[i, j]),
                    "crossing_count": int(self.crossing_count[i, j]),
                    "emc": bool(self.emc[i, j]),
                    "state_mpemba": bool(self.state_mpemba[i, j]),
                    "mpemba_parameter": float(self.mpemba_parameter[i, j]),
                    "iso_flag": bool(self.iso_flag[i, j]),
                }


# ---------------------------------------------------------------------------
# vectorized counting core
# ---------------------------------------------------------------------------

def _count_rows(d: NDArray, scale: NDArray) -> tuple[NDArray, NDArray]:
    """Per-row sign-change count and final filled sign of a difference matrix."""
    s = np.sign(d)
    s[np.abs(d) <= SIGN_BAND * scale] = 0.0
    nt = s.shape[1]
    idx = np.where(s != 0.0, np.arange(nt)[None, :], 0)
    np.maximum.accumulate(idx, axis=1, out=idx)
    filled = np.take_along_axis(s, idx, axis=1)
    flips = (filled[:, 1:] * filled[:, :-1] < 0.0).sum(axis=1)
    return flips.astype(np.int64), filled[:, -1]


def _ratio_rows(ts: NDArray, e_pts: NDArray, e_ref: NDArray) -> NDArray:
    """Row-wise overtaking-weight ratio against a shared reference curve.

    Same semantics as the pairwise integral: dead-banded differences, the
    window closed once both curves drop below 1e-6 of the larger start.
    """
    d = e_pts - e_ref[None, :]
    band = SIGN_BAND * (np.abs(e_pts) + np.abs(e_ref)[None, :])
    dm = np.where(np.abs(d) <= band, 0.0, d)
    sign0 = np.sign(dm[:, 0])
    thresh = TAIL_FRACTION * np.maximum(np.abs(e_pts[:, 0]), abs(float(e_ref[0])))
    below = (np.abs(e_pts) < thresh[:, None]) & (np.abs(e_ref)[None, :] < thresh[:, None])
    has = below.any(axis=1)
    end = np.where(has, below.argmax(axis=1), len(ts) - 1)
    keep = np.arange(len(ts))[None, :] <= end[:, None]
    dw = np.where(keep, dm, 0.0)
    den = _trapz(np.abs(dw), ts, axis=1)
    num = _trapz(np.maximum(-dw * sign0[:, None], 0.0), ts, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 0.0)
    return np.clip(ratio, 0.0, 1.0)


def _stable_counts(make_rows, ts_a: NDArray, ts_b: NDArray):
    """Counts at two resolutions; returns (counts, disagree_mask, last_sign)."""
    e_a, r_a = make_rows(ts_a)
    d_a = e_a - r_a[None, :]
    c_a, _ = _count_rows(d_a, np.abs(e_a) + np.abs(r_a)[None, :])
    e_b, r_b = make_rows(ts_b)
    d_b = e_b - r_b[None, :]
    c_b, last = _count_rows(d_b, np.abs(e_b) + np.abs(r_b)[None, :])
    return c_b, c_a != c_b, last, e_b, r_b


def _run_chunks(n_items: int, worker):
    """Apply worker to index slices, in parallel, aggregated by position."""
    bounds = [(lo, min(lo + CHUNK, n_items)) for lo in range(0, n_items, CHUNK)]
    if not bounds:
        return []
    workers = min(max_workers(), len(bounds))
    if workers == 1:
        return [worker(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        futures = [ex.submit(worker, lo, hi) for lo, hi in bounds]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# curve families
# ---------------------------------------------------------------------------

def _qubit_curve_rows(c: ChannelSpec, mx, mz, ts: NDArray, scaled: bool) -> NDArray:
    mxc = np.asarray(mx, dtype=float).reshape(-1, 1)
    mzc = np.asarray(mz, dtype=float).reshape(-1, 1)
    row = ts[None, :]
    if isinstance(c, GADC):
        m_z_t, mp2_t = gadc_components(c, mxc, 0.0, mzc, row)
    elif isinstance(c, Pauli):
        shift = pauli_slow_rate(c) if scaled else 0.0
        m_z_t, mp2_t = pauli_components(c, mxc, 0.0, mzc, row, shift=shift)
    elif isinstance(c, NonMarkovADC):
        factor = nm_damping_factor(c, ts)[None, :]
        m_z_t, mp2_t = nm_components(c, mxc, 0.0, mzc, factor)
    else:
        raise DomainError(f"unsupported channel {c!r}")
    return np.asarray(qubit_ergotropy_from_components(m_z_t, mp2_t, c.h_z))


def _qubit_distance_rows(c: ChannelSpec, mx, mz, ts: NDArray) -> NDArray:
    mp2 = np.asarray(mx, dtype=float).reshape(-1, 1) ** 2
    mzc = np.asarray(mz, dtype=float).reshape(-1, 1)
    row = ts[None, :]
    if isinstance(c, GADC):
        return np.asarray(gadc_distance_kernel(c, mp2, mzc, row, scaled=True))
    if isinstance(c, Pauli):
        return np.asarray(pauli_distance_kernel(c, mp2, mzc, row, scaled=True))
    if isinstance(c, NonMarkovADC):
        factor = nm_damping_factor(c, ts)[None, :]
        return np.asarray(nm_distance_kernel(c, mp2, mzc, factor))
    raise DomainError(f"unsupported channel {c!r}")


def _initial_qubit_ergotropy(mx, mz, h_z: float) -> NDArray:
    mx = np.asarray(mx, dtype=float)
    mz = np.asarray(mz, dtype=float)
    return h_z * (mz + np.sqrt(mx * mx + mz * mz))


# ---------------------------------------------------------------------------
# asymptotic tail ordering
# ---------------------------------------------------------------------------

def _qubit_tail_key(c: ChannelSpec, mx, mz):
    """(rate, prefactor, tiebreak) of the slowest surviving ergotropy term.

    rate = inf marks curves that are exactly zero at the horizon. Smaller
    rate dominates; equal rates compare prefactors, then the tiebreak.
    """
    mx = np.asarray(mx, dtype=float)
    mz = np.asarray(mz, dtype=float)
    mp2 = mx * mx
    inf = np.full_like(mp2, np.inf)
    zero = np.zeros_like(mp2)
    if isinstance(c, GADC):
        rate = np.where(mp2 > 0.0, c.a * c.gamma, np.inf)
        return rate, mp2, mz
    if isinstance(c, NonMarkovADC):
        # the damping factor is state-independent, so all surviving curves
        # share one rate; compare prefactors directly
        rate = np.where(mp2 > 0.0, 1.0, np.inf)
        return rate, mp2, 1.0 + mz
    if isinstance(c, Pauli):
        gp, gz = c.gamma_perp, c.gamma_z
        if gp < gz:
            rate = np.where(
                mz > 0.0,
                4.0 * gp,
                np.where(mp2 > 0.0, np.where(mz < 0.0, 4.0 * gz, 2.0 * (gp + gz)), np.inf),
            )
            pref = np.where(
                mz > 0.0,
                2.0 * mz,
                np.where(
                    mp2 > 0.0,
                    np.where(mz < 0.0, mp2 / (2.0 * np.abs(np.where(mz < 0.0, mz, 1.0))), np.sqrt(mp2)),
                    0.0,
                ),
            )
            return rate, pref, zero
        if gp > gz:
            rate = np.where(mp2 > 0.0, 2.0 * (gp + gz), np.where(mz > 0.0, 4.0 * gp, np.inf))
            pref = np.where(mp2 > 0.0, np.sqrt(mp2), np.where(mz > 0.0, 2.0 * mz, 0.0))
            return rate, pref, zero
        e0 = _initial_qubit_ergotropy(mx, mz, 1.0)
        rate = np.where(e0 > 0.0, 4.0 * gp, np.inf)
        return rate, e0, zero
    return inf, zero, zero


def _tail_anomalies(label, last_sign, keys_pt, key_ref, indices) -> list[str]:
    """Horizon-sign vs analytic tail ordering; returns mismatch records."""
    r, p, t3 = keys_pt
    rr, pr, tr = (float(k) for k in key_ref)
    zero_pt = ~np.isfinite(r)
    zero_ref = not math.isfinite(rr)
    expected = np.zeros_like(last_sign)
    if zero_ref:
        expected = np.where(zero_pt, 0.0, 1.0)
    else:
        rate_gap = rr - r
        pref_gap = p - pr
        t_gap = t3 - tr
        expected = np.where(
            np.abs(rate_gap) > 1e-15,
            np.sign(rate_gap),
            np.where(
                np.abs(pref_gap) > 1e-12,
                np.sign(pref_gap),
                np.where(np.abs(t_gap) > 1e-12, np.sign(t_gap), 0.0),
            ),
        )
        expected = np.where(zero_pt, -1.0, expected)
    bad = (last_sign != 0.0) & (expected != 0.0) & (last_sign != expected)
    return [
        f"{label}: tail ordering mismatch at flat index {int(k)}"
        for k in np.asarray(indices)[bad]
    ]


# ---------------------------------------------------------------------------
# scan engine
# ---------------------------------------------------------------------------

def _require_axes(grid: GridSpec, name1: str, name2: str) -> None:
    if grid.axis1.name != name1 or grid.axis2.name != name2:
        raise DomainError(
            f"scan expects axes ({name1!r}, {name2!r}), "
            f"got ({grid.axis1.name!r}, {grid.axis2.name!r})"
        )


def _empty_maps(shape):
    return {
        "crossing_count": np.full(shape, -1, dtype=np.int64),
        "emc": np.zeros(shape, dtype=bool),
        "state_mpemba": np.zeros(shape, dtype=bool),
        "mpemba_parameter": np.full(shape, np.nan),
        "iso_flag": np.zeros(shape, dtype=bool),
    }


def _qubit_pair_scan(
    ref: BlochVector, c: ChannelSpec, grid: GridSpec, with_state: bool
) -> RegionMap:
    _require_axes(grid, "m_x", "m_z")
    if not isinstance(ref, BlochVector):
        raise DomainError(f"qubit scans need a Bloch-vector reference, got {type(ref).__name__}")
    mx_grid, mz_grid = np.meshgrid(
        grid.axis1.values, grid.axis2.values, indexing="ij"
    )
    mx = mx_grid.ravel()
    mz = mz_grid.ravel()
    valid = mx * mx + mz * mz <= 1.0 + 1e-12
    shape = mx_grid.shape
    maps = _empty_maps(shape)
    flat = {k: v.ravel() for k, v in maps.items()}

    e_ref = float(_initial_qubit_ergotropy(ref.m_x, ref.m_z, c.h_z))
    if e_ref <= 1e-15:
        raise OrderingError("reference state has zero ergotropy; nothing can cross it")
    t_max = default_horizon(c)
    ts_a = _grid(t_max, SCAN_NT)
    ts_b = _grid(t_max, 2 * SCAN_NT)
    scaled = isinstance(c, Pauli)
    idx = np.nonzero(valid)[0]
    anomalies: list[str] = []

    def worker(lo: int, hi: int):
        sub = idx[lo:hi]
        sx, sz = mx[sub], mz[sub]

        def rows(ts):
            e = _qubit_curve_rows(c, sx, sz, ts, scaled)
            r = _qubit_curve_rows(c, ref.m_x, ref.m_z, ts, scaled)[0]
            return e, r

        counts, disagree, last, e_b, r_b = _stable_counts(rows, ts_a, ts_b)
        for k in np.nonzero(disagree)[0]:
            try:
                rep = ergotropy_crossings(
                    BlochVector(float(sx[k]), 0.0, float(sz[k])), ref, c, t_max
                )
                counts[k] = rep.count
            except OrderingError:
                pass
        if scaled:
            e_u = _qubit_curve_rows(c, sx, sz, ts_b, False)
            r_u = _qubit_curve_rows(c, ref.m_x, ref.m_z, ts_b, False)[0]
            ratios = _ratio_rows(ts_b, e_u, r_u)
        else:
            ratios = _ratio_rows(ts_b, e_b, r_b)
        out = {"sub": sub, "counts": counts, "ratios": ratios, "last": last}
        if with_state:
            d_pts = _qubit_distance_rows(c, sx, sz, ts_b)
            d_ref = _qubit_distance_rows(c, ref.m_x, ref.m_z, ts_b)[0]
            s_counts, _ = _count_rows(
                d_pts - d_ref[None, :], np.abs(d_pts) + np.abs(d_ref)[None, :]
            )
            out["state_counts"] = s_counts
        return out

    results = _run_chunks(len(idx), worker)
    key_ref = tuple(
        np.asarray(k).reshape(()) for k in _qubit_tail_key(c, ref.m_x, ref.m_z)
    )
    for res in results:
        sub = res["sub"]
        flat["crossing_count"][sub] = res["counts"]
        flat["emc"][sub] = res["counts"] >= 1
        flat["mpemba_parameter"][sub] = res["ratios"]
        if with_state:
            flat["state_mpemba"][sub] = res["state_counts"] >= 1
        keys = _qubit_tail_key(c, mx[sub], mz[sub])
        anomalies.extend(_tail_anomalies("tail", res["last"], keys, key_ref, sub))

    e0 = _initial_qubit_ergotropy(mx[valid], mz[valid], c.h_z)
    flat["iso_flag"][valid] = np.abs(e0 - e_ref) < e_ref * ISO_REL_TOL

    if isinstance(c, GADC):
        inside = valid & (np.abs(mx) <= abs(ref.m_x)) & (
            _initial_qubit_ergotropy(mx, mz, c.h_z) <= e_ref * (1.0 + 1e-12)
        )
        bad = inside & flat["emc"]
        anomalies.extend(
            f"containment: crossing found inside the no-crossing set at flat index {int(k)}"
            for k in np.nonzero(bad)[0]
        )
        if with_state:
            implied = flat["emc"][valid] & ~flat["state_mpemba"][valid]
            anomalies.extend(
                f"implication: ergotropic crossing without distance crossing at flat index {int(k)}"
                for k in np.nonzero(valid)[0][implied]
            )

    return RegionMap(
        grid=grid,
        valid_state=valid.reshape(shape),
        anomalies=tuple(anomalies),
        **{k: v.reshape(shape) for k, v in flat.items()},
    )


def scan_emc_qubit(ref: BlochVector, c: ChannelSpec, grid: GridSpec) -> RegionMap:
    """Crossing classification of the (m_x, m_z) plane against a reference.

    Each valid in-ball point is compared with the reference state under the
    shared channel. For the damping channel the scan audits that no point
    with both less coherence and less ergotropy than the reference reports
    a crossing (containment of the analytic no-crossing set).
    """
    return _qubit_pair_scan(ref, c, grid, with_state=False)


def scan_state_vs_emc(ref, c: ChannelSpec, grid: GridSpec) -> RegionMap:
    """Joint ergotropy-crossing / distance-crossing classification.

    Accepts the qubit plane scans of `scan_emc_qubit` plus the diagonal
    qutrit variant (simplex grid). For the damping channel the pointwise
    implication "ergotropic crossing requires a distance crossing" is
    audited and violations land in anomalies.
    """
    if isinstance(c, QutritADC):
        return _qutrit_scan(ref, c, grid, with_state=True)
    return _qubit_pair_scan(ref, c, grid, with_state=True)


def _qutrit_scan(
    ref: QutritDiagonal, c: QutritADC, grid: GridSpec, with_state: bool
) -> RegionMap:
    _require_axes(grid, "p1", "p2")
    if not isinstance(ref, QutritDiagonal):
        raise DomainError(f"simplex scans need a diagonal reference, got {type(ref).__name__}")
    p1_grid, p2_grid = np.meshgrid(grid.axis1.values, grid.axis2.values, indexing="ij")
    p1 = p1_grid.ravel()
    p2 = p2_grid.ravel()
    valid = (p1 >= -1e-12) & (p2 >= -1e-12) & (p1 + p2 <= 1.0 + 1e-12)
    shape = p1_grid.shape
    maps = _empty_maps(shape)
    flat = {k: v.ravel() for k, v in maps.items()}

    e_ref = float(qutrit_ergotropy_kernel(c, ref.p1, ref.p2, 0.0))
    if e_ref <= 1e-15:
        raise OrderingError("reference state has zero ergotropy; nothing can cross it")
    t_max = default_horizon(c)
    ts_a = _grid(t_max, SCAN_NT)
    ts_b = _grid(t_max, 2 * SCAN_NT)
    idx = np.nonzero(valid)[0]
    anomalies: list[str] = []

    def worker(lo: int, hi: int):
        sub = idx[lo:hi]
        s1 = p1[sub].reshape(-1, 1)
        s2 = p2[sub].reshape(-1, 1)

        def rows(ts):
            e = np.asarray(qutrit_ergotropy_kernel(c, s1, s2, ts[None, :]))
            r = np.asarray(qutrit_ergotropy_kernel(c, ref.p1, ref.p2, ts))
            return e, r

        counts, disagree, last, e_b, r_b = _stable_counts(rows, ts_a, ts_b)
        for k in np.nonzero(disagree)[0]:
            try:
                rep = ergotropy_crossings(
                    QutritDiagonal(float(s1[k, 0]), float(s2[k, 0])), ref, c, t_max
                )
                counts[k] = rep.count
            except OrderingError:
                pass
        ratios = _ratio_rows(ts_b, e_b, r_b)
        tail_bad = np.nonzero((e_b[:, -1] != 0.0) | (r_b[-1] != 0.0))[0]
        out = {
            "sub": sub,
            "counts": counts,
            "ratios": ratios,
            "tail_bad": sub[tail_bad],
        }
        if with_state:
            # diagonal distance curves are proportional to one shared
            # exponential, so the initial gap fixes the ordering for all times
            out["state_counts"] = np.zeros(len(sub), dtype=np.int64)
        return out

    results = _run_chunks(len(idx), worker)
    for res in results:
        sub = res["sub"]
        flat["crossing_count"][sub] = res["counts"]
        flat["emc"][sub] = res["counts"] >= 1
        flat["mpemba_parameter"][sub] = res["ratios"]
        if with_state:
            flat["state_mpemba"][sub] = res["state_counts"] >= 1
        anomalies.extend(
            f"tail: curve not exactly zero at the horizon at flat index {int(k)}"
            for k in res["tail_bad"]
        )

    e0 = np.asarray(qutrit_ergotropy_kernel(c, p1[valid], p2[valid], 0.0))
    flat["iso_flag"][valid] = np.abs(e0 - e_ref) < e_ref * ISO_REL_TOL

    return RegionMap(
        grid=grid,
        valid_state=valid.reshape(shape),
        anomalies=tuple(anomalies),
        **{k: v.reshape(shape) for k, v in flat.items()},
    )


def scan_qutrit_simplex(ref: QutritDiagonal, c: QutritADC, grid: GridSpec) -> RegionMap:
    """Crossing classification over the diagonal-state simplex (p1, p2).

    The audit checks that every sampled curve has reached exactly zero at
    the horizon (diagonal three-level curves empty in finite time), so no
    ordering can change beyond it.
    """
    return _qutrit_scan(ref, c, grid, with_state=False)


def scan_crossing_count_nm(
    ref: BlochVector, c: NonMarkovADC, grid: GridSpec
) -> RegionMap:
    """Transient crossing-count map under the structured-bath channel.

    Counts are expected odd or zero once tangencies are filtered; points
    still reporting a nonzero even count after adaptive re-detection are
    recorded as anomalies, never clamped.
    """
    out = _qubit_pair_scan(ref, c, grid, with_state=False)
    counts = np.array(out.crossing_count)
    even = (counts > 0) & (counts % 2 == 0) & out.valid_state
    anomalies = list(out.anomalies)
    if even.any():
        v1, v2 = grid.axis1.values, grid.axis2.values
        t_max = default_horizon(c)
        for i, j in zip(*np.nonzero(even)):
            try:
                rep = ergotropy_crossings(
                    BlochVector(float(v1[i]), 0.0, float(v2[j])), ref, c, t_max
                )
                counts[i, j] = rep.count
            except OrderingError:
                continue
            if rep.count > 0 and rep.count % 2 == 0:
                anomalies.append(
                    f"parity: even transient count {rep.count} at point ({i}, {j})"
                )
    return RegionMap(
        grid=out.grid,
        valid_state=out.valid_state,
        crossing_count=counts,
        emc=(counts >= 1) & out.valid_state,
        state_mpemba=out.state_mpemba,
        mpemba_parameter=out.mpemba_parameter,
        iso_flag=out.iso_flag,
        anomalies=tuple(anomalies),
    )


def scan_mpemba_parameter_pure(c: GADC, grid: GridSpec) -> RegionMap:
    """Overtaking-weight map for pure-state pairs at polar angles (θ1, θ2).

    Points with θ1 + θ2 >= π must come out with ratio exactly zero and no
    crossing; a nonzero value there is recorded as an anomaly. The θ1 = θ2
    diagonal is degenerate (identical curves) and reports zero with the
    iso flag set.
    """
    _require_axes(grid, "theta1", "theta2")
    for ax in (grid.axis1, grid.axis2):
        if ax.start < -1e-12 or ax.stop > math.pi + 1e-12:
            raise DomainError(f"axis {ax.name!r} must lie inside [0, pi]")
    th1 = grid.axis1.values
    th2 = grid.axis2.values

    def trig(angles):
        # sin(pi) and cos(pi/2) are ~1e-16 in floating point; a phantom
        # transverse component outlives exactly-zero curves and fakes a flip
        s, co = np.sin(angles), np.cos(angles)
        tiny = 4.0 * np.finfo(float).eps
        s[np.abs(s) < tiny] = 0.0
        co[np.abs(co) < tiny] = 0.0
        return s, co

    sin1, cos1 = trig(th1)
    sin2, cos2 = trig(th2)
    n1, n2 = len(th1), len(th2)
    shape = (n1, n2)
    maps = _empty_maps(shape)
    t_max = default_horizon(c)
    ts = _grid(t_max, 2 * SCAN_NT)
    rows1 = _qubit_curve_rows(c, sin1, cos1, ts, False)
    rows2 = _qubit_curve_rows(c, sin2, cos2, ts, False)
    anomalies: list[str] = []

    def worker(lo: int, hi: int):
        blocks = []
        for i in range(lo, hi):
            e1 = rows1[i][None, :]
            d = e1 - rows2
            counts, last = _count_rows(d, np.abs(e1) + np.abs(rows2))
            # ratio semantics: rows are "points", the θ1 curve is the reference
            ratios = _ratio_rows(ts, rows2, rows1[i])
            blocks.append((i, counts, ratios, last))
        return blocks

    results = _run_chunks(n1, worker)
    key1 = _qubit_tail_key(c, sin1, cos1)
    key2 = _qubit_tail_key(c, sin2, cos2)
    for blocks in results:
        for i, counts, ratios, last in blocks:
            maps["crossing_count"][i, :] = counts
            maps["emc"][i, :] = counts >= 1
            maps["mpemba_parameter"][i, :] = ratios
            ref_key = tuple(np.asarray(k[i]).reshape(()) for k in key1)
            # last sign is of (θ1 row − θ2 rows); tail audit expects point − ref,
            # with the θ2 rows acting as points
            anomalies.extend(
                _tail_anomalies(
                    f"tail(th1 index {i})",
                    -last,
                    key2,
                    ref_key,
                    np.arange(n2) + i * n2,
                )
            )

    t1g, t2g = np.meshgrid(th1, th2, indexing="ij")
    no_cross = t1g + t2g >= math.pi - 1e-12
    bad = no_cross & (maps["crossing_count"] > 0)
    anomalies.extend(
        f"whiteout: crossing reported in the permanently ordered wedge at ({i}, {j})"
        for i, j in zip(*np.nonzero(bad))
    )
    bad_ratio = no_cross & (maps["mpemba_parameter"] > 0.0)
    anomalies.extend(
        f"whiteout: nonzero weight ratio in the ordered wedge at ({i}, {j})"
        for i, j in zip(*np.nonzero(bad_ratio))
    )
    e1_0 = _initial_qubit_ergotropy(sin1[:, None], cos1[:, None], c.h_z)
    e2_0 = _initial_qubit_ergotropy(sin2[None, :], cos2[None, :], c.h_z)
    scale = np.maximum(np.maximum(e1_0, e2_0), 1e-300)
    maps["iso_flag"] = np.abs(e1_0 - e2_0) < scale * ISO_REL_TOL

    return RegionMap(
        grid=grid,
        valid_state=np.ones(shape, dtype=bool),
        anomalies=tuple(anomalies),
        **maps,
    )
