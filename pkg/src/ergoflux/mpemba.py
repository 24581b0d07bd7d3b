"""Trajectory sampling, crossing detection, and ordering predictors.

A crossing of two decay curves is a strict sign change of their difference.
Detection works on a hybrid uniform/log time grid (early kinks in qutrit
curves sit three to four decades below the horizon), with the grid doubled
until the count is stable, and each bracket refined by bisection. Bisection
is used instead of derivative steps because ergotropy curves have kinks
where the passive ordering of the spectrum changes.

Sign evaluation is banded: differences below 1e-14 of the local curve scale
count as zero, so ties in decayed tails never register as crossings. Touches
without a sign change are reported as tangencies, never counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

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
    gadc_incoherent_kernel,
    nm_components,
    nm_damping_factor,
    nm_distance_kernel,
    nm_incoherent_kernel,
    pauli_components,
    pauli_distance_kernel,
    pauli_incoherent_kernel,
    pauli_slow_rate,
    qubit_ergotropy_from_components,
    qutrit_distance_kernel,
    qutrit_ergotropy_kernel,
    qutrit_populations,
    steady_state,
)
from .errors import DimensionError, DomainError, OrderingError
from .states import (
    BlochVector,
    DensityMatrix,
    QutritDiagonal,
    density_to_bloch,
    trace_distance,
)
from .ergotropy import iso_ergotropic_mx

SIGN_BAND = 1e-14          # relative dead band for sign decisions
INITIAL_ORDER_ATOL = 1e-12
TANGENCY_ATOL = 1e-12      # |f-g| at a flagged touch
TANGENCY_RISE = 2e-12      # both flanks must clear this, rules out dead tails
TAIL_FRACTION = 1e-6       # integration stops once both curves fall below this
INITIAL_GRID = 2048
MAX_GRID = 2 ** 20
REFINE_MAX_ITER = 200

_trapz = getattr(np, "trapezoid", None) or np.trapz

StateLike = Union[BlochVector, DensityMatrix, QutritDiagonal]
Curve = Callable[[NDArray[np.float64]], NDArray[np.float64]]


def _freeze(a) -> NDArray[np.float64]:
    out = np.ascontiguousarray(np.asarray(a, dtype=float))
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Trajectory:
    """Sampled observables of one state under one channel.

    All columns share the strictly increasing ``times`` grid. Ergotropy
    columns may carry eigensolver noise down to -1e-12 but no further.
    """

    times: NDArray[np.float64]
    ergotropy_total: NDArray[np.float64]
    ergotropy_incoherent: NDArray[np.float64]
    ergotropy_coherent: NDArray[np.float64]
    trace_distance_to_ss: NDArray[np.float64]
    channel: ChannelSpec

    def __post_init__(self):
        cols = (
            self.times,
            self.ergotropy_total,
            self.ergotropy_incoherent,
            self.ergotropy_coherent,
            self.trace_distance_to_ss,
        )
        for name, col in zip(self.__dataclass_fields__, cols):
            object.__setattr__(self, name, _freeze(col))
        n = len(self.times)
        if any(len(c) != n for c in cols[1:]):
            raise DomainError("trajectory columns must have equal length")
        if n < 2 or np.any(np.diff(self.times) <= 0.0):
            raise DomainError("times must be strictly increasing with at least 2 points")
        low = min(
            self.ergotropy_total.min(),
            self.ergotropy_incoherent.min(),
            self.ergotropy_coherent.min(),
        )
        if low < -1e-12:
            raise DomainError(f"negative ergotropy {low} exceeds the noise allowance")


@dataclass(frozen=True)
class CrossingReport:
    """Crossing census of one curve pair.

    ``crossing_times`` lists strict sign changes, ascending. ``tangency_times``
    lists touches without a sign change; they do not enter ``count``.
    ``tangency_flags`` runs over all events (crossings and tangencies merged
    chronologically) and is True at the tangencies, so parity claims can be
    audited against near-miss events.
    """

    crossing_times: tuple[float, ...]
    count: int
    parity: str
    mpemba_parameter: float
    tangency_flags: tuple[bool, ...]
    tangency_times: tuple[float, ...] = ()

    def __post_init__(self):
        if self.count != len(self.crossing_times):
            raise DomainError("count must equal the number of crossing times")
        if list(self.crossing_times) != sorted(self.crossing_times):
            raise DomainError("crossing times must be ascending")
        expected = "zero" if self.count == 0 else ("odd" if self.count % 2 else "even")
        if self.parity != expected:
            raise DomainError(f"parity {self.parity!r} does not match count {self.count}")
        if not 0.0 <= self.mpemba_parameter <= 1.0:
            raise DomainError(f"mpemba_parameter {self.mpemba_parameter} outside [0, 1]")
        if len(self.tangency_flags) != self.count + len(self.tangency_times):
            raise DomainError("tangency_flags must cover all events")
        if sum(self.tangency_flags) != len(self.tangency_times):
            raise DomainError("tangency_flags must mark exactly the tangencies")


def _parity(count: int) -> str:
    return "zero" if count == 0 else ("odd" if count % 2 else "even")


def _make_report(
    crossing_times: list[float],
    tangency_times: list[float],
    mpemba: float,
) -> CrossingReport:
    events = sorted(
        [(t, False) for t in crossing_times] + [(t, True) for t in tangency_times]
    )
    return CrossingReport(
        crossing_times=tuple(sorted(crossing_times)),
        count=len(crossing_times),
        parity=_parity(len(crossing_times)),
        mpemba_parameter=mpemba,
        tangency_flags=tuple(flag for _, flag in events),
        tangency_times=tuple(sorted(tangency_times)),
    )


# ---------------------------------------------------------------------------
# trajectory sampling
# ---------------------------------------------------------------------------

def _qutrit_coherence_rates(c: QutritADC) -> tuple[complex, complex, complex]:
    """Complex decay exponents of the (0,1), (0,2), (1,2) matrix elements."""
    h, g = c.h_z, c.gamma
    return (
        complex(-1.5 * g, -h),
        complex(-g, -2.0 * h),
        complex(-0.5 * g, -h),
    )


def _qutrit_evolved(rho: DensityMatrix, c: QutritADC, ts: NDArray) -> NDArray:
    """Batched states (nt, 3, 3) under three-level amplitude damping.

    Populations follow the cascade flow; each coherence decays independently
    at half the sum of its levels' outflow rates while rotating at the level
    gap.
    """
    m = rho.matrix
    q1, q2, q3 = qutrit_populations(c, m[0, 0].real, m[1, 1].real, ts)
    r01, r02, r12 = _qutrit_coherence_rates(c)
    out = np.zeros((len(ts), 3, 3), dtype=complex)
    out[:, 0, 0] = q1
    out[:, 1, 1] = q2
    out[:, 2, 2] = q3
    out[:, 0, 1] = m[0, 1] * np.exp(r01 * ts)
    out[:, 0, 2] = m[0, 2] * np.exp(r02 * ts)
    out[:, 1, 2] = m[1, 2] * np.exp(r12 * ts)
    out[:, 1, 0] = out[:, 0, 1].conj()
    out[:, 2, 0] = out[:, 0, 2].conj()
    out[:, 2, 1] = out[:, 1, 2].conj()
    return out


def _qutrit_general_columns(rho: DensityMatrix, c: QutritADC, ts: NDArray):
    """(total, incoherent, distance) columns for a coherent qutrit state."""
    mats = _qutrit_evolved(rho, c, ts)
    q1 = mats[:, 0, 0].real
    q3 = mats[:, 2, 2].real
    vals = np.linalg.eigvalsh(mats)  # ascending
    total = c.h_z * ((q1 - q3) + (vals[:, 2] - vals[:, 0]))
    inc = qutrit_ergotropy_kernel(c, rho.matrix[0, 0].real, rho.matrix[1, 1].real, ts)
    diff = mats - steady_state(c).matrix
    dist = 0.5 * np.abs(np.linalg.eigvalsh(diff)).sum(axis=-1)
    return total, np.asarray(inc, dtype=float), dist


def _qutrit_is_diagonal(rho: DensityMatrix) -> bool:
    m = rho.matrix
    return abs(m[0, 1]) + abs(m[0, 2]) + abs(m[1, 2]) < 1e-14


def trajectory(
    rho0: DensityMatrix, c: ChannelSpec, t_max: float, n_points: int
) -> Trajectory:
    """Sample ergotropy and distance-to-steady-state on a uniform grid."""
    if n_points < 2:
        raise DomainError(f"n_points must be >= 2, got {n_points}")
    if t_max <= 0.0:
        raise DomainError(f"t_max must be > 0, got {t_max}")
    ts = np.linspace(0.0, t_max, n_points)

    if isinstance(c, QutritADC):
        if rho0.dim != 3:
            raise DimensionError(f"qutrit channel needs a 3-level state, got dim {rho0.dim}")
        if _qutrit_is_diagonal(rho0):
            p1, p2 = rho0.matrix[0, 0].real, rho0.matrix[1, 1].real
            total = np.asarray(qutrit_ergotropy_kernel(c, p1, p2, ts), dtype=float)
            inc = total
            dist = np.asarray(qutrit_distance_kernel(c, p1, p2, ts), dtype=float)
        else:
            total, inc, dist = _qutrit_general_columns(rho0, c, ts)
        coh = np.maximum(total - inc, 0.0)
        return Trajectory(ts, total, inc, coh, dist, c)

    if rho0.dim != 2:
        raise DimensionError(f"qubit channel needs a 2-level state, got dim {rho0.dim}")
    b = density_to_bloch(rho0)
    mp2 = b.m_x ** 2 + b.m_y ** 2
    if isinstance(c, GADC):
        m_z_t, mp2_t = gadc_components(c, b.m_x, b.m_y, b.m_z, ts)
        inc = gadc_incoherent_kernel(c, b.m_z, ts)
        dist = gadc_distance_kernel(c, mp2, b.m_z, ts)
    elif isinstance(c, Pauli):
        m_z_t, mp2_t = pauli_components(c, b.m_x, b.m_y, b.m_z, ts)
        inc = pauli_incoherent_kernel(c, b.m_z, ts)
        dist = pauli_distance_kernel(c, mp2, b.m_z, ts)
    elif isinstance(c, NonMarkovADC):
        factor = nm_damping_factor(c, ts)
        m_z_t, mp2_t = nm_components(c, b.m_x, b.m_y, b.m_z, factor)
        inc = nm_incoherent_kernel(c, b.m_z, factor)
        dist = nm_distance_kernel(c, mp2, b.m_z, factor)
    else:
        raise DomainError(f"unsupported channel {c!r}")
    total = qubit_ergotropy_from_components(m_z_t, mp2_t, c.h_z)
    coh = np.maximum(total - np.asarray(inc, dtype=float), 0.0)
    return Trajectory(ts, total, np.asarray(inc, dtype=float), coh, dist, c)


# ---------------------------------------------------------------------------
# crossing detection
# ---------------------------------------------------------------------------

def _grid(t_max: float, n: int) -> NDArray[np.float64]:
    """Hybrid grid: uniform coverage plus log spacing for early features."""
    n_lin = n // 2
    lin = np.linspace(0.0, t_max, n_lin)
    log = np.geomspace(t_max * 1e-7, t_max, n - n_lin)
    return np.unique(np.concatenate(([0.0], lin, log)))


def _eval(func: Curve, ts: NDArray) -> NDArray[np.float64]:
    try:
        out = np.asarray(func(ts), dtype=float)
        if out.shape == ts.shape:
            return out
    except Exception:
        pass
    return np.array([float(func(t)) for t in ts], dtype=float)


def _scalar(func: Curve, t: float) -> float:
    return float(np.asarray(func(t), dtype=float).item())


def _signs(d: NDArray, scale: NDArray) -> NDArray[np.float64]:
    s = np.sign(d)
    s[np.abs(d) <= SIGN_BAND * scale] = 0.0
    return s


def _flip_brackets(s: NDArray) -> list[tuple[int, int]]:
    """Index pairs of consecutive nonzero signs with opposite orientation."""
    nz = np.nonzero(s)[0]
    if len(nz) < 2:
        return []
    sn = s[nz]
    flips = np.nonzero(sn[1:] * sn[:-1] < 0.0)[0]
    return [(int(nz[k]), int(nz[k + 1])) for k in flips]


def _banded_sign(f: Curve, g: Curve, t: float) -> float:
    fv, gv = _scalar(f, t), _scalar(g, t)
    d = fv - gv
    if abs(d) <= SIGN_BAND * (abs(fv) + abs(gv)):
        return 0.0
    return math.copysign(1.0, d)


def _bisect(f: Curve, g: Curve, lo: float, hi: float, s_lo: float, tol: float) -> float:
    for _ in range(REFINE_MAX_ITER):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        sm = _banded_sign(f, g, mid)
        if sm == -s_lo:
            hi = mid
        else:
            # zero (inside the dead band) keeps the bracket valid either way
            lo = mid
    return 0.5 * (lo + hi)


def _tangency_times(
    ts: NDArray, d: NDArray, s: NDArray, brackets: list[tuple[int, int]]
) -> list[float]:
    """Touch points: |f-g| dips below 1e-12 and recovers with unchanged sign."""
    ad = np.abs(d)
    cand = np.nonzero(ad < TANGENCY_ATOL)[0]
    if len(cand) == 0:
        return []
    skip: set[int] = set()
    for i, j in brackets:
        skip.update(range(i, j + 1))
    out: list[float] = []
    runs = np.split(cand, np.nonzero(np.diff(cand) > 1)[0] + 1)
    for run in runs:
        lo_i, hi_i = int(run[0]), int(run[-1])
        if lo_i in skip or hi_i in skip:
            continue
        left, right = lo_i - 1, hi_i + 1
        if left < 0 or right >= len(ts):
            continue
        if s[left] == 0.0 or s[left] != s[right]:
            continue
        if ad[left] <= TANGENCY_RISE or ad[right] <= TANGENCY_RISE:
            continue
        out.append(float(ts[run[np.argmin(ad[run])]]))
    return out


def _integral_parts(
    ts: NDArray, hi: NDArray, lo: NDArray, cap: float | None = None
) -> tuple[float, float]:
    """(numerator, denominator) of the crossing-weight ratio.

    ``hi`` is the initially higher curve. The numerator integrates the excess
    of the other curve where it wins; both integrals stop once the curves
    fall below 1e-6 of the larger initial value (and at ``cap`` if given),
    after which the ratio no longer moves. Differences inside the sign dead
    band are zeroed so a crossing-free pair integrates to exactly zero.
    """
    d = hi - lo
    dm = np.where(np.abs(d) <= SIGN_BAND * (np.abs(hi) + np.abs(lo)), 0.0, d)
    thresh = TAIL_FRACTION * max(abs(float(hi[0])), abs(float(lo[0])))
    below = (np.abs(hi) < thresh) & (np.abs(lo) < thresh)
    end = int(np.argmax(below)) + 1 if bool(below.any()) else len(ts)
    if cap is not None:
        end = min(end, int(np.searchsorted(ts, cap, side="right")))
    end = max(end, 2)
    seg_t, seg_d = ts[:end], dm[:end]
    den = float(_trapz(np.abs(seg_d), seg_t))
    num = float(_trapz(np.maximum(-seg_d, 0.0), seg_t))
    return num, den


def _ratio(num: float, den: float) -> float:
    if den <= 0.0:
        return 0.0
    return float(min(max(num / den, 0.0), 1.0))


def detect_crossings(
    f: Curve, g: Curve, t_max: float, refine_tol: float = 1e-9
) -> CrossingReport:
    """Census of strict sign changes of f - g on (0, t_max].

    Samples both curves on a hybrid grid of 2048 points, doubling (up to
    2^20) until the crossing count holds across two refinements, then
    bisects each bracket down to ``refine_tol``. Requires a strict initial
    ordering; a tie at t = 0 has no before/after semantics.
    """
    if t_max <= 0.0:
        raise DomainError(f"t_max must be > 0, got {t_max}")
    if refine_tol <= 0.0:
        raise DomainError(f"refine_tol must be > 0, got {refine_tol}")
    f0, g0 = _scalar(f, 0.0), _scalar(g, 0.0)
    if abs(f0 - g0) <= INITIAL_ORDER_ATOL:
        raise OrderingError(
            f"curves start within {INITIAL_ORDER_ATOL} of each other; ordering is ambiguous"
        )

    n = INITIAL_GRID
    history: list[int] = []
    while True:
        ts = _grid(t_max, n)
        fv, gv = _eval(f, ts), _eval(g, ts)
        d = fv - gv
        s = _signs(d, np.abs(fv) + np.abs(gv))
        brackets = _flip_brackets(s)
        history.append(len(brackets))
        if len(history) >= 3 and history[-1] == history[-2] == history[-3]:
            break
        if n >= MAX_GRID:
            break
        n *= 2

    times = [
        _bisect(f, g, float(ts[i]), float(ts[j]), s[i], refine_tol)
        for i, j in brackets
    ]
    tangencies = _tangency_times(ts, d, s, brackets)
    if f0 > g0:
        num, den = _integral_parts(ts, fv, gv)
    else:
        num, den = _integral_parts(ts, gv, fv)
    return _make_report(times, tangencies, _ratio(num, den))


# ---------------------------------------------------------------------------
# closed-form crossing time and integral ratio
# ---------------------------------------------------------------------------

def crossing_time_pure_gadc(theta1: float, theta2: float, c: GADC) -> float:
    """Crossing time of two pure-state ergotropy curves under damping.

    Returns inf when cos(theta1) + cos(theta2) <= 0 (the curves order
    permanently and never meet) and nan for theta1 = theta2 (identical
    trajectories have no crossing time). Angles are polar angles in
    [0, pi]; theta = 0 is the fully charged state.
    """
    for th in (theta1, theta2):
        if not 0.0 <= th <= math.pi:
            raise DomainError(f"polar angle must lie in [0, pi], got {th}")
    if abs(theta1 - theta2) <= 1e-15:
        return math.nan
    c1, c2 = math.cos(theta1), math.cos(theta2)
    s = c1 + c2
    if s <= 0.0:
        return math.inf
    if c.gamma == 0.0:
        return math.inf
    a = c.a
    arg = 4.0 * (a * (1.0 + c1 * c2) + s) / (s * (4.0 + a * s))
    return math.log(arg) / (a * c.gamma)


def mpemba_parameter(traj1: Trajectory, traj2: Trajectory) -> float:
    """Fraction of the total ergotropy-gap weight carried after overtaking.

    traj1 must start strictly higher. Zero exactly when the curves never
    cross; close to one when the initially weaker state dominates almost
    all of the compared window.
    """
    if traj1.channel != traj2.channel:
        raise DomainError("trajectories come from different channels")
    if traj1.times.shape != traj2.times.shape or not np.array_equal(
        traj1.times, traj2.times
    ):
        raise DomainError("trajectories must share one time grid")
    e1, e2 = traj1.ergotropy_total, traj2.ergotropy_total
    if abs(e1[0] - e2[0]) <= INITIAL_ORDER_ATOL:
        raise OrderingError("initial ergotropies are equal; ordering is ambiguous")
    if e1[0] < e2[0]:
        raise OrderingError("traj1 must start with the higher ergotropy")
    try:
        cap = 2.0 * default_horizon(traj1.channel)
    except DomainError:
        cap = None
    num, den = _integral_parts(traj1.times, e1, e2, cap=cap)
    if den <= 0.0:
        raise OrderingError("curves are identical; the weight ratio is undefined")
    return _ratio(num, den)


# ---------------------------------------------------------------------------
# predictors
# ---------------------------------------------------------------------------

def _bloch_ergotropy_scale_free(b: BlochVector) -> float:
    return b.m_z + b.norm()


def predict_emc_gadc(b1: BlochVector, b2: BlochVector) -> str:
    """Crossing verdict for an ordered qubit pair under damping.

    b1 carries the (weakly) higher initial ergotropy. The transverse
    magnitude decides: a leader with at least as much coherence is never
    overtaken; strictly less coherence with a strict ergotropy lead forces
    a crossing. Equal ergotropies with strictly less coherence have no
    strict initial ordering and fall outside the dichotomy.
    """
    c1, c2 = b1.transverse(), b2.transverse()
    e1 = _bloch_ergotropy_scale_free(b1)
    e2 = _bloch_ergotropy_scale_free(b2)
    if e1 < e2 - 1e-12:
        raise OrderingError("b1 must carry the higher initial ergotropy")
    if c1 >= c2:
        return "no_crossing"
    if abs(e1 - e2) <= 1e-12:
        return "not_covered"
    return "crossing"


def predict_emc_pauli(b1: BlochVector, b2: BlochVector, c: Pauli) -> str:
    """Crossing verdict for an ordered pair in the upper xz plane.

    With dominant longitudinal noise the lower-energy leadup is overtaken;
    with dominant transverse noise the lower-coherence one is. Equal rates
    rescale both curves identically and never reorder them. Boundary ties
    in the deciding quantity are reported as not covered.
    """
    for b in (b1, b2):
        if abs(b.m_y) > 1e-12:
            raise OrderingError("predictor requires m_y = 0")
        if b.m_z <= 0.0:
            raise OrderingError("predictor requires m_z > 0")
    e1 = _bloch_ergotropy_scale_free(b1)
    e2 = _bloch_ergotropy_scale_free(b2)
    if not e1 > e2 + 1e-12:
        raise OrderingError("b1 must carry strictly higher initial ergotropy")
    if c.gamma_perp == c.gamma_z:
        return "no_crossing"
    if c.gamma_perp < c.gamma_z:
        k1, k2 = b1.m_z, b2.m_z
    else:
        k1, k2 = abs(b1.m_x), abs(b2.m_x)
    if abs(k1 - k2) <= 1e-12:
        return "not_covered"
    return "crossing" if k1 < k2 else "no_crossing"


# ---------------------------------------------------------------------------
# curve factories and wrappers
# ---------------------------------------------------------------------------

def _as_bloch(state: StateLike) -> BlochVector:
    if isinstance(state, BlochVector):
        return state
    if isinstance(state, DensityMatrix):
        return density_to_bloch(state)
    raise DimensionError(f"expected a qubit state, got {type(state).__name__}")


def _as_qutrit_density(state: StateLike) -> DensityMatrix:
    if isinstance(state, QutritDiagonal):
        return state.to_density()
    if isinstance(state, DensityMatrix) and state.dim == 3:
        return state
    raise DimensionError(f"expected a qutrit state, got {type(state).__name__}")


def ergotropy_curve(state: StateLike, c: ChannelSpec, scaled: bool = False) -> Curve:
    """Vectorized t -> ergotropy callable for one state under one channel.

    ``scaled`` multiplies the curve by exp(r t) with r the slowest decay
    rate of the channel's Bloch families (currently meaningful for the
    x/y/z-flip channel, where near-degenerate rates push crossings far past
    the point where raw curves underflow). Scaling preserves signs of curve
    differences at every time.
    """
    if isinstance(c, QutritADC):
        rho = _as_qutrit_density(state)
        if _qutrit_is_diagonal(rho):
            p1, p2 = rho.matrix[0, 0].real, rho.matrix[1, 1].real

            def curve(t):
                return np.asarray(qutrit_ergotropy_kernel(c, p1, p2, np.asarray(t, float)))

            return curve

        def curve(t):
            ts = np.atleast_1d(np.asarray(t, dtype=float))
            total, _, _ = _qutrit_general_columns(rho, c, ts)
            return total if np.ndim(t) else float(total[0])

        return curve

    b = _as_bloch(state)
    if isinstance(c, GADC):
        def curve(t):
            m_z_t, mp2_t = gadc_components(c, b.m_x, b.m_y, b.m_z, np.asarray(t, float))
            return qubit_ergotropy_from_components(m_z_t, mp2_t, c.h_z)

        return curve
    if isinstance(c, Pauli):
        shift = pauli_slow_rate(c) if scaled else 0.0

        def curve(t):
            m_z_t, mp2_t = pauli_components(
                c, b.m_x, b.m_y, b.m_z, np.asarray(t, float), shift=shift
            )
            return qubit_ergotropy_from_components(m_z_t, mp2_t, c.h_z)

        return curve
    if isinstance(c, NonMarkovADC):
        def curve(t):
            factor = nm_damping_factor(c, np.asarray(t, float))
            m_z_t, mp2_t = nm_components(c, b.m_x, b.m_y, b.m_z, factor)
            return qubit_ergotropy_from_components(m_z_t, mp2_t, c.h_z)

        return curve
    raise DomainError(f"unsupported channel {c!r}")


def distance_curve(state: StateLike, c: ChannelSpec, scaled: bool = False) -> Curve:
    """Vectorized t -> trace distance to the steady state."""
    if isinstance(c, QutritADC):
        rho = _as_qutrit_density(state)
        if _qutrit_is_diagonal(rho):
            p1, p2 = rho.matrix[0, 0].real, rho.matrix[1, 1].real

            def curve(t):
                return np.asarray(
                    qutrit_distance_kernel(c, p1, p2, np.asarray(t, float), scaled=scaled)
                )

            return curve

        ss = steady_state(c).matrix

        def curve(t):
            ts = np.atleast_1d(np.asarray(t, dtype=float))
            diff = _qutrit_evolved(rho, c, ts) - ss
            out = 0.5 * np.abs(np.linalg.eigvalsh(diff)).sum(axis=-1)
            return out if np.ndim(t) else float(out[0])

        return curve

    b = _as_bloch(state)
    mp2 = b.m_x ** 2 + b.m_y ** 2
    if isinstance(c, GADC):
        return lambda t: gadc_distance_kernel(c, mp2, b.m_z, np.asarray(t, float), scaled=scaled)
    if isinstance(c, Pauli):
        return lambda t: pauli_distance_kernel(c, mp2, b.m_z, np.asarray(t, float), scaled=scaled)
    if isinstance(c, NonMarkovADC):
        return lambda t: nm_distance_kernel(
            c, mp2, b.m_z, nm_damping_factor(c, np.asarray(t, float))
        )
    raise DomainError(f"unsupported channel {c!r}")


def _replace_mpemba(report: CrossingReport, f: Curve, g: Curve, t_max: float) -> CrossingReport:
    """Recompute the weight ratio from unscaled curves on a fresh grid."""
    ts = _grid(t_max, 2 ** 14)
    fv, gv = _eval(f, ts), _eval(g, ts)
    if fv[0] > gv[0]:
        num, den = _integral_parts(ts, fv, gv)
    else:
        num, den = _integral_parts(ts, gv, fv)
    return replace(report, mpemba_parameter=_ratio(num, den))


def ergotropy_crossings(
    state1: StateLike,
    state2: StateLike,
    c: ChannelSpec,
    t_max: float | None = None,
    refine_tol: float = 1e-9,
) -> CrossingReport:
    """Crossing census of two ergotropy curves under a shared channel.

    Detection runs on rate-scaled curves where the channel needs it (sign
    exactness in deep tails); the reported weight ratio always comes from
    the physical, unscaled curves.
    """
    horizon = default_horizon(c) if t_max is None else t_max
    needs_scaling = isinstance(c, Pauli)
    f = ergotropy_curve(state1, c, scaled=needs_scaling)
    g = ergotropy_curve(state2, c, scaled=needs_scaling)
    report = detect_crossings(f, g, horizon, refine_tol)
    if needs_scaling:
        report = _replace_mpemba(
            report, ergotropy_curve(state1, c), ergotropy_curve(state2, c), horizon
        )
    return report


def state_mpemba_crossings(
    rho1: DensityMatrix, rho2: DensityMatrix, c: ChannelSpec, t_max: Optional[float] = None
) -> CrossingReport:
    """Crossing census of the two trace-distance-to-steady-state curves."""
    if t_max is None:
        t_max = 2.0 * default_horizon(c)
    ss = steady_state(c)
    d1 = trace_distance(rho1, ss)
    d2 = trace_distance(rho2, ss)
    if abs(d1 - d2) <= INITIAL_ORDER_ATOL:
        raise OrderingError("states start equidistant from the steady state")
    scaled = isinstance(c, (GADC, Pauli, QutritADC))
    f = distance_curve(rho1, c, scaled=scaled)
    g = distance_curve(rho2, c, scaled=scaled)
    report = detect_crossings(f, g, t_max, refine_tol=1e-9)
    if scaled:
        report = _replace_mpemba(
            report, distance_curve(rho1, c), distance_curve(rho2, c), t_max
        )
    return report


# ---------------------------------------------------------------------------
# monotonicity verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LemmaReport:
    """Finite-difference audit of one monotonicity claim."""

    lemma: str
    samples: int
    violations: int
    worst: float  # largest margin on the wrong side of the threshold, 0 if clean


_FD_STEP = 1e-6
_FD_TOL = 1e-8


def _qubit_curve_value(c: ChannelSpec, m_x: float, m_z: float, t: float) -> float:
    if isinstance(c, GADC):
        m_z_t, mp2_t = gadc_components(c, m_x, 0.0, m_z, t)
    elif isinstance(c, NonMarkovADC):
        factor = nm_damping_factor(c, t)
        m_z_t, mp2_t = nm_components(c, m_x, 0.0, m_z, factor)
    else:
        raise DomainError(f"unsupported channel {c!r}")
    return float(qubit_ergotropy_from_components(m_z_t, mp2_t, c.h_z))


def verify_lemma_monotonicity(
    lemma: str, samples: int, c: ChannelSpec, seed: int = 0
) -> LemmaReport:
    """Check a directional-decay claim on random (state, time) pairs.

    L1/L2 run on the damping channel with thermal occupation; L3/L4 on the
    structured-bath channel. L1/L3: along a fixed-ergotropy shell, the
    curve value at any t > 0 must not increase with m_z. L2/L4: at fixed
    m_x it must not decrease with m_z. Derivatives are central differences
    with step 1e-6 and tolerance 1e-8.
    """
    if lemma not in ("L1", "L2", "L3", "L4"):
        raise DomainError(f"unknown lemma {lemma!r}")
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    iso = lemma in ("L1", "L3")
    if lemma in ("L1", "L2") and not isinstance(c, GADC):
        raise DomainError(f"{lemma} applies to the damping channel")
    if lemma in ("L3", "L4") and not isinstance(c, NonMarkovADC):
        raise DomainError(f"{lemma} applies to the structured-bath channel")

    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for _ in range(samples):
        if isinstance(c, GADC):
            t = rng.uniform(0.01, 5.0) / (c.a * c.gamma)
        else:
            t = rng.uniform(0.01, 20.0) / c.lam
        if iso:
            e0 = rng.uniform(0.05, 1.2)
            lo = max(e0 - 1.0, -1.0) + 1e-3
            hi = e0 / 2.0 - 1e-3
            m_z = rng.uniform(lo, hi - 10.0 * _FD_STEP)
            e_plus = _qubit_curve_value(
                c, iso_ergotropic_mx(e0 * c.h_z, m_z + _FD_STEP, c.h_z), m_z + _FD_STEP, t
            )
            e_minus = _qubit_curve_value(
                c, iso_ergotropic_mx(e0 * c.h_z, m_z - _FD_STEP, c.h_z), m_z - _FD_STEP, t
            )
            deriv = (e_plus - e_minus) / (2.0 * _FD_STEP)
            margin = deriv - _FD_TOL  # must be <= 0
        else:
            m_x = rng.uniform(0.0, 0.9)
            bound = math.sqrt(1.0 - m_x * m_x) - 1e-3
            m_z = rng.uniform(-bound, bound - 10.0 * _FD_STEP)
            e_plus = _qubit_curve_value(c, m_x, m_z + _FD_STEP, t)
            e_minus = _qubit_curve_value(c, m_x, m_z - _FD_STEP, t)
            deriv = (e_plus - e_minus) / (2.0 * _FD_STEP)
            margin = -deriv - _FD_TOL  # derivative must be >= -tol
        if margin > 0.0:
            violations += 1
            worst = max(worst, margin)
    return LemmaReport(lemma=lemma, samples=samples, violations=violations, worst=worst)
