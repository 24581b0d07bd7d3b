"""Dissipative channels acting on the battery and their closed-form dynamics.

Four channel families are supported:

* ``GADC``: generalized amplitude damping at bath occupation ``n_bose``
  (decay rate gamma_minus, excitation rate gamma_minus * n / (1 + n)).
* ``Pauli``: x/y flips at a common rate ``gamma_perp`` plus z flips at
  ``gamma_z``.
* ``QutritADC``: three-level amplitude damping with all downward jumps at a
  common rate.
* ``NonMarkovADC``: amplitude damping from a Lorentzian bath of width
  ``lam`` and detuning ``delta``, exact (non-Markovian) solution.

Closed forms are expressed through the evolved Bloch (or population)
components, which keeps them finite and cancellation-free for any time. The
batch kernels accept numpy broadcasting: state parameters shaped ``(..., 1)``
against a time row ``(nt,)`` produce curve families in one call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import NDArray

from .errors import DimensionError, DomainError, ModelError
from .states import BatteryHamiltonian, BlochVector, DensityMatrix, QutritDiagonal


@dataclass(frozen=True)
class GADC:
    """Generalized amplitude damping; ``gamma_minus`` is the decay rate."""

    gamma_minus: float
    n_bose: float = 0.0
    h_z: float = 1.0

    def __post_init__(self):
        if self.gamma_minus < 0.0:
            raise DomainError(f"gamma_minus must be >= 0, got {self.gamma_minus}")
        if self.n_bose < 0.0:
            raise DomainError(f"n_bose must be >= 0, got {self.n_bose}")
        if not (self.h_z > 0.0):
            raise DomainError(f"h_z must be positive, got {self.h_z}")

    @property
    def gamma(self) -> float:
        """Base rate: gamma_minus = gamma * (1 + n_bose)."""
        return self.gamma_minus / (1.0 + self.n_bose)

    @property
    def gamma_plus(self) -> float:
        return self.gamma * self.n_bose

    @property
    def a(self) -> float:
        """Total-rate factor 1 + 2 n_bose."""
        return 1.0 + 2.0 * self.n_bose


@dataclass(frozen=True)
class Pauli:
    """Pauli channel with gamma_x = gamma_y = gamma_perp and gamma_z."""

    gamma_perp: float
    gamma_z: float
    h_z: float = 1.0

    def __post_init__(self):
        if self.gamma_perp < 0.0 or self.gamma_z < 0.0:
            raise DomainError("Pauli rates must be >= 0")
        if not (self.h_z > 0.0):
            raise DomainError(f"h_z must be positive, got {self.h_z}")


@dataclass(frozen=True)
class QutritADC:
    """Qutrit amplitude damping; every downward jump happens at rate gamma."""

    gamma: float
    h_z: float = 1.0

    def __post_init__(self):
        if self.gamma < 0.0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")
        if not (self.h_z > 0.0):
            raise DomainError(f"h_z must be positive, got {self.h_z}")


@dataclass(frozen=True)
class NonMarkovADC:
    """Amplitude damping from a Lorentzian bath (exact solution).

    ``gamma`` is the coupling rate, ``lam`` the spectral width and ``delta``
    the detuning of the Lorentzian peak from the qubit gap.
    """

    gamma: float
    lam: float
    delta: float = 0.0
    h_z: float = 1.0

    def __post_init__(self):
        if self.gamma < 0.0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")
        if not (self.lam > 0.0):
            raise DomainError(f"lam must be positive, got {self.lam}")
        if not (self.h_z > 0.0):
            raise DomainError(f"h_z must be positive, got {self.h_z}")


ChannelSpec = Union[GADC, Pauli, QutritADC, NonMarkovADC]


def n_bose_from_temperature(temperature: float, h_z: float = 1.0) -> float:
    """Bose occupation at the qubit gap 2 h_z; zero temperature gives 0."""
    if temperature < 0.0:
        raise DomainError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0.0:
        return 0.0
    return 1.0 / np.expm1(2.0 * h_z / temperature)


def hamiltonian(channel: ChannelSpec) -> BatteryHamiltonian:
    dim = 3 if isinstance(channel, QutritADC) else 2
    return BatteryHamiltonian(dim=dim, h_z=channel.h_z)


def steady_state(channel: ChannelSpec) -> DensityMatrix:
    """Asymptotic state: thermal for GADC, I/2 for Pauli, ground otherwise."""
    if isinstance(channel, GADC):
        n = channel.n_bose
        a = channel.a
        return DensityMatrix(np.diag([n / a + 0.0j, (n + 1.0) / a]))
    if isinstance(channel, Pauli):
        return DensityMatrix(0.5 * np.eye(2, dtype=complex))
    if isinstance(channel, QutritADC):
        return DensityMatrix(np.diag([0.0j, 0.0, 1.0]))
    if isinstance(channel, NonMarkovADC):
        return DensityMatrix(np.diag([0.0j, 1.0]))
    raise ModelError(f"unknown channel {channel!r}")


def jump_operators(channel: ChannelSpec) -> tuple[tuple[NDArray[np.complex128], float], ...]:
    """GKSL jump operators with their rates, in the storage basis."""
    if isinstance(channel, GADC):
        sm = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
        sp = sm.T.copy()
        return ((sm, channel.gamma_minus), (sp, channel.gamma_plus))
    if isinstance(channel, Pauli):
        sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        sy = np.array([[0.0, -1.0j], [1.0j, 0.0]])
        sz = np.diag([1.0 + 0.0j, -1.0])
        return ((sx, channel.gamma_perp), (sy, channel.gamma_perp), (sz, channel.gamma_z))
    if isinstance(channel, QutritADC):
        def e(i, j):
            m = np.zeros((3, 3), dtype=complex)
            m[i, j] = 1.0
            return m
        # levels ordered (top, mid, ground): downward jumps mid->gnd, top->gnd, top->mid
        return ((e(2, 1), channel.gamma), (e(2, 0), channel.gamma), (e(1, 0), channel.gamma))
    raise ModelError("non-Markovian amplitude damping has no GKSL generator")


def default_horizon(channel: ChannelSpec) -> float:
    """Scan and detection window: 100 over the slowest relevant rate.

    For the Pauli channel the rate set includes the splitting rate
    2 |gamma_perp - gamma_z| at which the two exponential families separate,
    since ordering exchanges happen on that time scale. The non-Markovian
    window is 20 / lam, which covers the transient oscillations.
    """
    if isinstance(channel, GADC):
        rate = channel.a * channel.gamma / 2.0
    elif isinstance(channel, Pauli):
        rates = [4.0 * channel.gamma_perp, 2.0 * (channel.gamma_perp + channel.gamma_z)]
        if channel.gamma_perp != channel.gamma_z:
            rates.append(2.0 * abs(channel.gamma_perp - channel.gamma_z))
        rate = min(r for r in rates if r > 0.0) if any(r > 0.0 for r in rates) else 0.0
    elif isinstance(channel, QutritADC):
        rate = channel.gamma / 2.0
    elif isinstance(channel, NonMarkovADC):
        return 20.0 / channel.lam
    else:
        raise ModelError(f"unknown channel {channel!r}")
    if rate <= 0.0:
        raise DomainError("channel has no dissipative rate, horizon undefined")
    return 100.0 / rate


# ---------------------------------------------------------------------------
# batch kernels
# ---------------------------------------------------------------------------

def qubit_ergotropy_from_components(m_z_t, m_perp_sq_t, h_z: float):
    """Ergotropy h_z (m_z + |m|) from evolved Bloch components.

    Uses m_perp^2 / (|m| - m_z) when m_z < 0, which avoids the cancellation
    that makes the direct form lose all relative precision in decay tails.
    """
    mz = np.asarray(m_z_t, dtype=float)
    mp2 = np.asarray(m_perp_sq_t, dtype=float)
    norm = np.sqrt(mz * mz + mp2)
    den = norm - mz
    with np.errstate(divide="ignore", invalid="ignore"):
        neg = np.where(den > 0.0, mp2 / np.where(den > 0.0, den, 1.0), 0.0)
    return h_z * np.where(mz >= 0.0, mz + norm, neg)


def gadc_components(channel: GADC, m_x, m_y, m_z, t):
    """Evolved (m_z(t), m_perp(t)^2); broadcasts over all arguments."""
    a = channel.a
    decay = np.exp(-a * channel.gamma * np.asarray(t, dtype=float))
    m_z_t = ((1.0 + a * np.asarray(m_z)) * decay - 1.0) / a
    m_perp_sq = (np.asarray(m_x) ** 2 + np.asarray(m_y) ** 2) * decay
    return m_z_t, m_perp_sq


def gadc_bloch_evolve(b: BlochVector, channel: GADC, t: float) -> BlochVector:
    """Exact state at time t, including the 2 h_z coherence rotation."""
    if t < 0.0:
        raise DomainError(f"time must be >= 0, got {t}")
    m_z_t, _ = gadc_components(channel, 0.0, 0.0, b.m_z, t)
    damp = np.exp(-channel.a * channel.gamma * t / 2.0)
    c = (b.m_x - 1j * b.m_y) * np.exp(-2.0j * channel.h_z * t) * damp
    return BlochVector(float(c.real), float(-c.imag), float(m_z_t))


def gadc_ergotropy(b: BlochVector, channel: GADC, t):
    """Extractable work along the damped trajectory; t may be an array."""
    m_z_t, m_perp_sq = gadc_components(channel, b.m_x, b.m_y, b.m_z, t)
    out = qubit_ergotropy_from_components(m_z_t, m_perp_sq, channel.h_z)
    return out if np.ndim(t) else float(out)


def gadc_incoherent_kernel(channel: GADC, m_z, t):
    """Ergotropy of the energy-dephased evolved state, 2 h_z max(0, m_z(t))."""
    m_z_t, _ = gadc_components(channel, 0.0, 0.0, m_z, t)
    return 2.0 * channel.h_z * np.maximum(0.0, m_z_t)


def gadc_distance_kernel(channel: GADC, m_perp_sq, m_z, t, scaled: bool = False):
    """Trace distance to the thermal steady state.

    With ``scaled`` the result is multiplied by exp(a gamma t / 2), which
    preserves crossings while keeping the slow family of order one.
    """
    a = channel.a
    decay = np.exp(-a * channel.gamma * np.asarray(t, dtype=float))
    gap = (1.0 + a * np.asarray(m_z)) / a
    if scaled:
        return 0.5 * np.sqrt(np.asarray(m_perp_sq) + decay * gap * gap)
    return 0.5 * np.sqrt(decay * (np.asarray(m_perp_sq) + decay * gap * gap))


def pauli_components(channel: Pauli, m_x, m_y, m_z, t, shift: float = 0.0):
    """Evolved (m_z(t), m_perp(t)^2), optionally rate-shifted by ``shift``.

    A positive shift multiplies both components by exp(shift * t); used to
    compare curves without tail underflow.
    """
    ts = np.asarray(t, dtype=float)
    m_z_t = np.asarray(m_z) * np.exp(-(4.0 * channel.gamma_perp - shift) * ts)
    m_perp = np.exp(-(2.0 * (channel.gamma_perp + channel.gamma_z) - shift) * ts)
    m_perp_sq = (np.asarray(m_x) ** 2 + np.asarray(m_y) ** 2) * m_perp * m_perp
    return m_z_t, m_perp_sq


def pauli_slow_rate(channel: Pauli) -> float:
    """Decay rate of the slowest Bloch family."""
    return min(4.0 * channel.gamma_perp, 2.0 * (channel.gamma_perp + channel.gamma_z))


def pauli_bloch_evolve(b: BlochVector, channel: Pauli, t: float) -> BlochVector:
    if t < 0.0:
        raise DomainError(f"time must be >= 0, got {t}")
    m_z_t = b.m_z * np.exp(-4.0 * channel.gamma_perp * t)
    damp = np.exp(-2.0 * (channel.gamma_perp + channel.gamma_z) * t)
    c = (b.m_x - 1j * b.m_y) * np.exp(-2.0j * channel.h_z * t) * damp
    return BlochVector(float(c.real), float(-c.imag), float(m_z_t))


def pauli_ergotropy(b: BlochVector, channel: Pauli, t):
    """Closed-form ergotropy for states in the xz plane; t may be an array."""
    if abs(b.m_y) > 1e-12:
        raise DomainError("pauli_ergotropy requires m_y = 0")
    m_z_t, m_perp_sq = pauli_components(channel, b.m_x, 0.0, b.m_z, t)
    out = qubit_ergotropy_from_components(m_z_t, m_perp_sq, channel.h_z)
    return out if np.ndim(t) else float(out)


def pauli_incoherent_kernel(channel: Pauli, m_z, t):
    m_z_t = np.asarray(m_z) * np.exp(-4.0 * channel.gamma_perp * np.asarray(t, dtype=float))
    return 2.0 * channel.h_z * np.maximum(0.0, m_z_t)


def pauli_distance_kernel(channel: Pauli, m_perp_sq, m_z, t, scaled: bool = False):
    """Trace distance to I/2, optionally rescaled by the slow family rate."""
    shift = pauli_slow_rate(channel) if scaled else 0.0
    m_z_t, m_perp_sq_t = pauli_components(channel, 0.0, 0.0, m_z, t, shift=shift)
    m_perp_sq_t = np.asarray(m_perp_sq) * np.exp(
        -2.0 * (2.0 * (channel.gamma_perp + channel.gamma_z) - shift) * np.asarray(t, dtype=float)
    )
    return 0.5 * np.sqrt(m_perp_sq_t + m_z_t * m_z_t)


def qutrit_populations(channel: QutritADC, p1, p2, t):
    """Evolved (top, mid, ground) populations; broadcasts over arguments."""
    ts = np.asarray(t, dtype=float)
    e1 = np.exp(-channel.gamma * ts)
    e2 = e1 * e1
    top = np.asarray(p1) * e2
    both = (np.asarray(p1) + np.asarray(p2)) * e1
    return top, both - top, 1.0 - both


def qutrit_diagonal_evolve(q: QutritDiagonal, channel: QutritADC, t: float) -> QutritDiagonal:
    if t < 0.0:
        raise DomainError(f"time must be >= 0, got {t}")
    top, mid, _ = qutrit_populations(channel, q.p1, q.p2, t)
    return QutritDiagonal(float(top), float(mid))


def qutrit_ergotropy_kernel(channel: QutritADC, p1, p2, t):
    """Ergotropy of the evolved diagonal state via population sorting."""
    top, mid, gnd = qutrit_populations(channel, p1, p2, t)
    stacked = np.stack(np.broadcast_arrays(top, mid, gnd), axis=-1)
    srt = np.sort(stacked, axis=-1)
    # energy h (top - gnd); passive energy h (q_min - q_max)
    return channel.h_z * ((top - gnd) + (srt[..., 2] - srt[..., 0]))


def qutrit_distance_kernel(channel: QutritADC, p1, p2, t, scaled: bool = False):
    """Trace distance of the evolved diagonal state to the ground level."""
    exc = np.asarray(p1) + np.asarray(p2)
    if scaled:
        return exc * np.ones_like(np.asarray(t, dtype=float))
    return exc * np.exp(-channel.gamma * np.asarray(t, dtype=float))


def nm_amplitude(channel: NonMarkovADC, t):
    """Excited-amplitude damping factor nu(t); t may be an array.

    Written as a sum of two bounded exponentials so that no intermediate
    overflows for large t. Near zeta t = 0 the confluent series
    1 + (lam - i delta) t / 2 is used.
    """
    ts = np.asarray(t, dtype=float)
    z = complex(channel.lam, -channel.delta)
    zeta = np.sqrt(np.complex128(z * z - 2.0 * channel.gamma * channel.lam))
    series = 1.0 + z * ts / 2.0
    if zeta == 0.0:
        core = series * np.exp(-channel.lam * ts / 2.0)
    else:
        x = zeta * ts / 2.0
        plus = 0.5 * (1.0 + z / zeta) * np.exp(x - channel.lam * ts / 2.0)
        minus = 0.5 * (1.0 - z / zeta) * np.exp(-x - channel.lam * ts / 2.0)
        core = np.where(
            np.abs(x) < 1e-6,
            series * np.exp(-channel.lam * ts / 2.0),
            plus + minus,
        )
    return core if np.ndim(t) else complex(core)


def nm_damping_factor(channel: NonMarkovADC, t):
    """|nu(t)|^2, the excited-population damping factor."""
    return np.abs(nm_amplitude(channel, t)) ** 2


def nm_components(channel: NonMarkovADC, m_x, m_y, m_z, factor):
    """Evolved (m_z(t), m_perp(t)^2) given the damping factor |nu|^2."""
    f = np.asarray(factor, dtype=float)
    m_z_t = f * (1.0 + np.asarray(m_z)) - 1.0
    m_perp_sq = (np.asarray(m_x) ** 2 + np.asarray(m_y) ** 2) * f
    return m_z_t, m_perp_sq


def nm_ergotropy(b: BlochVector, channel: NonMarkovADC, t):
    """Ergotropy under the exact non-Markovian damping; t may be an array."""
    factor = nm_damping_factor(channel, t)
    m_z_t, m_perp_sq = nm_components(channel, b.m_x, b.m_y, b.m_z, factor)
    out = qubit_ergotropy_from_components(m_z_t, m_perp_sq, channel.h_z)
    return out if np.ndim(t) else float(out)


def nm_incoherent_kernel(channel: NonMarkovADC, m_z, factor):
    m_z_t = np.asarray(factor) * (1.0 + np.asarray(m_z)) - 1.0
    return 2.0 * channel.h_z * np.maximum(0.0, m_z_t)


def nm_distance_kernel(channel: NonMarkovADC, m_perp_sq, m_z, factor):
    """Trace distance of the evolved state to the ground state."""
    f = np.asarray(factor, dtype=float)
    gap = f * (1.0 + np.asarray(m_z))
    return 0.5 * np.sqrt(f * np.asarray(m_perp_sq) + gap * gap)
