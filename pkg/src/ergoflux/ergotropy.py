"""Ergotropy, passive states, and the coherent/incoherent breakdown.

Conventions match `states`: the battery Hamiltonian is diagonal in the
storage basis with levels ordered by decreasing energy, so the passive
state pairs the sorted populations (largest first) with the energies in
increasing order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import GADC
from .errors import DomainError
from .states import BatteryHamiltonian, DensityMatrix, eigen_sorted

BREAKDOWN_ATOL = 1e-12


@dataclass(frozen=True)
class ErgotropyBreakdown:
    """Total extractable work split into incoherent and coherent parts."""

    total: float
    incoherent: float
    coherent: float


def passive_state(rho: DensityMatrix, h: BatteryHamiltonian) -> DensityMatrix:
    """Lowest-energy state reachable from rho by unitaries."""
    if rho.dim != h.dim:
        raise DomainError(f"dimension mismatch: state {rho.dim}, hamiltonian {h.dim}")
    vals, _ = eigen_sorted(rho)
    # vals descending, eigenbasis columns ascending in energy: pair index by index
    basis = h.eigenbasis
    mat = (basis * vals) @ basis.conj().T
    return DensityMatrix(mat.astype(complex))


def ergotropy(rho: DensityMatrix, h: BatteryHamiltonian) -> float:
    """Maximal unitarily extractable work from rho."""
    pas = passive_state(rho, h)
    value = float(np.real(np.trace((rho.matrix - pas.matrix) @ h.matrix)))
    # clip eigensolver noise so passive inputs report exactly zero
    return value if value > 1e-14 else max(value, 0.0)


def _dephased(rho: DensityMatrix, h: BatteryHamiltonian) -> DensityMatrix:
    """Drop all off-diagonal elements in the energy eigenbasis."""
    b = h.eigenbasis
    diag = np.real(np.diag(b.conj().T @ rho.matrix @ b))
    return DensityMatrix((b * diag) @ b.conj().T)


def ergotropy_breakdown(rho: DensityMatrix, h: BatteryHamiltonian) -> ErgotropyBreakdown:
    """Split ergotropy into the part available without coherences and the rest.

    The incoherent share is the ergotropy of the dephased state; the
    coherent share is the remainder and is always >= 0.
    """
    total = ergotropy(rho, h)
    inc = ergotropy(_dephased(rho, h), h)
    coh = total - inc
    if coh < -BREAKDOWN_ATOL:
        raise DomainError(
            f"incoherent ergotropy {inc} exceeds total {total}; state is inconsistent"
        )
    return ErgotropyBreakdown(total=total, incoherent=inc, coherent=max(coh, 0.0))


def incoherent_vanish_time(m_z: float, channel: GADC) -> float:
    """Time at which the incoherent ergotropy of a qubit hits zero under GADC.

    Population inversion decays as m_z(t) = ((1 + a m_z) e^{-a gamma t} - 1)/a,
    so the incoherent part survives until e^{-a gamma t} = 1/(1 + a m_z).
    States with m_z <= 0 start with no incoherent share and return 0.
    """
    if not -1.0 <= m_z <= 1.0:
        raise DomainError(f"m_z must lie in [-1, 1], got {m_z}")
    if m_z <= 0.0:
        return 0.0
    if channel.gamma == 0.0:
        raise DomainError("inversion never decays at zero coupling")
    arg = 1.0 + channel.a * m_z
    if arg <= 0.0:
        raise DomainError(f"log argument {arg} <= 0 for m_z={m_z}")
    return math.log(arg) / (channel.a * channel.gamma)


def iso_ergotropic_mx(e0: float, m_z: float, h_z: float = 1.0) -> float:
    """Transverse component m_x >= 0 placing (m_x, 0, m_z) on the e0 shell.

    Solves h_z (m_z + sqrt(m_z^2 + m_x^2)) = e0. Raises DomainError when no
    m_x within the Bloch ball achieves the target.
    """
    if h_z <= 0.0:
        raise DomainError(f"h_z must be > 0, got {h_z}")
    if e0 < 0.0:
        raise DomainError(f"target ergotropy must be >= 0, got {e0}")
    radius = e0 / h_z - m_z  # required |m| on the shell
    radicand = radius * radius - m_z * m_z
    if radius < abs(m_z) or radicand < -1e-15:
        raise DomainError(f"no transverse solution for e0={e0}, m_z={m_z}")
    m_x = math.sqrt(max(radicand, 0.0))
    if m_x * m_x + m_z * m_z > 1.0 + 1e-12:
        raise DomainError(
            f"solution leaves the Bloch ball: |m|={math.hypot(m_x, m_z)} for e0={e0}"
        )
    return m_x


def qutrit_table_ergotropy(p1: float, p2: float, h_z: float = 1.0) -> float:
    """Closed-form qutrit ergotropy for a diagonal state (p1, p2, p3).

    p1 is the top-level population, p2 the middle, p3 = 1 - p1 - p2 the
    ground. The six orderings each reduce to a linear expression; the first
    matching branch applies, so ties fall to the earlier (cheaper) row.
    """
    p3 = 1.0 - p1 - p2
    if min(p1, p2, p3) < -1e-12:
        raise DomainError(f"populations ({p1}, {p2}, {p3}) are not a distribution")
    if p1 <= p2 <= p3:
        val = 0.0
    elif p1 <= p3 <= p2:
        val = 2.0 * p2 + p1 - 1.0
    elif p2 <= p1 <= p3:
        val = p1 - p2
    elif p2 <= p3 <= p1:
        val = 3.0 * p1 - 1.0
    elif p3 <= p1 <= p2:
        val = 3.0 * (p1 + p2) - 2.0
    else:
        val = 4.0 * p1 + 2.0 * p2 - 2.0
    return h_z * val
