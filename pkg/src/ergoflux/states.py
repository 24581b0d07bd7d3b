"""State containers and basic matrix utilities for qubit and qutrit batteries.

Conventions
-----------
Matrices are stored in the energy eigenbasis ordered from the highest level
down, so the first basis vector is the most energetic state. For a qubit this
makes the +1 eigenstate of sigma_z the excited state: the Bloch vector
(0, 0, +1) is fully charged, (0, 0, -1) is the ground state, and a polar
angle theta satisfies m_z = cos(theta). The qutrit levels are ordered
(top, middle, ground) with energies (+h_z, 0, -h_z).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import DimensionError, DomainError, NumericError

EPS_STATE = 1e-12
EPS_POSITIVITY = 1e-10

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _readonly(a: NDArray) -> NDArray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BlochVector:
    """Qubit state as a point in the closed Bloch ball."""

    m_x: float
    m_y: float
    m_z: float

    def __post_init__(self):
        n = self.norm()
        if not np.isfinite(n):
            raise DomainError("Bloch components must be finite")
        if n > 1.0 + EPS_STATE:
            raise DomainError(f"Bloch vector lies outside the unit ball: |m| = {n}")

    def norm(self) -> float:
        return float(np.sqrt(self.m_x**2 + self.m_y**2 + self.m_z**2))

    def transverse(self) -> float:
        """Magnitude of the coherence component, sqrt(m_x^2 + m_y^2)."""
        return float(np.hypot(self.m_x, self.m_y))

    @staticmethod
    def from_angles(theta: float, phi: float = 0.0) -> "BlochVector":
        """Pure state at polar angle theta (m_z = cos theta) and azimuth phi."""
        if not (0.0 <= theta <= np.pi + EPS_STATE):
            raise DomainError(f"polar angle must lie in [0, pi], got {theta}")

        def snap(x: float) -> float:
            # sin(pi) is ~1.2e-16 in floating point; that phantom component
            # would otherwise outlive exactly-zero curves and fake a crossing
            return 0.0 if abs(x) < 4.0 * np.finfo(float).eps else x

        return BlochVector(
            snap(float(np.sin(theta) * np.cos(phi))),
            snap(float(np.sin(theta) * np.sin(phi))),
            snap(float(np.cos(theta))),
        )


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix of dimension 2 or 3."""

    matrix: NDArray[np.complex128]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {m.shape}")
        if m.shape[0] not in (2, 3):
            raise DimensionError(f"supported dimensions are 2 and 3, got {m.shape[0]}")
        if np.max(np.abs(m - m.conj().T)) > EPS_STATE:
            raise DomainError("density matrix is not Hermitian within 1e-12")
        if abs(np.trace(m).real - 1.0) > EPS_STATE or abs(np.trace(m).imag) > EPS_STATE:
            raise DomainError(f"trace must be 1 within 1e-12, got {np.trace(m)}")
        if np.min(np.linalg.eigvalsh(m)) < -EPS_POSITIVITY:
            raise DomainError("density matrix has an eigenvalue below -1e-10")
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class QutritDiagonal:
    """Diagonal qutrit state by its top and middle populations.

    ``p1`` is the population of the highest level, ``p2`` of the middle one;
    the ground population is ``1 - p1 - p2``.
    """

    p1: float
    p2: float

    def __post_init__(self):
        if self.p1 < -EPS_STATE or self.p2 < -EPS_STATE:
            raise DomainError("populations must be non-negative")
        if self.p1 + self.p2 > 1.0 + EPS_STATE:
            raise DomainError("populations must satisfy p1 + p2 <= 1")

    @property
    def p3(self) -> float:
        return 1.0 - self.p1 - self.p2

    def to_density(self) -> DensityMatrix:
        return DensityMatrix(np.diag([self.p1 + 0.0j, self.p2, self.p3]))


@dataclass(frozen=True)
class BatteryHamiltonian:
    """Battery Hamiltonian h_z * S_z for dimension 2 or 3.

    The stored matrix is diagonal in the (highest level first) basis:
    diag(+h_z, -h_z) for a qubit, diag(+h_z, 0, -h_z) for a qutrit.
    """

    dim: int
    h_z: float
    matrix: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise DimensionError(f"supported dimensions are 2 and 3, got {self.dim}")
        if not (self.h_z > 0.0):
            raise DomainError(f"h_z must be positive, got {self.h_z}")
        if self.dim == 2:
            diag = [self.h_z, -self.h_z]
        else:
            diag = [self.h_z, 0.0, -self.h_z]
        object.__setattr__(self, "matrix", _readonly(np.diag(diag)))

    @property
    def eigenvalues(self) -> NDArray[np.float64]:
        """Energies in ascending order."""
        return _readonly(np.sort(np.diag(self.matrix)))

    @property
    def eigenbasis(self) -> NDArray[np.float64]:
        """Orthonormal eigenvector columns matching ``eigenvalues``."""
        # storage basis is energy-descending, so ascending order reverses it
        return _readonly(np.eye(self.dim)[:, ::-1])


def bloch_to_density(b: BlochVector) -> DensityMatrix:
    """Map a Bloch vector to the qubit density matrix (I + m.sigma)/2."""
    m = 0.5 * (np.eye(2, dtype=complex) + b.m_x * SIGMA_X + b.m_y * SIGMA_Y + b.m_z * SIGMA_Z)
    return DensityMatrix(m)


def density_to_bloch(rho: DensityMatrix) -> BlochVector:
    """Extract (m_x, m_y, m_z) from a qubit density matrix."""
    if rho.dim != 2:
        raise DimensionError(f"Bloch extraction needs a qubit, got dim {rho.dim}")
    m = rho.matrix
    return BlochVector(
        float(2.0 * m[0, 1].real),
        float(-2.0 * m[0, 1].imag),
        float((m[0, 0] - m[1, 1]).real),
    )


def trace_distance(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Trace distance (1/2) * ||rho1 - rho2||_1."""
    if rho1.dim != rho2.dim:
        raise DimensionError(f"dimension mismatch: {rho1.dim} vs {rho2.dim}")
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(rho1.matrix - rho2.matrix))))


def l1_coherence(rho: DensityMatrix, h: BatteryHamiltonian) -> float:
    """Sum of off-diagonal magnitudes of rho in the eigenbasis of h."""
    if rho.dim != h.dim:
        raise DimensionError(f"dimension mismatch: {rho.dim} vs {h.dim}")
    v = h.eigenbasis
    m = v.T.conj() @ rho.matrix @ v
    return float(np.sum(np.abs(m)) - np.sum(np.abs(np.diag(m))))


def eigen_sorted(rho: DensityMatrix) -> tuple[NDArray[np.float64], NDArray[np.complex128]]:
    """Eigenvalues in descending order with matching eigenvector columns."""
    vals, vecs = np.linalg.eigh(rho.matrix)
    vals = vals[::-1]
    vecs = vecs[:, ::-1]
    recon = vecs @ np.diag(vals) @ vecs.conj().T
    if np.max(np.abs(recon - rho.matrix)) > 1e-10:
        raise NumericError("eigendecomposition failed to reconstruct the input within 1e-10")
    return vals, vecs
