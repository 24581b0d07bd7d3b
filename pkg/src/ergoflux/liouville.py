"""Vectorized GKSL generator and spectral time evolution.

Density matrices are vectorized row by row (numpy reshape order), so the
generator reads

    L = -i (H (x) I - I (x) H^T)
        + sum_j gamma_j / 2 (2 L_j (x) L_j* - L_j^+ L_j (x) I - I (x) L_j^T L_j*)

Right eigenmatrices come from the eigenvector columns; the biorthogonal left
family comes from the inverse eigenvector matrix, so Tr[l_i^+ r_j] = delta_ij
holds by construction. When the spectrum has a unique zero mode the pair is
normalized so that the right zero eigenmatrix has unit trace and the left one
is exactly the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import eig, expm

from .errors import DimensionError, ModelError, NumericError
from .states import BatteryHamiltonian, DensityMatrix

ZERO_MODE_TOL = 1e-10
CONDITION_LIMIT = 1e8


@dataclass(frozen=True)
class Liouvillian:
    """Diagonalized generator with biorthogonal eigenmatrix families."""

    matrix: NDArray[np.complex128]
    eigenvalues: NDArray[np.complex128]
    right_eigenmatrices: NDArray[np.complex128]  # shape (d*d, d, d)
    left_eigenmatrices: NDArray[np.complex128]
    steady_state: DensityMatrix
    condition_number: float
    dim: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "dim", self.right_eigenmatrices.shape[1])

    @property
    def uses_expm_fallback(self) -> bool:
        """True when the eigenbasis is too ill-conditioned for spectral use."""
        return self.condition_number > CONDITION_LIMIT


def build_liouvillian(
    h: BatteryHamiltonian,
    jumps: tuple[tuple[NDArray[np.complex128], float], ...],
) -> Liouvillian:
    """Assemble and diagonalize the generator for the given jump set."""
    d = h.dim
    ident = np.eye(d, dtype=complex)
    hm = h.matrix.astype(complex)
    gen = -1j * (np.kron(hm, ident) - np.kron(ident, hm.T))
    for op, rate in jumps:
        op = np.asarray(op, dtype=complex)
        if op.shape != (d, d):
            raise DimensionError(f"jump operator shape {op.shape} does not match dim {d}")
        if rate < 0.0:
            raise ModelError(f"jump rate must be >= 0, got {rate}")
        opc = op.conj()
        opd = op.conj().T @ op
        gen += 0.5 * rate * (
            2.0 * np.kron(op, opc) - np.kron(opd, ident) - np.kron(ident, opd.T)
        )

    try:
        vals, vecs = eig(gen)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericError(f"generator diagonalization failed: {exc}") from exc
    cond = float(np.linalg.cond(vecs))
    try:
        inv = np.linalg.inv(vecs)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvector matrix is singular: {exc}") from exc

    zero_idx = np.nonzero(np.abs(vals) < ZERO_MODE_TOL)[0]
    if len(zero_idx) == 0:
        raise ModelError("generator has no zero eigenvalue")
    if len(zero_idx) == 1:
        # normalize the stationary pair: Tr[r_0] = 1, l_0 = identity
        k = zero_idx[0]
        tr = np.trace(vecs[:, k].reshape(d, d))
        if abs(tr) < 1e-12:
            raise ModelError("stationary eigenmatrix is traceless")
        vecs[:, k] = vecs[:, k] / tr
        inv[k, :] = inv[k, :] * tr
        ss = vecs[:, k].reshape(d, d)
    else:
        # degenerate kernel (e.g. purely unitary generator): pick any
        # unit-trace stationary combination for reporting
        traces = [np.trace(vecs[:, k].reshape(d, d)) for k in zero_idx]
        k = zero_idx[int(np.argmax(np.abs(traces)))]
        tr = traces[int(np.argmax(np.abs(traces)))]
        if abs(tr) < 1e-12:
            raise ModelError("no stationary eigenmatrix with nonzero trace")
        ss = vecs[:, k].reshape(d, d) / tr

    ss = 0.5 * (ss + ss.conj().T)
    rights = vecs.T.reshape(d * d, d, d)
    lefts = inv.conj().reshape(d * d, d, d)
    return Liouvillian(
        matrix=gen,
        eigenvalues=vals,
        right_eigenmatrices=rights,
        left_eigenmatrices=lefts,
        steady_state=DensityMatrix(ss),
        condition_number=cond,
    )


def evolve_spectral(liou: Liouvillian, rho0: DensityMatrix, t: float) -> DensityMatrix:
    """Propagate rho0 by time t through the eigendecomposition.

    Falls back to scaling-and-squaring expm when the eigenbasis condition
    number exceeds 1e8.
    """
    if rho0.dim != liou.dim:
        raise DimensionError(f"dimension mismatch: {rho0.dim} vs {liou.dim}")
    if t < 0.0:
        raise ModelError(f"dissipative evolution requires t >= 0, got {t}")
    d = liou.dim
    v = rho0.matrix.reshape(d * d)
    if liou.uses_expm_fallback:
        out = (expm(liou.matrix * t) @ v).reshape(d, d)
    else:
        coeff = np.einsum("ijk,jk->i", liou.left_eigenmatrices.conj(), rho0.matrix)
        out = np.einsum("i,ijk->jk", coeff * np.exp(liou.eigenvalues * t),
                        liou.right_eigenmatrices)
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out)
