"""Exact diagonalization oracle, Gershgorin bounds, excited-state lift.

The lift rearranges a Hamiltonian's levels so its first excited state
becomes the new ground state: H' = H + (E_max - E_0) |g><g|, where E_max
is any upper bound on the spectrum (here the Gershgorin disc bound) and
|g><g| the measured ground state.  Ground-state solvers then find the old
first excited level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliHamiltonian, pauli_decompose, to_dense_matrix
from .simulator import DensityMatrix

DEGENERACY_GAP = 1e-9


@dataclass(frozen=True)
class SpectrumResult:
    """Ascending eigenvalues with matching orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenstates: np.ndarray          # column k belongs to eigenvalues[k]
    degeneracy_flags: tuple[bool, ...]

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def ground_state(self) -> np.ndarray:
        return self.eigenstates[:, 0]

    @property
    def ground_degenerate(self) -> bool:
        return self.degeneracy_flags[0]


@dataclass(frozen=True)
class GershgorinBound:
    """Row discs (center, radius) and the spectrum upper bound they give."""

    discs: tuple[tuple[float, float], ...]
    e_max: float


def phase_normalize(vec: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component real and positive."""
    k = int(np.argmax(np.abs(vec)))
    pivot = vec[k]
    if abs(pivot) == 0.0:
        return vec
    return vec * (pivot.conj() / abs(pivot))


def exact_spectrum(h: PauliHamiltonian | np.ndarray) -> SpectrumResult:
    """Full dense eigen-decomposition, phase-normalized, ascending."""
    m = to_dense_matrix(h) if isinstance(h, PauliHamiltonian) else np.asarray(h, complex)
    vals, vecs = np.linalg.eigh(m)
    vecs = np.column_stack([phase_normalize(vecs[:, k]) for k in range(vals.size)])
    flags = []
    for k in range(vals.size):
        lo = k > 0 and vals[k] - vals[k - 1] < DEGENERACY_GAP
        hi = k + 1 < vals.size and vals[k + 1] - vals[k] < DEGENERACY_GAP
        flags.append(lo or hi)
    return SpectrumResult(vals, vecs, tuple(flags))


def gershgorin_emax(h_dense: np.ndarray, hermitian_tol: float = 1e-9) -> GershgorinBound:
    """Disc bound from matrix rows: center H_ii, radius sum_{j!=i} |H_ij|."""
    m = np.asarray(h_dense, dtype=complex)
    if np.max(np.abs(m - m.conj().T)) > hermitian_tol:
        raise ValueError("Gershgorin bound expects a Hermitian matrix")
    discs = []
    for i in range(m.shape[0]):
        radius = float(np.sum(np.abs(m[i]))) - abs(m[i, i])
        discs.append((float(m[i, i].real), radius))
    e_max = max(c + r for c, r in discs)
    return GershgorinBound(tuple(discs), e_max)


def pauli_coefficient_bound(h: PauliHamiltonian) -> float:
    """Looser spectrum bound without the dense matrix: sum of |h_l|.

    Documented fast path for larger systems; the disc bound above is the
    one the package's own workflows use.
    """
    return float(sum(abs(c) for c, _ in h.terms))


def lift_ground_state(h: PauliHamiltonian, ground: DensityMatrix,
                      e_max: float) -> PauliHamiltonian:
    """H' = H + (e_max - E_0) * ground, as a Pauli sum.

    With the exact ground projector and e_max >= lambda_max, the ground
    state of H' is the first excited state of H.  `ground` may be mixed
    (it typically comes out of a QITE run); E_0 = Tr(ground H).
    """
    h_dense = to_dense_matrix(h)
    e0 = float(np.trace(ground.elements @ h_dense).real)
    if e_max < e0:
        raise ValueError(f"e_max {e_max} is below the current ground energy {e0}")
    lifted = h_dense + (e_max - e0) * ground.elements
    return pauli_decompose(lifted)
