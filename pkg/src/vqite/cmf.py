"""One-layer cluster-mean-field reduction of a 3-qubit Hamiltonian.

The Hamiltonian is split into subsystem a (two qubits) and b (one qubit).
Starting from rho_b = (I + X)/2, the layered procedure alternates reduced
Hamiltonians:

    1. H_a = Tr_b((I_a x rho_b) H); keep its two lowest eigenstates.
    2. For each, H_b = Tr_a((rho_a x I_b) H); collect the four b
       eigenstates (ground and excited, conditioned on each a state).
    3. For each b state, H_a conditioned on it; keep the two lowest
       a eigenstates (eight in total).
    4. Pair each b state with the lowest a state of its own conditioned
       Hamiltonian, giving four product candidates; Gram-Schmidt them in
       ascending order of mean energy <psi|H|psi>.  If the candidates are
       rank-deficient, the next-lowest a states are appended in energy
       order until rank 4 is reached.
    5. Project H onto the orthonormal basis and expand in Pauli form.

The resulting 2-qubit effective Hamiltonian comes with the 8x4 isometry
whose columns are the basis vectors; lifting a reduced state through it
evaluates energies against the original Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pauli import (PAULI_MATRICES, PauliHamiltonian, pauli_decompose,
                    to_dense_matrix, weighted_partial_trace)
from .simulator import DensityMatrix
from .spectra import DEGENERACY_GAP, phase_normalize

GRAM_RANK_TOL = 1e-8


def default_rho_b() -> DensityMatrix:
    return DensityMatrix(0.5 * (PAULI_MATRICES["I"] + PAULI_MATRICES["X"]))


@dataclass(frozen=True)
class CmfPartition:
    """Qubit split: subsystem a (kept), b (averaged), and b's seed state."""

    subsystem_a: tuple[int, ...] = (0, 1)
    subsystem_b: tuple[int, ...] = (2,)
    initial_rho_b: DensityMatrix = field(default_factory=default_rho_b)

    def __post_init__(self) -> None:
        object.__setattr__(self, "subsystem_a", tuple(sorted(self.subsystem_a)))
        object.__setattr__(self, "subsystem_b", tuple(sorted(self.subsystem_b)))
        a, b = set(self.subsystem_a), set(self.subsystem_b)
        if a & b:
            raise ValueError("subsystems a and b overlap")
        if len(self.subsystem_a) != 2 or len(self.subsystem_b) != 1:
            raise ValueError("the one-layer reduction uses |a| = 2 and |b| = 1")
        if self.initial_rho_b.n_qubits != 1:
            raise ValueError("initial rho_b must be a single-qubit density matrix")

    def validate_for(self, n_qubits: int) -> None:
        covered = set(self.subsystem_a) | set(self.subsystem_b)
        if covered != set(range(n_qubits)):
            raise ValueError(
                f"partition {self.subsystem_a}/{self.subsystem_b} does not "
                f"cover qubits 0..{n_qubits - 1}"
            )


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """CMF-reduced Hamiltonian plus the basis back-map.

    `basis_isometry` columns are the orthonormal effective basis vectors
    in the original 8-dimensional space; `provenance` records the
    selection steps as plain key=value lines.
    """

    h_eff: PauliHamiltonian
    basis_isometry: np.ndarray
    partition: CmfPartition
    provenance: tuple[str, ...]


def _two_lowest(h: PauliHamiltonian, notes: list[str], label: str):
    m = to_dense_matrix(h)
    vals, vecs = np.linalg.eigh(m)
    if vals[1] - vals[0] < DEGENERACY_GAP or (
        vals.size > 2 and vals[2] - vals[1] < DEGENERACY_GAP
    ):
        notes.append(f"{label}.tie_break=eigh-order (gap below {DEGENERACY_GAP})")
    return (
        [phase_normalize(vecs[:, 0]), phase_normalize(vecs[:, 1])],
        [float(vals[0]), float(vals[1])],
    )


def _coeff_key(vec: np.ndarray) -> tuple:
    return tuple(np.round(np.concatenate([vec.real, vec.imag]), 12))


def _product_state(a_vec: np.ndarray, b_vec: np.ndarray,
                   a_idx: tuple[int, ...], b_idx: tuple[int, ...]) -> np.ndarray:
    """|a> on qubits a_idx (sorted order) times |b> on b_idx, as a 3-qubit vector."""
    t = np.tensordot(a_vec.reshape(2, 2), b_vec.reshape(2), axes=0)
    t = np.moveaxis(t, (0, 1, 2), (a_idx[0], a_idx[1], b_idx[0]))
    return t.reshape(-1)


def cmf_reduce(h: PauliHamiltonian,
               partition: CmfPartition | None = None) -> EffectiveHamiltonian:
    """Run the layered reduction; deterministic for identical input."""
    if h.n_qubits != 3:
        raise ValueError("the one-layer reduction is defined for 3-qubit input")
    partition = partition or CmfPartition()
    partition.validate_for(h.n_qubits)
    a_idx, b_idx = partition.subsystem_a, partition.subsystem_b
    notes: list[str] = [
        f"partition.a={a_idx}",
        f"partition.b={b_idx}",
    ]

    h_dense = to_dense_matrix(h)

    # Step 1: seed reduction and the two lowest a states.
    h_a0 = weighted_partial_trace(h, a_idx, partition.initial_rho_b)
    a_states, a_vals = _two_lowest(h_a0, notes, "h_a0")
    notes.append(f"h_a0.lowest={a_vals[0]:.12g},{a_vals[1]:.12g}")

    # Step 2: b conditioned on each a state (ground, excited per a state).
    b_states: list[np.ndarray] = []
    for tag, av in zip(("a_g", "a_e"), a_states):
        rho_a = DensityMatrix(np.outer(av, av.conj()))
        h_b = weighted_partial_trace(h, b_idx, rho_a)
        m = to_dense_matrix(h_b)
        vals, vecs = np.linalg.eigh(m)
        if vals[1] - vals[0] < DEGENERACY_GAP:
            notes.append(f"h_b({tag}).tie_break=eigh-order")
        b_states += [phase_normalize(vecs[:, 0]), phase_normalize(vecs[:, 1])]
        notes.append(f"h_b({tag}).eigenvalues={vals[0]:.12g},{vals[1]:.12g}")

    # Step 3: a conditioned on each b state; two lowest each.
    b_tags = ("b_g(a_g)", "b_e(a_g)", "b_g(a_e)", "b_e(a_e)")
    primary: list[np.ndarray] = []
    secondary: list[tuple[float, np.ndarray]] = []
    for tag, bv in zip(b_tags, b_states):
        rho_b = DensityMatrix(np.outer(bv, bv.conj()))
        h_a1 = weighted_partial_trace(h, a_idx, rho_b)
        lo_states, lo_vals = _two_lowest(h_a1, notes, f"h_a1({tag})")
        notes.append(f"h_a1({tag}).lowest={lo_vals[0]:.12g},{lo_vals[1]:.12g}")
        primary.append(_product_state(lo_states[0], bv, a_idx, b_idx))
        secondary.append((lo_vals[1], _product_state(lo_states[1], bv, a_idx, b_idx)))

    def mean_energy(vec: np.ndarray) -> float:
        return float(np.vdot(vec, h_dense @ vec).real)

    ordered = sorted(primary, key=lambda v: (mean_energy(v), _coeff_key(v)))
    fallback = [v for _, v in sorted(secondary, key=lambda t: (t[0], _coeff_key(t[1])))]

    basis: list[np.ndarray] = []
    used, dropped = 0, 0
    for cand in ordered + fallback:
        if len(basis) == 4:
            break
        w = cand.copy()
        for u in basis:
            w = w - np.vdot(u, w) * u
        norm = float(np.linalg.norm(w))
        if norm < GRAM_RANK_TOL:
            dropped += 1
            continue
        # second projection pass keeps the basis orthonormal even when the
        # candidate was nearly dependent
        for u in basis:
            w = w - np.vdot(u, w) * u
        basis.append(w / np.linalg.norm(w))
        used += 1
    if len(basis) < 4:
        raise ValueError("candidate products span fewer than 4 dimensions")
    notes.append(f"gram_schmidt.candidates_used={used}")
    notes.append(f"gram_schmidt.rank_deficient_dropped={dropped}")

    iso = np.column_stack(basis)
    h_eff_dense = iso.conj().T @ h_dense @ iso
    h_eff = pauli_decompose(h_eff_dense)
    notes.append(f"h_eff.terms={h_eff.n_terms}")
    return EffectiveHamiltonian(h_eff, iso, partition, tuple(notes))


def lift_state(eff: EffectiveHamiltonian, reduced: DensityMatrix) -> DensityMatrix:
    """Map a reduced 2-qubit state back to the original 3-qubit space."""
    if reduced.n_qubits != 2:
        raise ValueError("reduced state must live on 2 qubits")
    iso = eff.basis_isometry
    return DensityMatrix(iso @ reduced.elements @ iso.conj().T)


def lift_amplitudes(eff: EffectiveHamiltonian, amplitudes: np.ndarray) -> np.ndarray:
    """Pure-state version of lift_state, on raw amplitude vectors."""
    return eff.basis_isometry @ np.asarray(amplitudes, dtype=complex)
