"""Estimation of the McLachlan linear system A theta-dot = B.

Two interchangeable routes are provided.  The exact route evaluates the
defining inner products directly on statevectors:

    A_ij = Re <d_i psi | d_j psi>
    B_i  = -Re <d_i psi | H | psi>

with |d_i psi> built from the ansatz derivative descriptors.  The
Hadamard route expands the same sums into one ancilla test circuit per
(factor-pair, A entry) and per (factor x Hamiltonian term, B entry); the
ancilla is prepared in (|0> + e^{i phi} |1>)/sqrt(2) with phi absorbing
the complex prefactor of the summand, and the ancilla Z expectation then
yields the summand's real part.  Evaluated without sampling, the two
routes agree to machine precision; with shots they agree statistically.

The linear solve uses an eigenvalue pseudo-inverse with a relative cutoff
(1e-8 exact route, 1e-3 shot route, where noise inflates the small
eigenvalues); a fully degenerate A yields a zero update flagged as
stationary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ansatz import AnsatzCircuit
from .pauli import PauliHamiltonian, PauliString
from .simulator import (Gate, StateVector, controlled_pauli, hadamard,
                        measure_z_expectation, run_circuit, x)

EXACT_EIG_CUTOFF = 1e-8
SHOT_EIG_CUTOFF = 1e-3
ABS_EIG_FLOOR = 1e-12


@dataclass(frozen=True)
class McLachlanSystem:
    """A and B of the variational linear system, with their provenance."""

    a_matrix: np.ndarray
    b_vector: np.ndarray
    route: str = "exact"            # "exact" or "hadamard"
    shots: int | None = None
    seed: int | None = None


@dataclass(frozen=True)
class HadamardTestCircuit:
    """One ancilla test: phased ancilla, gate list, Z measurement.

    The ancilla is the last qubit (index n_qubits - 1) and is prepared in
    (|0> + e^{i ancilla_phase} |1>)/sqrt(2); the system qubits start in
    `system_reference`.
    """

    gates: tuple[Gate, ...]
    ancilla_phase: float
    measured_qubit: int
    n_qubits: int
    system_reference: StateVector


@dataclass(frozen=True)
class HadamardJob:
    """A test circuit plus its weight and destination entry."""

    circuit: HadamardTestCircuit
    weight: float
    destination: tuple              # ("A", i, j) with i <= j, or ("B", i)


def ancilla_state(phase: float) -> np.ndarray:
    return np.array([1.0, np.exp(1j * phase)], dtype=complex) / np.sqrt(2.0)


def compute_exact(ansatz: AnsatzCircuit, h: PauliHamiltonian) -> McLachlanSystem:
    """A and B by direct statevector inner products."""
    if h.n_qubits != ansatz.n_system_qubits:
        raise ValueError("ansatz and Hamiltonian qubit counts disagree")
    gamma = ansatz.n_parameters
    derivs = [ansatz.derivative_state(i) for i in range(gamma)]
    h_psi = h.apply(ansatz.state().amplitudes)
    a = np.zeros((gamma, gamma))
    b = np.zeros(gamma)
    for i in range(gamma):
        for j in range(i, gamma):
            a[i, j] = a[j, i] = np.vdot(derivs[i], derivs[j]).real
        b[i] = -np.vdot(derivs[i], h_psi).real
    return McLachlanSystem(a, b, route="exact")


def _anti_controlled(ancilla: int, sigma: PauliString) -> list[Gate]:
    """sigma applied on the ancilla-|0> branch: X . c-sigma . X."""
    gates = [x(ancilla)]
    gates += _controlled(ancilla, sigma)
    gates.append(x(ancilla))
    return gates


def _controlled(ancilla: int, sigma: PauliString) -> list[Gate]:
    if sigma.weight == 0:
        return []
    return [controlled_pauli(ancilla, tuple(range(sigma.n_qubits)), sigma.letters)]


def _assemble(ansatz: AnsatzCircuit, insertions: dict[int, list[Gate]],
              tail: list[Gate], ancilla: int) -> tuple[Gate, ...]:
    gates: list[Gate] = []
    for pos, g in enumerate(ansatz.gates):
        if pos in insertions:
            gates += insertions[pos]
        gates.append(g)
    end = len(ansatz.gates)
    if end in insertions:
        gates += insertions[end]
    gates += tail
    gates.append(hadamard(ancilla))
    return tuple(gates)


def build_hadamard_circuits(ansatz: AnsatzCircuit, h: PauliHamiltonian,
                            simplify: bool = False) -> list[HadamardJob]:
    """One weighted test circuit per A/B summand.

    For A(i, j), i <= j: the bra-side sigma is inserted anti-controlled at
    descriptor i's insertion point, the ket-side sigma controlled at
    descriptor j's; the ancilla phase absorbs conj(p_ki) p_lj.  For B(i):
    the bra-side sigma as above, the Hamiltonian string controlled after
    the full circuit, phase absorbing -conj(p_ki) h_l.

    With `simplify`, uncontrolled system gates after the last controlled
    insertion are dropped (they cancel in the ancilla expectation); the
    default keeps the literal circuit.
    """
    if h.n_qubits != ansatz.n_system_qubits:
        raise ValueError("ansatz and Hamiltonian qubit counts disagree")
    anc = ansatz.n_system_qubits
    n = anc + 1
    jobs: list[HadamardJob] = []

    def make(insertions, tail, prefactor, destination):
        phase = float(np.angle(prefactor))
        weight = float(abs(prefactor))
        gates = _assemble(ansatz, insertions, tail, anc)
        if simplify:
            gates = _truncate_trailing_system_gates(gates, anc)
        circ = HadamardTestCircuit(gates, phase, anc, n, ansatz.reference_state)
        jobs.append(HadamardJob(circ, weight, destination))

    gamma = ansatz.n_parameters
    for i in range(gamma):
        di = ansatz.descriptors[i]
        for j in range(i, gamma):
            dj = ansatz.descriptors[j]
            for p_k, sig_k in di.factors:
                for p_l, sig_l in dj.factors:
                    ins: dict[int, list[Gate]] = {}
                    ins.setdefault(di.insertion_point, []).extend(
                        _anti_controlled(anc, sig_k))
                    ins.setdefault(dj.insertion_point, []).extend(
                        _controlled(anc, sig_l))
                    make(ins, [], np.conj(p_k) * p_l, ("A", i, j))
    for i in range(gamma):
        di = ansatz.descriptors[i]
        for p_k, sig_k in di.factors:
            for h_l, sig_l in h.terms:
                ins = {di.insertion_point: _anti_controlled(anc, sig_k)}
                make(ins, _controlled(anc, sig_l), -np.conj(p_k) * h_l, ("B", i))
    return jobs


def _truncate_trailing_system_gates(gates: tuple[Gate, ...], anc: int) -> tuple[Gate, ...]:
    body = gates[:-1]  # the final gate is the ancilla Hadamard
    last_controlled = max(
        (k for k, g in enumerate(body)
         if g.control is not None or (g.kind == "X" and g.targets == (anc,))),
        default=-1,
    )
    return tuple(body[: last_controlled + 1]) + (gates[-1],)


def evaluate_circuit(circuit: HadamardTestCircuit, shots: int | None = None,
                     rng=None) -> float:
    """Run one test circuit and return the ancilla Z expectation."""
    init = StateVector(
        np.kron(circuit.system_reference.amplitudes, ancilla_state(circuit.ancilla_phase))
    )
    final = run_circuit(init, circuit.gates)
    return measure_z_expectation(final, circuit.measured_qubit, shots=shots, rng=rng)


def assemble_system(jobs: list[HadamardJob], values, gamma: int,
                    route: str, shots: int | None, seed: int | None) -> McLachlanSystem:
    a = np.zeros((gamma, gamma))
    b = np.zeros(gamma)
    for job, z in zip(jobs, values):
        if job.destination[0] == "A":
            _, i, j = job.destination
            a[i, j] += job.weight * z
        else:
            _, i = job.destination
            b[i] += job.weight * z
    for i in range(gamma):
        for j in range(i + 1, gamma):
            a[j, i] = a[i, j]
    return McLachlanSystem(a, b, route=route, shots=shots, seed=seed)


def compute_sampled(ansatz: AnsatzCircuit, h: PauliHamiltonian,
                    shots: int | None, seed: int | None = None) -> McLachlanSystem:
    """A and B from the Hadamard-test circuits.

    shots=None evaluates every circuit analytically (the exact-mode
    switch); otherwise each ancilla expectation is a seeded binomial
    estimate with the given shot count.
    """
    if shots is not None and shots < 1:
        raise ValueError("shots must be >= 1 (or None for exact mode)")
    jobs = build_hadamard_circuits(ansatz, h)
    rng = np.random.default_rng(seed) if shots is not None else None
    values = [evaluate_circuit(job.circuit, shots=shots, rng=rng) for job in jobs]
    return assemble_system(jobs, values, ansatz.n_parameters, "hadamard", shots, seed)


@dataclass(frozen=True)
class UpdateResult:
    delta_theta: np.ndarray
    stationary: bool


def solve_update(sys: McLachlanSystem, dtau: float,
                 eps_cut: float | None = None) -> UpdateResult:
    """delta theta = dtau * pinv(A) B via eigen-decomposition.

    Eigenvalues below eps_cut * max eigenvalue are dropped; if the whole
    spectrum sits below the absolute floor the update is zero and the
    result is flagged stationary.  For a 1x1 system this reduces to
    (B/A) * dtau.
    """
    if dtau <= 0:
        raise ValueError("dtau must be positive")
    if eps_cut is None:
        eps_cut = SHOT_EIG_CUTOFF if (sys.route == "hadamard" and sys.shots) else EXACT_EIG_CUTOFF
    lam, vec = np.linalg.eigh(np.asarray(sys.a_matrix, dtype=float))
    lam_max = float(lam.max())
    if lam_max < ABS_EIG_FLOOR:
        return UpdateResult(np.zeros_like(sys.b_vector), True)
    keep = lam > eps_cut * lam_max
    inv = np.where(keep, 1.0, 0.0) / np.where(keep, lam, 1.0)
    delta = dtau * (vec @ (inv * (vec.T @ sys.b_vector)))
    return UpdateResult(delta, False)
