"""Exact algebra of Pauli strings and weighted Pauli sums.

Conventions used throughout the package:

    - A Pauli string is written with one letter per qubit, e.g. 'ZXI'.
    - The leftmost letter acts on qubit q0, and q0 occupies the MOST
      significant bit of the computational-basis index.  Equivalently,
      the dense matrix of a string is kron(P[s[0]], P[s[1]], ...).
    - Coefficients of a Hamiltonian are real (Hartree, for the molecular
      tables); the dense realization is therefore Hermitian.

Every cross-module identity (Hartree-Fock energies, reduced-Hamiltonian
traces, isometry back-maps) relies on this single ordering convention, so
it is defined here and nowhere else.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Single point of truth for the bit convention (see module docstring).
QUBIT_ORDER = "q0-is-most-significant-bit"

PAULI_LETTERS = "IXYZ"

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

DENSE_QUBIT_CAP = 12
COEFF_DROP_TOL = 1e-14


class DimensionCapError(ValueError):
    """Raised when a dense realization would exceed the qubit cap."""


def _check_dense_cap(n_qubits: int) -> None:
    if n_qubits > DENSE_QUBIT_CAP:
        raise DimensionCapError(
            f"dense work is capped at {DENSE_QUBIT_CAP} qubits, got {n_qubits}"
        )


@dataclass(frozen=True)
class PauliString:
    """A fixed-length word over {I, X, Y, Z}, one letter per qubit."""

    letters: str

    def __post_init__(self) -> None:
        if not self.letters:
            raise ValueError("Pauli string must have at least one letter")
        bad = set(self.letters) - set(PAULI_LETTERS)
        if bad:
            raise ValueError(f"invalid Pauli letters {sorted(bad)} in '{self.letters}'")

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        """Number of non-identity letters."""
        return sum(1 for c in self.letters if c != "I")

    def matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n realization under the fixed qubit ordering."""
        _check_dense_cap(self.n_qubits)
        out = np.array([[1.0 + 0j]])
        for c in self.letters:
            out = np.kron(out, PAULI_MATRICES[c])
        return out

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """Apply the string to a statevector without building the matrix."""
        n = self.n_qubits
        psi = np.asarray(amplitudes, dtype=complex).reshape((2,) * n)
        for q, c in enumerate(self.letters):
            if c == "I":
                continue
            psi = np.moveaxis(np.tensordot(PAULI_MATRICES[c], psi, axes=([1], [q])), 0, q)
        return psi.reshape(-1)

    def __str__(self) -> str:
        return self.letters


@dataclass(frozen=True)
class PauliHamiltonian:
    """Weighted sum of Pauli strings, H = sum_l h_l * sigma_l.

    Terms are kept in canonical form: duplicate strings merged by
    coefficient addition, terms with |coefficient| < 1e-14 dropped, and
    the remainder sorted by letters (I < X < Y < Z).
    """

    terms: tuple[tuple[float, PauliString], ...]
    n_qubits: int = field(default=0)

    def __post_init__(self) -> None:
        if not self.terms and self.n_qubits <= 0:
            raise ValueError("empty Hamiltonian needs an explicit n_qubits")
        n = self.n_qubits or self.terms[0][1].n_qubits
        merged: dict[str, float] = {}
        for coeff, ps in self.terms:
            if ps.n_qubits != n:
                raise ValueError(
                    f"term '{ps}' has {ps.n_qubits} qubits, expected {n}"
                )
            merged[ps.letters] = merged.get(ps.letters, 0.0) + float(coeff)
        canon = tuple(
            (c, PauliString(s))
            for s, c in sorted(merged.items())
            if abs(c) > COEFF_DROP_TOL
        )
        object.__setattr__(self, "terms", canon)
        object.__setattr__(self, "n_qubits", n)

    @classmethod
    def from_pairs(cls, pairs, n_qubits: int | None = None) -> "PauliHamiltonian":
        """Build from (coefficient, letters) pairs with plain-string labels."""
        terms = tuple((float(c), PauliString(s)) for c, s in pairs)
        return cls(terms, n_qubits or (terms[0][1].n_qubits if terms else 0))

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def coefficient(self, letters: str) -> float:
        for c, ps in self.terms:
            if ps.letters == letters:
                return c
        return 0.0

    def scaled(self, factor: float) -> "PauliHamiltonian":
        return PauliHamiltonian(
            tuple((factor * c, ps) for c, ps in self.terms), self.n_qubits
        )

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """H |psi> by term-wise string application."""
        out = np.zeros_like(np.asarray(amplitudes, dtype=complex))
        for c, ps in self.terms:
            out += c * ps.apply(amplitudes)
        return out

    def __str__(self) -> str:
        if not self.terms:
            return f"0 (on {self.n_qubits} qubits)"
        return " ".join(f"{c:+g}*{ps}" for c, ps in self.terms)


def to_dense_matrix(h: PauliHamiltonian) -> np.ndarray:
    """Dense 2^n x 2^n matrix of the Hamiltonian (n <= 12)."""
    _check_dense_cap(h.n_qubits)
    dim = 2 ** h.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for c, ps in h.terms:
        out += c * ps.matrix()
    return out


def expectation(h: PauliHamiltonian, state) -> float:
    """<psi|H|psi> for a statevector, or Tr(rho H) for a density matrix.

    The imaginary residual is asserted below 1e-10 and discarded.
    """
    amps = getattr(state, "amplitudes", None)
    if amps is not None:
        if amps.size != 2 ** h.n_qubits:
            raise ValueError("state and Hamiltonian dimensions disagree")
        value = complex(np.vdot(amps, h.apply(amps)))
    else:
        rho = getattr(state, "elements", None)
        if rho is None:
            rho = np.asarray(state, dtype=complex)
        if rho.shape != (2 ** h.n_qubits,) * 2:
            raise ValueError("state and Hamiltonian dimensions disagree")
        value = complex(np.trace(rho @ to_dense_matrix(h)))
    if abs(value.imag) > 1e-10:
        raise ArithmeticError(f"expectation has imaginary residual {value.imag:.3e}")
    return value.real


def weighted_partial_trace(h: PauliHamiltonian, subsystem, weight) -> PauliHamiltonian:
    """Tr_b((I_a x rho_b) H): replace complement letters by Tr(rho_b sigma_b).

    `subsystem` is the set of qubit indices kept; the reduced Hamiltonian's
    qubit j corresponds to sorted(subsystem)[j].  `weight` must be a density
    matrix on the complement qubits (sorted order, same bit convention).
    """
    keep = sorted(set(subsystem))
    if any(q < 0 or q >= h.n_qubits for q in keep) or not keep:
        raise ValueError(f"subsystem {subsystem} malformed for {h.n_qubits} qubits")
    comp = [q for q in range(h.n_qubits) if q not in keep]
    if not comp:
        raise ValueError("subsystem covers all qubits; nothing to trace out")
    rho = getattr(weight, "elements", None)
    if rho is None:
        rho = np.asarray(weight, dtype=complex)
    if rho.shape != (2 ** len(comp),) * 2:
        raise ValueError(
            f"weight has shape {rho.shape}, expected dim {2 ** len(comp)} on complement"
        )
    pairs = []
    for c, ps in h.terms:
        comp_string = PauliString("".join(ps.letters[q] for q in comp))
        scalar = complex(np.trace(rho @ comp_string.matrix()))
        # Tr(rho sigma) is real for Hermitian rho and Pauli sigma.
        reduced = "".join(ps.letters[q] for q in keep)
        pairs.append((c * scalar.real, reduced))
    return PauliHamiltonian.from_pairs(pairs, n_qubits=len(keep))


def pauli_decompose(m: np.ndarray, hermitian_tol: float = 1e-9) -> PauliHamiltonian:
    """Expand a Hermitian 2^k x 2^k matrix in the Pauli basis.

    Coefficients are h_l = Tr(sigma_l m) / 2^k; the round trip through
    to_dense_matrix reproduces m to the same tolerance.
    """
    m = np.asarray(m, dtype=complex)
    dim = m.shape[0]
    if m.shape != (dim, dim) or dim & (dim - 1):
        raise ValueError(f"matrix shape {m.shape} is not square power-of-two")
    if np.max(np.abs(m - m.conj().T)) > hermitian_tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    k = dim.bit_length() - 1
    _check_dense_cap(k)
    pairs = []
    for idx in range(4 ** k):
        letters = ""
        rem = idx
        for _ in range(k):
            letters = PAULI_LETTERS[rem % 4] + letters
            rem //= 4
        coeff = complex(np.trace(PauliString(letters).matrix() @ m)) / dim
        pairs.append((coeff.real, letters))
    return PauliHamiltonian.from_pairs(pairs, n_qubits=k)
