"""Pauli string and Hamiltonian algebra against dense oracles."""

import numpy as np
import pytest

from conftest import random_hamiltonian_pairs, random_state
from vqite import (PauliHamiltonian, StateVector, basis_state, expectation,
                   pauli_decompose, to_dense_matrix, weighted_partial_trace)
from vqite.pauli import DimensionCapError
from vqite.simulator import DensityMatrix


def test_single_z_matrix():
    h = PauliHamiltonian.from_pairs([(1.0, "Z")])
    assert np.allclose(to_dense_matrix(h), np.diag([1.0, -1.0]))


def test_all_identity_string():
    for n in (1, 2, 3):
        h = PauliHamiltonian.from_pairs([(1.0, "I" * n)])
        assert np.array_equal(to_dense_matrix(h), np.eye(2 ** n))


def test_xi_matrix_convention():
    # Leftmost letter acts on q0 = most significant bit: X (x) I.
    h = PauliHamiltonian.from_pairs([(1.0, "XI")])
    x = np.array([[0, 1], [1, 0]])
    assert np.allclose(to_dense_matrix(h), np.kron(x, np.eye(2)))


def test_lih_row_dense_is_hermitian_with_oracle_ground(lih_r15):
    m = to_dense_matrix(lih_r15)
    assert m.shape == (8, 8)
    assert np.max(np.abs(m - m.conj().T)) < 1e-12
    assert np.linalg.eigvalsh(m)[0] == pytest.approx(-7.954370067642636, abs=1e-9)


def test_dimension_cap():
    h = PauliHamiltonian.from_pairs([(1.0, "I" * 13)])
    with pytest.raises(DimensionCapError):
        to_dense_matrix(h)


def test_expectation_z_eigenstate():
    h = PauliHamiltonian.from_pairs([(1.0, "Z")])
    assert expectation(h, basis_state("0")) == pytest.approx(1.0)


def test_expectation_orthogonal():
    h = PauliHamiltonian.from_pairs([(1.0, "X")])
    assert expectation(h, basis_state("0")) == pytest.approx(0.0, abs=1e-15)


def test_expectation_hartree_fock_lih(lih_r15):
    # Brute-force oracle: dense matrix-vector product on |100>.
    psi = basis_state("100")
    brute = np.vdot(psi.amplitudes, to_dense_matrix(lih_r15) @ psi.amplitudes).real
    val = expectation(lih_r15, psi)
    assert val == pytest.approx(brute, abs=1e-12)
    assert val == pytest.approx(-7.9534, abs=1e-10)
    # The HF energy sits above the exact ground energy (sign cross-check).
    assert val > np.linalg.eigvalsh(to_dense_matrix(lih_r15))[0]


def test_expectation_dimension_mismatch():
    h = PauliHamiltonian.from_pairs([(1.0, "ZZ")])
    with pytest.raises(ValueError):
        expectation(h, basis_state("0"))


def test_expectation_density_matrix(lih_r15, rng):
    amps = random_state(rng, 3)
    rho = DensityMatrix(np.outer(amps, amps.conj()))
    dense = to_dense_matrix(lih_r15)
    assert expectation(lih_r15, rho) == pytest.approx(
        np.trace(rho.elements @ dense).real, abs=1e-12)


def plus_x_weight():
    return DensityMatrix(0.5 * np.array([[1, 1], [1, 1]], dtype=complex))


def test_weighted_partial_trace_zx():
    h = PauliHamiltonian.from_pairs([(1.0, "ZX")])
    reduced = weighted_partial_trace(h, {0}, plus_x_weight())
    assert reduced.n_qubits == 1
    assert reduced.coefficient("Z") == pytest.approx(1.0)


def test_weighted_partial_trace_zz_vanishes():
    h = PauliHamiltonian.from_pairs([(1.0, "ZZ")])
    reduced = weighted_partial_trace(h, {0}, plus_x_weight())
    assert reduced.n_terms == 0


def test_weighted_partial_trace_lih_matches_dense(lih_r15):
    reduced = weighted_partial_trace(lih_r15, {0, 1}, plus_x_weight())
    # Dense oracle: Tr_b((I_a x rho_b) H) contracted index-wise.
    dense = to_dense_matrix(lih_r15).reshape(2, 2, 2, 2, 2, 2)
    rho = plus_x_weight().elements
    oracle = np.einsum("abcdef,fc->abde", dense, rho).reshape(4, 4)
    assert np.max(np.abs(to_dense_matrix(reduced) - oracle)) < 1e-10


def test_weighted_partial_trace_random_matches_dense(rng):
    for _ in range(10):
        h = PauliHamiltonian.from_pairs(random_hamiltonian_pairs(rng, 3, 6),
                                        n_qubits=3)
        amps = random_state(rng, 1)
        rho = DensityMatrix(np.outer(amps, amps.conj()))
        reduced = weighted_partial_trace(h, {0, 1}, rho)
        dense = to_dense_matrix(h).reshape(2, 2, 2, 2, 2, 2)
        oracle = np.einsum("abcdef,fc->abde", dense, rho.elements).reshape(4, 4)
        assert np.max(np.abs(to_dense_matrix(reduced) - oracle)) < 1e-10


def test_weighted_partial_trace_bad_partition(lih_r15):
    with pytest.raises(ValueError):
        weighted_partial_trace(lih_r15, {0, 5}, plus_x_weight())
    with pytest.raises(ValueError):
        weighted_partial_trace(lih_r15, {0, 1, 2}, plus_x_weight())


def test_pauli_decompose_identity():
    h = pauli_decompose(np.eye(4))
    assert h.n_terms == 1
    assert h.coefficient("II") == pytest.approx(1.0)


def test_pauli_decompose_diag_z():
    h = pauli_decompose(np.diag([1.0, -1.0]))
    assert h.n_terms == 1
    assert h.coefficient("Z") == pytest.approx(1.0)


def test_pauli_decompose_rejects_non_hermitian():
    m = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        pauli_decompose(m)


def test_decompose_round_trip_random(rng):
    for n in (1, 2, 3, 4):
        h = PauliHamiltonian.from_pairs(random_hamiltonian_pairs(rng, n, 8),
                                        n_qubits=n)
        back = pauli_decompose(to_dense_matrix(h))
        assert back.n_qubits == n
        for c, ps in h.terms:
            assert back.coefficient(ps.letters) == pytest.approx(c, abs=1e-9)
        assert np.max(np.abs(to_dense_matrix(back) - to_dense_matrix(h))) < 1e-9


def test_expectation_linearity(rng):
    amps = random_state(rng, 2)
    sv = StateVector(amps)
    pairs = random_hamiltonian_pairs(rng, 2, 5)
    total = PauliHamiltonian.from_pairs(pairs, n_qubits=2)
    split = sum(
        expectation(PauliHamiltonian.from_pairs([p], n_qubits=2), sv) for p in pairs
    )
    assert expectation(total, sv) == pytest.approx(split, abs=1e-10)


def test_canonicalization_merges_and_drops():
    h = PauliHamiltonian.from_pairs([(0.5, "ZI"), (0.25, "ZI"), (1e-16, "XX")])
    assert h.n_terms == 1
    assert h.coefficient("ZI") == pytest.approx(0.75)


def test_mixed_qubit_counts_rejected():
    with pytest.raises(ValueError):
        PauliHamiltonian.from_pairs([(1.0, "Z"), (1.0, "ZZ")])
