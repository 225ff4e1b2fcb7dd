import numpy as np
import pytest

from vqite import hamiltonian_at, load_h2_synthetic_table, load_lih_table


@pytest.fixture(scope="session")
def lih_table():
    return load_lih_table()


@pytest.fixture(scope="session")
def h2_table():
    return load_h2_synthetic_table()


@pytest.fixture(scope="session")
def lih_r15(lih_table):
    return hamiltonian_at(lih_table, 1.5)


@pytest.fixture(scope="session")
def h2_r07(h2_table):
    return hamiltonian_at(h2_table, 0.7)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def random_state(rng, n_qubits):
    amps = rng.normal(size=2 ** n_qubits) + 1j * rng.normal(size=2 ** n_qubits)
    return amps / np.linalg.norm(amps)


def random_hamiltonian_pairs(rng, n_qubits, n_terms):
    """Random real Pauli sum as (coefficient, letters) pairs."""
    letters = "IXYZ"
    pairs = []
    for _ in range(n_terms):
        word = "".join(rng.choice(list(letters)) for _ in range(n_qubits))
        pairs.append((float(rng.normal()), word))
    return pairs
