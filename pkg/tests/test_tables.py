"""Coefficient-table ingestion, validation, and the bundled data."""

import numpy as np
import pytest

from vqite import (exact_spectrum, gershgorin_emax, hamiltonian_at,
                   parse_table, serialize_table, to_dense_matrix)
from vqite.tables import TableFormatError


def test_bundle_shape(lih_table):
    assert len(lih_table.rows) == 50
    assert lih_table.n_qubits == 3
    assert lih_table.pauli_labels == (
        "III", "ZII", "IZI", "IIZ", "YYI", "XXI", "YIY", "XIX",
        "ZZI", "ZIZ", "IYY", "IXX", "IZZ")
    assert lih_table.bond_distances[0] == pytest.approx(0.1)
    assert lih_table.bond_distances[-1] == pytest.approx(5.0)
    assert lih_table.molecule_name == "LiH"


def test_bundle_reference_cells(lih_table):
    assert lih_table.coefficient(0.7, "IZI") == pytest.approx(-0.2332)
    assert lih_table.coefficient(5.0, "YYI") == 0.0
    assert lih_table.coefficient(1.5, "III") == pytest.approx(-7.0632)


def test_bundle_rows_hermitian_within_gershgorin(lih_table):
    for r in lih_table.bond_distances:
        dense = to_dense_matrix(hamiltonian_at(lih_table, r))
        assert np.max(np.abs(dense - dense.conj().T)) < 1e-12
        bound = gershgorin_emax(dense)
        for lam in np.linalg.eigvalsh(dense):
            assert any(abs(lam - c) <= rad + 1e-9 for c, rad in bound.discs)


def test_parse_toy_table_comma_and_tab():
    for sep in (",", "\t"):
        text = "# molecule: toy\n" + sep.join(["R", "I", "Z"]) + "\n" \
               + sep.join(["0.5", "1.0", "-0.25"]) + "\n"
        table = parse_table(text)
        assert table.molecule_name == "toy"
        assert table.rows == ((0.5, (1.0, -0.25)),)


def test_parse_reports_bad_label():
    with pytest.raises(TableFormatError, match="line 1.*column 3"):
        parse_table("R,Z,Q\n0.5,1.0,2.0\n")


def test_parse_reports_arity():
    with pytest.raises(TableFormatError, match="line 2"):
        parse_table("R,ZI,IZ\n0.5,1.0\n")


def test_parse_reports_non_numeric():
    with pytest.raises(TableFormatError, match="line 3"):
        parse_table("R,Z\n0.5,1.0\n0.7,abc\n")


def test_parse_reports_non_increasing_r():
    with pytest.raises(TableFormatError, match="line 3"):
        parse_table("R,Z\n0.5,1.0\n0.5,2.0\n")


def test_parse_requires_r_header():
    with pytest.raises(TableFormatError, match="header"):
        parse_table("Z,I\n0.5,1.0\n")


def test_parse_mixed_label_lengths_rejected():
    with pytest.raises(TableFormatError, match="length differs"):
        parse_table("R,Z,ZZ\n0.5,1.0,2.0\n")


def test_round_trip(lih_table):
    text = serialize_table(lih_table)
    again = parse_table(text)
    assert again == lih_table
    assert serialize_table(again) == text


def test_hamiltonian_at_exact_match(lih_table):
    h = hamiltonian_at(lih_table, 1.5, interpolation="none")
    assert h.n_terms == 13
    assert h.coefficient("III") == pytest.approx(-7.0632)
    with pytest.raises(KeyError):
        hamiltonian_at(lih_table, 1.49, interpolation="none")


def test_hamiltonian_at_nearest(lih_table):
    h = hamiltonian_at(lih_table, 1.49, interpolation="nearest")
    assert h.coefficient("III") == pytest.approx(-7.0632)
    with pytest.raises(ValueError):
        hamiltonian_at(lih_table, 9.0, interpolation="nearest")
    with pytest.raises(ValueError):
        hamiltonian_at(lih_table, 1.5, interpolation="cubic")


def test_zero_coefficient_dropped_from_hamiltonian(lih_table):
    # The R=5.0 row lists YYI as 0.0000; canonicalization drops the term.
    h = hamiltonian_at(lih_table, 5.0)
    assert h.coefficient("YYI") == 0.0
    assert all(ps.letters != "YYI" for _, ps in h.terms)


def test_synthetic_h2_properties(h2_table, h2_r07):
    assert h2_table.n_qubits == 2
    assert {"ZI", "IZ", "ZZ", "XX"} <= set(h2_table.pauli_labels)
    spec = exact_spectrum(h2_r07)
    # |10> is the exact, non-degenerate ground state by construction.
    assert not spec.ground_degenerate
    assert abs(spec.ground_state[2]) == pytest.approx(1.0, abs=1e-12)


def test_lih_ground_energy_discontinuity_is_data(lih_table):
    # The trailing rows break the smooth trend; they are ingested verbatim
    # and only flagged downstream, never corrected.
    e48 = exact_spectrum(hamiltonian_at(lih_table, 4.8)).ground_energy
    e49 = exact_spectrum(hamiltonian_at(lih_table, 4.9)).ground_energy
    assert abs(e49 - e48) > 0.05
