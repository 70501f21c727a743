import numpy as np
import pytest

from hamalg.oracle import (
    brute_closure_rank,
    car_check,
    exact_exponential,
    pauli_matrix,
    to_dense,
    unitarity_defect,
)
from hamalg.pauli import PauliString

P = PauliString.from_label


def test_exponential_matches_frozen(frozen):
    ref = frozen["exp_x_plus_z"]
    u = exact_exponential(pauli_matrix("X") + pauli_matrix("Z"), ref["t"])
    assert np.allclose(u, np.array(ref["re"]) + 1j * np.array(ref["im"]), atol=1e-13)


def test_exponential_closed_form():
    t = 0.37
    u = exact_exponential(pauli_matrix("Z"), t)
    assert np.allclose(u, np.diag([np.exp(1j * t), np.exp(-1j * t)]))
    assert unitarity_defect(u) < 1e-14


def test_exponential_rejects_non_hermitian():
    with pytest.raises(ValueError):
        exact_exponential(np.array([[0, 1], [0, 0]]), 1.0)


def test_to_dense_ordering():
    # qubit 0 is the leftmost tensor factor
    assert np.allclose(to_dense(P("XI")), np.kron(pauli_matrix("X"), np.eye(2)))


@pytest.mark.parametrize(
    "gens,dim",
    [(["X"], 1), (["X", "Z"], 3), (["XX", "ZZ"], 2), (["XI", "IX"], 2), (["XX", "ZI", "IZ"], 6)],
)
def test_brute_rank(gens, dim):
    assert brute_closure_rank([P(g) for g in gens]) == dim


def test_brute_rank_matrix_input():
    m = 1j * (pauli_matrix("X") + pauli_matrix("Z"))
    assert brute_closure_rank([m]) == 1


def test_brute_rank_size_cap():
    with pytest.raises(ValueError):
        brute_closure_rank([P("XXXXX")], cap=4)


def test_car_detects_violation():
    c = np.array([[0, 1], [0, 0]], dtype=complex)
    assert car_check([(c, c.T)])
    assert not car_check([(c, c.T), (c, c.T)])
