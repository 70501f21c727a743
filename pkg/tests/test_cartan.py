import itertools
import math

import numpy as np
import pytest

from hamalg import cartan
from hamalg.cartan import (
    CartanInvariantError,
    InvolutionMismatchError,
    KHKConfig,
    KHKConfigError,
    cartan_subalgebra,
    check_brackets,
    fast_forward_evolve,
    k_dimension_report,
    k_unitary,
    khk_decompose,
    split_by_involution,
)
from hamalg.closure import hamiltonian_algebra, lie_closure
from hamalg.models import (
    HoppingGraph,
    build_aim,
    build_free,
    build_single_site_coulomb,
    jw_transform,
)
from hamalg.operators import QubitHamiltonian
from hamalg.oracle import exact_exponential, to_dense
from hamalg.pauli import PauliString, commutes, y_count_parity
from hamalg.witness import theorem2_k_elements

P = PauliString.from_label


def pipeline(h, **cfg):
    basis = hamiltonian_algebra(h)
    split = split_by_involution(basis, h)
    sub = cartan_subalgebra(split, h)
    return split, sub, khk_decompose(h, split, sub, KHKConfig(**cfg))


XZ = QubitHamiltonian.from_pairs(1, [(1.0, "X"), (1.0, "Z")])


def test_single_qubit_split():
    split = split_by_involution(lie_closure([P("X"), P("Z")]), XZ)
    assert split.k_basis == (P("Y"),)
    assert set(split.m_basis) == {P("X"), P("Z")}
    assert cartan_subalgebra(split, XZ).h_basis == (P("X"),)


def test_trivial_k():
    h = QubitHamiltonian.from_pairs(1, [(0.8, "X")])
    split, _, res = pipeline(h)
    assert split.dim_k == 0 and res.residual == 0 and res.converged
    assert np.allclose(k_unitary(res), np.eye(2))
    assert res.h_terms[0].coefficient == pytest.approx(0.8)


def test_xz_toy():
    _, _, res = pipeline(XZ)
    assert res.converged and res.residual <= 1e-10
    assert abs(res.h_terms[0].coefficient) == pytest.approx(math.sqrt(2), abs=1e-10)
    for t in (0.0, 1.0, 3.7):
        u = fast_forward_evolve(res, t)
        assert np.linalg.norm(u - exact_exponential(to_dense(XZ), t)) <= 1e-8
    assert np.allclose(fast_forward_evolve(res, 0.0), np.eye(2))


def test_hamiltonian_terms_in_m():
    h = jw_transform(build_single_site_coulomb(HoppingGraph.chain(3), 0, 0, 1.0))
    split = split_by_involution(hamiltonian_algebra(h), h)
    assert set(h.strings) <= set(split.m_basis)
    assert all(y_count_parity(s) for s in split.k_basis)
    assert split.bracket_check == "exhaustive"
    assert split.dim_k + split.dim_m == 255


@pytest.mark.parametrize(
    "make",
    [
        lambda n=n: jw_transform(build_free(HoppingGraph.chain(n)))
        for n in (2, 3, 4, 5, 6)
    ]
    + [lambda n=n: jw_transform(build_single_site_coulomb(HoppingGraph.chain(n), 0, 0, 1.0)) for n in (2, 3, 4)],
)
def test_brackets_exhaustive(make):
    h = make()
    basis = hamiltonian_algebra(h)
    split = split_by_involution(basis, h)
    d = basis.dimension
    assert split.pairs_checked == d * (d - 1) // 2


def test_bracket_violation_detected(monkeypatch):
    # [X, Z] = Y is missing
    with pytest.raises(CartanInvariantError, match="outside"):
        check_brackets([P("X"), P("Z")], 1)
    check_brackets([P("X"), P("Y"), P("Z")], 1)
    # real Pauli words always respect the grading, so break the parity map instead
    monkeypatch.setattr(cartan, "_y_parity", lambda codes, n: np.zeros(len(codes), dtype=bool))
    with pytest.raises(CartanInvariantError, match="grading"):
        check_brackets([P("X"), P("Y"), P("Z")], 1)


def test_involution_mismatch():
    h = QubitHamiltonian.from_pairs(1, [(1.0, "Y"), (1.0, "Z")])
    with pytest.raises(InvolutionMismatchError):
        split_by_involution(lie_closure(h.strings), h)


def test_truncated_basis_rejected():
    h = jw_transform(build_aim(3, [1.0, 1.0], 1.0))
    with pytest.raises(ValueError):
        split_by_involution(lie_closure(h.strings, limit=20), h)


def test_transpose_grading_dense():
    h = jw_transform(build_single_site_coulomb(HoppingGraph.chain(2), 0, 0, 1.0))
    split = split_by_involution(hamiltonian_algebra(h), h)
    for s in split.k_basis:
        m = to_dense(s)
        assert np.allclose(-m.T, m)
    for s in split.m_basis:
        m = to_dense(s)
        assert np.allclose(-m.T, -m)


def test_h_maximal_by_brute_force():
    h = jw_transform(build_single_site_coulomb(HoppingGraph.chain(2), 0, 0, 1.0))
    split = split_by_involution(hamiltonian_algebra(h), h)
    sub = cartan_subalgebra(split, h)
    assert sub.dim >= 2
    assert sub.h_basis[0] == min(h.strings)
    m = list(split.m_basis)
    best = 0
    for r in range(1, len(m) + 1):
        if any(
            all(commutes(a, b) for a, b in itertools.combinations(c, 2))
            for c in itertools.combinations(m, r)
        ):
            best = r
        else:
            break
    assert sub.dim == best
    for s in set(m) - set(sub.h_basis):
        assert not all(commutes(s, x) for x in sub.h_basis)


def test_config_validation():
    with pytest.raises(KHKConfigError):
        KHKConfig(tolerance=0)
    with pytest.raises(KHKConfigError):
        KHKConfig(max_iterations=0)
    with pytest.raises(KHKConfigError):
        KHKConfig(gamma_base=-1.0)
    with pytest.raises(KHKConfigError):
        KHKConfig(gamma_base=2.0).gammas(3)
    g = KHKConfig().gammas(4)
    assert g[0] == pytest.approx(1 / math.pi)


@pytest.mark.parametrize(
    "h",
    [
        jw_transform(build_free(HoppingGraph.chain(2))),
        jw_transform(build_aim(2, [0.7], 2.0)),
    ],
    ids=["free_chain_2", "aim_2"],
)
def test_khk_fidelity(h):
    _, _, res = pipeline(h)
    assert res.converged
    K = k_unitary(res)
    dense = to_dense(h)
    recon = K @ to_dense(QubitHamiltonian(h.n_qubits, res.h_terms)) @ K.conj().T
    assert np.linalg.norm(recon - dense) <= 1e-6
    for t in (0.1, 1.0, 10.0, 100.0):
        err = np.linalg.norm(fast_forward_evolve(res, t, K=K) - exact_exponential(dense, t))
        assert err <= 1e-6


def test_group_law():
    _, _, res = pipeline(jw_transform(build_free(HoppingGraph.chain(2))))
    a, b = fast_forward_evolve(res, 0.3), fast_forward_evolve(res, 1.1)
    assert np.linalg.norm(a @ b - fast_forward_evolve(res, 1.4)) <= 1e-8


def test_deterministic_angles():
    h = jw_transform(build_aim(2, [0.7], 2.0))
    assert pipeline(h)[2].angles == pipeline(h)[2].angles


def test_refuses_unconverged():
    h = jw_transform(build_aim(2, [0.7], 2.0))
    _, _, res = pipeline(h, max_iterations=1, tolerance=1e-300)
    assert not res.converged
    with pytest.raises(ValueError):
        fast_forward_evolve(res, 1.0)


@pytest.mark.parametrize("n", [3, 4])
def test_k_elements_from_witnesses(n):
    m = build_single_site_coulomb(HoppingGraph.chain(n), 0, 0, 1.0)
    h = jw_transform(m)
    split = split_by_involution(hamiltonian_algebra(h), h)
    elems = theorem2_k_elements(m, None, split)
    assert len(elems) >= 2 ** (n - 3)
    assert all(y_count_parity(e) == 1 and e in set(split.k_basis) for e in elems)
    r = k_dimension_report(split, elems, n_sites=n)
    assert r["theorem2_bound"] == 2 ** (n - 3)
    assert r["bound_satisfied"] and r["witness_bound_satisfied"]
    assert r["witnesses_in_k"] == len(elems)


def test_report_free_has_no_bound():
    h = jw_transform(build_free(HoppingGraph.chain(3)))
    split = split_by_involution(hamiltonian_algebra(h), h)
    r = k_dimension_report(split, n_sites=3, interacting=False)
    assert r["theorem2_bound"] is None and r["bound_satisfied"] is None
