"""Acceptance criteria, one test each.

Every test appends a single ``PASS``/``FAIL`` line to ``RESULTS`` before it
asserts; ``conftest.py`` prints those lines at the end of the session. Run this
file on its own with ``pytest tests/test_acceptance.py`` or as a script.
"""

import time
from functools import cache

import numpy as np

from hamalg.cartan import (
    KHKConfig,
    cartan_subalgebra,
    fast_forward_evolve,
    k_unitary,
    khk_decompose,
    split_by_involution,
)
from hamalg.closure import (
    DEFAULT_LIMIT,
    lie_closure,
    lower_bound_interacting,
    upper_bound_free,
)
from hamalg.models import (
    HoppingGraph,
    build_aim,
    build_free,
    build_isolated_impurity,
    build_single_site_coulomb,
    build_x_only,
    jw_transform,
    orbital_rotated_transform,
)
from hamalg.operators import QubitHamiltonian
from hamalg.oracle import brute_closure_rank, exact_exponential, to_dense
from hamalg.pauli import PauliString, y_count_parity
from hamalg.witness import enumerate_witness_report, theorem2_k_elements

RESULTS: list[str] = []


def record(number: int, ok: bool, detail: str) -> None:
    RESULTS.append(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")


def coulomb_chain(n):
    return build_single_site_coulomb(HoppingGraph.chain(n), 0, 0, 1.0)


def aim(n):
    return build_aim(n, [1.0] * (n - 1), 1.0)


@cache
def closure(name: str, n: int):
    makers = {
        "x_only": lambda: build_x_only(n, 1.0),
        "free_chain": lambda: jw_transform(build_free(HoppingGraph.chain(n))),
        "free_star": lambda: jw_transform(build_free(HoppingGraph.star(n))),
        "coulomb_chain": lambda: jw_transform(coulomb_chain(n)),
        "aim": lambda: jw_transform(aim(n)),
        "impurity_jw": lambda: jw_transform(build_isolated_impurity(n)),
        "impurity_rotated": lambda: orbital_rotated_transform(build_isolated_impurity(n)),
    }
    h = makers[name]()
    return h, lie_closure(h.strings, limit=DEFAULT_LIMIT)


def test_criterion_1_x_only_exact():
    t0 = time.perf_counter()
    dims = {n: closure("x_only", n)[1] for n in range(2, 9)}
    elapsed = time.perf_counter() - t0
    ok = all(b.closed and b.dimension == 2 * n + 1 for n, b in dims.items()) and elapsed < 5
    got = ", ".join(f"N={n}: {b.dimension}" for n, b in dims.items())
    record(1, ok, f"x-only dimension vs 2N+1 ({got}; {elapsed:.2f} s)")
    assert ok, f"expected 2N+1, measured {got}"


def test_criterion_2_free_upper_bound():
    t0 = time.perf_counter()
    rows = []
    for fam in ("free_chain", "free_star"):
        for n in range(2, 7):
            b = closure(fam, n)[1]
            rows.append((fam, n, b.dimension, b.closed, upper_bound_free(n)))
    elapsed = time.perf_counter() - t0
    ok = all(closed and d <= bound for _, _, d, closed, bound in rows) and elapsed < 30
    got = ", ".join(f"{f} N={n}: {d}<={bd}" for f, n, d, _, bd in rows)
    record(2, ok, f"{got}; {elapsed:.1f} s")
    assert ok


def test_criterion_3_interacting_lower_bound():
    t0 = time.perf_counter()
    rows = []
    for fam in ("coulomb_chain", "aim"):
        for n in (3, 4, 5):
            b = closure(fam, n)[1]
            rows.append((fam, n, b.dimension, b.closed, lower_bound_interacting(n)))
    elapsed = time.perf_counter() - t0
    ok = all(d >= bound for *_, d, _, bound in rows) and elapsed < 600
    got = ", ".join(f"{f} N={n}: {d}>={bd}{'' if c else ' (partial)'}" for f, n, d, c, bd in rows)
    record(3, ok, f"{got}; {elapsed:.1f} s")
    assert ok


def test_criterion_4_witnesses():
    details, ok = [], True
    for n in (3, 4):
        r = enumerate_witness_report(coulomb_chain(n), closure_basis=closure("coulomb_chain", n)[1])
        good = r["witness_count"] == 2 ** (n - 1) and r["distinct"] and r["members_present"] == r["witness_count"]
        ok &= good and r["replay_ok"]
        details.append(f"N={n}: {r['members_present']}/{r['witness_count']} in closure")
    for n in range(5, 11):
        t0 = time.perf_counter()
        r = enumerate_witness_report(coulomb_chain(n))
        elapsed = time.perf_counter() - t0
        ok &= r["witness_count"] == 2 ** (n - 1) and r["distinct"] and r["replay_ok"] and elapsed < 5
        if n == 10:
            details.append(f"N=10: {r['witness_count']} distinct, replayed in {elapsed:.2f} s")
    record(4, ok, "; ".join(details))
    assert ok


def test_criterion_5_k_elements():
    t0 = time.perf_counter()
    details, ok = [], True
    for n in (3, 4, 5):
        h, basis = closure("coulomb_chain", n)
        split = split_by_involution(basis, h)
        elems = theorem2_k_elements(coulomb_chain(n), None, split)
        k_set = set(split.k_basis)
        good = len(elems) >= 2 ** (n - 3) and all(y_count_parity(e) == 1 and e in k_set for e in elems)
        ok &= good
        details.append(f"N={n}: {len(elems)}>={2 ** (n - 3)} ({split.bracket_check} brackets)")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60
    record(5, ok, f"{'; '.join(details)}; {elapsed:.1f} s")
    assert ok


def test_criterion_6_khk_fidelity():
    t0 = time.perf_counter()
    cases = {
        "X+Z": QubitHamiltonian.from_pairs(1, [(1.0, "X"), (1.0, "Z")]),
        "free chain N=2": jw_transform(build_free(HoppingGraph.chain(2))),
        "aim N=2": jw_transform(aim(2)),
    }
    details, ok = [], True
    for name, h in cases.items():
        basis = lie_closure(h.strings)
        split = split_by_involution(basis, h)
        res = khk_decompose(h, split, cartan_subalgebra(split, h), KHKConfig())
        if not res.converged:
            ok = False
            details.append(f"{name}: no convergence ({res.residual:.1e})")
            continue
        K, dense = k_unitary(res), to_dense(h)
        # one circuit (K, h_terms) for every t
        errs = [
            np.linalg.norm(fast_forward_evolve(res, t, K=K) - exact_exponential(dense, t))
            for t in (0.1, 1.0, 10.0, 100.0)
        ]
        ok &= max(errs) <= 1e-6
        details.append(f"{name}: max error {max(errs):.1e}, depth {res.depth}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120
    record(6, ok, f"{'; '.join(details)}; {elapsed:.1f} s")
    assert ok


def test_criterion_7_orbital_rotation():
    t0 = time.perf_counter()
    jw = {n: closure("impurity_jw", n)[1] for n in (4, 5)}
    rot = closure("impurity_rotated", 5)[1]
    elapsed = time.perf_counter() - t0
    quad = all(b.closed and b.dimension <= 8 * n * n for n, b in jw.items())
    ratio = rot.dimension / jw[5].dimension
    ok = quad and ratio >= 4 and elapsed < 600
    record(
        7, ok,
        f"JW N=4: {jw[4].dimension}<=128, N=5: {jw[5].dimension}<=200; "
        f"rotated N=5: {rot.dimension} ({ratio:.0f}x); {elapsed:.1f} s",
    )
    assert ok


def test_criterion_8_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    mismatches = 0
    cases = 0
    while cases < 200:
        n = int(rng.integers(1, 4))
        gens = {
            PauliString.from_code(n, int(c)) for c in rng.integers(1, 4**n, size=int(rng.integers(1, 5)))
        }
        gens = sorted(gens)
        cases += 1
        if lie_closure(gens).dimension != brute_closure_rank(gens, cap=3):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 60
    record(8, ok, f"{cases - mismatches}/{cases} generator sets agree; {elapsed:.1f} s")
    assert ok


if __name__ == "__main__":
    import sys

    import pytest

    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)
