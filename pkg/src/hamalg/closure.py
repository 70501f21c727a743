"""Lie closure of a set of Pauli strings.

The commutator of two Pauli words is (up to a factor) another Pauli word, so the
generated algebra is spanned by a set of words and its dimension is the size of
that set. The engine below is a worklist fixpoint over bit-packed codes
``x | z << n``; each sweep commutes the newly found words against everything
found so far.
"""

from __future__ import annotations

import os
import time
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .pauli import DimensionMismatchError, PauliString, commutator

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

DEFAULT_LIMIT = 2_000_000
_BITMAP_MAX_BITS = 26
_PAIR_BUDGET = 1 << 22


@dataclass(frozen=True)
class LieBasis:
    """Insertion-ordered Pauli basis of a generated algebra.

    ``closed`` is False when the size limit stopped the fixpoint early; the
    dimension is then only a lower bound for the true algebra.
    """

    n_qubits: int
    strings: tuple[PauliString, ...]
    closed: bool
    sweeps: int = 0
    wall_ms: int = 0
    _members: frozenset = field(default=frozenset(), repr=False, compare=False)

    def __post_init__(self):
        if not self._members:
            object.__setattr__(self, "_members", frozenset(self.strings))

    @property
    def dimension(self) -> int:
        return len(self.strings)

    def __len__(self) -> int:
        return len(self.strings)

    def __iter__(self):
        return iter(self.strings)

    def __contains__(self, s: PauliString) -> bool:
        return contains(self, s)


def contains(basis: LieBasis, s: PauliString) -> bool:
    if s.n_qubits != basis.n_qubits:
        raise DimensionMismatchError(
            f"basis acts on {basis.n_qubits} qubits, query on {s.n_qubits}"
        )
    return s in basis._members


def upper_bound_free(n_sites: int) -> int:
    if n_sites < 1:
        raise ValueError("N must be positive")
    return 2 * n_sites * (2 * n_sites - 1)


def lower_bound_interacting(n_sites: int) -> int:
    if n_sites < 1:
        raise ValueError("N must be positive")
    return 2 ** (n_sites - 1)


def default_threads() -> int:
    env = os.environ.get("DLA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _validate_generators(generators: Iterable[PauliString]) -> list[PauliString]:
    gens: dict[PauliString, None] = {}
    for g in generators:
        gens.setdefault(g, None)
    if not gens:
        raise ValueError("need at least one generator")
    n = next(iter(gens)).n_qubits
    for g in gens:
        if g.n_qubits != n:
            raise DimensionMismatchError("generators act on different qubit counts")
        if g.is_identity:
            raise ValueError("the identity cannot be an algebra generator")
    return list(gens)


def lie_closure(
    generators: Iterable[PauliString],
    limit: int | None = DEFAULT_LIMIT,
    n_jobs: int | None = None,
) -> LieBasis:
    """Close ``generators`` under commutators.

    Stops with ``closed=False`` once ``limit`` strings are collected.
    """
    gens = _validate_generators(generators)
    n = gens[0].n_qubits
    limit = limit if limit is not None else 4**n
    if limit < 1:
        raise ValueError("limit must be positive")
    t0 = time.perf_counter()
    threads = n_jobs or default_threads()
    if numba is not None and 2 * n <= _BITMAP_MAX_BITS and threads == 1:
        codes, closed, sweeps = _closure_compiled(n, [g.code for g in gens], limit)
        strings = tuple(PauliString.from_code(n, int(c)) for c in codes)
    elif 2 * n <= 64:
        codes, closed, sweeps = _closure_packed(n, [g.code for g in gens], limit, threads)
        strings = tuple(PauliString.from_code(n, int(c)) for c in codes)
    else:
        strings, closed, sweeps = _closure_python(gens, limit)
    wall = int(round((time.perf_counter() - t0) * 1000))
    return LieBasis(n, strings, closed, sweeps, wall)


class _Membership:
    def __init__(self, n: int):
        self.bitmap = np.zeros(1 << (2 * n), dtype=bool) if 2 * n <= _BITMAP_MAX_BITS else None
        self.members: set[int] = set()

    def filter_new(self, cand: np.ndarray) -> np.ndarray:
        if self.bitmap is not None:
            return cand[~self.bitmap[cand]]
        cand = _first_occurrence_unique(cand)
        return np.array([c for c in cand.tolist() if c not in self.members], dtype=np.uint64)

    def add(self, codes: np.ndarray) -> None:
        if self.bitmap is not None:
            self.bitmap[codes] = True
        else:
            self.members.update(codes.tolist())


def _first_occurrence_unique(a: np.ndarray) -> np.ndarray:
    if a.size == 0:
        return a
    _, idx = np.unique(a, return_index=True)
    return a[np.sort(idx)]


def _swap_halves(codes: np.ndarray, n: int) -> np.ndarray:
    full = np.uint64((1 << n) - 1)
    shift = np.uint64(n)
    return ((codes & full) << shift) | (codes >> shift)


def _candidates(
    basis: np.ndarray, swapped: np.ndarray, lo: int, hi: int, member: _Membership
) -> np.ndarray:
    """Products of basis[i] (lo <= i < hi) with every basis[j], j < i, that anticommute."""
    a = basis[lo:hi]
    out = []
    if lo > 0:
        anti = (np.bitwise_count(a[:, None] & swapped[None, :lo]) & 1).astype(bool)
        i, j = np.nonzero(anti)
        out.append(member.filter_new(a[i] ^ basis[j]))
    if hi - lo > 1:
        anti = (np.bitwise_count(a[:, None] & swapped[None, lo:hi]) & 1).astype(bool)
        anti &= np.tri(hi - lo, k=-1, dtype=bool)
        i, j = np.nonzero(anti)
        out.append(member.filter_new(a[i] ^ a[j]))
    if not out:
        return np.empty(0, dtype=np.uint64)
    return _first_occurrence_unique(np.concatenate(out))


def _closure_packed(
    n: int, gen_codes: list[int], limit: int, threads: int
) -> tuple[np.ndarray, bool, int]:
    member = _Membership(n)
    basis = np.array(gen_codes[:limit], dtype=np.uint64)
    member.add(basis)
    capacity = max(1024, 2 * basis.size)
    store = np.zeros(capacity, dtype=np.uint64)
    store[: basis.size] = basis
    size = basis.size
    closed = len(gen_codes) <= limit
    start, sweeps = 0, 0
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        while closed and start < size:
            sweeps += 1
            end = size
            current = store[:end].copy()
            swapped = _swap_halves(current, n)
            block = max(1, min(end - start, _PAIR_BUDGET // max(end, 1)))
            ranges = [(lo, min(lo + block, end)) for lo in range(start, end, block)]
            if pool is not None:
                results = pool.map(lambda r: _candidates(current, swapped, r[0], r[1], member), ranges)
            else:
                results = (_candidates(current, swapped, lo, hi, member) for lo, hi in ranges)
            for cand in results:
                new = member.filter_new(cand)
                if new.size == 0:
                    continue
                if size + new.size > limit:
                    new = new[: limit - size]
                    closed = False
                if size + new.size > store.size:
                    grown = np.zeros(max(2 * store.size, size + new.size), dtype=np.uint64)
                    grown[:size] = store[:size]
                    store = grown
                store[size : size + new.size] = new
                member.add(new)
                size += new.size
                if not closed:
                    break
            start = end
    finally:
        if pool is not None:
            pool.shutdown()
    return store[:size], closed, sweeps


if numba is not None:
    from llvmlite import ir
    from numba import types
    from numba.extending import intrinsic

    @intrinsic
    def _popcount(typingctx, x):
        def codegen(context, builder, signature, args):
            fn = builder.module.declare_intrinsic("llvm.ctpop", [ir.IntType(64)])
            return builder.call(fn, args)

        return types.uint64(types.uint64), codegen

    @numba.njit(cache=True)
    def _sweep_kernel(store, size, start, end, n, bitmap, limit):
        # branchless anticommutation test; only genuinely new words take the branch
        full = np.uint64((1 << n) - 1)
        shift = np.uint64(n)
        one = np.uint64(1)
        for i in range(start, end):
            a = store[i]
            a_swapped = ((a & full) << shift) | (a >> shift)
            for j in range(i):
                b = store[j]
                p = a ^ b
                if (_popcount(a_swapped & b) & one) & ~np.uint64(bitmap[p]):
                    if size >= limit:
                        return size, False
                    bitmap[p] = True
                    store[size] = p
                    size += 1
        return size, True


def _closure_compiled(n: int, gen_codes: list[int], limit: int) -> tuple[np.ndarray, bool, int]:
    capacity = min(limit, (1 << (2 * n)) - 1)
    store = np.zeros(max(capacity, len(gen_codes)), dtype=np.uint64)
    bitmap = np.zeros(1 << (2 * n), dtype=np.bool_)
    k = min(len(gen_codes), limit)
    store[:k] = np.array(gen_codes[:k], dtype=np.uint64)
    bitmap[store[:k]] = True
    size, closed = k, len(gen_codes) <= limit
    start, sweeps = 0, 0
    while closed and start < size:
        sweeps += 1
        end = size
        size, closed = _sweep_kernel(store, size, start, end, n, bitmap, limit)
        start = end
    return store[:size], closed, sweeps


def _closure_python(gens: list[PauliString], limit: int) -> tuple[tuple[PauliString, ...], bool, int]:
    basis = list(gens[:limit])
    seen = set(basis)
    closed = len(gens) <= limit
    start, sweeps = 0, 0
    while closed and start < len(basis):
        sweeps += 1
        end = len(basis)
        for i in range(start, end):
            for j in range(i):
                c = commutator(basis[i], basis[j])
                if c is not None and c.string not in seen:
                    if len(basis) >= limit:
                        closed = False
                        break
                    seen.add(c.string)
                    basis.append(c.string)
            if not closed:
                break
        start = end
    return tuple(basis), closed, sweeps


def hamiltonian_algebra(hamiltonian, limit: int | None = DEFAULT_LIMIT, n_jobs: int | None = None) -> LieBasis:
    """Closure of the Pauli strings appearing in a ``QubitHamiltonian``."""
    return lie_closure(hamiltonian.strings, limit=limit, n_jobs=n_jobs)


def bound_report(
    dimension: int, closed: bool, n_sites: int | None, kind: str | None
) -> dict:
    """Dimension bounds next to a measured dimension.

    ``kind`` is ``"free"`` (quadratic ceiling), ``"interacting"`` (exponential
    floor) or None. A partial (unclosed) dimension still certifies the floor but
    says nothing about the ceiling.
    """
    free_upper = upper_bound_free(n_sites) if kind == "free" and n_sites else None
    inter_lower = lower_bound_interacting(n_sites) if kind == "interacting" and n_sites else None
    satisfied = True
    if free_upper is not None:
        satisfied = closed and dimension <= free_upper
    if inter_lower is not None:
        satisfied = dimension >= inter_lower
    return {"free_upper": free_upper, "interacting_lower": inter_lower, "satisfied": satisfied}
