"""Dense-matrix ground truth for small qubit counts.

Nothing here uses the symplectic arithmetic of :mod:`hamalg.pauli`; words are
turned into matrices letter by letter and everything else is plain linear
algebra, so these routines can be used to check the fast paths.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from functools import reduce

import numpy as np

from .operators import PauliSum, QubitHamiltonian
from .pauli import PauliString

MAX_DENSE_QUBITS = 12
RANK_TOL = 1e-9
CAR_TOL = 1e-10

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_size(n: int, cap: int = MAX_DENSE_QUBITS) -> None:
    if n > cap:
        raise ValueError(f"{n} qubits exceeds the dense cap of {cap}")


def pauli_matrix(label: str) -> np.ndarray:
    """Kronecker product with the first letter as the most significant factor."""
    return reduce(np.kron, (_SINGLE[c] for c in label))


def to_dense(op: PauliString | QubitHamiltonian | PauliSum) -> np.ndarray:
    if isinstance(op, PauliString):
        _check_size(op.n_qubits)
        return pauli_matrix(op.label)
    if isinstance(op, QubitHamiltonian):
        items = [(t.coefficient, t.string) for t in op.terms]
    elif isinstance(op, PauliSum):
        items = [(c, s) for s, c in op.terms.items()]
    else:
        raise TypeError(f"cannot densify {type(op).__name__}")
    _check_size(op.n_qubits)
    dim = 2**op.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for c, s in items:
        out += c * pauli_matrix(s.label)
    return out


def exact_exponential(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(i t H)`` for Hermitian ``H`` via eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    scale = max(1.0, float(np.abs(h).max(initial=0.0)))
    if np.abs(h - h.conj().T).max(initial=0.0) > 1e-10 * scale:
        raise ValueError("exact_exponential needs a Hermitian matrix")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * t * w)) @ v.conj().T


def unitarity_defect(u: np.ndarray) -> float:
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


def _realify(m: np.ndarray) -> np.ndarray:
    return np.concatenate([m.real.ravel(), m.imag.ravel()])


def brute_closure_rank(generators: Iterable[PauliString | np.ndarray], cap: int = 4) -> int:
    """Dimension of the real Lie algebra spanned by nested commutators of ``i * g``.

    Commutators are formed densely and orthonormalised against the running span.
    """
    mats = []
    for g in generators:
        if isinstance(g, PauliString):
            _check_size(g.n_qubits, cap)
            mats.append(1j * pauli_matrix(g.label))
        else:
            mats.append(np.asarray(g, dtype=complex))
    if not mats:
        return 0
    ortho: list[np.ndarray] = []

    def absorb(m: np.ndarray) -> bool:
        v = _realify(m)
        norm0 = np.linalg.norm(v)
        if norm0 == 0:
            return False
        v = v / norm0
        for _ in range(2):
            for b in ortho:
                v = v - (b @ v) * b
        norm = np.linalg.norm(v)
        if norm > RANK_TOL:
            ortho.append(v / norm)
            return True
        return False

    elements = [m for m in mats if absorb(m)]
    frontier = list(elements)
    while frontier:
        fresh = []
        for a in frontier:
            for b in elements:
                c = a @ b - b @ a
                if absorb(c):
                    fresh.append(c)
        elements.extend(fresh)
        frontier = fresh
    return len(ortho)


def car_check(pairs: Sequence[tuple[np.ndarray, np.ndarray]], tol: float = CAR_TOL) -> bool:
    """True iff ``{c_p, c_q^+} = delta_pq`` and ``{c_p, c_q} = 0`` for all listed modes."""
    if not pairs:
        return True
    dim = pairs[0][0].shape[0]
    eye = np.eye(dim)
    for p, (cp, _) in enumerate(pairs):
        for q, (cq, cq_dag) in enumerate(pairs):
            target = eye if p == q else 0
            if np.abs(cp @ cq_dag + cq_dag @ cp - target).max() > tol:
                return False
            if np.abs(cp @ cq + cq @ cp).max() > tol:
                return False
    return True


def mode_pairs(modes: dict) -> list[tuple[np.ndarray, np.ndarray]]:
    """Dense ``(c, c^+)`` for every entry of a mode map from :mod:`hamalg.models`."""
    out = []
    for key in sorted(modes):
        c = to_dense(modes[key])
        out.append((c, c.conj().T))
    return out


def dense_closure_dimension(h: QubitHamiltonian) -> int:
    return brute_closure_rank(h.strings, cap=h.n_qubits)
