"""Cartan decomposition of a Pauli-string Lie algebra and KHK fast-forwarding.

The involution used throughout is the transpose one, ``theta(iP) = -(iP)^T``.
On Pauli words it reads off the number of Y letters: odd words span ``k`` and
even words span ``m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

from .closure import LieBasis
from .operators import QubitHamiltonian
from .oracle import MAX_DENSE_QUBITS, pauli_matrix
from .pauli import PauliString, PauliTerm, commutes, y_count_parity

DEFAULT_EXHAUSTIVE_LIMIT = 4096
DEFAULT_BRACKET_SAMPLES = 200_000
KHK_MAX_QUBITS = 10


class InvolutionMismatchError(ValueError):
    """A Hamiltonian term is odd under the involution, so it cannot sit in ``m``."""


class CartanInvariantError(RuntimeError):
    pass


class KHKConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CartanSplit:
    k_basis: tuple[PauliString, ...]
    m_basis: tuple[PauliString, ...]
    bracket_check: str = "none"
    pairs_checked: int = 0

    @property
    def dim_k(self) -> int:
        return len(self.k_basis)

    @property
    def dim_m(self) -> int:
        return len(self.m_basis)


@dataclass(frozen=True)
class CartanSubalgebra:
    h_basis: tuple[PauliString, ...]

    @property
    def dim(self) -> int:
        return len(self.h_basis)


def _codes(strings) -> np.ndarray:
    return np.array([s.code for s in strings], dtype=np.uint64)


def _y_parity(codes: np.ndarray, n: int) -> np.ndarray:
    full = np.uint64((1 << n) - 1)
    return (np.bitwise_count((codes & full) & (codes >> np.uint64(n))) & 1).astype(bool)


def _swap(codes: np.ndarray, n: int) -> np.ndarray:
    full = np.uint64((1 << n) - 1)
    return ((codes & full) << np.uint64(n)) | (codes >> np.uint64(n))


def check_brackets(
    strings, n: int, pairs: np.ndarray | None = None, block: int = 512
) -> int:
    """Check closure and grading for anticommuting pairs; returns the number of pairs examined.

    For an anticommuting pair the bracket is proportional to the product word,
    which must be in the basis and have grade ``grade(a) + grade(b) + 1`` in Y
    parity, i.e. ``[k,k] -> k``, ``[m,m] -> k`` and ``[m,k] -> m``.
    """
    codes = _codes(strings)
    order = np.argsort(codes)
    sorted_codes = codes[order]
    par = _y_parity(codes, n)

    def check(ia: np.ndarray, ib: np.ndarray) -> None:
        a, b = codes[ia], codes[ib]
        anti = (np.bitwise_count(a & _swap(b, n)) & 1).astype(bool)
        if not anti.any():
            return
        ia, ib, c = ia[anti], ib[anti], (a ^ b)[anti]
        pos = np.searchsorted(sorted_codes, c)
        pos = np.minimum(pos, sorted_codes.size - 1)
        missing = sorted_codes[pos] != c
        if missing.any():
            i = int(np.argmax(missing))
            raise CartanInvariantError(
                f"[{strings[ia[i]].label}, {strings[ib[i]].label}] is outside the basis"
            )
        bad = _y_parity(c, n) != (par[ia] ^ par[ib] ^ True)
        if bad.any():
            i = int(np.argmax(bad))
            raise CartanInvariantError(
                f"[{strings[ia[i]].label}, {strings[ib[i]].label}] violates the grading"
            )

    if pairs is not None:
        check(pairs[:, 0], pairs[:, 1])
        return len(pairs)
    dim = codes.size
    total = 0
    for lo in range(0, dim, block):
        hi = min(lo + block, dim)
        ia, ib = np.nonzero(np.tri(hi - lo, dim, k=lo - 1, dtype=bool))
        check(ia + lo, ib)
        total += ia.size
    return total


def split_by_involution(
    basis: LieBasis | list[PauliString],
    hamiltonian: QubitHamiltonian,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    samples: int = DEFAULT_BRACKET_SAMPLES,
    seed: int = 0,
) -> CartanSplit:
    """Split a closed Pauli basis into odd-Y (``k``) and even-Y (``m``) words.

    Bracket conditions are checked on every pair up to ``exhaustive_limit``
    basis elements and on ``samples`` random pairs beyond that.
    """
    if isinstance(basis, LieBasis):
        if not basis.closed:
            raise ValueError("the basis was truncated; a Cartan split needs the full algebra")
        strings = list(basis.strings)
    else:
        strings = list(basis)
    if not strings:
        raise ValueError("empty basis")
    n = strings[0].n_qubits
    if hamiltonian.n_qubits != n:
        raise ValueError("Hamiltonian and basis act on different qubit counts")
    members = set(strings)
    for s in hamiltonian.strings:
        if y_count_parity(s):
            raise InvolutionMismatchError(
                f"{s.label} has an odd number of Y letters; the transpose involution puts it in k"
            )
        if s not in members:
            raise ValueError(f"Hamiltonian term {s.label} is not in the basis")
    k = tuple(s for s in strings if y_count_parity(s))
    m = tuple(s for s in strings if not y_count_parity(s))
    if 2 * n > 64:
        return CartanSplit(k, m, "none", 0)
    if len(strings) <= exhaustive_limit:
        checked = check_brackets(strings, n)
        mode = "exhaustive"
    else:
        rng = np.random.default_rng(seed)
        pairs = rng.integers(0, len(strings), size=(samples, 2))
        checked = check_brackets(strings, n, pairs)
        mode = "sampled"
    return CartanSplit(k, m, mode, checked)


def cartan_subalgebra(split: CartanSplit, hamiltonian: QubitHamiltonian) -> CartanSubalgebra:
    """Greedy maximal abelian subalgebra of ``m``.

    Seeded with the lexicographically first Hamiltonian term, then every ``m``
    word (in basis order) that commutes with all members so far is added.
    """
    m = list(split.m_basis)
    m_set = set(m)
    seeds = sorted(s for s in hamiltonian.strings if s in m_set)
    if not seeds:
        raise ValueError("no Hamiltonian term lies in m")
    seed = seeds[0]
    n = seed.n_qubits
    codes = _codes(m)
    swapped = _swap(codes, n)
    ok = np.ones(len(m), dtype=bool)
    h = []

    def add(s: PauliString) -> None:
        h.append(s)
        ok[:] &= (np.bitwise_count(swapped & np.uint64(s.code)) & 1) == 0

    add(seed)
    for i, s in enumerate(m):
        if ok[i] and s != seed:
            add(s)
    for s in m:
        if s not in h and all(commutes(s, x) for x in h):
            raise CartanInvariantError(f"{s.label} commutes with all of h but was left out")
    return CartanSubalgebra(tuple(h))


@dataclass(frozen=True)
class KHKConfig:
    gamma_base: float = math.pi
    tolerance: float = 1e-10
    max_iterations: int = 500
    seed: int = 0
    rational_tol: float = 1e-9
    max_denominator: int = 64

    def __post_init__(self):
        if self.tolerance <= 0:
            raise KHKConfigError("tolerance must be positive")
        if self.max_iterations < 1:
            raise KHKConfigError("max_iterations must be positive")
        if not math.isfinite(self.gamma_base) or self.gamma_base <= 0:
            raise KHKConfigError("gamma_base must be a positive real")

    def gammas(self, count: int) -> np.ndarray:
        g = np.array([self.gamma_base ** -(j + 1) for j in range(count)])
        for i in range(count):
            for j in range(i + 1, count):
                ratio = g[i] / g[j]
                approx = Fraction(ratio).limit_denominator(self.max_denominator)
                if abs(ratio - float(approx)) <= self.rational_tol * max(1.0, abs(ratio)):
                    raise KHKConfigError(
                        f"probe coefficients {i} and {j} have a near-rational ratio {approx}"
                    )
        return g


@dataclass(frozen=True)
class KHKResult:
    n_qubits: int
    k_basis: tuple[PauliString, ...]
    angles: tuple[float, ...]
    h_basis: tuple[PauliString, ...]
    h_terms: tuple[PauliTerm, ...]
    residual: float
    converged: bool
    iterations: int
    history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def depth(self) -> int:
        return len(self.k_basis) + len(self.h_basis)


class _Dense:
    """Dense matrices of the k words, the Hamiltonian and the probe."""

    def __init__(self, hamiltonian, k_basis, h_basis, gammas):
        n = hamiltonian.n_qubits
        self.dim = 2**n
        self.eye = np.eye(self.dim, dtype=complex)
        self.H = np.zeros((self.dim, self.dim), dtype=complex)
        for t in hamiltonian.terms:
            self.H += t.coefficient * pauli_matrix(t.string.label)
        self.K = [pauli_matrix(s.label) for s in k_basis]
        self.h = [pauli_matrix(s.label) for s in h_basis]
        self.v = sum((g * m for g, m in zip(gammas, self.h)), np.zeros_like(self.H))

    def factor(self, j: int, theta: float) -> np.ndarray:
        return math.cos(theta) * self.eye + 1j * math.sin(theta) * self.K[j]

    def unitary(self, angles) -> np.ndarray:
        out = self.eye.copy()
        for j, th in enumerate(angles):
            out = out @ self.factor(j, th)
        return out

    def cost(self, angles) -> float:
        u = self.unitary(angles)
        return float(np.real(np.trace(self.v @ u.conj().T @ self.H @ u))) / self.dim

    def suffixes(self, angles) -> list[np.ndarray]:
        out = [self.eye]
        for j in range(len(angles) - 1, -1, -1):
            out.append(self.factor(j, angles[j]) @ out[-1])
        return out[::-1]

    def coefficients(self, L: np.ndarray, R: np.ndarray, j: int) -> tuple[float, float, float]:
        """``f(theta_j) = a + b cos(2 theta_j) + c sin(2 theta_j)`` around factor ``j``."""
        A = L.conj().T @ self.H @ L
        B = R @ self.v @ R.conj().T
        P = self.K[j]
        t1 = np.real(np.trace(B @ A))
        t2 = np.real(1j * np.trace(B @ (A @ P - P @ A)))
        t3 = np.real(np.trace(B @ P @ A @ P))
        scale = self.dim
        return (t1 + t3) / (2 * scale), (t1 - t3) / (2 * scale), t2 / (2 * scale)

    def gradient(self, angles) -> np.ndarray:
        suf = self.suffixes(angles)
        L = self.eye
        g = np.zeros(len(angles))
        for j, th in enumerate(angles):
            _, b, c = self.coefficients(L, suf[j + 1], j)
            g[j] = -2 * b * math.sin(2 * th) + 2 * c * math.cos(2 * th)
            L = L @ self.factor(j, th)
        return g

    def sweep(self, angles: np.ndarray) -> None:
        suf = self.suffixes(angles)
        L = self.eye
        for j in range(len(angles)):
            _, b, c = self.coefficients(L, suf[j + 1], j)
            if b * b + c * c > 0:
                angles[j] = 0.5 * (math.atan2(c, b) + math.pi)
            L = L @ self.factor(j, angles[j])

    def project(self, angles):
        u = self.unitary(angles)
        m = u.conj().T @ self.H @ u
        coeffs = [float(np.real(np.trace(p @ m))) / self.dim for p in self.h]
        rem = m - sum((c * p for c, p in zip(coeffs, self.h)), np.zeros_like(m))
        return coeffs, float(np.linalg.norm(rem)) / math.sqrt(self.dim)


def khk_decompose(
    hamiltonian: QubitHamiltonian,
    split: CartanSplit,
    h: CartanSubalgebra,
    cfg: KHKConfig | None = None,
) -> KHKResult:
    """Fit ``K = prod_j exp(i theta_j k_j)`` so that ``K^+ H K`` lies in ``h``.

    The cost ``Re Tr(v K^+ H K)`` is minimised over the angles. Along any one
    angle it is exactly ``a + b cos 2theta + c sin 2theta``, so coordinate
    descent can jump straight to the minimum of each coordinate; a quasi-Newton
    polish with exact gradients finishes the job.
    """
    cfg = cfg or KHKConfig()
    n = hamiltonian.n_qubits
    if n > KHK_MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the dense KHK cap of {KHK_MAX_QUBITS}")
    h_set = set(h.h_basis)
    if not h_set <= set(split.m_basis):
        raise ValueError("Cartan subalgebra is not contained in m")
    dense = _Dense(hamiltonian, split.k_basis, h.h_basis, cfg.gammas(h.dim))
    rng = np.random.default_rng(cfg.seed)
    angles = rng.uniform(-0.1, 0.1, size=split.dim_k)
    coeffs, residual = dense.project(angles)
    history = [residual]
    it = 0
    while residual > cfg.tolerance and it < cfg.max_iterations and split.dim_k:
        it += 1
        dense.sweep(angles)
        coeffs, residual = dense.project(angles)
        history.append(residual)
        if residual < 1e-4 or (len(history) > 20 and history[-20] - residual < 1e-3 * history[-20]):
            break
    if residual > cfg.tolerance and split.dim_k:
        opt = minimize(
            dense.cost, angles, jac=dense.gradient, method="BFGS",
            options={"gtol": 1e-15, "maxiter": cfg.max_iterations * 10},
        )
        angles = np.array(opt.x)
        it += int(opt.nit)
        coeffs, residual = dense.project(angles)
        history.append(residual)
        while residual > cfg.tolerance and it < cfg.max_iterations * 11:
            it += 1
            dense.sweep(angles)
            coeffs, residual = dense.project(angles)
            history.append(residual)
            if history[-2] - residual <= 0:
                break
    terms = tuple(PauliTerm(c, s) for c, s in zip(coeffs, h.h_basis))
    return KHKResult(
        n, tuple(split.k_basis), tuple(float(a) for a in angles), tuple(h.h_basis), terms,
        residual, residual <= cfg.tolerance, it, tuple(history),
    )


def k_unitary(res: KHKResult) -> np.ndarray:
    dim = 2**res.n_qubits
    out = np.eye(dim, dtype=complex)
    for s, th in zip(res.k_basis, res.angles):
        out = out @ (math.cos(th) * np.eye(dim) + 1j * math.sin(th) * pauli_matrix(s.label))
    return out


def fast_forward_evolve(res: KHKResult, t: float, n_qubits: int | None = None, K: np.ndarray | None = None) -> np.ndarray:
    """``K exp(i t h) K^+`` built from the fitted angles and Cartan coefficients.

    ``h`` is abelian, so its exponential is a product of single-word factors.
    Pass a precomputed ``K`` to avoid rebuilding it for every ``t``.
    """
    if not res.converged:
        raise ValueError(f"KHK fit did not converge (residual {res.residual:.3g})")
    n = res.n_qubits if n_qubits is None else n_qubits
    if n != res.n_qubits:
        raise ValueError("qubit count does not match the decomposition")
    if n > min(KHK_MAX_QUBITS, MAX_DENSE_QUBITS):
        raise ValueError(f"{n} qubits exceeds the dense cap")
    dim = 2**n
    K = k_unitary(res) if K is None else K
    inner = np.eye(dim, dtype=complex)
    for term in res.h_terms:
        a = t * term.coefficient
        inner = inner @ (math.cos(a) * np.eye(dim) + 1j * math.sin(a) * pauli_matrix(term.string.label))
    return K @ inner @ K.conj().T


def k_dimension_report(
    split: CartanSplit,
    witnesses: set[PauliString] | None = None,
    n_sites: int | None = None,
    interacting: bool = True,
    h: CartanSubalgebra | None = None,
) -> dict:
    bound = 2 ** (n_sites - 3) if interacting and n_sites is not None and n_sites >= 3 else None
    k_set = set(split.k_basis)
    found = None if witnesses is None else len(witnesses)
    return {
        "dim_k": split.dim_k,
        "dim_m": split.dim_m,
        "dim_h": None if h is None else h.dim,
        "theorem2_bound": bound,
        "bound_satisfied": None if bound is None else split.dim_k >= bound,
        "witnesses_in_k": None if witnesses is None else sum(1 for s in witnesses if s in k_set),
        "witness_count": found,
        "witness_bound_satisfied": None if bound is None or found is None else found >= bound,
    }


__all__ = [
    "CartanInvariantError",
    "CartanSplit",
    "CartanSubalgebra",
    "InvolutionMismatchError",
    "KHKConfig",
    "KHKConfigError",
    "KHKResult",
    "cartan_subalgebra",
    "check_brackets",
    "fast_forward_evolve",
    "k_dimension_report",
    "k_unitary",
    "khk_decompose",
    "split_by_involution",
]
