"""Estimator-style wrappers around the closure and Cartan pipelines."""

from __future__ import annotations

import math
from collections.abc import Iterable

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .cartan import (
    KHKConfig,
    cartan_subalgebra,
    fast_forward_evolve,
    k_unitary,
    khk_decompose,
    split_by_involution,
)
from .closure import DEFAULT_LIMIT, lie_closure
from .operators import QubitHamiltonian
from .pauli import DimensionMismatchError, PauliString, parse_pauli


def check_pauli_strings(X, n_qubits: int | None = None) -> list[PauliString]:
    """Accept a Hamiltonian, a list of strings/labels, or a single label."""
    if isinstance(X, QubitHamiltonian):
        strings = X.strings
    elif isinstance(X, (str, PauliString)):
        strings = [parse_pauli(X)]
    elif isinstance(X, Iterable):
        strings = [parse_pauli(x) for x in X]
    else:
        raise TypeError(f"cannot read Pauli strings from {type(X).__name__}")
    if not strings:
        raise ValueError("no Pauli strings given")
    n = strings[0].n_qubits if n_qubits is None else n_qubits
    if any(s.n_qubits != n for s in strings):
        raise DimensionMismatchError(f"expected every string to act on {n} qubits")
    return strings


def check_hamiltonian(H) -> QubitHamiltonian:
    if isinstance(H, QubitHamiltonian):
        return H
    if isinstance(H, dict):
        return QubitHamiltonian.from_dict(H)
    pairs = list(H)
    if not pairs:
        raise ValueError("empty Hamiltonian")
    pairs = [(float(c), parse_pauli(s)) for c, s in pairs]
    return QubitHamiltonian.from_pairs(pairs[0][1].n_qubits, pairs)


def check_times(t) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    if arr.ndim != 1 or not np.all(np.isfinite(arr)):
        raise ValueError("times must be a finite scalar or 1-D sequence")
    return arr


class HamiltonianAlgebra(TransformerMixin, BaseEstimator):
    """Lie closure of a Hamiltonian's terms.

    ``transform`` maps Pauli strings to a boolean membership vector.
    """

    def __init__(self, limit: int | None = DEFAULT_LIMIT, n_jobs: int | None = None):
        self.limit = limit
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        strings = check_pauli_strings(X)
        self.basis_ = lie_closure(strings, limit=self.limit, n_jobs=self.n_jobs)
        self.n_qubits_ = self.basis_.n_qubits
        self.dimension_ = self.basis_.dimension
        self.closed_ = self.basis_.closed
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        strings = check_pauli_strings(X, self.n_qubits_)
        return np.array([s in self.basis_ for s in strings], dtype=bool)


class CartanFastForward(BaseEstimator):
    """KHK fit of a Hamiltonian; ``predict(t)`` returns ``exp(iHt)`` as a dense matrix.

    ``predict`` with a sequence of times returns a stacked array of unitaries.
    """

    def __init__(
        self,
        gamma_base: float = math.pi,
        tolerance: float = 1e-10,
        max_iterations: int = 500,
        seed: int = 0,
        limit: int | None = DEFAULT_LIMIT,
    ):
        self.gamma_base = gamma_base
        self.tolerance = tolerance
        self.max_iterations = max_iterations
        self.seed = seed
        self.limit = limit

    def fit(self, H, y=None):
        H = check_hamiltonian(H)
        basis = lie_closure(H.strings, limit=self.limit)
        cfg = KHKConfig(self.gamma_base, self.tolerance, self.max_iterations, self.seed)
        self.hamiltonian_ = H
        self.split_ = split_by_involution(basis, H)
        self.subalgebra_ = cartan_subalgebra(self.split_, H)
        self.result_ = khk_decompose(H, self.split_, self.subalgebra_, cfg)
        self.residual_ = self.result_.residual
        self.converged_ = self.result_.converged
        self.K_ = k_unitary(self.result_) if self.converged_ else None
        return self

    def predict(self, t):
        check_is_fitted(self, "result_")
        times = check_times(t)
        out = np.stack([fast_forward_evolve(self.result_, s, K=self.K_) for s in times])
        return out[0] if np.ndim(t) == 0 else out


__all__ = [
    "CartanFastForward",
    "HamiltonianAlgebra",
    "check_hamiltonian",
    "check_pauli_strings",
    "check_times",
]
