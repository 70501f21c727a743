"""Weighted sums of Pauli strings.

``PauliSum`` carries complex coefficients and is used for the symbolic
expansion of fermion operators. ``QubitHamiltonian`` is the real, Hermitian,
identity-free end product that the rest of the package consumes.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .pauli import PauliString, PauliTerm, PhasedPauli, multiply

PRUNE_TOL = 1e-12


class PauliSum:
    """Complex linear combination of Pauli strings on a fixed qubit count."""

    __slots__ = ("n_qubits", "terms")

    def __init__(self, n_qubits: int, terms: Mapping[PauliString, complex] | None = None):
        self.n_qubits = n_qubits
        self.terms: dict[PauliString, complex] = {}
        for s, c in (terms or {}).items():
            self._add(s, c)

    @classmethod
    def from_phased(cls, p: PhasedPauli, coeff: complex = 1.0) -> PauliSum:
        return cls(p.string.n_qubits, {p.string: coeff * p.phase})

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> PauliSum:
        return cls(n_qubits, {PauliString.identity(n_qubits): coeff})

    def _add(self, s: PauliString, c: complex) -> None:
        if s.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch in PauliSum")
        self.terms[s] = self.terms.get(s, 0) + c

    def copy(self) -> PauliSum:
        out = PauliSum(self.n_qubits)
        out.terms = dict(self.terms)
        return out

    def __add__(self, other: PauliSum) -> PauliSum:
        out = self.copy()
        for s, c in other.terms.items():
            out._add(s, c)
        return out

    def __sub__(self, other: PauliSum) -> PauliSum:
        return self + other * -1

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            out = PauliSum(self.n_qubits)
            for sa, ca in self.terms.items():
                for sb, cb in other.terms.items():
                    p = multiply(sa, sb)
                    out._add(p.string, ca * cb * p.phase)
            return out
        out = PauliSum(self.n_qubits)
        out.terms = {s: c * other for s, c in self.terms.items()}
        return out

    __rmul__ = __mul__

    def __matmul__(self, other: PauliSum) -> PauliSum:
        return self * other

    def dagger(self) -> PauliSum:
        out = PauliSum(self.n_qubits)
        out.terms = {s: complex(c).conjugate() for s, c in self.terms.items()}
        return out

    def simplify(self, tol: float = PRUNE_TOL) -> PauliSum:
        out = PauliSum(self.n_qubits)
        out.terms = {s: c for s, c in self.terms.items() if abs(c) > tol}
        return out

    def is_zero(self, tol: float = PRUNE_TOL) -> bool:
        return not self.simplify(tol).terms

    def __repr__(self) -> str:
        body = " + ".join(f"({c:.4g}){s.label}" for s, c in sorted(self.terms.items()))
        return f"PauliSum({body or '0'})"


@dataclass
class QubitHamiltonian:
    """Real combination of distinct non-identity Pauli strings."""

    n_qubits: int
    terms: list[PauliTerm] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for t in self.terms:
            if t.string.n_qubits != self.n_qubits:
                raise ValueError("term acts on the wrong number of qubits")
            if t.string.is_identity:
                raise ValueError("identity term in QubitHamiltonian")
            if t.string in seen:
                raise ValueError(f"duplicate term {t.string.label}")
            if not math.isfinite(t.coefficient) or t.coefficient == 0:
                raise ValueError(f"coefficient of {t.string.label} must be finite and nonzero")
            seen.add(t.string)

    @classmethod
    def from_pairs(
        cls, n_qubits: int, pairs: Iterable[tuple[float, PauliString | str]], tol: float = PRUNE_TOL
    ) -> QubitHamiltonian:
        """Merge like terms, drop identity and near-zero coefficients; first-seen order is kept."""
        acc: dict[PauliString, float] = {}
        for c, s in pairs:
            if isinstance(s, str):
                s = PauliString.from_label(s)
            acc[s] = acc.get(s, 0.0) + float(c)
        terms = [
            PauliTerm(c, s) for s, c in acc.items() if not s.is_identity and abs(c) > tol
        ]
        return cls(n_qubits, terms)

    @classmethod
    def from_pauli_sum(cls, op: PauliSum, tol: float = PRUNE_TOL) -> QubitHamiltonian:
        """Convert a Hermitian ``PauliSum``; the identity component is discarded."""
        pairs = []
        for s, c in op.terms.items():
            c = complex(c)
            if abs(c.imag) > 1e-9:
                raise ValueError(f"operator is not Hermitian: {s.label} has coefficient {c}")
            pairs.append((c.real, s))
        return cls.from_pairs(op.n_qubits, pairs, tol)

    @property
    def strings(self) -> list[PauliString]:
        return [t.string for t in self.terms]

    def coefficient(self, s: PauliString | str) -> float:
        if isinstance(s, str):
            s = PauliString.from_label(s)
        for t in self.terms:
            if t.string == s:
                return t.coefficient
        return 0.0

    def to_pauli_sum(self) -> PauliSum:
        return PauliSum(self.n_qubits, {t.string: t.coefficient for t in self.terms})

    def __len__(self) -> int:
        return len(self.terms)

    def as_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "terms": [[t.coefficient, t.string.label] for t in self.terms],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> QubitHamiltonian:
        n = int(data["n_qubits"])
        pairs = [(float(c), PauliString.from_label(lbl)) for c, lbl in data["terms"]]
        for _, s in pairs:
            if s.n_qubits != n:
                raise ValueError(f"term {s.label} does not have {n} qubits")
        return cls.from_pairs(n, pairs)


__all__ = ["PRUNE_TOL", "PauliSum", "QubitHamiltonian"]
