"""Pauli strings in symplectic (x-mask, z-mask) form.

Bit ``q`` of each mask refers to qubit ``q``; text labels put qubit 0 leftmost,
so ``PauliString.from_label("XZY")`` has X on qubit 0 and Y on qubit 2.
"""

from __future__ import annotations

from dataclasses import dataclass

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {bits: letter for letter, bits in _LETTER_BITS.items()}
_PHASES = (1, 1j, -1, -1j)


class DimensionMismatchError(ValueError):
    """Operands act on different numbers of qubits."""


def _popcount(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True, slots=True)
class PauliString:
    """A Pauli word with no phase. Equality and hashing use the masks only."""

    n_qubits: int
    x: int
    z: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        full = (1 << self.n_qubits) - 1
        if self.x & ~full or self.z & ~full or self.x < 0 or self.z < 0:
            raise ValueError(f"masks do not fit in {self.n_qubits} qubits")

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        label = label.strip().upper()
        if not label:
            raise ValueError("empty Pauli label")
        x = z = 0
        for q, letter in enumerate(label):
            try:
                bx, bz = _LETTER_BITS[letter]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {letter!r} in {label!r}") from None
            x |= bx << q
            z |= bz << q
        return cls(len(label), x, z)

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_letters(cls, n_qubits: int, letters: dict[int, str]) -> PauliString:
        """Build from a sparse ``{qubit: letter}`` map; unlisted qubits carry I."""
        x = z = 0
        for q, letter in letters.items():
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit {q} out of range for {n_qubits} qubits")
            bx, bz = _LETTER_BITS[letter.upper()]
            x |= bx << q
            z |= bz << q
        return cls(n_qubits, x, z)

    @property
    def label(self) -> str:
        return "".join(self.letter(q) for q in range(self.n_qubits))

    def letter(self, q: int) -> str:
        return _BITS_LETTER[((self.x >> q) & 1, (self.z >> q) & 1)]

    @property
    def code(self) -> int:
        """Single integer key ``x | z << n`` used by the closure engine."""
        return self.x | (self.z << self.n_qubits)

    @classmethod
    def from_code(cls, n_qubits: int, code: int) -> PauliString:
        full = (1 << n_qubits) - 1
        return cls(n_qubits, code & full, code >> n_qubits)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def support(self) -> list[int]:
        v = self.x | self.z
        return [q for q in range(self.n_qubits) if (v >> q) & 1]

    def xy_support(self) -> list[int]:
        """Qubits carrying X or Y."""
        return [q for q in range(self.n_qubits) if (self.x >> q) & 1]

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"

    def __lt__(self, other: PauliString) -> bool:
        return (self.n_qubits, self.label) < (other.n_qubits, other.label)


@dataclass(frozen=True, slots=True)
class PhasedPauli:
    """``i**power * string`` with ``power`` taken mod 4."""

    power: int
    string: PauliString

    def __post_init__(self):
        object.__setattr__(self, "power", self.power % 4)

    @property
    def phase(self) -> complex:
        return _PHASES[self.power]

    def __repr__(self) -> str:
        sign = ("+", "+i", "-", "-i")[self.power]
        return f"PhasedPauli({sign}{self.string.label})"


@dataclass(frozen=True, slots=True)
class PauliTerm:
    coefficient: float
    string: PauliString


def _check_sizes(a: PauliString, b: PauliString) -> None:
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatchError(
            f"Pauli strings act on {a.n_qubits} and {b.n_qubits} qubits"
        )


def commutes(a: PauliString, b: PauliString) -> bool:
    _check_sizes(a, b)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) % 2 == 0


def product_power(a: PauliString, b: PauliString) -> int:
    """Exponent ``k`` with ``a @ b == i**k * (a xor b)``."""
    x3, z3 = a.x ^ b.x, a.z ^ b.z
    return (
        _popcount(a.x & a.z)
        + _popcount(b.x & b.z)
        + 2 * _popcount(a.z & b.x)
        - _popcount(x3 & z3)
    ) % 4


def multiply(a: PhasedPauli | PauliString, b: PhasedPauli | PauliString) -> PhasedPauli:
    """Exact product of two Pauli words including the phase."""
    if isinstance(a, PauliString):
        a = PhasedPauli(0, a)
    if isinstance(b, PauliString):
        b = PhasedPauli(0, b)
    sa, sb = a.string, b.string
    _check_sizes(sa, sb)
    power = a.power + b.power + product_power(sa, sb)
    return PhasedPauli(power, PauliString(sa.n_qubits, sa.x ^ sb.x, sa.z ^ sb.z))


def commutator(a: PauliString, b: PauliString) -> PhasedPauli | None:
    """Return ``p`` with ``[a, b] == 2 * p.phase * p.string``, or None if they commute."""
    if commutes(a, b):
        return None
    return multiply(a, b)


def y_count_parity(a: PauliString) -> int:
    return _popcount(a.x & a.z) % 2


def jw_arrow_string(
    q_left: int, letter_left: str, q_right: int, letter_right: str, n: int
) -> PauliString:
    """Endpoint letters on two qubits with Z on every qubit strictly between.

    Argument order does not matter: each letter stays attached to its qubit.
    """
    if q_left == q_right:
        raise ValueError("arrow string needs two distinct qubits")
    for q in (q_left, q_right):
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} out of range for {n} qubits")
    for letter in (letter_left, letter_right):
        if letter.upper() not in "XYZ" or len(letter) != 1:
            raise ValueError(f"arrow endpoints take X, Y or Z, got {letter!r}")
    lo, hi = sorted((q_left, q_right))
    z = ((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1)
    s = PauliString(n, 0, z)
    ends = PauliString.from_letters(n, {q_left: letter_left, q_right: letter_right})
    return PauliString(n, ends.x, s.z ^ ends.z)


def phase_free_product(*strings: PauliString) -> PauliString:
    """Product of several words with the phase dropped."""
    out = strings[0]
    for s in strings[1:]:
        _check_sizes(out, s)
        out = PauliString(out.n_qubits, out.x ^ s.x, out.z ^ s.z)
    return out


def parse_pauli(text: str | PauliString) -> PauliString:
    if isinstance(text, PauliString):
        return text
    return PauliString.from_label(text)
