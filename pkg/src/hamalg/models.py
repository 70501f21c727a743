"""Spin-1/2 fermion models and their fermion-to-qubit mappings.

Sign convention: the lowering operator of the mode on qubit ``q`` is
``Z_0 ... Z_{q-1} (X_q + i Y_q) / 2``. With it a hopping term
``t (c_k^+ c_l + h.c.)`` becomes ``(t/2)(X Z..Z X + Y Z..Z Y)`` and
``4 s (n_a - 1/2)(n_b - 1/2)`` becomes ``s Z_a Z_b``.

Interaction records store that ``s`` directly, i.e. the coefficient of the
resulting ``Z Z`` term. The builders pick ``s`` so that the emitted qubit
Hamiltonians have the usual textbook prefactors for each model family.
"""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .operators import PauliSum, QubitHamiltonian
from .pauli import PauliString

UP, DOWN = "up", "down"
SPINS = (UP, DOWN)
MODEL_TAGS = ("free", "single_site_coulomb", "aim", "hubbard", "x_only", "custom")
HOPPING_FORMS = ("standard", "majorana_x")


@dataclass(frozen=True)
class HoppingGraph:
    n_sites: int
    edges: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("graph needs at least one site")
        seen = set()
        clean = []
        for k, l, t in self.edges:
            k, l = int(k), int(l)
            if k == l:
                raise ValueError(f"self-loop on site {k}")
            if not (0 <= k < self.n_sites and 0 <= l < self.n_sites):
                raise ValueError(f"edge ({k}, {l}) outside {self.n_sites} sites")
            key = frozenset((k, l))
            if key in seen:
                raise ValueError(f"duplicate edge ({k}, {l})")
            seen.add(key)
            clean.append((k, l, float(t)))
        object.__setattr__(self, "edges", tuple(clean))

    @classmethod
    def chain(cls, n_sites: int, t: float = 1.0) -> HoppingGraph:
        return cls(n_sites, tuple((i, i + 1, t) for i in range(n_sites - 1)))

    @classmethod
    def star(cls, n_sites: int, hub: int = 0, t: float | Sequence[float] = 1.0) -> HoppingGraph:
        leaves = [i for i in range(n_sites) if i != hub]
        amps = [t] * len(leaves) if isinstance(t, (int, float)) else list(t)
        if len(amps) != len(leaves):
            raise ValueError(f"need {len(leaves)} amplitudes, got {len(amps)}")
        return cls(n_sites, tuple((hub, leaf, a) for leaf, a in zip(leaves, amps)))

    @classmethod
    def square(cls, rows: int, cols: int, t: float = 1.0) -> HoppingGraph:
        edges = []
        for r in range(rows):
            for c in range(cols):
                i = r * cols + c
                if c + 1 < cols:
                    edges.append((i, i + 1, t))
                if r + 1 < rows:
                    edges.append((i, i + cols, t))
        return cls(rows * cols, tuple(edges))

    def neighbors(self, site: int) -> list[int]:
        out = []
        for k, l, _ in self.edges:
            if k == site:
                out.append(l)
            elif l == site:
                out.append(k)
        return sorted(out)

    def bfs_paths(self, source: int) -> dict[int, list[int]]:
        """Shortest paths from ``source``; ties go to the lowest-index neighbour."""
        paths = {source: [source]}
        queue = deque([source])
        while queue:
            v = queue.popleft()
            for w in self.neighbors(v):
                if w not in paths:
                    paths[w] = paths[v] + [w]
                    queue.append(w)
        return paths

    def is_connected(self) -> bool:
        return len(self.bfs_paths(0)) == self.n_sites


@dataclass(frozen=True)
class SiteOrdering:
    """Qubit positions ``u[k]`` (spin up) and ``d[k]`` (spin down) of each site."""

    u: tuple[int, ...]
    d: tuple[int, ...]

    def __post_init__(self):
        u, d = tuple(int(q) for q in self.u), tuple(int(q) for q in self.d)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "d", d)
        n = len(u)
        if n < 1 or len(d) != n:
            raise ValueError("u and d must list one qubit per site")
        if sorted(u + d) != list(range(2 * n)):
            raise ValueError("u and d must partition qubits 0..2N-1")
        for name, seq in (("u", u), ("d", d)):
            if any(a >= b for a, b in zip(seq[1:], seq[2:])):
                raise ValueError(f"{name}(1) < {name}(2) < ... must increase")

    @classmethod
    def block(cls, n_sites: int) -> SiteOrdering:
        return cls(tuple(range(n_sites)), tuple(range(n_sites, 2 * n_sites)))

    @classmethod
    def interleaved(cls, n_sites: int) -> SiteOrdering:
        return cls(tuple(range(0, 2 * n_sites, 2)), tuple(range(1, 2 * n_sites, 2)))

    @property
    def n_sites(self) -> int:
        return len(self.u)

    @property
    def n_qubits(self) -> int:
        return 2 * len(self.u)

    def qubit(self, site: int, spin: str) -> int:
        return (self.u if spin == UP else self.d)[site]

    def lane(self, spin: str) -> tuple[int, ...]:
        return self.u if spin == UP else self.d


@dataclass(frozen=True)
class FermionModel:
    """Hopping graph plus density-density interactions.

    ``interactions`` holds ``(k0, l0, s)`` for ``4 s (n_{k0,up} - 1/2)(n_{l0,down} - 1/2)``.
    ``potentials`` holds ``(site, spin, eps)`` for ``eps * n_{site,spin}``.
    """

    graph: HoppingGraph
    interactions: tuple[tuple[int, int, float], ...] = ()
    model_tag: str = "custom"
    hopping_form: str = "standard"
    potentials: tuple[tuple[int, str, float], ...] = field(default=())

    def __post_init__(self):
        if self.model_tag not in MODEL_TAGS:
            raise ValueError(f"unknown model tag {self.model_tag!r}")
        if self.hopping_form not in HOPPING_FORMS:
            raise ValueError(f"unknown hopping form {self.hopping_form!r}")
        if (self.model_tag == "x_only") != (self.hopping_form == "majorana_x"):
            raise ValueError("x_only models and the majorana_x hopping form go together")
        n = self.graph.n_sites
        inter = []
        for k0, l0, s in self.interactions:
            if not (0 <= int(k0) < n and 0 <= int(l0) < n):
                raise ValueError(f"interaction sites ({k0}, {l0}) outside {n} sites")
            inter.append((int(k0), int(l0), float(s)))
        object.__setattr__(self, "interactions", tuple(inter))
        pots = []
        for site, spin, eps in self.potentials:
            if spin not in SPINS or not 0 <= int(site) < n:
                raise ValueError(f"bad potential record ({site}, {spin})")
            pots.append((int(site), spin, float(eps)))
        object.__setattr__(self, "potentials", tuple(pots))

    @property
    def n_sites(self) -> int:
        return self.graph.n_sites


def build_free(graph: HoppingGraph) -> FermionModel:
    if graph.n_sites < 1:
        raise ValueError("empty graph")
    return FermionModel(graph, (), "free")


def build_single_site_coulomb(graph: HoppingGraph, k0: int, l0: int, U: float) -> FermionModel:
    """Free model plus ``4U (n_{k0,up} - 1/2)(n_{l0,down} - 1/2)``, i.e. ``U Z Z`` on qubits."""
    if U == 0:
        raise ValueError("interaction strength U must be nonzero")
    return FermionModel(graph, ((k0, l0, U),), "single_site_coulomb")


def build_aim(n_sites: int, V: Sequence[float], U: float) -> FermionModel:
    """Anderson impurity: impurity 0 hybridised with bath sites 1..N-1, ``U (n-1/2)(n-1/2)`` on site 0.

    The qubit form carries ``(U/4) Z_{u(0)} Z_{d(0)}``.
    """
    if n_sites < 2:
        raise ValueError("AIM needs at least one bath site")
    if len(V) != n_sites - 1:
        raise ValueError(f"need {n_sites - 1} hybridisations, got {len(V)}")
    graph = HoppingGraph(n_sites, tuple((0, i, v) for i, v in enumerate(V, start=1)))
    inter = ((0, 0, U / 4),) if U != 0 else ()
    return FermionModel(graph, inter, "aim")


def build_hubbard(graph: HoppingGraph, t: float, U: float) -> FermionModel:
    """Uniform hopping ``-t`` and on-site interaction giving ``4U Z_{u(i)} Z_{d(i)}`` per site."""
    if not graph.is_connected():
        raise ValueError("Hubbard model requires a connected hopping graph")
    g = HoppingGraph(graph.n_sites, tuple((k, l, -t) for k, l, _ in graph.edges))
    inter = tuple((i, i, 4 * U) for i in range(graph.n_sites)) if U != 0 else ()
    return FermionModel(g, inter, "hubbard")


def single_interaction_reduction(model: FermionModel, keep: int = 0) -> FermionModel:
    """Keep only one interaction record; the result is a single-site Coulomb model."""
    k0, l0, s = model.interactions[keep]
    return build_single_site_coulomb(model.graph, k0, l0, s)


def build_x_only_model(n_sites: int, U: float) -> FermionModel:
    """Chain with ``(c_i^+ - c_i)(c_j^+ + c_j)`` hopping; maps to ``X_i X_{i+1}`` under block JW."""
    if n_sites < 2:
        raise ValueError("x-only chain needs N >= 2")
    inter = ((0, 0, 4 * U),) if U != 0 else ()
    return FermionModel(HoppingGraph.chain(n_sites), inter, "x_only", "majorana_x")


def build_x_only(n_sites: int, U: float) -> QubitHamiltonian:
    """Qubit form of the X-only chain on ``2N`` qubits, block ordering."""
    if n_sites < 2:
        raise ValueError("x-only chain needs N >= 2")
    n = 2 * n_sites
    pairs = []
    for base in (0, n_sites):
        for i in range(n_sites - 1):
            pairs.append((1.0, PauliString.from_letters(n, {base + i: "X", base + i + 1: "X"})))
    pairs.append((4 * U, PauliString.from_letters(n, {0: "Z", n_sites: "Z"})))
    return QubitHamiltonian.from_pairs(n, pairs)


def build_isolated_impurity(n_sites: int, t: float = 1.0, U: float = 1.0) -> FermionModel:
    """Site 0 carries ``U n_up n_down`` and no hopping; sites 1..N-1 form a chain with ``-t``.

    ``U n n = 4(U/4)(n-1/2)(n-1/2) + (U/2)(n_up + n_down) - U/4``; the constant is dropped.
    """
    if n_sites < 3:
        raise ValueError("needs N >= 3 sites")
    edges = tuple((i, i + 1, -t) for i in range(1, n_sites - 1))
    return FermionModel(
        HoppingGraph(n_sites, edges),
        ((0, 0, U / 4),),
        "custom",
        potentials=((0, UP, U / 2), (0, DOWN, U / 2)),
    )


# --- mode operators --------------------------------------------------------


def lowering(n_qubits: int, q: int) -> PauliSum:
    """Jordan-Wigner annihilation operator for the mode stored on qubit ``q``."""
    z_prefix = (1 << q) - 1
    x_word = PauliString(n_qubits, 1 << q, z_prefix)
    y_word = PauliString(n_qubits, 1 << q, z_prefix | (1 << q))
    return PauliSum(n_qubits, {x_word: 0.5, y_word: 0.5j})


ModeMap = dict[tuple[int, str], PauliSum]


def jw_modes(ordering: SiteOrdering) -> ModeMap:
    n = ordering.n_qubits
    return {
        (k, spin): lowering(n, ordering.qubit(k, spin))
        for spin in SPINS
        for k in range(ordering.n_sites)
    }


def orbital_rotated_modes(ordering: SiteOrdering, pair: tuple[int, int] = (0, 1)) -> ModeMap:
    """Plain JW except sites ``pair`` are replaced by their symmetric/antisymmetric mix."""
    a, b = pair
    if a == b:
        raise ValueError("rotation pair needs two different sites")
    modes = jw_modes(ordering)
    r = 1 / math.sqrt(2)
    for spin in SPINS:
        ca, cb = modes[(a, spin)], modes[(b, spin)]
        modes[(a, spin)] = (ca + cb) * r
        modes[(b, spin)] = (ca - cb) * r
    return modes


def _number(c: PauliSum) -> PauliSum:
    return c.dagger() * c


def fermion_hamiltonian(model: FermionModel, modes: ModeMap, n_qubits: int) -> PauliSum:
    """Expand the second-quantised Hamiltonian in terms of the given mode operators."""
    h = PauliSum(n_qubits)
    half = PauliSum.identity(n_qubits, 0.5)
    for spin in SPINS:
        for k, l, t in model.graph.edges:
            ck, cl = modes[(k, spin)], modes[(l, spin)]
            if model.hopping_form == "standard":
                hop = ck.dagger() * cl
                h = h + (hop + hop.dagger()) * t
            else:
                i, j = (k, l) if k < l else (l, k)
                ci, cj = modes[(i, spin)], modes[(j, spin)]
                h = h + ((ci.dagger() - ci) * (cj.dagger() + cj)) * t
    for k0, l0, s in model.interactions:
        nu = _number(modes[(k0, UP)]) - half
        nd = _number(modes[(l0, DOWN)]) - half
        h = h + (nu * nd) * (4 * s)
    for site, spin, eps in model.potentials:
        h = h + _number(modes[(site, spin)]) * eps
    return h.simplify()


def _check_ordering(model: FermionModel, ordering: SiteOrdering) -> None:
    if ordering.n_sites != model.n_sites:
        raise ValueError(
            f"ordering covers {ordering.n_qubits} qubits but the model needs {2 * model.n_sites}"
        )


def jw_transform(model: FermionModel, ordering: SiteOrdering | None = None) -> QubitHamiltonian:
    ordering = ordering or SiteOrdering.block(model.n_sites)
    _check_ordering(model, ordering)
    h = fermion_hamiltonian(model, jw_modes(ordering), ordering.n_qubits)
    return QubitHamiltonian.from_pauli_sum(h)


def orbital_rotated_transform(
    model: FermionModel, ordering: SiteOrdering | None = None, pair: tuple[int, int] = (0, 1)
) -> QubitHamiltonian:
    if model.n_sites < 3:
        raise ValueError("orbital-rotated mapping needs N >= 3 sites")
    ordering = ordering or SiteOrdering.block(model.n_sites)
    _check_ordering(model, ordering)
    h = fermion_hamiltonian(model, orbital_rotated_modes(ordering, pair), ordering.n_qubits)
    return QubitHamiltonian.from_pauli_sum(h)


def map_model(
    model: FermionModel, ordering: SiteOrdering | None = None, mapping: str = "jw"
) -> QubitHamiltonian:
    if mapping == "jw":
        return jw_transform(model, ordering)
    if mapping == "orbital_rotated":
        return orbital_rotated_transform(model, ordering)
    raise ValueError(f"unknown mapping {mapping!r}")


def spin_sector_hamiltonian(
    model: FermionModel, ordering: SiteOrdering, spin: str
) -> QubitHamiltonian:
    """Hopping terms of one spin species only."""
    free = FermionModel(model.graph, (), model.model_tag, model.hopping_form)
    h = jw_transform(free, ordering)
    lane = set(ordering.lane(spin))
    keep = [(t.coefficient, t.string) for t in h.terms if set(t.string.xy_support()) <= lane]
    return QubitHamiltonian.from_pairs(h.n_qubits, keep)


def merged_strings(hams: Iterable[QubitHamiltonian]) -> list[PauliString]:
    seen: dict[PauliString, None] = {}
    for h in hams:
        for s in h.strings:
            seen.setdefault(s, None)
    return list(seen)
