"""Explicit members of the Hamiltonian algebra of a one-interaction model.

Every string built here comes with a derivation: a binary tree whose leaves are
Hamiltonian terms and whose internal nodes are commutators. Replaying a tree
with :func:`replay` recomputes the string from scratch, so nothing in this
module has to be trusted beyond :func:`hamalg.pauli.commutator`.

The two spin lanes are indexed by position. Position 0 is the interacting qubit
of that spin and positions ``1..N-1`` are the remaining qubits of the lane in
increasing order. A ladder path walks the columns ``1..N-1`` and picks a lane
for each of the ``N-2`` edges between consecutive columns.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from dataclasses import dataclass, field

from .closure import LieBasis
from .models import DOWN, SPINS, UP, FermionModel, SiteOrdering, jw_transform
from .pauli import (
    PauliString,
    commutator,
    commutes,
    jw_arrow_string,
    phase_free_product,
    y_count_parity,
)

FLIP = {"X": "Y", "Y": "X"}


class WitnessInvariantError(RuntimeError):
    """A step that the construction guarantees did not go through."""


class ScopeError(ValueError):
    """The model is outside the family the construction covers."""


@dataclass(frozen=True)
class Derivation:
    string: PauliString
    operands: tuple[Derivation, ...] = ()

    @property
    def leaves(self) -> int:
        if not self.operands:
            return 1
        return self.operands[0].leaves + self.operands[1].leaves

    @property
    def n_commutators(self) -> int:
        return self.leaves - 1

    def to_json(self):
        if not self.operands:
            return self.string.label
        return [self.string.label, self.operands[0].to_json(), self.operands[1].to_json()]


def leaf(s: PauliString) -> Derivation:
    return Derivation(s)


def bracket(a: Derivation, b: Derivation) -> Derivation | None:
    c = commutator(a.string, b.string)
    return None if c is None else Derivation(c.string, (a, b))


def replay(
    d: Derivation, generators: Iterable[PauliString], memo: dict | None = None
) -> PauliString:
    """Recompute a derivation from its leaves; raises if any step breaks.

    Pass the same ``memo`` dict across calls to skip shared subtrees.
    """
    gens = generators if isinstance(generators, (set, frozenset)) else set(generators)
    memo = {} if memo is None else memo

    def run(node: Derivation) -> PauliString:
        key = id(node)
        if key in memo:
            return memo[key][1]
        out = _run(node)
        memo[key] = (node, out)
        return out

    def _run(node: Derivation) -> PauliString:
        if not node.operands:
            if node.string not in gens:
                raise WitnessInvariantError(f"leaf {node.string.label} is not a Hamiltonian term")
            return node.string
        a, b = (run(op) for op in node.operands)
        c = commutator(a, b)
        if c is None:
            raise WitnessInvariantError(f"{a.label} and {b.label} commute")
        return c.string

    out = run(d)
    if out != d.string:
        raise WitnessInvariantError(f"replay gave {out.label}, recorded {d.string.label}")
    return out


def _first_match(target: PauliString, candidates: Iterable[tuple[Derivation, Derivation]]) -> Derivation:
    for a, b in candidates:
        d = bracket(a, b)
        if d is not None and d.string == target:
            return d
    raise WitnessInvariantError(f"no recorded commutator produces {target.label}")


@dataclass(frozen=True)
class LadderPath:
    lanes: tuple[str, ...]
    initial_variant: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lanes", tuple(self.lanes))
        if not self.lanes:
            raise ValueError("a ladder path needs at least one edge")
        if any(s not in SPINS for s in self.lanes):
            raise ValueError(f"lanes must be {UP!r} or {DOWN!r}")
        if self.initial_variant not in (0, 1):
            raise ValueError("initial_variant is 0 or 1")

    @property
    def n_sites(self) -> int:
        return len(self.lanes) + 2

    @property
    def switch_columns(self) -> list[int]:
        # edge k joins columns k+1 and k+2; a switch between edges k and k+1 sits on column k+2
        return [k + 2 for k in range(len(self.lanes) - 1) if self.lanes[k] != self.lanes[k + 1]]

    @classmethod
    def all_paths(cls, n_sites: int) -> list[LadderPath]:
        if n_sites < 3:
            raise ValueError("ladder paths need N >= 3")
        return [
            cls(lanes, v)
            for v in (0, 1)
            for lanes in itertools.product(SPINS, repeat=n_sites - 2)
        ]


@dataclass(frozen=True)
class SigmaQuadruple:
    column: int
    strings: tuple[Derivation, Derivation, Derivation, Derivation]


@dataclass(frozen=True)
class EndpointTable:
    """Endpoint letters and derivations for both lanes of a one-interaction model.

    ``letters[spin][i]`` is the letter ``P`` at lane position ``i`` (position 0
    holds None). ``endpoints[spin][i]`` is the pair of derivations of
    ``arrow(X_0 P_i)`` and ``arrow(Y_0 Pbar_i)``.
    """

    n_sites: int
    n_qubits: int
    lanes: dict[str, tuple[int, ...]]
    sites: dict[str, tuple[int, ...]]
    letters: dict[str, tuple[str | None, ...]]
    paths: dict[str, tuple[tuple[int, ...], ...]]
    endpoints: dict[str, tuple[tuple[Derivation, Derivation] | None, ...]]
    coupling: Derivation
    generators: frozenset = field(repr=False, default=frozenset())

    def qubit(self, spin: str, i: int) -> int:
        return self.lanes[spin][i]

    def letter(self, spin: str, i: int, bar: bool = False) -> str:
        p = self.letters[spin][i]
        return FLIP[p] if bar else p

    def arrow(self, spin: str, i: int, bar_i: bool, j: int, bar_j: bool) -> PauliString:
        return jw_arrow_string(
            self.qubit(spin, i), self.letter(spin, i, bar_i),
            self.qubit(spin, j), self.letter(spin, j, bar_j), self.n_qubits,
        )

    def z_pair(self, spin: str, i: int) -> PauliString:
        return PauliString.from_letters(self.n_qubits, {self.qubit(spin, 0): "Z", self.qubit(spin, i): "Z"})


def _single_interaction(model: FermionModel) -> tuple[int, int]:
    if model.hopping_form != "standard":
        raise ScopeError("the ladder construction needs XX+YY hopping terms")
    if len(model.interactions) != 1:
        raise ScopeError(
            f"expected exactly one interaction, found {len(model.interactions)};"
            " see single_interaction_reduction"
        )
    if not model.graph.is_connected():
        raise ScopeError("hopping graph is disconnected")
    k0, l0, s = model.interactions[0]
    if s == 0:
        raise ScopeError("interaction strength is zero")
    return k0, l0


def _lane(ordering: SiteOrdering, spin: str, origin: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    qubits = ordering.lane(spin)
    rest = sorted((q, site) for site, q in enumerate(qubits) if site != origin)
    return (qubits[origin], *(q for q, _ in rest)), (origin, *(s for _, s in rest))


def lemma1_endpoints(model: FermionModel, ordering: SiteOrdering | None = None) -> EndpointTable:
    """Walk a breadth-first path from the interacting site to every other site.

    Along the path the letter at the far end alternates X, Y, X, ... starting
    with X one hop away.
    """
    k0, l0 = _single_interaction(model)
    ordering = ordering or SiteOrdering.block(model.n_sites)
    if ordering.n_sites != model.n_sites:
        raise ValueError("ordering and model disagree on the number of sites")
    n = ordering.n_qubits
    h = jw_transform(model, ordering)
    gens = frozenset(h.strings)
    lanes, sites, letters, paths, endpoints = {}, {}, {}, {}, {}
    for spin, origin in ((UP, k0), (DOWN, l0)):
        lane_q, lane_s = _lane(ordering, spin, origin)
        qpos = {site: ordering.qubit(site, spin) for site in range(model.n_sites)}
        bfs = model.graph.bfs_paths(origin)
        # derivations of arrow(X_0 P_j), arrow(Y_0 Pbar_j) for every site j reached so far
        reached: dict[int, tuple[Derivation, Derivation, str]] = {}
        q0 = qpos[origin]
        for site in sorted(bfs, key=lambda s: (len(bfs[s]), s)):
            path = bfs[site]
            if site == origin:
                continue
            prev = path[-2]
            a_hop = leaf(jw_arrow_string(qpos[prev], "X", qpos[site], "X", n))
            b_hop = leaf(jw_arrow_string(qpos[prev], "Y", qpos[site], "Y", n))
            for g in (a_hop, b_hop):
                if g.string not in gens:
                    raise WitnessInvariantError(f"hopping term {g.string.label} missing")
            p = "X" if (len(path) - 1) % 2 == 1 else "Y"
            ta = jw_arrow_string(q0, "X", qpos[site], p, n)
            tb = jw_arrow_string(q0, "Y", qpos[site], FLIP[p], n)
            if prev == origin:
                reached[site] = (a_hop, b_hop, p)
                continue
            pa, pb, _ = reached[prev]
            pool = [(x, y) for x in (pa, pb) for y in (a_hop, b_hop)]
            reached[site] = (_first_match(ta, pool), _first_match(tb, pool), p)
        lanes[spin], sites[spin] = lane_q, lane_s
        letters[spin] = (None, *(reached[s][2] for s in lane_s[1:]))
        paths[spin] = tuple(tuple(bfs[s]) for s in lane_s)
        endpoints[spin] = (None, *((reached[s][0], reached[s][1]) for s in lane_s[1:]))
    zz = PauliString.from_letters(n, {ordering.qubit(k0, UP): "Z", ordering.qubit(l0, DOWN): "Z"})
    if zz not in gens:
        raise WitnessInvariantError(f"interaction term {zz.label} missing")
    return EndpointTable(
        model.n_sites, n, lanes, sites, letters, paths, endpoints, leaf(zz), gens
    )


def lemma1_links_detailed(table: EndpointTable) -> dict[tuple[str, int, int], Derivation]:
    """``(spin, i, variant) -> derivation`` for variant 0 ``arrow(P_i Pbar_{i+1})`` and 1 ``arrow(Pbar_i P_{i+1})``."""
    out = {}
    for spin in SPINS:
        for i in range(1, table.n_sites - 1):
            a_i, b_i = table.endpoints[spin][i]
            a_j, b_j = table.endpoints[spin][i + 1]
            pool = [(x, y) for x in (a_i, b_i) for y in (a_j, b_j)]
            for variant, (bar_i, bar_j) in enumerate(((False, True), (True, False))):
                target = table.arrow(spin, i, bar_i, i + 1, bar_j)
                out[(spin, i, variant)] = _first_match(target, pool)
    return out


def lemma1_links(table: EndpointTable) -> set[PauliString]:
    return {d.string for d in lemma1_links_detailed(table).values()}


def sigma_quadruple(table: EndpointTable, i: int) -> SigmaQuadruple:
    """The four products ``E_up * E_down * Z_u0 Z_d0`` over the endpoint pairs at column ``i``."""
    a_u, b_u = table.endpoints[UP][i]
    a_d, b_d = table.endpoints[DOWN][i]
    zz = table.coupling
    out = []
    for e_u, e_d in ((a_u, a_d), (b_u, a_d), (a_u, b_d), (b_u, b_d)):
        target = phase_free_product(e_u.string, e_d.string, zz.string)
        found = None
        for first, second in ((e_u, e_d), (e_d, e_u)):
            inner = bracket(first, zz)
            if inner is None:
                continue
            found = bracket(inner, second)
            if found is not None and found.string == target:
                break
            found = None
        if found is None:
            raise WitnessInvariantError(f"cannot derive sigma string {target.label}")
        out.append(found)
    return SigmaQuadruple(i, tuple(out))


def rung_target(table: EndpointTable, spin: str, i: int, variant: int) -> PauliString:
    """``Z_{o(0)} Z_{o(i)} arrow(...)`` on lane ``spin`` with ``o`` the other lane."""
    other = DOWN if spin == UP else UP
    bar_i, bar_j = ((False, True), (True, False))[variant]
    return phase_free_product(table.z_pair(other, i), table.arrow(spin, i, bar_i, i + 1, bar_j))


def lemma2_rungs_detailed(table: EndpointTable) -> dict[tuple[str, int, int], Derivation]:
    """``(spin, i, variant) -> derivation`` of the rung string carrying the other lane's Z pair."""
    links = lemma1_links_detailed(table)
    out = {}
    for i in range(1, table.n_sites - 1):
        s_i = sigma_quadruple(table, i).strings
        s_j = sigma_quadruple(table, i + 1).strings
        mids = [d for a in s_i for b in s_j if (d := bracket(a, b)) is not None]
        link_pool = [links[(spin, i, v)] for spin in SPINS for v in (0, 1)]
        for spin in SPINS:
            for variant in (0, 1):
                target = rung_target(table, spin, i, variant)
                out[(spin, i, variant)] = _first_match(
                    target, ((m, l) for m in mids for l in link_pool)
                )
    return out


def lemma2_rungs(table: EndpointTable) -> set[PauliString]:
    return {d.string for d in lemma2_rungs_detailed(table).values()}


@dataclass(frozen=True)
class Witness:
    path: LadderPath
    derivation: Derivation

    @property
    def string(self) -> PauliString:
        return self.derivation.string


class WitnessBuilder:
    """Caches links and rungs so that many paths can be turned into strings cheaply."""

    def __init__(self, table: EndpointTable):
        if table.n_sites < 3:
            raise ScopeError("ladder witnesses need N >= 3")
        self.table = table
        self.links = lemma1_links_detailed(table)
        self.rungs = lemma2_rungs_detailed(table)

    def build(self, path: LadderPath) -> Witness:
        if path.n_sites != self.table.n_sites:
            raise ValueError(f"path has {len(path.lanes)} edges, expected {self.table.n_sites - 2}")
        q = self.links[(path.lanes[0], 1, path.initial_variant)]
        for k in range(1, len(path.lanes)):
            prev, nxt = path.lanes[k - 1], path.lanes[k]
            col = k + 1
            if prev == nxt:
                options = [self.links[(nxt, col, 0)], self.links[(nxt, col, 1)]]
            else:
                options = [self.rungs[(nxt, col, 0)]]
            for o in options:
                if not commutes(q.string, o.string):
                    q = bracket(q, o)
                    break
            else:
                raise WitnessInvariantError(
                    f"step {k} of {path.lanes}: {q.string.label} commutes with every candidate"
                )
        return Witness(path, q)


def ladder_witness(path: LadderPath, table: EndpointTable) -> Witness:
    return WitnessBuilder(table).build(path)


def expected_letter_support(path: LadderPath, table: EndpointTable) -> set[int]:
    """Qubits that carry X or Y in the witness of ``path``."""
    cols = {table.qubit(path.lanes[0], 1), table.qubit(path.lanes[-1], table.n_sites - 1)}
    for c in path.switch_columns:
        cols.update((table.qubit(UP, c), table.qubit(DOWN, c)))
    return cols


def enumerate_witnesses(table: EndpointTable) -> list[Witness]:
    builder = WitnessBuilder(table)
    return [builder.build(p) for p in LadderPath.all_paths(table.n_sites)]


def enumerate_witness_report(
    model: FermionModel,
    ordering: SiteOrdering | None = None,
    closure_basis: LieBasis | None = None,
    trace: bool = False,
    cap: int = 20,
) -> dict:
    if model.n_sites > cap:
        raise ValueError(f"N={model.n_sites} exceeds the witness cap {cap}")
    table = lemma1_endpoints(model, ordering)
    witnesses = enumerate_witnesses(table)
    strings = [w.string for w in witnesses]
    distinct = len(set(strings)) == len(strings)
    memo: dict = {}
    replay_ok = all(replay(w.derivation, table.generators, memo) == w.string for w in witnesses)
    locality_ok = all(
        set(w.string.xy_support()) == expected_letter_support(w.path, table) for w in witnesses
    )
    members = None
    if closure_basis is not None:
        members = sum(1 for s in strings if s in closure_basis)
    report = {
        "n_sites": model.n_sites,
        "witness_count": len(witnesses),
        "expected_count": 2 ** (model.n_sites - 1),
        "distinct": distinct,
        "replay_ok": replay_ok,
        "letter_locality_ok": locality_ok,
        "members_present": members,
        "membership_checked": closure_basis is not None,
        "implied_lower_bound": len(set(strings)),
    }
    if trace:
        report["witnesses"] = [
            {
                "lanes": list(w.path.lanes),
                "variant": w.path.initial_variant,
                "string": w.string.label,
                "derivation": w.derivation.to_json(),
            }
            for w in witnesses
        ]
    return report


def _s_strings(table: EndpointTable, spin: str) -> tuple[Derivation, Derivation]:
    """``arrow(X_0 P_1)`` and ``arrow(Y_0 Pbar_1)`` on ``spin``, times the interaction term if that is needed to land in ``m``."""
    out = []
    for d in table.endpoints[spin][1]:
        if d.leaves % 2 == 0:
            d = bracket(d, table.coupling)
            if d is None:
                raise WitnessInvariantError("S string commutes with the interaction term")
        out.append(d)
    return out[0], out[1]


def theorem2_k_elements(
    model: FermionModel, ordering: SiteOrdering | None, split, table: EndpointTable | None = None
) -> set[PauliString]:
    """Members of ``k`` read off the ladder witnesses.

    A commutator tree with ``L`` Hamiltonian leaves lies in ``m`` for odd ``L``
    and in ``k`` for even ``L``, since every Hamiltonian term is in ``m``.
    Witnesses already in ``k`` are kept; a witness in ``m`` is commuted with
    whichever S string of its starting lane it anticommutes with.
    """
    table = table or lemma1_endpoints(model, ordering)
    k_set, m_set = set(split.k_basis), set(split.m_basis)
    s_strings = {spin: _s_strings(table, spin) for spin in SPINS}
    for pair in s_strings.values():
        for d in pair:
            if d.string not in m_set:
                raise WitnessInvariantError(f"S string {d.string.label} is not in m")
    out: set[PauliString] = set()
    for w in enumerate_witnesses(table):
        if w.derivation.leaves % 2 == 0:
            e = w.string
        else:
            if w.string not in m_set:
                raise WitnessInvariantError(f"witness {w.string.label} has odd grade but is not in m")
            s_x, s_y = s_strings[w.path.lanes[0]]
            hits = [x for x in (bracket(w.derivation, s_x), bracket(w.derivation, s_y)) if x is not None]
            if len(hits) != 1:
                raise WitnessInvariantError(
                    f"witness {w.string.label} anticommutes with {len(hits)} of the two S strings"
                )
            e = hits[0].string
        if e not in k_set or y_count_parity(e) != 1:
            raise WitnessInvariantError(f"{e.label} was expected in k")
        out.add(e)
    return out


__all__ = [
    "Derivation",
    "EndpointTable",
    "LadderPath",
    "ScopeError",
    "SigmaQuadruple",
    "Witness",
    "WitnessBuilder",
    "WitnessInvariantError",
    "enumerate_witness_report",
    "enumerate_witnesses",
    "expected_letter_support",
    "ladder_witness",
    "lemma1_endpoints",
    "lemma1_links",
    "lemma1_links_detailed",
    "lemma2_rungs",
    "lemma2_rungs_detailed",
    "replay",
    "rung_target",
    "sigma_quadruple",
    "theorem2_k_elements",
]
