"""Command-line entry point: ``hamalg <command> ...``.

Exit status is 0 on success, 1 when a check or dimension bound fails and 2 on
usage errors (bad arguments, unreadable files, out-of-scope models).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, pauli
from .cartan import (
    KHKConfig,
    cartan_subalgebra,
    fast_forward_evolve,
    k_dimension_report,
    k_unitary,
    khk_decompose,
    split_by_involution,
)
from .closure import DEFAULT_LIMIT, bound_report, lie_closure
from .io import (
    SCHEMA_VERSION,
    atomic_write,
    bound_kind,
    csv_text,
    dumps,
    hamiltonian_from_dict,
    hamiltonian_to_dict,
    model_from_dict,
    model_hamiltonian,
    model_to_dict,
    read_json,
    write_json,
)
from .models import (
    HoppingGraph,
    SiteOrdering,
    build_aim,
    build_free,
    build_hubbard,
    build_isolated_impurity,
    build_single_site_coulomb,
    build_x_only,
    jw_modes,
    jw_transform,
    orbital_rotated_modes,
    orbital_rotated_transform,
)
from .operators import QubitHamiltonian
from .oracle import (
    brute_closure_rank,
    car_check,
    exact_exponential,
    mode_pairs,
    to_dense,
)
from .pauli import PauliString
from .witness import ScopeError, WitnessInvariantError, enumerate_witness_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MAX_VERIFY_QUBITS = 10
FIDELITY_TOL = 1e-6
DEFAULT_TIMES = (0.1, 1.0, 10.0, 100.0)


class UsageError(Exception):
    pass


def family_model(family: str, n: int):
    """``(model or None, hamiltonian, meta)`` for a named family at ``n`` sites."""
    if family == "x_only":
        h = build_x_only(n, 1.0)
        return None, h, {"n_sites": n, "model_tag": "x_only", "mapping": "jw"}
    builders = {
        "free_chain": lambda: build_free(HoppingGraph.chain(n)),
        "free_star": lambda: build_free(HoppingGraph.star(n)),
        "coulomb_chain": lambda: build_single_site_coulomb(HoppingGraph.chain(n), 0, 0, 1.0),
        "aim": lambda: build_aim(n, [1.0] * (n - 1), 1.0),
        "hubbard_chain": lambda: build_hubbard(HoppingGraph.chain(n), 1.0, 1.0),
        "isolated_impurity": lambda: build_isolated_impurity(n, 1.0, 1.0),
        "isolated_impurity_rotated": lambda: build_isolated_impurity(n, 1.0, 1.0),
    }
    if family not in builders:
        raise UsageError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    model = builders[family]()
    if family == "isolated_impurity_rotated":
        h, mapping = orbital_rotated_transform(model), "orbital_rotated"
    else:
        h, mapping = jw_transform(model), "jw"
    return model, h, {"n_sites": n, "model_tag": model.model_tag, "mapping": mapping}


FAMILIES = (
    "x_only", "free_chain", "free_star", "coulomb_chain", "aim", "hubbard_chain",
    "isolated_impurity", "isolated_impurity_rotated",
)


def _bounds(dimension: int, closed: bool, meta: dict) -> dict:
    n = meta.get("n_sites")
    tag = meta.get("model_tag")
    kind = bound_kind(tag) if meta.get("mapping", "jw") == "jw" else None
    return bound_report(dimension, closed, n, kind)


def _wall(ms: int, args) -> int:
    return 0 if getattr(args, "no_timing", False) else ms


def _parse_range(text: str) -> list[int]:
    try:
        if ".." in text:
            a, b = text.split("..")
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}; use a..b") from exc
    if lo < 1 or hi < lo:
        raise UsageError(f"bad range {text!r}")
    return list(range(lo, hi + 1))


def _parse_times(text: str | None) -> list[float]:
    if not text:
        return list(DEFAULT_TIMES)
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad time list {text!r}") from exc


def _emit(args, report: dict) -> None:
    report = {"schema_version": SCHEMA_VERSION, **report}
    if args.report:
        write_json(args.report, report)
    else:
        sys.stdout.write(dumps(report))


# commands


def cmd_model(args) -> int:
    if args.action == "template":
        model, h, meta = family_model(args.family, args.n)
        if model is None:
            raise UsageError("x_only is defined directly on qubits and has no model file")
        mapping = meta["mapping"]
        data = model_to_dict(model, SiteOrdering.block(model.n_sites), mapping)
        if args.out:
            write_json(args.out, data)
        else:
            sys.stdout.write(dumps(data))
        return EXIT_OK
    if not args.file:
        raise UsageError("model build needs --file")
    h, meta = model_hamiltonian(read_json(args.file))
    data = hamiltonian_to_dict(h, meta)
    if args.emit_hamiltonian:
        write_json(args.emit_hamiltonian, data)
    else:
        sys.stdout.write(dumps(data))
    return EXIT_OK


def cmd_closure(args) -> int:
    h, meta = hamiltonian_from_dict(read_json(args.hamiltonian))
    if args.n_sites:
        meta["n_sites"] = args.n_sites
    if args.kind:
        meta["model_tag"] = {"free": "free", "interacting": "single_site_coulomb", "none": "custom"}[args.kind]
    basis = lie_closure(h.strings, limit=args.limit)
    bounds = _bounds(basis.dimension, basis.closed, meta)
    _emit(args, {
        "dimension": basis.dimension,
        "closed": basis.closed,
        "sweeps": basis.sweeps,
        "wall_ms": _wall(basis.wall_ms, args),
        "bounds": bounds,
    })
    return EXIT_OK if bounds["satisfied"] else EXIT_FAIL


def cmd_witness(args) -> int:
    model, ordering, mapping = model_from_dict(read_json(args.model))
    if mapping != "jw":
        raise UsageError("witnesses are defined for the plain Jordan-Wigner mapping")
    basis = None
    if args.closure_check:
        basis = lie_closure(jw_transform(model, ordering).strings, limit=args.limit)
    report = enumerate_witness_report(model, ordering, basis, trace=args.trace, cap=args.cap)
    if basis is not None:
        report["closure_dimension"] = basis.dimension
        report["closure_closed"] = basis.closed
    ok = report["distinct"] and report["replay_ok"] and report["letter_locality_ok"]
    if basis is not None:
        ok = ok and report["members_present"] == report["witness_count"]
    report["ok"] = ok
    _emit(args, report)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_cartan(args) -> int:
    h, meta = hamiltonian_from_dict(read_json(args.hamiltonian))
    basis = lie_closure(h.strings, limit=args.limit)
    if not basis.closed:
        raise UsageError(f"closure hit the limit of {args.limit} strings; raise --limit")
    split = split_by_involution(basis, h)
    sub = cartan_subalgebra(split, h)
    n_sites = args.n_sites or meta.get("n_sites")
    interacting = bound_kind(meta.get("model_tag")) == "interacting" and meta.get("mapping", "jw") == "jw"
    report = k_dimension_report(split, None, n_sites, interacting, sub)
    report["depth"] = split.dim_k + sub.dim
    report["bracket_check"] = split.bracket_check
    report["khk"] = None
    ok = report["bound_satisfied"] is not False
    if args.khk:
        res = khk_decompose(h, split, sub, KHKConfig(seed=args.seed, tolerance=args.tolerance))
        fid = {}
        if res.converged:
            K = k_unitary(res)
            dense = to_dense(h)
            for t in _parse_times(args.time):
                err = np.linalg.norm(fast_forward_evolve(res, t, K=K) - exact_exponential(dense, t))
                fid[repr(t)] = float(err)
        report["khk"] = {
            "residual": res.residual,
            "converged": res.converged,
            "angles": list(res.angles),
            "k_basis": [s.label for s in res.k_basis],
            "h_terms": [[t.coefficient, t.string.label] for t in res.h_terms],
            "fidelity_per_t": fid,
        }
        ok = ok and res.converged and all(v <= FIDELITY_TOL for v in fid.values())
    _emit(args, report)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sweep(args) -> int:
    rows = []
    families = args.family.split(",")
    for family in families:
        if family not in FAMILIES:
            raise UsageError(f"unknown family {family!r}")
    for family in sorted(families):
        for n in _parse_range(args.n):
            _, h, meta = family_model(family, n)
            basis = lie_closure(h.strings, limit=args.limit)
            if family == "x_only":
                kind, bound = "x_only_exact", 2 * n + 1
                satisfied = basis.closed and basis.dimension == bound
            else:
                b = _bounds(basis.dimension, basis.closed, meta)
                if b["free_upper"] is not None:
                    kind, bound = "free_upper", b["free_upper"]
                elif b["interacting_lower"] is not None:
                    kind, bound = "interacting_lower", b["interacting_lower"]
                else:
                    kind, bound = None, None
                satisfied = b["satisfied"] if bound is not None else None
            rows.append({
                "family": family,
                "n_sites": n,
                "dimension": basis.dimension,
                "closed": basis.closed,
                "bound_kind": kind,
                "bound": bound,
                "bound_satisfied": satisfied,
                "wall_ms": _wall(basis.wall_ms, args),
            })
    header = list(rows[0]) if rows else []
    text = csv_text(header, [["" if r[k] is None else r[k] for k in header] for r in rows])
    if args.csv:
        atomic_write(args.csv, text)
    else:
        sys.stdout.write(text)
    if args.report:
        write_json(args.report, {"schema_version": SCHEMA_VERSION, "rows": rows})
    return EXIT_FAIL if any(r["bound_satisfied"] is False for r in rows) else EXIT_OK


# verification suite


def _random_string(rng, n: int) -> PauliString:
    return PauliString(n, int(rng.integers(0, 2**n)), int(rng.integers(0, 2**n)))


def check_commutator(rng, cap: int) -> list[str]:
    fails = []
    for _ in range(200):
        n = int(rng.integers(1, min(cap, 3) + 1))
        a, b = _random_string(rng, n), _random_string(rng, n)
        p = pauli.multiply(a, b)
        if not np.allclose(p.phase * to_dense(p.string), to_dense(a) @ to_dense(b)):
            fails.append(f"product phase {a.label}*{b.label}")
        dense_comm = to_dense(a) @ to_dense(b) - to_dense(b) @ to_dense(a)
        if pauli.commutes(a, b) != np.allclose(dense_comm, 0):
            fails.append(f"commutation {a.label},{b.label}")
    return fails


def check_closure(rng, cap: int) -> list[str]:
    fails = []
    for _ in range(60):
        n = int(rng.integers(1, min(cap, 3) + 1))
        gens = {_random_string(rng, n) for _ in range(int(rng.integers(1, 4)))}
        gens = [g for g in gens if not g.is_identity]
        if not gens:
            continue
        if lie_closure(gens).dimension != brute_closure_rank(gens, cap=3):
            fails.append(f"closure of {[g.label for g in gens]}")
    return fails


def check_car(rng, cap: int) -> list[str]:
    fails = []
    for n in (1, 2):
        if 2 * n <= cap and not car_check(mode_pairs(jw_modes(SiteOrdering.block(n)))):
            fails.append(f"jordan-wigner modes N={n}")
    if 6 <= cap and not car_check(mode_pairs(orbital_rotated_modes(SiteOrdering.block(3)))):
        fails.append("orbital-rotated modes N=3")
    return fails


def check_witness(rng, cap: int) -> list[str]:
    fails = []
    for n in (3, 4):
        if 2 * n > cap:
            continue
        for model in (
            build_single_site_coulomb(HoppingGraph.chain(n), 0, 0, 1.0),
            build_aim(n, [1.0] * (n - 1), 1.0),
        ):
            basis = lie_closure(jw_transform(model).strings)
            try:
                r = enumerate_witness_report(model, None, basis)
            except WitnessInvariantError as exc:
                fails.append(f"witness construction N={n}: {exc}")
                continue
            if not (r["distinct"] and r["replay_ok"] and r["members_present"] == r["witness_count"]):
                fails.append(f"witness membership {model.model_tag} N={n}")
    return fails


def check_brackets_suite(rng, cap: int) -> list[str]:
    fails = []
    cases = [("aim N=2", build_aim(2, [1.0], 1.0)), ("free chain N=3", build_free(HoppingGraph.chain(3)))]
    for name, model in cases:
        h = jw_transform(model)
        if h.n_qubits > cap:
            continue
        try:
            split_by_involution(lie_closure(h.strings), h)
        except Exception as exc:  # noqa: BLE001 - every failure is reported by name
            fails.append(f"brackets {name}: {exc}")
    return fails


def khk_cases() -> list[tuple[str, QubitHamiltonian]]:
    return [
        ("X+Z", QubitHamiltonian.from_pairs(1, [(1.0, "X"), (1.0, "Z")])),
        ("free chain N=2", jw_transform(build_free(HoppingGraph.chain(2)))),
        ("aim N=2", jw_transform(build_aim(2, [1.0], 1.0))),
    ]


def check_khk(rng, cap: int) -> list[str]:
    fails = []
    for name, h in khk_cases():
        if h.n_qubits > cap:
            continue
        basis = lie_closure(h.strings)
        split = split_by_involution(basis, h)
        res = khk_decompose(h, split, cartan_subalgebra(split, h), KHKConfig())
        if not res.converged:
            fails.append(f"khk {name}: residual {res.residual:.2e}")
            continue
        K, dense = k_unitary(res), to_dense(h)
        for t in DEFAULT_TIMES:
            err = np.linalg.norm(fast_forward_evolve(res, t, K=K) - exact_exponential(dense, t))
            if err > FIDELITY_TOL:
                fails.append(f"khk {name} t={t}: error {err:.2e}")
    return fails


VERIFY_SUITES = {
    "commutator": check_commutator,
    "closure": check_closure,
    "car": check_car,
    "witness": check_witness,
    "brackets": check_brackets_suite,
    "khk": check_khk,
}


def cmd_verify(args) -> int:
    if not 1 <= args.qubit_cap <= MAX_VERIFY_QUBITS:
        raise UsageError(f"--qubit-cap must be between 1 and {MAX_VERIFY_QUBITS}")
    modes = list(VERIFY_SUITES) if args.mode == "all" else [args.mode]
    results, failures = {}, []
    for mode in modes:
        rng = np.random.default_rng(args.seed)
        t0 = time.perf_counter()
        fails = VERIFY_SUITES[mode](rng, args.qubit_cap)
        results[mode] = {
            "passed": not fails,
            "failures": fails,
            "wall_ms": _wall(int(round((time.perf_counter() - t0) * 1000)), args),
        }
        failures.extend(f"{mode}: {f}" for f in fails)
    _emit(args, {"modes": results, "failures": failures, "passed": not failures})
    return EXIT_OK if not failures else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hamalg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} (schema {SCHEMA_VERSION})")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, report=True):
        if report:
            p.add_argument("--report", help="write the JSON report here instead of stdout")
        p.add_argument("--no-timing", action="store_true", help="zero wall-clock fields so reports are reproducible")

    p = sub.add_parser("model", help="build qubit Hamiltonians from model files")
    p.add_argument("action", choices=("build", "template"))
    p.add_argument("--file", help="model JSON (build)")
    p.add_argument("--emit-hamiltonian", help="where to write the Hamiltonian JSON (build)")
    p.add_argument("--family", choices=FAMILIES, default="coulomb_chain", help="family for template")
    p.add_argument("--n", type=int, default=3, help="sites for template")
    p.add_argument("--out", help="where to write the template")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("closure", help="Lie closure of a Hamiltonian's terms")
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.add_argument("--n-sites", type=int, help="override the site count used for bounds")
    p.add_argument("--kind", choices=("free", "interacting", "none"), help="override the bound family")
    common(p)
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("witness", help="ladder-path witnesses of the exponential lower bound")
    p.add_argument("--model", required=True)
    p.add_argument("--closure-check", action="store_true")
    p.add_argument("--trace", action="store_true", help="include every derivation tree")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.add_argument("--cap", type=int, default=20)
    common(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("cartan", help="Cartan split, subalgebra and optional KHK fit")
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--khk", action="store_true")
    p.add_argument("--time", help="comma-separated evolution times")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.add_argument("--n-sites", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-10)
    common(p)
    p.set_defaults(func=cmd_cartan)

    p = sub.add_parser("verify", help="property checks against dense matrices")
    p.add_argument("--mode", choices=(*VERIFY_SUITES, "all"), default="all")
    p.add_argument("--qubit-cap", type=int, default=MAX_VERIFY_QUBITS)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="closure dimensions across N for a model family")
    p.add_argument("--family", required=True, help=f"one or more of {', '.join(FAMILIES)}, comma-separated")
    p.add_argument("--n", required=True, help="site range a..b")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.add_argument("--csv", help="CSV output path (stdout if omitted)")
    common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if getattr(args, "limit", 1) is not None and getattr(args, "limit", 1) < 1:
        print("error: --limit must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ScopeError, FileNotFoundError, json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WitnessInvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
