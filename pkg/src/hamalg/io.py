"""JSON formats for models, Hamiltonians and reports."""

from __future__ import annotations

import csv
import io as _io
import json
import os
import tempfile
from collections.abc import Mapping, Sequence
from pathlib import Path

from .models import (
    FermionModel,
    HoppingGraph,
    SiteOrdering,
    map_model,
)
from .operators import QubitHamiltonian

SCHEMA_VERSION = "1.0"

INTERACTING_TAGS = ("single_site_coulomb", "aim", "hubbard")


def bound_kind(model_tag: str | None) -> str | None:
    if model_tag == "free":
        return "free"
    if model_tag in INTERACTING_TAGS:
        return "interacting"
    return None


def model_to_dict(
    model: FermionModel, ordering: SiteOrdering | None = None, mapping: str = "jw"
) -> dict:
    ordering = ordering or SiteOrdering.block(model.n_sites)
    out = {
        "n_sites": model.n_sites,
        "hoppings": [[k, l, t] for k, l, t in model.graph.edges],
        "interactions": [[k, l, s] for k, l, s in model.interactions],
        "ordering": {"u": list(ordering.u), "d": list(ordering.d)},
        "mapping": mapping,
        "model_tag": model.model_tag,
    }
    if model.potentials:
        out["potentials"] = [[site, spin, eps] for site, spin, eps in model.potentials]
    if model.hopping_form != "standard":
        out["hopping_form"] = model.hopping_form
    return out


def model_from_dict(data: Mapping) -> tuple[FermionModel, SiteOrdering, str]:
    """Parse a model file; returns the model, its ordering and the mapping name."""
    try:
        n = int(data["n_sites"])
        edges = tuple((int(k), int(l), float(t)) for k, l, t in data.get("hoppings", []))
        inter = tuple((int(k), int(l), float(s)) for k, l, s in data.get("interactions", []))
        pots = tuple((int(i), str(sp), float(e)) for i, sp, e in data.get("potentials", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed model file: {exc}") from exc
    model = FermionModel(
        HoppingGraph(n, edges),
        inter,
        data.get("model_tag", "custom"),
        data.get("hopping_form", "standard"),
        pots,
    )
    order = data.get("ordering")
    ordering = SiteOrdering(tuple(order["u"]), tuple(order["d"])) if order else SiteOrdering.block(n)
    mapping = data.get("mapping", "jw")
    if mapping not in ("jw", "orbital_rotated"):
        raise ValueError(f"unknown mapping {mapping!r}")
    return model, ordering, mapping


def hamiltonian_to_dict(h: QubitHamiltonian, meta: Mapping | None = None) -> dict:
    out = {"schema_version": SCHEMA_VERSION, **h.as_dict()}
    if meta:
        out["meta"] = dict(meta)
    return out


def hamiltonian_from_dict(data: Mapping) -> tuple[QubitHamiltonian, dict]:
    return QubitHamiltonian.from_dict(data), dict(data.get("meta", {}))


def model_hamiltonian(data: Mapping) -> tuple[QubitHamiltonian, dict]:
    model, ordering, mapping = model_from_dict(data)
    h = map_model(model, ordering, mapping)
    meta = {"n_sites": model.n_sites, "model_tag": model.model_tag, "mapping": mapping}
    return h, meta


def read_json(path: str | os.PathLike) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write to a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str | os.PathLike, data) -> None:
    atomic_write(path, dumps(data))


def csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()
