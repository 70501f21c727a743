import json

import pytest

from hamalg.io import (
    atomic_write,
    bound_kind,
    csv_text,
    dumps,
    hamiltonian_from_dict,
    hamiltonian_to_dict,
    model_from_dict,
    model_hamiltonian,
    model_to_dict,
)
from hamalg.models import SiteOrdering, build_aim, build_isolated_impurity, jw_transform


def test_model_roundtrip():
    m = build_isolated_impurity(4)
    o = SiteOrdering.interleaved(4)
    data = json.loads(dumps(model_to_dict(m, o, "orbital_rotated")))
    m2, o2, mapping = model_from_dict(data)
    assert (m2, o2, mapping) == (m, o, "orbital_rotated")


def test_hamiltonian_roundtrip():
    h = jw_transform(build_aim(3, [0.5, 0.25], 1.0))
    data = hamiltonian_to_dict(h, {"n_sites": 3})
    h2, meta = hamiltonian_from_dict(json.loads(dumps(data)))
    assert h2.as_dict() == h.as_dict() and meta == {"n_sites": 3}


def test_model_hamiltonian_meta():
    _, meta = model_hamiltonian(model_to_dict(build_aim(2, [1.0], 1.0)))
    assert meta == {"n_sites": 2, "model_tag": "aim", "mapping": "jw"}


@pytest.mark.parametrize(
    "data",
    [{}, {"n_sites": 2, "hoppings": [[0, 1]]}, {"n_sites": 2, "mapping": "parity"}],
)
def test_malformed_models(data):
    with pytest.raises(ValueError):
        model_from_dict(data)


def test_bound_kind():
    assert bound_kind("free") == "free"
    assert bound_kind("hubbard") == "interacting"
    assert bound_kind("custom") is None


def test_atomic_write_replaces(tmp_path):
    path = tmp_path / "sub" / "out.txt"
    atomic_write(path, "one")
    atomic_write(path, "two")
    assert path.read_text() == "two"
    assert [p.name for p in path.parent.iterdir()] == ["out.txt"]


def test_csv_text():
    assert csv_text(["a", "b"], [[1, ""], [2, 3]]) == "a,b\n1,\n2,3\n"
