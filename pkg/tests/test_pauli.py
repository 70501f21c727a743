import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hamalg.oracle import pauli_matrix, to_dense
from hamalg.pauli import (
    DimensionMismatchError,
    PauliString,
    PhasedPauli,
    commutator,
    commutes,
    jw_arrow_string,
    multiply,
    parse_pauli,
    phase_free_product,
    y_count_parity,
)

P = PauliString.from_label


def labels(n):
    return st.text(alphabet="IXYZ", min_size=n, max_size=n)


pairs = st.integers(1, 4).flatmap(lambda n: st.tuples(labels(n), labels(n)))


def test_letter_encoding():
    s = P("IXZY")
    assert [s.letter(q) for q in range(4)] == ["I", "X", "Z", "Y"]
    assert (s.x, s.z) == (0b1010, 0b1100)
    assert s.label == "IXZY"
    assert s.weight == 3
    assert s.support == [1, 2, 3]
    assert s.xy_support() == [1, 3]


def test_code_roundtrip():
    s = P("XYZIY")
    assert PauliString.from_code(5, s.code) == s


def test_from_letters_and_identity():
    assert PauliString.from_letters(3, {0: "X", 2: "Z"}) == P("XIZ")
    assert PauliString.identity(2).is_identity


def test_bad_labels():
    with pytest.raises(ValueError):
        P("XQ")
    with pytest.raises(ValueError):
        P("")


def test_commutes_examples():
    assert commutes(P("XX"), P("YY"))
    assert not commutes(P("X"), P("Y"))
    assert not commutes(P("XXI"), P("IYY"))


def test_multiply_examples():
    assert multiply(P("X"), P("Y")) == PhasedPauli(1, P("Z"))
    assert multiply(P("XI"), P("IX")) == PhasedPauli(0, P("XX"))
    assert multiply(P("XX"), P("YY")) == PhasedPauli(2, P("ZZ"))


def test_commutator_examples():
    c = commutator(P("X"), P("Y"))
    assert c.string == P("Z") and c.phase == 1j
    assert commutator(P("XX"), P("YY")) is None
    assert commutator(P("XXI"), P("IYY")).string == P("XZY")


def test_y_parity_examples():
    assert y_count_parity(P("ZZ")) == 0
    assert y_count_parity(P("Y")) == 1
    assert y_count_parity(P("XYYZ")) == 0


def test_arrow_examples():
    assert jw_arrow_string(0, "X", 2, "X", 3) == P("XZX")
    assert jw_arrow_string(1, "Y", 0, "X", 2) == P("XY")
    assert jw_arrow_string(3, "Y", 0, "Y", 4) == P("YZZY")
    with pytest.raises(ValueError):
        jw_arrow_string(1, "X", 1, "Y", 3)


def test_size_mismatch():
    with pytest.raises(DimensionMismatchError):
        commutes(P("X"), P("XX"))
    with pytest.raises(DimensionMismatchError):
        multiply(P("X"), P("XX"))
    with pytest.raises(DimensionMismatchError):
        commutator(P("X"), P("XX"))


@pytest.mark.parametrize("n", [1, 2])
def test_commutes_matches_dense_exhaustive(n):
    words = ["".join(w) for w in itertools.product("IXYZ", repeat=n)]
    mats = {w: pauli_matrix(w) for w in words}
    for a, b in itertools.product(words, repeat=2):
        dense = mats[a] @ mats[b] - mats[b] @ mats[a]
        assert commutes(P(a), P(b)) == np.allclose(dense, 0)


@given(pairs)
def test_commutes_matches_dense(ab):
    a, b = ab
    dense = pauli_matrix(a) @ pauli_matrix(b) - pauli_matrix(b) @ pauli_matrix(a)
    assert commutes(P(a), P(b)) == np.allclose(dense, 0)


@given(pairs)
def test_product_phase_matches_dense(ab):
    a, b = map(P, ab)
    p = multiply(a, b)
    assert np.allclose(p.phase * to_dense(p.string), to_dense(a) @ to_dense(b))


@given(pairs)
def test_commutator_is_twice_the_product(ab):
    a, b = map(P, ab)
    c = commutator(a, b)
    dense = to_dense(a) @ to_dense(b) - to_dense(b) @ to_dense(a)
    if c is None:
        assert np.allclose(dense, 0)
    else:
        assert not c.string.is_identity
        assert np.allclose(2 * c.phase * to_dense(c.string), dense)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(labels(n), labels(n), labels(n))))
def test_multiply_associative(abc):
    a, b, c = map(P, abc)
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


@given(st.integers(1, 5).flatmap(labels))
def test_square_is_identity(label):
    s = P(label)
    assert multiply(s, s) == PhasedPauli(0, PauliString.identity(len(label)))


@given(pairs)
def test_equality_ignores_phase(ab):
    a, b = map(P, ab)
    if commutes(a, b):
        assert multiply(a, b).string == multiply(b, a).string
    assert phase_free_product(a, b) == multiply(a, b).string


@given(
    st.integers(2, 8).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True),
            st.sampled_from("XY"),
            st.sampled_from("XY"),
        )
    )
)
def test_arrow_symmetric(args):
    n, (i, j), a, b = args
    s = jw_arrow_string(i, a, j, b, n)
    assert s == jw_arrow_string(j, b, i, a, n)
    lo, hi = sorted((i, j))
    assert all(s.letter(q) == "Z" for q in range(lo + 1, hi))
    assert s.letter(i) == a and s.letter(j) == b


def test_parse_passthrough():
    s = P("XY")
    assert parse_pauli(s) is s
    assert parse_pauli("XY") == s


def test_order_by_label():
    assert sorted([P("ZI"), P("IX"), P("XI")]) == [P("IX"), P("XI"), P("ZI")]
