import itertools

import numpy as np
import pytest

from strengthlab.errors import BudgetExceeded, InverseOfZero, ParseError, PreconditionFailed
from strengthlab.field import (
    CONWAY,
    enumerate_field,
    enumerate_vectors,
    field_add,
    field_embedding,
    field_inv,
    field_mul,
    field_neg,
    get_field,
    is_irreducible,
    iter_vector_chunks,
    parse_field,
    vector_index,
)

SMALL = ["GF(2)", "GF(3)", "GF(5)", "GF(4)", "GF(8)", "GF(9)", "GF(16)", "GF(2^3)", "GF(3^2)"]


def test_prime_field_examples():
    F5 = get_field(5)
    assert field_add(F5.element(3), F5.element(4), F5).code == 2
    assert field_inv(F5.element(2), F5).code == 3
    assert field_neg(F5.element(1), F5).code == 4
    assert field_mul(F5.element(4), F5.element(4), F5).code == 1


def test_gf4_reduction():
    F4 = parse_field("GF(4)")
    u = F4.element([0, 1])
    assert (u * u).repr == (1, 1)
    assert F4.format((u * u).code) == "[1,1]"


def test_inverse_of_zero():
    F = get_field(3)
    with pytest.raises(InverseOfZero):
        F.element(0).inverse()
    with pytest.raises(ZeroDivisionError):
        F.element(1) / F.element(0)


@pytest.mark.parametrize("spec", SMALL)
def test_tables_are_a_field(spec):
    F = parse_field(spec)
    q = F.q
    els = range(q)
    for a, b, c in itertools.product(els, repeat=3):
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
    # multiplicative group is cyclic of order q-1
    orders = set()
    for a in range(1, q):
        x, n = a, 1
        while x != 1:
            x, n = F.mul(x, a), n + 1
        orders.add(n)
    assert max(orders) == q - 1


def test_conway_moduli_irreducible():
    for (p, k), mod in CONWAY.items():
        assert is_irreducible(mod, p)


@pytest.mark.parametrize("bad", ["GF(6)", "GF(2^7)", "GF(37)", "F(2)", "GF()", "GF(1)"])
def test_parse_rejects(bad):
    with pytest.raises((PreconditionFailed, ParseError)):
        parse_field(bad)


def test_parse_equivalent_specs():
    assert parse_field("GF(9)") == parse_field("GF(3^2)")
    assert parse_field(" GF( 2 ^ 2 ) ").q == 4


def test_enumeration():
    F2, F3 = get_field(2), get_field(3)
    assert enumerate_vectors(F2, 2).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert len(enumerate_vectors(F3, 1)) == 3
    assert [e.code for e in enumerate_field(F3)] == [0, 1, 2]
    with pytest.raises(BudgetExceeded):
        enumerate_vectors(F2, 30)


def test_vector_index_roundtrip():
    F = get_field(3)
    V = enumerate_vectors(F, 3)
    assert vector_index(V, 3).tolist() == list(range(27))


def test_chunks_match_full_enumeration():
    F = parse_field("GF(4)")
    full = enumerate_vectors(F, 3)
    parts = list(iter_vector_chunks(F, 3, chunk=7))
    assert np.array_equal(np.concatenate(parts), full)
    mid = np.concatenate(list(iter_vector_chunks(F, 3, chunk=5, start=10, stop=40)))
    assert np.array_equal(mid, full[10:40])


def test_budget_env(monkeypatch):
    monkeypatch.setenv("STRENGTHLAB_BUDGET", "8")
    with pytest.raises(BudgetExceeded):
        enumerate_vectors(get_field(2), 4)
    monkeypatch.delenv("STRENGTHLAB_BUDGET")
    assert len(enumerate_vectors(get_field(2), 4)) == 16


@pytest.mark.parametrize("small,big", [("GF(2)", "GF(8)"), ("GF(4)", "GF(16)"), ("GF(3)", "GF(9)"), ("GF(2)", "GF(4)")])
def test_embedding_is_homomorphism(small, big):
    S, B = parse_field(small), parse_field(big)
    phi = field_embedding(S, B)
    assert len(set(phi)) == S.q
    for a, b in itertools.product(range(S.q), repeat=2):
        assert phi[S.add(a, b)] == B.add(phi[a], phi[b])
        assert phi[S.mul(a, b)] == B.mul(phi[a], phi[b])
