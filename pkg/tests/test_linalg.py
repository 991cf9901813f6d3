import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strengthlab.field import parse_field
from strengthlab.linalg import (
    batch_rank,
    gaussian_binomial,
    iter_projective,
    iter_subspaces,
    left_kernel,
    matmul,
    rank,
    rref,
    solve_left,
)

FIELDS = ["GF(2)", "GF(3)", "GF(4)", "GF(5)"]


def matrices(max_rows=4, max_cols=4):
    @st.composite
    def build(draw):
        ctx = parse_field(draw(st.sampled_from(FIELDS)))
        m = draw(st.integers(1, max_rows))
        n = draw(st.integers(1, max_cols))
        vals = draw(st.lists(st.integers(0, ctx.q - 1), min_size=m * n, max_size=m * n))
        return ctx, np.array(vals, dtype=np.int64).reshape(m, n)
    return build()


def span_size(M, ctx):
    """Oracle: size of the row space by listing every combination."""
    seen = set()
    for coeffs in itertools.product(range(ctx.q), repeat=M.shape[0]):
        v = np.zeros(M.shape[1], dtype=np.int64)
        for c, row in zip(coeffs, M):
            v = ctx.ADD[v, ctx.MUL[c, row]]
        seen.add(tuple(v))
    return len(seen)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_span_count(data):
    ctx, M = data
    assert ctx.q ** rank(M, ctx) == span_size(M, ctx)


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_rref_shape(data):
    ctx, M = data
    R, piv = rref(M, ctx)
    assert list(piv) == sorted(piv)
    for i, c in enumerate(piv):
        assert R[i, c] == 1
        assert np.count_nonzero(R[:, c]) == 1
    assert rank(np.vstack([R, M]), ctx) == len(piv)


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_left_kernel(data):
    ctx, M = data
    K = left_kernel(M, ctx)
    assert K.shape[0] == M.shape[0] - rank(M, ctx)
    if K.shape[0]:
        assert not matmul(K, M, ctx).any()
        assert rank(K, ctx) == K.shape[0]


@settings(max_examples=100, deadline=None)
@given(matrices(), st.data())
def test_solve_left(data, draw):
    ctx, M = data
    x = np.array(draw.draw(st.lists(st.integers(0, ctx.q - 1), min_size=M.shape[0], max_size=M.shape[0])))
    b = matmul(x[None, :], M, ctx)[0]
    y = solve_left(M, b, ctx)
    assert y is not None
    assert np.array_equal(matmul(np.asarray(y)[None, :], M, ctx)[0], b)


def test_solve_left_inconsistent():
    ctx = parse_field("GF(3)")
    M = np.array([[1, 0, 0], [0, 1, 0]])
    assert solve_left(M, np.array([0, 0, 1]), ctx) is None


@pytest.mark.parametrize("spec", FIELDS)
def test_batch_rank_agrees(spec):
    ctx = parse_field(spec)
    rng = np.random.default_rng(3)
    Ms = rng.integers(0, ctx.q, size=(300, 3, 4))
    Ms[::7, 2] = Ms[::7, 0]
    assert batch_rank(Ms, ctx).tolist() == [rank(M, ctx) for M in Ms]


@pytest.mark.parametrize("n,k,q", [(3, 1, 2), (4, 2, 2), (3, 2, 3), (4, 2, 3), (3, 0, 5), (2, 1, 4)])
def test_subspace_enumeration(n, k, q):
    ctx = parse_field(f"GF({q})")
    spaces = [tuple(map(tuple, B)) for B in iter_subspaces(n, k, q)]
    assert len(spaces) == len(set(spaces)) == gaussian_binomial(n, k, q)
    for B in spaces:
        assert rank(np.array(B, dtype=np.int64).reshape(k, n), ctx) == k


def test_gaussian_binomial_values():
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(3, 1, 3) == 13
    assert gaussian_binomial(2, 3, 2) == 0


def test_projective_points():
    pts = list(iter_projective(3, 3))
    assert len(pts) == (27 - 1) // 2
    assert all(next(c for c in p if c) == 1 for p in pts)


def test_subspaces_sparsest_first():
    weights = [np.count_nonzero(B) for B in iter_subspaces(4, 2, 2)]
    assert weights == sorted(weights)
    assert weights[0] == 2
