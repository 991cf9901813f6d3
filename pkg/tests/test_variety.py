import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strengthlab.errors import BudgetExceeded, PreconditionFailed
from strengthlab.field import enumerate_vectors, parse_field
from strengthlab.linalg import rank as matrix_rank
from strengthlab.poly import Polynomial, monomials_of_degree
from strengthlab.variety import (
    Locus,
    codim_estimate,
    dim_estimate,
    enumerate_variety,
    linear_dimension,
    low_rank_singularity_check,
    max_extension,
    rt_check,
    singular_codim,
    singular_locus,
    singular_locus_y,
    taylor_ideal_check,
)

F2, F3 = parse_field("GF(2)"), parse_field("GF(3)")


def naive_singular_count(forms):
    """Oracle: pointwise Jacobian rank with the scalar evaluator."""
    f0 = forms[0]
    grads = [[f.partial(j) for j in range(f0.nvars)] for f in forms]
    total = 0
    for x in itertools.product(range(f0.ctx.q), repeat=f0.nvars):
        J = np.array([[g.evaluate(x) for g in row] for row in grads], dtype=np.int64)
        total += matrix_rank(J, f0.ctx) < len(forms)
    return total


# -- point counts -----------------------------------------------------------------------

def test_counts(P):
    assert enumerate_variety([P("x1")]).counts == {1: 2}
    # x1*x2 = x3*x4: three (a,b) pairs with product 0 and one with product 1 -> 3*3 + 1*1
    f = P("x1*x2+x3*x4", n=4)
    assert enumerate_variety([f]).counts == {1: 10}
    assert sum(f.evaluate(x) == 0 for x in itertools.product(range(2), repeat=4)) == 10
    assert enumerate_variety([], F3, nvars=3).counts == {1: 27}
    assert enumerate_variety([P("x1*x2+x3*x4", n=4)], k=2).counts == {2: 4 ** 3 + 4 ** 2 - 4}


def test_count_points_kept(P):
    ps = enumerate_variety([P("x1*x2", "GF(3)")], keep_points=True)
    assert sorted(map(tuple, ps.points.tolist())) == sorted({(0, a) for a in range(3)} | {(a, 0) for a in range(3)})


def test_budget(P):
    with pytest.raises(BudgetExceeded):
        enumerate_variety([P("x1", n=30)])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([F2, F3]), st.data())
def test_shards_do_not_change_counts(ctx, data):
    mons = monomials_of_degree(3, 2)
    vals = data.draw(st.lists(st.integers(0, ctx.q - 1), min_size=len(mons), max_size=len(mons)))
    f = Polynomial(ctx, 3, {m: v for m, v in zip(mons, vals) if v})
    L = singular_locus([f])
    assert L.count(1, shards=1) == L.count(1, shards=3) == naive_singular_count([f])
    assert L.count(2, shards=1) == L.count(2, shards=5)


# -- singular loci --------------------------------------------------------------------------

def test_singular_examples(P):
    L = singular_locus([P("x1*x2")])
    assert L.count() == 1 and L.contains((0, 0))
    assert singular_codim([P("x1*x2")]).codim == 2
    assert singular_codim([P("x1*x2+x3*x4", n=4)]).codim == 4
    S = singular_locus([P("x1^2", "GF(3)"), P("x2^2", "GF(3)")])
    pts = enumerate_vectors(F3, 2)
    mask = S.mask(pts)
    assert mask.tolist() == [bool(a == 0 or b == 0) for a, b in pts.tolist()]


def test_singular_y_examples(P):
    blocks = {"x": 2, "y": 2}
    S = singular_locus_y([P("y1*y2", "GF(3)", 4, blocks)], (2, 4))
    pts = enumerate_vectors(F3, 4)
    assert S.mask(pts).tolist() == [bool(p[2] == 0 and p[3] == 0) for p in pts.tolist()]
    blocks = {"x": 1, "y": 1}
    S = singular_locus_y([P("x1*y1", "GF(3)", 2, blocks)], (1, 2))
    assert S.mask(enumerate_vectors(F3, 2)).tolist() == [p[0] == 0 for p in enumerate_vectors(F3, 2).tolist()]
    S = singular_locus_y([P("x1^2", "GF(3)", 2, blocks)], (1, 2))
    assert S.mask(enumerate_vectors(F3, 2)).all()


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_two_form_locus_matches_naive(data):
    ctx = data.draw(st.sampled_from([F2, F3]))
    forms = []
    for d in (1, 2):
        mons = monomials_of_degree(3, d)
        vals = data.draw(st.lists(st.integers(0, ctx.q - 1), min_size=len(mons), max_size=len(mons)))
        forms.append(Polynomial(ctx, 3, {m: v for m, v in zip(mons, vals) if v}))
    assert singular_locus(forms).count() == naive_singular_count(forms)


# -- dimension estimates ------------------------------------------------------------------------

def test_codim_examples(P):
    origin = Locus(F2, 2, [P("x1"), P("x2")])
    est = codim_estimate(origin)
    assert est.codim == 2 and est.stable
    assert est.locus.counts == {k: 1 for k in range(1, 7)}  # GF(2)..GF(64)
    line = Locus(F2, 3, [P("x1", n=3)])
    assert codim_estimate(line).codim == 1


def test_empty_locus(P):
    L = singular_locus([P("x1"), P("x2")])
    est = codim_estimate(L)
    assert est.empty and est.codim == 3
    assert est.to_json()["locus"]["dim"] == "empty"


def test_unstable_estimate_flagged(P):
    # x1^2+x2^2 over GF(3): only the origin over GF(3), a pair of lines over GF(9)
    est = dim_estimate(Locus(F3, 2, [P("x1^2+x2^2", "GF(3)")]))
    assert est.counts[1] == 1 and est.counts[2] == 17
    assert not est.stable


def test_max_extension():
    assert max_extension(F2, 2) == 6
    assert max_extension(F3, 4) == 3
    assert max_extension(F2, 30, budget=2**24) == 0


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([F2, F3]), st.integers(1, 4), st.data())
def test_linear_codim_exact(ctx, n, data):
    m = data.draw(st.integers(1, n))
    forms = []
    for _ in range(m):
        vals = data.draw(st.lists(st.integers(0, ctx.q - 1), min_size=n, max_size=n))
        forms.append(Polynomial.linear(ctx, vals))
    est = dim_estimate(Locus(ctx, n, forms))
    assert est.stable and est.estimate == linear_dimension(forms)


# -- checks --------------------------------------------------------------------------------

def test_rt_examples(P):
    assert rt_check([P("x1", n=4), P("x2", n=4)], 1).passed
    for t in (0, 1, 2):
        assert not rt_check([P("x1^2", "GF(3)")], t).passed
    assert rt_check([], 3).passed


def test_rt_readings_differ(P):
    forms = [P("x1*x2", "GF(3)", 3)]
    cur = rt_check(forms, 1)
    prev = rt_check(forms, 1, reading="previous")
    assert cur.prefixes[0].codim.codim == 1
    assert prev.prefixes[0].codim.codim == 2
    with pytest.raises(PreconditionFailed):
        rt_check(forms, 1, reading="other")


def test_low_rank_examples(P):
    rep = low_rank_singularity_check(P("x1*x2", n=4), [], 1)
    assert (rep.dim_X, rep.dim_Z, rep.holds, rep.stable) == (4, 2, True, True)
    rep = low_rank_singularity_check(P("x1*x2+x3*x4", n=4), [], 2, K=4)
    assert (rep.dim_Z, rep.holds) == (0, True)
    rep = low_rank_singularity_check(P("0", n=3), [P("x1", n=3)], 0, K=4)
    assert rep.holds and rep.dim_Z == rep.dim_X == 2
    with pytest.raises(PreconditionFailed):
        low_rank_singularity_check(P("x1*x2+x3*x4", n=4), [], 1)


def test_taylor_ideal_examples(P):
    assert taylor_ideal_check(P("x1*x2"), [P("x1")], [0, 0])
    assert taylor_ideal_check(P("x1^2", "GF(3)", 3), [P("x1", "GF(3)", 3)], [1, 0, 0])
    with pytest.raises(PreconditionFailed):
        taylor_ideal_check(P("x1*x2", n=2), [P("x1"), P("x1")], [1, 0])
