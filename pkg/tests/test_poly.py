import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strengthlab.errors import CharDividesDegree, DimensionMismatch, ParseError
from strengthlab.field import enumerate_vectors, parse_field
from strengthlab.poly import (
    Polynomial,
    biform_layers,
    directional_difference,
    euler_check,
    format_poly,
    graded_piece,
    ideal_member,
    in_ideal,
    monomials_of_degree,
    parse_poly,
    partial_derivative,
    substitute_linear,
    taylor_layers,
    translate,
)

FIELDS = ["GF(2)", "GF(3)", "GF(5)", "GF(4)"]


@st.composite
def polys(draw, n=None, max_deg=3, homogeneous=False, field=None):
    ctx = parse_field(field or draw(st.sampled_from(FIELDS)))
    n = n or draw(st.integers(1, 3))
    d = draw(st.integers(0, max_deg))
    mons = [m for e in ([d] if homogeneous else range(d + 1)) for m in monomials_of_degree(n, e)]
    picks = draw(st.lists(st.tuples(st.sampled_from(mons), st.integers(1, ctx.q - 1)), max_size=6))
    f = Polynomial.zero(ctx, n)
    for m, c in picks:
        f = f + Polynomial(ctx, n, {m: c})
    return f


# -- arithmetic examples ------------------------------------------------------------

def test_frobenius(P):
    assert (P("x1+x2") ** 2) == P("x1^2+x2^2")


def test_cancellation(P):
    assert (P("x1*x2") + P("x1*x2")).is_zero()


def test_product_gf3(P):
    assert P("x1+1", "GF(3)", 1) * P("x1+2", "GF(3)", 1) == P("x1^2+2", "GF(3)", 1)


def test_partials(P):
    assert partial_derivative(P("x1^3", "GF(3)", 1), 0).is_zero()
    assert partial_derivative(P("x1*x2"), 0) == P("x2")
    assert partial_derivative(P("x1^2", "GF(5)"), 1).is_zero()
    with pytest.raises(DimensionMismatch):
        partial_derivative(P("x1"), 5)


def test_directional_difference(P):
    # x^2 with x shifted by z (z appended as variable 2)
    assert directional_difference(P("x1^2", "GF(5)", 1)) == P("2*x1*x2+x2^2", "GF(5)", 2)
    assert directional_difference(P("x1^2", "GF(2)", 1)) == P("x2^2", "GF(2)", 2)
    # f = x*y, shift y only
    assert directional_difference(P("x1*x2", "GF(3)", 2), 1, 2) == P("x1*x3", "GF(3)", 3)


def test_taylor_examples(P):
    f = P("x1^2", "GF(5)", 1)
    assert taylor_layers(f, [3]) == [P("4", "GF(5)", 1), P("x1", "GF(5)", 1), f]
    g = P("x1^2", "GF(2)", 1)
    assert taylor_layers(g, [1]) == [P("1", "GF(2)", 1), Polynomial.zero(g.ctx, 1), g]
    h = P("x1*x2^2+x2^3", "GF(3)")
    layers = taylor_layers(h, [0, 0])
    assert all(x.is_zero() for x in layers[:-1]) and layers[-1] == h


def test_taylor_gf4_constants(P):
    # u = [0,1] must survive as a constant term
    f = P("x1^2", "GF(4)", 1)
    layers = taylor_layers(f, [2])
    assert layers[0] == P("[1,1]", "GF(4)", 1)


def test_biform_examples(P):
    g = P("x1*x2", "GF(3)")
    g0, g1, g2 = biform_layers(g)
    assert g0 == P("x1*x2", "GF(3)", 4)
    assert g1 == P("x1*x4+x2*x3", "GF(3)", 4)
    assert g2 == P("x3*x4", "GF(3)", 4)
    assert biform_layers(P("x1^4+x2^4", "GF(3)"))[2].is_zero()
    assert biform_layers(P("x1^5+x2^5", "GF(2)"))[2].is_zero()


def test_substitute_linear(P):
    f = P("x1*x2")
    assert substitute_linear(f, np.eye(2, dtype=int)) == f
    assert substitute_linear(f, [[1, 0], [1, 0]]) == P("x1^2")
    assert substitute_linear(P("x1^2"), np.zeros((2, 2), dtype=int)).is_zero()


def test_graded_membership(P):
    piece = graded_piece([P("x1")], 2)
    ok, hs = ideal_member(P("x1*x2"), piece)
    assert ok and hs == [P("x2")]
    assert ideal_member(P("x2^2"), piece) == (False, None)
    assert piece.dim == 2


def test_in_ideal_mixed_degrees(P):
    gens = [P("x1", "GF(3)", 3), P("x2*x3", "GF(3)", 3)]
    assert in_ideal(P("x1^3+x2*x3+x1*x2", "GF(3)", 3), gens)
    assert not in_ideal(P("x3^2", "GF(3)", 3), gens)
    assert not in_ideal(P("1+x1", "GF(3)", 3), gens)


def test_euler_examples(P):
    assert euler_check(P("x1*x2", "GF(3)"))
    assert euler_check(P("x1^3", "GF(5)", 1))
    with pytest.raises(CharDividesDegree):
        euler_check(P("x1^3", "GF(3)", 1))


def test_format_blocks(P):
    f = P("x1*y1+z2^2", "GF(3)", 5, {"x": 1, "y": 2, "z": 2})
    assert format_poly(f, {"x": 1, "y": 2, "z": 2}) == "x1*y1+z2^2"
    assert format_poly(f) == "x1*x2+x5^2"


@pytest.mark.parametrize("bad", ["x1**2", "x0", "x9", "2x1", "x1+", "x1^", "[1,2"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_poly(bad, parse_field("GF(4)"), 3)


# -- properties -------------------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(polys())
def test_format_parse_roundtrip(f):
    assert parse_poly(format_poly(f), f.ctx, f.nvars) == f


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_ring_laws(data):
    spec = data.draw(st.sampled_from(FIELDS))
    f, g, h = (data.draw(polys(n=2, field=spec)) for _ in range(3))
    assert f * (g + h) == f * g + f * h
    assert (f * g) * h == f * (g * h)
    assert f - f == Polynomial.zero(f.ctx, 2)


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_evaluation_is_a_homomorphism(data):
    spec = data.draw(st.sampled_from(FIELDS))
    f, g = data.draw(polys(n=2, field=spec)), data.draw(polys(n=2, field=spec))
    ctx = f.ctx
    pts = enumerate_vectors(ctx, 2)
    fv, gv = f.evaluate_many(pts), g.evaluate_many(pts)
    assert np.array_equal((f * g).evaluate_many(pts), ctx.MUL[fv, gv])
    assert np.array_equal((f + g).evaluate_many(pts), ctx.ADD[fv, gv])
    assert [f.evaluate(tuple(p)) for p in pts] == fv.tolist()


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_product_rule(data):
    spec = data.draw(st.sampled_from(FIELDS))
    f, g = data.draw(polys(n=3, field=spec)), data.draw(polys(n=3, field=spec))
    i = data.draw(st.integers(0, 2))
    assert (f * g).partial(i) == f.partial(i) * g + f * g.partial(i)


@settings(max_examples=80, deadline=None)
@given(polys(homogeneous=True), st.data())
def test_taylor_recombination(f, data):
    x0 = data.draw(st.lists(st.integers(0, f.ctx.q - 1), min_size=f.nvars, max_size=f.nvars))
    layers = taylor_layers(f, x0)
    total = Polynomial.zero(f.ctx, f.nvars)
    for j, layer in enumerate(layers):
        assert layer.is_zero() or layer.is_homogeneous(j)
        total = total + layer
    assert total == translate(f, x0)
    # pointwise: f(x + x0) at every x
    pts = enumerate_vectors(f.ctx, f.nvars)
    shifted = f.ctx.ADD[pts, np.array(x0)[None, :]]
    assert np.array_equal(total.evaluate_many(pts), f.evaluate_many(shifted))


@settings(max_examples=60, deadline=None)
@given(polys(n=2, homogeneous=True))
def test_biform_recombination(g):
    if g.is_zero():
        return
    layers = biform_layers(g)
    n = g.nvars
    total = Polynomial.zero(g.ctx, 2 * n)
    for layer in layers:
        total = total + layer
    sums = [Polynomial.var(g.ctx, 2 * n, i) + Polynomial.var(g.ctx, 2 * n, n + i) for i in range(n)]
    assert total == g.compose(sums)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_ideal_witness_reconstructs(data):
    spec = data.draw(st.sampled_from(FIELDS))
    gens = [data.draw(polys(n=3, field=spec, homogeneous=True, max_deg=2)) for _ in range(2)]
    gens = [g for g in gens if not g.is_zero() and g.form_degree() >= 1]
    if not gens:
        return
    d = 3
    ctx = gens[0].ctx
    f = Polynomial.zero(ctx, 3)
    for g in gens:
        m = monomials_of_degree(3, d - g.form_degree())[data.draw(st.integers(0, 2))]
        f = f + Polynomial(ctx, 3, {m: 1}) * g
    piece = graded_piece(gens, d)
    ok, hs = ideal_member(f, piece)
    assert ok
    rebuilt = Polynomial.zero(ctx, 3)
    for h, g in zip(hs, gens):
        rebuilt = rebuilt + h * g
    assert rebuilt == f
