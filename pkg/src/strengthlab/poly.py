"""Sparse multivariate polynomials over a FieldCtx.

A Polynomial maps exponent tuples to nonzero coefficient codes.  Monomials
are ordered by graded reverse lexicographic order with x1 > x2 > ... ;
printed output and coefficient vectors always list monomials from largest
to smallest in that order.

Text grammar (whitespace is insignificant)::

    poly   := term ('+' term)*
    term   := coeff ('*' factor)* | factor ('*' factor)*
    factor := var ('^' nat)?
    var    := 'x' nat | 'y' nat | 'z' nat

Coefficients are "3" in prime fields and "[c0,c1,...]" in extensions.  The
x/y/z letters address contiguous variable blocks; without block metadata
every variable is an x.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import linalg
from .errors import CharDividesDegree, ContextMismatch, DegreeMismatch, DimensionMismatch, ParseError
from .field import FieldCtx


def grevlex_key(exps):
    return (sum(exps), tuple(-e for e in reversed(exps)))


@lru_cache(maxsize=None)
def monomials_of_degree(n: int, d: int) -> tuple:
    """All exponent tuples of total degree d in n variables, largest first."""
    if d < 0:
        return ()
    if n == 0:
        return ((),) if d == 0 else ()
    out = []
    for bars in itertools.combinations(range(d + n - 1), n - 1):
        prev = -1
        exps = []
        for b in bars:
            exps.append(b - prev - 1)
            prev = b
        exps.append(d + n - 2 - prev)
        out.append(tuple(exps))
    out.sort(key=grevlex_key, reverse=True)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(n: int, d: int) -> dict:
    return {m: i for i, m in enumerate(monomials_of_degree(n, d))}


@lru_cache(maxsize=None)
def multiplication_index(n: int, e: int, c: int) -> np.ndarray:
    """table[a, b] = position of (monomial a of degree e) * (monomial b of degree c) among degree e+c monomials."""
    left = monomials_of_degree(n, e)
    right = monomials_of_degree(n, c)
    target = monomial_index(n, e + c)
    table = np.empty((len(left), len(right)), dtype=np.int64)
    for a, ma in enumerate(left):
        for b, mb in enumerate(right):
            table[a, b] = target[tuple(x + y for x, y in zip(ma, mb))]
    table.setflags(write=False)
    return table


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables over ``ctx``."""

    __slots__ = ("ctx", "nvars", "terms", "_hash")

    def __init__(self, ctx: FieldCtx, nvars: int, terms=None):
        self.ctx = ctx
        self.nvars = nvars
        clean = {}
        if terms:
            for exps, c in terms.items():
                if c:
                    exps = tuple(exps)
                    if len(exps) != nvars:
                        raise DimensionMismatch(f"monomial {exps} has wrong length for {nvars} variables")
                    clean[exps] = int(c)
        self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, ctx, nvars):
        return cls(ctx, nvars)

    @classmethod
    def constant(cls, ctx, nvars, c):
        return cls(ctx, nvars, {(0,) * nvars: ctx.code(c)})

    @classmethod
    def var(cls, ctx, nvars, i):
        exps = [0] * nvars
        exps[i] = 1
        return cls(ctx, nvars, {tuple(exps): 1})

    @classmethod
    def linear(cls, ctx, coeffs):
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            exps = [0] * n
            exps[i] = 1
            terms[tuple(exps)] = ctx.code(c)
        return cls(ctx, n, terms)

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self, d: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if d is None:
            return len(degs) <= 1
        return degs <= {d}

    def form_degree(self) -> int:
        """Degree of a nonzero homogeneous polynomial; raises DegreeMismatch otherwise."""
        degs = {sum(e) for e in self.terms}
        if len(degs) != 1:
            raise DegreeMismatch("expected a nonzero homogeneous form")
        return degs.pop()

    def degree_in(self, start: int, stop: int) -> set:
        """Set of partial degrees in the variable block [start, stop)."""
        return {sum(e[start:stop]) for e in self.terms}

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def variables(self) -> list:
        return sorted({i for e in self.terms for i, x in enumerate(e) if x})

    def homogeneous_component(self, d: int) -> "Polynomial":
        return Polynomial(self.ctx, self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        if other.ctx != self.ctx:
            raise ContextMismatch("polynomials over different fields")
        if other.nvars != self.nvars:
            raise ContextMismatch(f"polynomials in {self.nvars} and {other.nvars} variables")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        add = self.ctx._add
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = add[terms.get(e, 0)][c]
        return Polynomial(self.ctx, self.nvars, terms)

    def __neg__(self):
        neg = self.ctx._neg
        return Polynomial(self.ctx, self.nvars, {e: neg[c] for e, c in self.terms.items()})

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        sub = self.ctx._sub
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = sub[terms.get(e, 0)][c]
        return Polynomial(self.ctx, self.nvars, terms)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(self.ctx.code(other))
        self._check(other)
        add, mul = self.ctx._add, self.ctx._mul
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = add[terms.get(e, 0)][mul[c1][c2]]
        return Polynomial(self.ctx, self.nvars, terms)

    def __rmul__(self, other):
        return self.scale(self.ctx.code(other))

    def scale(self, c: int) -> "Polynomial":
        if not c:
            return Polynomial(self.ctx, self.nvars)
        mul = self.ctx._mul[c]
        return Polynomial(self.ctx, self.nvars, {e: mul[v] for e, v in self.terms.items()})

    def __pow__(self, k: int):
        result = Polynomial.constant(self.ctx, self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ctx == other.ctx and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({format_poly(self)!r}, {self.ctx.spec}, nvars={self.nvars})"

    def __str__(self):
        return format_poly(self)

    def __reduce__(self):
        return (Polynomial, (self.ctx, self.nvars, self.terms))

    # -- calculus and evaluation -------------------------------------------

    def partial(self, i: int) -> "Polynomial":
        mul = self.ctx._mul
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                coef = mul[c][self.ctx.from_int(e[i])]
                if coef:
                    ne = list(e)
                    ne[i] -= 1
                    ne = tuple(ne)
                    terms[ne] = self.ctx._add[terms.get(ne, 0)][coef]
        return Polynomial(self.ctx, self.nvars, terms)

    def gradient(self) -> list:
        return [self.partial(i) for i in range(self.nvars)]

    def evaluate(self, point) -> int:
        add, mul = self.ctx._add, self.ctx._mul
        acc = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = mul[v][self.ctx.pow(int(x), k)]
            acc = add[acc][v]
        return acc

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorised evaluation at each row of ``points`` (codes)."""
        points = np.asarray(points, dtype=np.int64)
        out = np.zeros(points.shape[0], dtype=np.int64)
        if not self.terms:
            return out
        maxe = max(max(e) for e in self.terms)
        POW = _power_table(self.ctx, maxe)
        ADD, MUL = self.ctx.ADD, self.ctx.MUL
        for e, c in self.terms.items():
            v = np.full(points.shape[0], c, dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    v = MUL[v, POW[points[:, i], k]]
            out = ADD[out, v]
        return out

    def compose(self, images) -> "Polynomial":
        """Substitute x_i -> images[i] (polynomials sharing a ctx and nvars)."""
        if len(images) != self.nvars:
            raise DimensionMismatch(f"need {self.nvars} images, got {len(images)}")
        if not images:
            return self
        target_n = images[0].nvars
        powers = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                powers[key] = images[i] ** k
            return powers[key]

        result = Polynomial.zero(self.ctx, target_n)
        for e, c in self.terms.items():
            term = Polynomial.constant(self.ctx, target_n, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def embed(self, nvars: int, offset: int = 0) -> "Polynomial":
        """Same polynomial viewed in a larger ring, its variables starting at ``offset``."""
        if offset + self.nvars > nvars:
            raise DimensionMismatch("embedding does not fit")
        pad_right = nvars - offset - self.nvars
        return Polynomial(
            self.ctx, nvars, {(0,) * offset + e + (0,) * pad_right: c for e, c in self.terms.items()}
        )

    def to_vector(self, d: int) -> np.ndarray:
        """Coefficient vector over the grevlex basis of degree-d monomials."""
        index = monomial_index(self.nvars, d)
        v = np.zeros(len(index), dtype=np.int64)
        for e, c in self.terms.items():
            if sum(e) != d:
                raise DegreeMismatch(f"term of degree {sum(e)} in degree-{d} vector")
            v[index[e]] = c
        return v

    @classmethod
    def from_vector(cls, ctx, nvars, d, v):
        basis = monomials_of_degree(nvars, d)
        return cls(ctx, nvars, {basis[i]: int(c) for i, c in enumerate(v) if c})


_POW_CACHE = {}


def _power_table(ctx, maxe):
    key = (ctx, maxe)
    if key not in _POW_CACHE:
        _POW_CACHE[key] = ctx.power_table(maxe)
    return _POW_CACHE[key]


# -- text format -----------------------------------------------------------

def _var_name(i, blocks):
    if blocks is None:
        return f"x{i + 1}"
    start = 0
    for letter in ("x", "y", "z"):
        size = blocks.get(letter, 0)
        if i < start + size:
            return f"{letter}{i - start + 1}"
        start += size
    raise DimensionMismatch(f"variable {i} outside the declared blocks")


def format_poly(f: Polynomial, blocks: dict | None = None) -> str:
    if f.is_zero():
        return "0"
    parts = []
    for e, c in f.sorted_terms():
        factors = []
        for i, k in enumerate(e):
            if k:
                name = _var_name(i, blocks)
                factors.append(name if k == 1 else f"{name}^{k}")
        if not factors:
            parts.append(f.ctx.format(c))
        elif c == 1:
            parts.append("*".join(factors))
        else:
            parts.append("*".join([f.ctx.format(c)] + factors))
    return "+".join(parts)


_TOKEN = re.compile(r"\[[^\]]*\]|[xyz]\d+|\d+|[+*^]")


def _block_offsets(nvars, blocks):
    if blocks is None:
        return {"x": (0, nvars)}
    out = {}
    start = 0
    for letter in ("x", "y", "z"):
        size = int(blocks.get(letter, 0))
        out[letter] = (start, size)
        start += size
    if start != nvars:
        raise DimensionMismatch(f"blocks {blocks} do not add up to {nvars} variables")
    return out


def parse_poly(text: str, ctx: FieldCtx, nvars: int, blocks: dict | None = None) -> Polynomial:
    compact = re.sub(r"\s+", "", text)
    if not compact:
        raise ParseError("empty polynomial")
    tokens = _TOKEN.findall(compact)
    if "".join(tokens) != compact:
        raise ParseError(f"unexpected characters in {text!r}")
    offsets = _block_offsets(nvars, blocks)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        tok = peek()
        if tok is None:
            raise ParseError(f"unexpected end of {text!r}")
        pos += 1
        return tok

    def factor():
        tok = take()
        if tok[0] not in "xyz":
            raise ParseError(f"expected a variable, got {tok!r}")
        start, size = offsets.get(tok[0], (0, 0))
        idx = int(tok[1:])
        if not 1 <= idx <= size:
            raise ParseError(f"variable {tok} out of range")
        k = 1
        if peek() == "^":
            take()
            exp = take()
            if not exp.isdigit():
                raise ParseError(f"bad exponent {exp!r}")
            k = int(exp)
        return start + idx - 1, k

    result = Polynomial.zero(ctx, nvars)
    while True:
        coeff = 1
        exps = [0] * nvars
        tok = peek()
        if tok is None:
            raise ParseError(f"dangling '+' in {text!r}")
        if tok[0] == "[" or tok.isdigit():
            coeff = ctx.parse(take())
        else:
            i, k = factor()
            exps[i] += k
        while peek() == "*":
            take()
            i, k = factor()
            exps[i] += k
        result = result + Polynomial(ctx, nvars, {tuple(exps): coeff})
        if peek() is None:
            break
        if take() != "+":
            raise ParseError(f"expected '+' in {text!r}")
    return result


# -- operations on forms -----------------------------------------------------

def poly_add(f, g):
    return f + g


def poly_mul(f, g):
    return f * g


def partial_derivative(f: Polynomial, i: int) -> Polynomial:
    if not 0 <= i < f.nvars:
        raise DimensionMismatch(f"variable index {i} out of range")
    return f.partial(i)


def directional_difference(f: Polynomial, start: int = 0, stop: int | None = None) -> Polynomial:
    """f(v + (0,..,z,..,0)) - f(v), with z shifting only the block [start, stop).

    The fresh variables z are appended after the existing ones.
    """
    stop = f.nvars if stop is None else stop
    width = stop - start
    n = f.nvars + width
    images = []
    for i in range(f.nvars):
        img = Polynomial.var(f.ctx, n, i)
        if start <= i < stop:
            img = img + Polynomial.var(f.ctx, n, f.nvars + i - start)
        images.append(img)
    return f.compose(images) - f.embed(n)


def translate(f: Polynomial, x0) -> Polynomial:
    """f(x + x0)."""
    images = [
        Polynomial.var(f.ctx, f.nvars, i) + Polynomial.constant(f.ctx, f.nvars, int(c))
        for i, c in enumerate(x0)
    ]
    return f.compose(images)


def taylor_layers(f: Polynomial, x0) -> list:
    """[f^0_{x0}, ..., f^d_{x0}]: homogeneous components of f(x + x0)."""
    d = max(f.degree, 0)
    shifted = translate(f, [f.ctx.code(c) for c in x0])
    return [shifted.homogeneous_component(j) for j in range(d + 1)]


def biform_layers(g: Polynomial) -> list:
    """[g^0, ..., g^d] with g(w + v) = sum_i g^i(w, v), g^i of bidegree (d-i, i).

    Variables of the result: w = 0..n-1, v = n..2n-1.
    """
    n = g.nvars
    d = g.form_degree()
    images = [Polynomial.var(g.ctx, 2 * n, i) + Polynomial.var(g.ctx, 2 * n, n + i) for i in range(n)]
    full = g.compose(images)
    layers = [dict() for _ in range(d + 1)]
    for e, c in full.terms.items():
        layers[sum(e[n:])][e] = c
    return [Polynomial(g.ctx, 2 * n, t) for t in layers]


def substitute_linear(f: Polynomial, M) -> Polynomial:
    """f(M y): row i of M expresses old variable x_i in the new variables y."""
    M = np.asarray(M, dtype=np.int64)
    if M.ndim != 2 or M.shape[0] != f.nvars:
        raise DimensionMismatch(f"matrix shape {M.shape} incompatible with {f.nvars} variables")
    images = [Polynomial.linear(f.ctx, list(M[i])) for i in range(f.nvars)]
    if not images:
        const = f.terms.get((), 0)
        return Polynomial.constant(f.ctx, M.shape[1], const)
    return f.compose(images)


def euler_check(f: Polynomial) -> bool:
    """d*f == sum_i x_i * df/dx_i; requires p not dividing d."""
    d = f.form_degree()
    if d % f.ctx.p == 0:
        raise CharDividesDegree(f"characteristic {f.ctx.p} divides degree {d}")
    rhs = Polynomial.zero(f.ctx, f.nvars)
    for i in range(f.nvars):
        rhs = rhs + Polynomial.var(f.ctx, f.nvars, i) * f.partial(i)
    return f.scale(f.ctx.from_int(d)) == rhs


# -- graded pieces of ideals ---------------------------------------------------

def multiples_matrix(g_vec: np.ndarray, n: int, e: int, d: int) -> np.ndarray:
    """Rows: coefficient vectors of m*g over all degree-(d-e) monomials m, for g given as a degree-e vector."""
    c = d - e
    idx = multiplication_index(n, e, c)
    nrows = idx.shape[1]
    out = np.zeros((nrows, len(monomials_of_degree(n, d))), dtype=np.int64)
    out[np.arange(nrows)[:, None], idx.T] = g_vec[None, :]
    return out


@dataclass
class GradedIdealPiece:
    """Degree-d part I_d of the ideal generated by homogeneous forms."""

    generators: list
    degree: int
    nvars: int
    ctx: FieldCtx
    basis: np.ndarray
    pivots: list
    spanning: np.ndarray = field(repr=False)
    labels: list = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def reduce(self, v: np.ndarray) -> np.ndarray:
        return linalg.reduce_rows(v, self.basis, self.pivots, self.ctx)

    def basis_polys(self) -> list:
        return [Polynomial.from_vector(self.ctx, self.nvars, self.degree, row) for row in self.basis]


def graded_piece(generators, d: int, ctx: FieldCtx | None = None, nvars: int | None = None) -> GradedIdealPiece:
    gens = [g for g in generators if not g.is_zero()]
    if gens:
        ctx, nvars = gens[0].ctx, gens[0].nvars
    if ctx is None or nvars is None:
        raise DimensionMismatch("need ctx and nvars for an empty generator list")
    rows, labels = [], []
    for gi, g in enumerate(generators):
        if g.is_zero():
            continue
        e = g.form_degree()
        if e < 1:
            raise DegreeMismatch("generators must have positive degree")
        if e > d:
            continue
        block = multiples_matrix(g.to_vector(e), nvars, e, d)
        rows.append(block)
        labels.extend((gi, m) for m in monomials_of_degree(nvars, d - e))
    width = len(monomials_of_degree(nvars, d))
    spanning = np.concatenate(rows) if rows else np.zeros((0, width), dtype=np.int64)
    basis, pivots = linalg.rref(spanning, ctx)
    return GradedIdealPiece(list(generators), d, nvars, ctx, basis, pivots, spanning, labels)


def ideal_member(f: Polynomial, piece: GradedIdealPiece):
    """(True, [h_1..h_s]) with f = sum h_i g_i, or (False, None)."""
    if not f.is_homogeneous(piece.degree):
        raise DegreeMismatch(f"f is not homogeneous of degree {piece.degree}")
    v = f.to_vector(piece.degree)
    coeffs = linalg.solve_left(piece.spanning, v, piece.ctx)
    if coeffs is None:
        return False, None
    hs = [dict() for _ in piece.generators]
    for (gi, m), c in zip(piece.labels, coeffs):
        if c:
            hs[gi][m] = int(c)
    return True, [Polynomial(piece.ctx, piece.nvars, h) for h in hs]


def in_ideal(f: Polynomial, generators) -> bool:
    """Graded membership of f in I(generators), component by component."""
    if f.is_zero():
        return True
    for d in sorted({sum(e) for e in f.terms}):
        comp = f.homogeneous_component(d)
        if d == 0:
            return False
        piece = graded_piece(generators, d, f.ctx, f.nvars)
        if not linalg.in_row_space(comp.to_vector(d), piece.basis, piece.pivots, f.ctx):
            return False
    return True


def factorial_mod(n: int, ctx: FieldCtx) -> int:
    return ctx.from_int(math.factorial(n))
