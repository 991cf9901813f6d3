"""Exact Schmidt rank and relative rank by exhaustive certificate search.

To decide whether forms f_1..f_s of degree d have rank <= r relative to a
homogeneous ideal I, the search enumerates the "small" factors g_i
(deg g_i <= d/2, the other factor being the larger one) and solves for the
large factors by linear algebra: some nonzero combination of the f_i lies
in I_d + sum_i g_i * R_{d - deg g_i}.  That condition depends only on the
span of the g_i of each degree taken modulo I, so the search runs over
subspaces of R_e / I_e (RREF bases, one per degree) rather than over
ordered tuples.  Each subspace stands for every tuple spanning it, so the
minimum found is the same as with tuple enumeration.

For a fixed candidate, the combinations that work form a linear space (a
left kernel), so all projective combinations are settled with one
elimination.  The combination reported is the lexicographically smallest
normalised vector of that kernel for the first candidate that succeeds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import BudgetExceeded, DegreeMismatch
from .poly import (
    Polynomial,
    format_poly,
    graded_piece,
    in_ideal,
    monomials_of_degree,
    multiples_matrix,
)

DEFAULT_RMAX = 4
DEFAULT_SEARCH_BUDGET = 2**26


@dataclass(frozen=True)
class RankValue:
    """Exact rank, infinity, or "exceeds(r_max)" for a truncated search."""

    value: int | None = None
    infinite: bool = False
    exceeds: int | None = None

    @classmethod
    def exact(cls, r: int) -> "RankValue":
        return cls(value=r)

    @classmethod
    def inf(cls) -> "RankValue":
        return cls(infinite=True)

    @classmethod
    def exceeded(cls, r_max: int) -> "RankValue":
        return cls(exceeds=r_max)

    @property
    def is_exact(self) -> bool:
        return self.value is not None

    def gt(self, threshold) -> bool | None:
        """Is rank > threshold?  None when the truncated search cannot tell."""
        if self.infinite:
            return True
        if self.value is not None:
            return self.value > threshold
        if self.exceeds >= threshold:
            return True
        return None

    def lower_bound(self) -> float:
        if self.infinite:
            return float("inf")
        if self.value is not None:
            return self.value
        return self.exceeds + 1

    def to_json(self):
        if self.infinite:
            return "inf"
        if self.value is not None:
            return self.value
        return {"exceeds": self.exceeds}

    def __str__(self):
        if self.infinite:
            return "inf"
        if self.value is not None:
            return str(self.value)
        return f"exceeds({self.exceeds})"


@dataclass
class RankCertificate:
    """Witness that target = sum g_i h_i + coset_witness with coset_witness in I_d."""

    pairs: list
    target: Polynomial
    coset_witness: Polynomial | None = None
    combination: tuple | None = None

    @property
    def rank(self) -> int:
        return len(self.pairs)

    def reconstruct(self) -> Polynomial:
        total = Polynomial.zero(self.target.ctx, self.target.nvars)
        for g, h in self.pairs:
            total = total + g * h
        if self.coset_witness is not None:
            total = total + self.coset_witness
        return total

    def verify(self, forms=None, generators=()) -> bool:
        """Replay the certificate: degrees, exact reconstruction, ideal membership, combination."""
        d = self.target.degree
        for g, h in self.pairs:
            if g.is_zero() or h.is_zero():
                return False
            if not (g.is_homogeneous() and h.is_homogeneous()):
                return False
            if g.degree < 1 or h.degree < 1 or g.degree + h.degree != d:
                return False
        if self.reconstruct() != self.target:
            return False
        if self.coset_witness is not None and not self.coset_witness.is_zero():
            if not in_ideal(self.coset_witness, list(generators)):
                return False
        if forms is not None and self.combination is not None:
            combo = Polynomial.zero(self.target.ctx, self.target.nvars)
            for a, f in zip(self.combination, forms):
                combo = combo + f.scale(a)
            if combo != self.target:
                return False
        return True

    def to_json(self, blocks=None) -> dict:
        ctx = self.target.ctx
        out = {
            "rank": len(self.pairs),
            "pairs": [{"g": format_poly(g, blocks), "h": format_poly(h, blocks)} for g, h in self.pairs],
            "coset_witness": format_poly(self.coset_witness, blocks) if self.coset_witness is not None else "0",
        }
        if self.combination is not None:
            out["combination"] = [ctx.format(a) for a in self.combination]
        return out


@dataclass
class RankResult:
    rank: RankValue
    certificate: RankCertificate | None = None
    candidates_tested: int = 0
    upper_bound: int | None = None

    def to_json(self, blocks=None) -> dict:
        out = {"rank": self.rank.to_json()}
        if self.certificate is not None:
            out.update({k: v for k, v in self.certificate.to_json(blocks).items() if k != "rank"})
        out["candidates_tested"] = self.candidates_tested
        return out


def _quotient_coordinates(generators, e, ctx, n):
    """Columns of the degree-e monomial basis that are free modulo I_e."""
    piece = graded_piece(generators, e, ctx, n)
    pivots = set(piece.pivots)
    return [i for i in range(len(monomials_of_degree(n, e))) if i not in pivots]


def _patterns(r, degrees, dims):
    """Ways to split r factors across the factor degrees, cheapest degrees first."""
    out = []
    for combo in itertools.combinations_with_replacement(degrees, r):
        counts = tuple(combo.count(e) for e in degrees)
        if all(c <= dims[e] for c, e in zip(counts, degrees)):
            out.append((combo, counts))
    return out


class _Search:
    def __init__(self, forms, generators, d, ctx, n, budget):
        self.forms = forms
        self.generators = list(generators)
        self.d = d
        self.ctx = ctx
        self.n = n
        self.budget = DEFAULT_SEARCH_BUDGET if budget is None else budget
        self.spent = 0
        self.tested = 0
        self.piece = graded_piece(self.generators, d, ctx, n)
        T = np.array([f.to_vector(d) if not f.is_zero() else np.zeros(len(monomials_of_degree(n, d)), dtype=np.int64)
                      for f in forms], dtype=np.int64)
        self.T = self.piece.reduce(T) if len(self.piece.pivots) else T
        self.factor_degrees = list(range(1, d // 2 + 1))
        self.coords = {e: _quotient_coordinates(self.generators, e, ctx, n) for e in self.factor_degrees}
        self.dims = {e: len(self.coords[e]) for e in self.factor_degrees}

    def _kernel_combination(self, residual):
        K = linalg.left_kernel(residual, self.ctx)
        if K.shape[0] == 0:
            return None
        return tuple(int(a) for a in K[-1])

    def try_rank_zero(self):
        return self._kernel_combination(self.T)

    def level(self, r):
        """Search rank exactly r; returns (combination, factor list) or None."""
        q = self.ctx.q
        pats = _patterns(r, self.factor_degrees, self.dims)
        cost = 0
        for _, counts in pats:
            c = 1
            for e, a in zip(self.factor_degrees, counts):
                c *= linalg.gaussian_binomial(self.dims[e], a, q)
            cost += c
        if self.spent + cost > self.budget:
            raise BudgetExceeded(
                f"rank search at r={r} needs {self.spent + cost} candidates, budget {self.budget}"
            )
        self.spent += cost
        base = self.piece.basis
        for _, counts in pats:
            iters = [
                linalg.iter_subspaces(self.dims[e], a, q)
                for e, a in zip(self.factor_degrees, counts)
            ]
            for choice in itertools.product(*iters):
                self.tested += 1
                blocks = [base] if base.shape[0] else []
                factors = []
                for e, sub in zip(self.factor_degrees, choice):
                    width = len(monomials_of_degree(self.n, e))
                    cols = self.coords[e]
                    for row in sub:
                        g = np.zeros(width, dtype=np.int64)
                        g[cols] = row
                        factors.append((e, g))
                        blocks.append(multiples_matrix(g, self.n, e, self.d))
                R, piv = linalg.rref(np.concatenate(blocks), self.ctx)
                resid = linalg.reduce_rows(self.T, R, piv, self.ctx)
                combo = self._kernel_combination(resid)
                if combo is not None:
                    return combo, factors
        return None

    def certificate(self, combo, factors):
        ctx, n, d = self.ctx, self.n, self.d
        target = Polynomial.zero(ctx, n)
        for a, f in zip(combo, self.forms):
            target = target + f.scale(a)
        blocks, owners = [], []
        for k, (e, g) in enumerate(factors):
            M = multiples_matrix(g, n, e, d)
            blocks.append(M)
            owners.extend((k, m) for m in monomials_of_degree(n, d - e))
        spanning = np.concatenate(blocks + [self.piece.spanning]) if blocks or self.piece.spanning.shape[0] else None
        pairs = []
        if spanning is not None and spanning.shape[0]:
            coeffs = linalg.solve_left(spanning, target.to_vector(d) if not target.is_zero()
                                       else np.zeros(spanning.shape[1], dtype=np.int64), ctx)
            assert coeffs is not None, "certificate solve failed after a successful search"
            hs = [dict() for _ in factors]
            for (k, m), c in zip(owners, coeffs[: len(owners)]):
                if c:
                    hs[k][m] = int(c)
            for (e, g), h in zip(factors, hs):
                pairs.append((Polynomial.from_vector(ctx, n, e, g), Polynomial(ctx, n, h)))
        total = Polynomial.zero(ctx, n)
        for g, h in pairs:
            total = total + g * h
        witness = target - total
        return RankCertificate(pairs=pairs, target=target, coset_witness=witness, combination=combo)


def _common_degree(forms):
    degs = set()
    for f in forms:
        if not f.is_zero():
            degs.add(f.form_degree())
    if len(degs) > 1:
        raise DegreeMismatch(f"forms of different degrees {sorted(degs)}")
    return degs.pop() if degs else None


def trivial_certificate(f: Polynomial, generators=()) -> RankCertificate:
    """f mod I_d written as sum over variables x_i * h_i (i = first variable of each monomial)."""
    ctx, n = f.ctx, f.nvars
    d = f.form_degree()
    piece = graded_piece(list(generators), d, ctx, n)
    reduced = Polynomial.from_vector(ctx, n, d, piece.reduce(f.to_vector(d)))
    groups = {}
    for e, c in reduced.terms.items():
        i = next(j for j, x in enumerate(e) if x)
        rest = list(e)
        rest[i] -= 1
        groups.setdefault(i, {})[tuple(rest)] = c
    pairs = [(Polynomial.var(ctx, n, i), Polynomial(ctx, n, h)) for i, h in sorted(groups.items())]
    return RankCertificate(pairs=pairs, target=f, coset_witness=f - reduced, combination=(1,))


def collection_rank(forms, generators=(), r_max: int = DEFAULT_RMAX, budget: int | None = None) -> RankResult:
    """rk_I(f_1..f_s): minimum relative rank over nonzero combinations."""
    forms = list(forms)
    if not forms:
        raise DegreeMismatch("need at least one form")
    d = _common_degree(forms)
    ctx, n = forms[0].ctx, forms[0].nvars
    if d is None:
        combo = (1,) + (0,) * (len(forms) - 1)
        return RankResult(RankValue.exact(0), RankCertificate([], forms[0], forms[0], combo))
    if d < 1:
        raise DegreeMismatch("forms must have positive degree")
    search = _Search(forms, generators, d, ctx, n, budget)
    combo = search.try_rank_zero()
    if combo is not None:
        return RankResult(RankValue.exact(0), search.certificate(combo, []), 0)
    if d == 1:
        return RankResult(RankValue.inf(), None, 0)
    for r in range(1, r_max + 1):
        found = search.level(r)
        if found is not None:
            cert = search.certificate(*found)
            return RankResult(RankValue.exact(r), cert, search.tested)
    return RankResult(RankValue.exceeded(r_max), None, search.tested)


def relative_rank(f: Polynomial, generators=(), r_max: int = DEFAULT_RMAX, budget: int | None = None) -> RankResult:
    """rk_I(f) = min over g in I_d of rk(f + g)."""
    if not f.is_zero() and f.form_degree() < 1:
        raise DegreeMismatch("deg f must be >= 1")
    return collection_rank([f], generators, r_max, budget)


def schmidt_rank(f: Polynomial, r_max: int = DEFAULT_RMAX, budget: int | None = None) -> RankResult:
    return relative_rank(f, (), r_max, budget)


def collection_upper_bound(forms, generators=()) -> tuple:
    """(bound, index, certificate): smallest trivial certificate among the single forms."""
    best = None
    for i, f in enumerate(forms):
        if f.is_zero():
            continue
        cert = trivial_certificate(f, generators)
        if best is None or cert.rank < best[0]:
            best = (cert.rank, i, cert)
    return best


# -- independent oracles -------------------------------------------------------

def coset_enumeration_rank(f: Polynomial, generators, r_max: int = DEFAULT_RMAX, budget: int = 2**16) -> RankValue:
    """min over all g in I_d of schmidt_rank(f + g), by listing the whole coset."""
    d = f.form_degree()
    piece = graded_piece(list(generators), d, f.ctx, f.nvars)
    q = f.ctx.q
    if q ** piece.dim > budget:
        raise BudgetExceeded(f"coset of size {q ** piece.dim}")
    best = None
    basis = piece.basis
    for coeffs in itertools.product(range(q), repeat=piece.dim):
        v = f.to_vector(d)
        for c, row in zip(coeffs, basis):
            if c:
                v = f.ctx.ADD[v, f.ctx.MUL[c, row]]
        g = Polynomial.from_vector(f.ctx, f.nvars, d, v)
        rv = schmidt_rank(g, r_max).rank
        if best is None or rv.lower_bound() < best.lower_bound():
            best = rv
    return best


def quadric_gram(f: Polynomial) -> np.ndarray:
    """Symmetric matrix B with f(x) = x^T B x / 2 (Hessian of f), odd characteristic."""
    ctx, n = f.ctx, f.nvars
    B = np.zeros((n, n), dtype=np.int64)
    for e, c in f.terms.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        i, j = idx
        if i == j:
            B[i, i] = ctx.add(int(B[i, i]), ctx.add(c, c))
        else:
            B[i, j] = ctx.add(int(B[i, j]), c)
            B[j, i] = ctx.add(int(B[j, i]), c)
    return B


def _congruence_diagonal(B, ctx):
    A = np.array(B, dtype=np.int64)
    diag = []
    while A.shape[0]:
        nz_diag = [i for i in range(A.shape[0]) if A[i, i]]
        if not nz_diag:
            off = np.argwhere(A)
            if off.size == 0:
                break
            i, j = (int(x) for x in off[0])
            A[i, :] = ctx.ADD[A[i, :], A[j, :]]
            A[:, i] = ctx.ADD[A[:, i], A[:, j]]
            continue
        i = nz_diag[0]
        piv = int(A[i, i])
        diag.append(piv)
        col = A[:, i].copy()
        inv = ctx.inv(piv)
        scale = ctx.MUL[inv, col]
        A = ctx.SUB[A, ctx.MUL[scale[:, None], A[i][None, :]]]
        keep = [k for k in range(A.shape[0]) if k != i]
        A = A[np.ix_(keep, keep)]
    return diag


def quadric_rank_oracle(f: Polynomial) -> int:
    """Schmidt rank of a quadratic form over GF(q), q odd, from its Gram matrix.

    With m the rank of the Gram matrix: ceil(m/2) if m is odd; m/2 if the
    nondegenerate part is hyperbolic ((-1)^(m/2) disc is a square); m/2 + 1
    otherwise.
    """
    ctx = f.ctx
    if ctx.p == 2:
        raise DegreeMismatch("the Gram-matrix oracle needs odd characteristic")
    if f.is_zero():
        return 0
    if f.form_degree() != 2:
        raise DegreeMismatch("quadric oracle needs a degree-2 form")
    diag = _congruence_diagonal(quadric_gram(f), ctx)
    m = len(diag)
    if m % 2:
        return (m + 1) // 2
    disc = 1
    for x in diag:
        disc = ctx.mul(disc, x)
    if (m // 2) % 2:
        disc = ctx.neg(disc)
    return m // 2 if ctx.is_square(disc) else m // 2 + 1


def change_field(f: Polynomial, ctx) -> Polynomial:
    """View f over an extension field of its own field."""
    from .field import field_embedding

    if ctx == f.ctx:
        return f
    image = field_embedding(f.ctx, ctx)
    return Polynomial(ctx, f.nvars, {e: image[c] for e, c in f.terms.items()})
