"""Point counts, singular loci and dimension estimates over finite fields.

Everything here is empirical: a dimension is read off from exact point
counts |X(GF(q^k))| for k = 1..K, which is an estimator and not a proof.
Loci are membership predicates evaluated pointwise, never ideals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import BudgetExceeded, PreconditionFailed
from .field import MAX_FIELD_SIZE, enumeration_budget, get_field, iter_vector_chunks
from .poly import Polynomial, format_poly, graded_piece, in_ideal, taylor_layers
from .rank import change_field, relative_rank


@dataclass
class Locus:
    """{x : all equations vanish, and (if given) the gradients of ``singular`` are dependent}.

    With ``block`` = (start, stop) only the partials in that variable block
    enter the rank test (the S_y condition).
    """

    ctx: object
    nvars: int
    equations: list = field(default_factory=list)
    singular: list | None = None
    block: tuple | None = None

    def _ext(self, ext):
        eqs = [change_field(f, ext) for f in self.equations]
        sing = None
        if self.singular is not None:
            start, stop = self.block or (0, self.nvars)
            sing = [[change_field(f, ext).partial(j) for j in range(start, stop)] for f in self.singular]
        return eqs, sing

    def mask(self, points: np.ndarray, ext=None, _cache=None) -> np.ndarray:
        ext = ext or self.ctx
        eqs, sing = _cache if _cache is not None else self._ext(ext)
        keep = np.ones(points.shape[0], dtype=bool)
        for f in eqs:
            keep &= f.evaluate_many(points) == 0
        if sing is not None and sing:
            idx = np.flatnonzero(keep)
            if idx.size:
                sub = points[idx]
                width = len(sing[0])
                M = np.zeros((idx.size, len(sing), width), dtype=np.int64)
                for i, row in enumerate(sing):
                    for j, g in enumerate(row):
                        M[:, i, j] = g.evaluate_many(sub)
                keep[idx] = linalg.batch_rank(M, ext) < len(sing)
        return keep

    def contains(self, point) -> bool:
        pts = np.array([[self.ctx.code(c) for c in point]], dtype=np.int64)
        return bool(self.mask(pts)[0])

    def count(self, k: int = 1, budget=None, shards: int = 1, keep_points: bool = False):
        """Exact |X(GF(q^k))|, and optionally the points, enumerated in ``shards`` contiguous ranges."""
        ext = extension(self.ctx, k)
        cache = self._ext(ext)
        total = ext.q ** self.nvars
        enumeration_check(total, budget)
        bounds = [total * s // max(shards, 1) for s in range(max(shards, 1) + 1)]
        count, kept = 0, []
        for lo, hi in zip(bounds, bounds[1:]):
            for chunk in iter_vector_chunks(ext, self.nvars, budget=budget, start=lo, stop=hi):
                m = self.mask(chunk, ext, cache)
                count += int(m.sum())
                if keep_points:
                    kept.append(chunk[m])
        if keep_points:
            pts = np.concatenate(kept) if kept else np.zeros((0, self.nvars), dtype=np.int64)
            return count, pts
        return count


def enumeration_check(total, budget):
    cap = enumeration_budget(budget)
    if total > cap:
        raise BudgetExceeded(f"point enumeration of size {total} exceeds budget {cap}")


def extension(ctx, k: int):
    return ctx if k == 1 else get_field(ctx.p, ctx.k * k)


def max_extension(ctx, nvars: int, budget=None) -> int:
    """Largest K with every GF(q^k)^n, k <= K, inside the budget and the field-size cap."""
    cap = enumeration_budget(budget)
    K = 0
    while ctx.q ** (K + 1) <= MAX_FIELD_SIZE and ctx.q ** ((K + 1) * nvars) <= cap:
        K += 1
    return K


@dataclass
class PointSet:
    forms: list
    ctx: object
    counts: dict
    points: np.ndarray | None = None

    def to_json(self) -> dict:
        return {"forms": [format_poly(f) for f in self.forms], "counts": {str(k): c for k, c in self.counts.items()}}


def enumerate_variety(forms, ctx=None, k: int = 1, budget=None, keep_points: bool = False, nvars=None, shards: int = 1) -> PointSet:
    forms = list(forms)
    if forms:
        ctx, nvars = forms[0].ctx, forms[0].nvars
    if ctx is None or nvars is None:
        raise PreconditionFailed("an empty system needs ctx and nvars")
    locus = Locus(ctx, nvars, forms)
    res = locus.count(k, budget, shards, keep_points)
    if keep_points:
        return PointSet(forms, ctx, {k: res[0]}, res[1])
    return PointSet(forms, ctx, {k: res})


def singular_locus(forms, within=()) -> Locus:
    """S(f_1..f_s) (optionally intersected with X(within)): gradients linearly dependent."""
    forms = list(forms)
    if not forms:
        raise PreconditionFailed("singular locus needs s >= 1")
    return Locus(forms[0].ctx, forms[0].nvars, list(within), forms)


def singular_locus_y(forms, y_block, within=()) -> Locus:
    """S_y: rank of the y-partials below s."""
    forms = list(forms)
    if not forms:
        raise PreconditionFailed("singular locus needs s >= 1")
    return Locus(forms[0].ctx, forms[0].nvars, list(within), forms, tuple(y_block))


# -- dimension estimates ---------------------------------------------------------

@dataclass
class DimensionEstimate:
    counts: dict
    ratios: dict
    estimate: int | None
    stable: bool

    @property
    def empty(self) -> bool:
        return self.estimate is None

    def to_json(self) -> dict:
        return {
            "counts": {str(k): c for k, c in self.counts.items()},
            "dim": "empty" if self.empty else self.estimate,
            "stable": self.stable,
        }


def dim_estimate(locus: Locus, K: int | None = None, budget=None, shards: int = 1) -> DimensionEstimate:
    """round(log_{q^K} |X(GF(q^K))|), stable when every sampled log-ratio lies within 0.5 of the others."""
    if K is None:
        K = max_extension(locus.ctx, locus.nvars, budget)
    if K < 1:
        enumeration_check(locus.ctx.q ** locus.nvars, budget)
    counts, ratios = {}, {}
    for k in range(1, K + 1):
        c = locus.count(k, budget, shards)
        counts[k] = c
        Q = locus.ctx.q ** k
        ratios[k] = math.log(c, Q) if c else float("-inf")
    top = counts[K]
    if top == 0:
        return DimensionEstimate(counts, ratios, None, all(c == 0 for c in counts.values()))
    finite = [r for r in ratios.values() if r != float("-inf")]
    stable = len(finite) == len(ratios) and max(finite) - min(finite) < 0.5
    return DimensionEstimate(counts, ratios, int(round(ratios[K])), stable)


@dataclass
class CodimEstimate:
    codim: int
    ambient: int
    locus: DimensionEstimate
    ambient_estimate: DimensionEstimate | None
    stable: bool

    @property
    def empty(self) -> bool:
        return self.locus.empty

    def to_json(self) -> dict:
        out = {"codim": self.codim, "ambient_dim": self.ambient, "empty": self.empty, "stable": self.stable}
        out["locus"] = self.locus.to_json()
        if self.ambient_estimate is not None:
            out["ambient"] = self.ambient_estimate.to_json()
        return out


def codim_estimate(locus: Locus, within: Locus | None = None, K: int | None = None, budget=None, shards: int = 1) -> CodimEstimate:
    """Ambient estimate minus locus estimate; an empty locus reports ambient + 1 with the empty flag."""
    if within is None:
        amb, amb_est, amb_stable = locus.nvars, None, True
    else:
        amb_est = dim_estimate(within, K, budget, shards)
        amb = amb_est.estimate if not amb_est.empty else -1
        amb_stable = amb_est.stable
    est = dim_estimate(locus, K, budget, shards)
    codim = amb + 1 if est.empty else amb - est.estimate
    return CodimEstimate(codim, amb, est, amb_est, amb_stable and est.stable)


def singular_codim(forms, K: int | None = None, budget=None, shards: int = 1) -> CodimEstimate:
    """c(f_1..f_s) = codim in A^n of S(f_1..f_s)."""
    return codim_estimate(singular_locus(forms), None, K, budget, shards)


def linear_dimension(forms) -> int:
    """n - rank of a system of linear forms (exact)."""
    forms = list(forms)
    n = forms[0].nvars
    M = np.array([f.to_vector(1) for f in forms if not f.is_zero()], dtype=np.int64).reshape(-1, n)
    return n - linalg.rank(M, forms[0].ctx)


# -- checks ------------------------------------------------------------------------

@dataclass
class PrefixVerdict:
    prefix: int
    codim: CodimEstimate | None
    passed: bool

    def to_json(self) -> dict:
        return {"prefix": self.prefix, "pass": self.passed, **(self.codim.to_json() if self.codim else {"vacuous": True})}


@dataclass
class RtReport:
    t: int
    prefixes: list
    reading: str

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.prefixes)

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "reading": self.reading,
            "prefixes": [p.to_json() for p in self.prefixes],
            "pass": self.passed,
            "empirical": True,
        }


def rt_check(forms, t, K: int | None = None, budget=None, reading: str = "current", shards: int = 1) -> RtReport:
    """For every prefix G_{<=i}: codim of S(G_{<=i}) inside the prefix variety exceeds t.

    reading="current" measures inside X(G_{<=i}); reading="previous" inside X(G_{<i}).
    """
    forms = list(forms)
    if reading not in ("current", "previous"):
        raise PreconditionFailed(f"unknown reading {reading!r}")
    out = []
    for i in range(1, len(forms) + 1):
        eqs = forms[:i] if reading == "current" else forms[: i - 1]
        ctx, n = forms[0].ctx, forms[0].nvars
        X = Locus(ctx, n, eqs)
        Z = Locus(ctx, n, eqs, forms[:i])
        est = codim_estimate(Z, X, K, budget, shards)
        if est.ambient_estimate is not None and est.ambient_estimate.empty:
            out.append(PrefixVerdict(i, est, True))
            continue
        out.append(PrefixVerdict(i, est, est.codim > t))
    return RtReport(t, out, reading)


@dataclass
class LowRankReport:
    r: int
    rank: int
    dim_X: int | None
    dim_Z: int | None
    stable: bool
    holds: bool

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "rank": self.rank,
            "dim_X": self.dim_X,
            "dim_Z": "empty" if self.dim_Z is None else self.dim_Z,
            "stable": self.stable,
            "holds": self.holds,
            "empirical": True,
        }


def low_rank_singularity_check(f: Polynomial, generators, r: int, K: int | None = None, budget=None,
                               rank_budget=None, shards: int = 1) -> LowRankReport:
    """dim X(G) ∩ S(f, G) >= dim X(G) - 2r, after confirming rk_{I(G)}(f) <= r exactly."""
    gens = list(generators)
    res = relative_rank(f, gens, r_max=r, budget=rank_budget)
    if not res.rank.is_exact:
        raise PreconditionFailed(f"relative rank is {res.rank}, not <= {r}")
    X = Locus(f.ctx, f.nvars, gens)
    Z = Locus(f.ctx, f.nvars, gens, [f] + gens)
    dx = dim_estimate(X, K, budget, shards)
    dz = dim_estimate(Z, K, budget, shards)
    if dx.empty:
        holds = True
    else:
        holds = not dz.empty and dz.estimate >= dx.estimate - 2 * r
    return LowRankReport(r, res.rank.value, dx.estimate, dz.estimate, dx.stable and dz.stable, holds)


def taylor_ideal_check(f: Polynomial, generators, x0) -> bool:
    """f in the ideal of the Taylor pieces (g_i)^j_{x0}, 1 <= j <= deg f (graded membership)."""
    gens = list(generators)
    ctx, n = f.ctx, f.nvars
    x0 = [ctx.code(c) for c in x0]
    if not in_ideal(f, gens):
        raise PreconditionFailed("f is not in the ideal of the given forms")
    if gens:
        J = np.array([[g.partial(j).evaluate(x0) for j in range(n)] for g in gens], dtype=np.int64)
        if linalg.rank(J, ctx) < len(gens):
            raise PreconditionFailed("differentials at x0 are linearly dependent")
    if f.is_zero():
        return True
    d = f.form_degree()
    pieces = []
    for g in gens:
        layers = taylor_layers(g, x0)
        pieces.extend(p for p in layers[1: d + 1] if not p.is_zero())
    piece = graded_piece(pieces, d, ctx, n)
    return linalg.in_row_space(f.to_vector(d), piece.basis, piece.pivots, ctx)
