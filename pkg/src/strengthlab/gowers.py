"""Bias and Gowers uniformity norms of chi o f.

The d-fold multiplicative derivative of chi o f at (x, h_1..h_d) equals
chi(D f), where D f = sum over omega in {0,1}^d of
(-1)^(d - |omega|) f(x + omega . h) is the additive derivative.  So the
average is sum_a count[a] chi(a) / N with exact integer counts of the
values of D f, and only that final q-term sum is done in floating point
(with math.fsum).
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegreeMismatch
from .field import FieldCtx, check_budget, iter_vector_chunks
from .poly import Polynomial, format_poly

TOLERANCE = 1e-9


class Character:
    """chi(a) = exp(2 pi i Tr(a) / p) with Tr the absolute trace."""

    def __init__(self, ctx: FieldCtx):
        self.ctx = ctx
        self.trace = [int(t) for t in ctx.trace_table]
        self.roots = [_root_of_unity(t, ctx.p) for t in range(ctx.p)]
        self.values = np.array([self.roots[t] for t in self.trace], dtype=complex)

    def __call__(self, a: int) -> complex:
        return complex(self.values[int(a)])

    def average(self, counts) -> complex:
        """sum_a counts[a] chi(a) / sum(counts).

        Counts are first pooled by trace value; since the p-th roots of
        unity sum to zero, subtracting the smallest pool is exact and leaves
        only the non-cancelling part for the floating-point sum (fsum).
        """
        counts = [int(c) for c in counts]
        total = sum(counts)
        pools = [0] * self.ctx.p
        for a, c in enumerate(counts):
            pools[self.trace[a]] += c
        base = min(pools)
        pools = [c - base for c in pools]
        re = math.fsum(c * self.roots[t].real for t, c in enumerate(pools) if c)
        im = math.fsum(c * self.roots[t].imag for t, c in enumerate(pools) if c)
        return complex(re / total, im / total)


def _root_of_unity(t: int, p: int) -> complex:
    """exp(2 pi i t / p), exact at the quarter turns."""
    if t == 0:
        return 1 + 0j
    if 2 * t == p:
        return -1 + 0j
    z = cmath.exp(2j * math.pi * t / p)
    return complex(z.real, z.imag)


def value_counts(f: Polynomial, budget=None, shards: int = 1) -> np.ndarray:
    """counts[a] = #{x : f(x) = a}."""
    q = f.ctx.q
    total = q ** f.nvars
    check_budget(total, budget, "bias enumeration")
    counts = np.zeros(q, dtype=np.int64)
    for lo, hi in _ranges(total, shards):
        for chunk in iter_vector_chunks(f.ctx, f.nvars, budget=budget, start=lo, stop=hi):
            counts += np.bincount(f.evaluate_many(chunk), minlength=q)
    return counts


def bias(f: Polynomial, chi: Character | None = None, budget=None, shards: int = 1) -> complex:
    chi = chi or Character(f.ctx)
    return chi.average(value_counts(f, budget, shards))


def _ranges(total, shards):
    shards = max(int(shards), 1)
    bounds = [total * s // shards for s in range(shards + 1)]
    return list(zip(bounds, bounds[1:]))


def derivative_counts(f: Polynomial, d: int, budget=None, shards: int = 1) -> np.ndarray:
    """counts[a] = #{(x, h_1..h_d) : D_{h_1..h_d} f(x) = a}."""
    ctx, n = f.ctx, f.nvars
    q = ctx.q
    width = n * (d + 1)
    total = q ** width
    check_budget(total, budget, f"U^{d} enumeration")
    ADD, NEG = ctx.ADD, ctx.NEG
    corners = list(itertools.product((0, 1), repeat=d))
    counts = np.zeros(q, dtype=np.int64)
    for lo, hi in _ranges(total, shards):
        for chunk in iter_vector_chunks(ctx, width, budget=budget, start=lo, stop=hi):
            x = chunk[:, :n]
            hs = [chunk[:, n * (i + 1): n * (i + 2)] for i in range(d)]
            acc = np.zeros(chunk.shape[0], dtype=np.int64)
            for omega in corners:
                y = x
                for bit, h in zip(omega, hs):
                    if bit:
                        y = ADD[y, h]
                val = f.evaluate_many(y)
                if (d - sum(omega)) % 2:
                    val = NEG[val]
                acc = ADD[acc, val]
            counts += np.bincount(acc, minlength=q)
    return counts


@dataclass
class UniformityResult:
    d: int
    raw_average: complex
    norm: float
    t: float
    q: int

    def to_json(self, f: Polynomial | None = None) -> dict:
        out = {}
        if f is not None:
            out["f"] = format_poly(f)
        out.update({
            "d": self.d,
            "raw_average": [self.raw_average.real, self.raw_average.imag],
            "norm": self.norm,
            "t": "inf" if math.isinf(self.t) else self.t,
        })
        return out


def gowers_norm(f: Polynomial, d: int, chi: Character | None = None, budget=None, shards: int = 1) -> UniformityResult:
    """||chi o f||_{U^d} by exhaustive averaging over (x, h_1, ..., h_d)."""
    if d < 1:
        raise DegreeMismatch("U^d needs d >= 1")
    chi = chi or Character(f.ctx)
    raw = chi.average(derivative_counts(f, d, budget, shards))
    norm = abs(raw) ** (1.0 / 2**d)
    norm = min(norm, 1.0)
    if norm == 0:
        t = math.inf
    else:
        # from |raw| directly: one rounding fewer than going through the 2^d-th root
        t = 0.0 if norm == 1.0 else -math.log(abs(raw)) / (2**d * math.log(f.ctx.q))
    return UniformityResult(d, raw, norm, t, f.ctx.q)


@dataclass
class BiasRankRow:
    f: Polynomial
    family: str
    d: int
    rank: object  # RankValue
    result: UniformityResult

    def to_json(self) -> dict:
        rk = self.rank
        return {
            "f": format_poly(self.f),
            "family": self.family,
            "d": self.d,
            "norm": self.result.norm,
            "t": "inf" if math.isinf(self.result.t) else self.result.t,
            "rank": rk.value if rk.is_exact else (f"rank>{rk.exceeds}" if rk.exceeds is not None else "inf"),
        }


def bias_rank_experiment(d: int, n: int, ctx: FieldCtx, samples: int, r_max: int = 4, seed: int = 0,
                         budget=None, rank_budget=None) -> list:
    """Rows (rank, U^d norm, t) for random forms and planted low-rank forms of degree d."""
    from .instances import make_rng, random_form, random_low_rank_form
    from .rank import schmidt_rank

    rng = make_rng(seed)
    rows = []
    for s in range(samples):
        if s % 2 == 0:
            # sparse enough that small fields do not keep drawing the full form
            f, family = random_form(ctx, n, d, rng, density=0.6), "random"
        else:
            r = 1 + (s // 2) % max(1, min(r_max, n))
            f = random_low_rank_form(ctx, n, d, r, rng, density=0.6)
            while f.is_zero():
                f = random_low_rank_form(ctx, n, d, r, rng, density=0.6)
            family = f"low-rank-{r}"
        rank = schmidt_rank(f, r_max, rank_budget).rank
        rows.append(BiasRankRow(f, family, d, rank, gowers_norm(f, d, budget=budget)))
    return rows
