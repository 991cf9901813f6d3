"""Seeded instance generators.

All randomness comes from numpy's PCG64 bit generator seeded with the user
seed, so a (family, params, seed) triple always yields the same corpus.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import PreconditionFailed
from .field import FieldCtx, get_field, parse_field
from .poly import Polynomial, format_poly, monomials_of_degree

FAMILIES = ("fermat", "product-sum", "random", "random-tower")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def random_form(ctx: FieldCtx, n: int, d: int, rng: np.random.Generator, density: float = 1.0,
                nonzero: bool = True) -> Polynomial:
    """Degree-d form with each monomial present with probability ``density`` and a uniform nonzero coefficient."""
    mons = monomials_of_degree(n, d)
    while True:
        present = rng.random(len(mons)) < density
        coeffs = rng.integers(1, ctx.q, size=len(mons))
        f = Polynomial(ctx, n, {m: int(c) for m, c, keep in zip(mons, coeffs, present) if keep})
        if not nonzero or not f.is_zero():
            return f


def random_low_rank_form(ctx: FieldCtx, n: int, d: int, r: int, rng: np.random.Generator,
                         density: float = 1.0) -> Polynomial:
    """Sum of r products g*h, g a random linear form and h a random form of degree d-1."""
    f = Polynomial.zero(ctx, n)
    for _ in range(r):
        f = f + random_form(ctx, n, 1, rng, density) * random_form(ctx, n, d - 1, rng, density)
    return f


def fermat_form(ctx: FieldCtx, n: int, exponent: int) -> Polynomial:
    return Polynomial(ctx, n, {tuple(exponent if j == i else 0 for j in range(n)): 1 for i in range(n)})


def product_sum_form(ctx: FieldCtx, n: int, r: int, d: int) -> Polynomial:
    """x1*...*xd + x_{d+1}*...*x_{2d} + ... (r products of disjoint variables)."""
    if r * d > n:
        raise PreconditionFailed(f"product-sum needs r*d <= n, got r={r}, d={d}, n={n}")
    terms = {}
    for i in range(r):
        terms[tuple(1 if i * d <= j < (i + 1) * d else 0 for j in range(n))] = 1
    return Polynomial(ctx, n, terms)


@dataclass
class InstanceSpec:
    field: str
    nvars: int
    forms: list
    family: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    degrees: list | None = None

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def polynomials(self) -> list:
        from .poly import parse_poly

        ctx = parse_field(self.field)
        return [parse_poly(s, ctx, self.nvars) for s in self.forms]


def generate_instances(family: str, params: dict, seed: int | None = None) -> list:
    """Instances of a named family; random families require a seed."""
    params = dict(params)
    if family not in FAMILIES:
        raise PreconditionFailed(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    if family == "fermat":
        p = int(params.get("p", 2))
        k = int(params.get("k", 1))
        ctx = get_field(p, k)
        n = int(params.get("n", 2))
        e = int(params.get("exponent", p + 1))
        f = fermat_form(ctx, n, e)
        return [InstanceSpec(ctx.spec, n, [format_poly(f)], family, {"p": p, "k": k, "n": n, "exponent": e})]
    if family == "product-sum":
        ctx = parse_field(params.get("field", "GF(2)"))
        r, d = int(params.get("r", 1)), int(params.get("d", 2))
        n = int(params.get("n", r * d))
        f = product_sum_form(ctx, n, r, d)
        return [InstanceSpec(ctx.spec, n, [format_poly(f)], family, {"field": ctx.spec, "r": r, "d": d, "n": n})]
    if seed is None:
        raise PreconditionFailed("random families need a seed")
    rng = make_rng(seed)
    ctx = parse_field(params.get("field", "GF(2)"))
    n = int(params.get("n", 3))
    count = int(params.get("count", 1))
    density = float(params.get("density", 1.0))
    echo = {"field": ctx.spec, "n": n, "count": count, "density": density}
    out = []
    if family == "random":
        d = int(params.get("d", 2))
        s = int(params.get("s", 1))
        echo.update(d=d, s=s)
        for _ in range(count):
            forms = [format_poly(random_form(ctx, n, d, rng, density)) for _ in range(s)]
            out.append(InstanceSpec(ctx.spec, n, forms, family, echo, seed))
        return out
    degrees = [int(x) for x in params.get("degrees", [1, 2])]
    sizes = [int(x) for x in params.get("sizes", [1] * len(degrees))]
    if len(sizes) != len(degrees):
        raise PreconditionFailed("random-tower needs one size per degree")
    echo.update(degrees=degrees, sizes=sizes)
    for _ in range(count):
        forms = []
        for d, m in zip(degrees, sizes):
            forms.extend(format_poly(random_form(ctx, n, d, rng, density)) for _ in range(m))
        spec = InstanceSpec(ctx.spec, n, forms, family, echo, seed, [d for d, m in zip(degrees, sizes) for _ in range(m)])
        out.append(spec)
    return out
