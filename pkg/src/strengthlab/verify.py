"""Property suites and the acceptance criteria.

Every property draws its randomness from a PCG64 stream seeded by
(seed, crc32(property name)), so results do not depend on which other
properties run.  Results are JSON-ready and contain no timings, which keeps
reports byte-identical across runs and shard counts.
"""

from __future__ import annotations

import itertools
import math
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import BudgetExceeded, CharDividesDegree, PreconditionFailed
from .field import CONWAY, enumerate_vectors, get_field, is_irreducible
from .gowers import TOLERANCE, Character, gowers_norm
from .instances import fermat_form, product_sum_form, random_form, random_low_rank_form
from .multilinear import (
    MultilinearForm,
    MultilinearTower,
    coefficient_tower,
    diagonal_contraction,
    partition_rank,
    polarize,
    reconstruct_partition,
    universal_target,
)
from .poly import (
    Polynomial,
    biform_layers,
    directional_difference,
    euler_check,
    format_poly,
    graded_piece,
    ideal_member,
    in_ideal,
    parse_poly,
    taylor_layers,
    translate,
)
from .rank import (
    RankValue,
    change_field,
    collection_rank,
    coset_enumeration_rank,
    quadric_rank_oracle,
    relative_rank,
    schmidt_rank,
)
from .tower import Tower, check_regularity, dl_specialize, dl_tower, n_bounds, regularize, tz_tower
from .variety import (
    Locus,
    codim_estimate,
    dim_estimate,
    linear_dimension,
    low_rank_singularity_check,
    rt_check,
    singular_codim,
)

SUITES = ("field", "poly", "rank", "tower", "variety", "gowers", "paper-identities", "all")


@dataclass
class PropertyResult:
    name: str
    passed: bool
    checked: int
    details: dict = field(default_factory=dict)
    counterexample: dict | None = None

    def to_json(self) -> dict:
        out = {"name": self.name, "pass": self.passed, "checked": self.checked, "details": self.details}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class Config:
    seed: int = 7
    r_max: int | None = None
    shards: int = 1
    budget: int | None = None


def stream(seed: int, name: str) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed), zlib.crc32(name.encode())])
    return np.random.Generator(np.random.PCG64(ss))


def _pick(rng, options):
    return options[int(rng.integers(len(options)))]


def _poly_json(f: Polynomial) -> dict:
    return {"field": f.ctx.spec, "nvars": f.nvars, "f": format_poly(f)}


# -- criteria ------------------------------------------------------------------------

def criterion_euler(cfg: Config, count: int = 200) -> PropertyResult:
    """d f = sum x_i d_i f for random forms with p not dividing d."""
    name = "euler-identity"
    rng = stream(cfg.seed, name)
    for i in range(count):
        p = _pick(rng, [2, 3, 5])
        d = _pick(rng, [e for e in range(1, 5) if e % p])
        n = int(rng.integers(1, 5))
        f = random_form(get_field(p), n, d, rng, density=0.6)
        if not euler_check(f):
            return PropertyResult(name, False, i + 1, counterexample=_poly_json(f))
    return PropertyResult(name, True, count)


def criterion_polarization(cfg: Config, count: int = 200) -> PropertyResult:
    """g~(x,..,x) = d! g(x) as polynomials, and pointwise on every x; vanishing when p <= d."""
    name = "polarization-diagonal"
    rng = stream(cfg.seed, name)
    vanishing = 0
    fields = [get_field(2), get_field(3), get_field(2, 2)]
    for i in range(count):
        ctx = _pick(rng, fields)
        n = int(rng.integers(1, 4))
        d = int(rng.integers(1, 5))
        g = random_form(ctx, n, d, rng, density=0.6)
        G = polarize(g)
        fact = ctx.from_int(math.factorial(d))
        ok = G.is_symmetric() and G.diagonal() == g.scale(fact)
        pts = enumerate_vectors(ctx, n)
        lhs = np.array([G.evaluate([x] * d) for x in pts], dtype=np.int64)
        ok = ok and np.array_equal(lhs, ctx.MUL[fact, g.evaluate_many(pts)])
        if ctx.p <= d:
            vanishing += 1
            ok = ok and not lhs.any()
        if not ok:
            return PropertyResult(name, False, i + 1, counterexample=_poly_json(g))
    return PropertyResult(name, True, count, {"char_at_most_degree": vanishing})


TAYLOR_CASES_SCOPED = [(3, 4), (2, 5)]
TAYLOR_CASES_LITERAL = [(2, 3), (3, 4), (2, 5)]


def _taylor_vanishing(name, cases, nmax=4):
    rows, failures = [], []
    for p, e in cases:
        ctx = get_field(p)
        for n in range(1, nmax + 1):
            g2 = biform_layers(fermat_form(ctx, n, e))[2]
            rows.append({"p": p, "exponent": e, "n": n, "g2": format_poly(g2, {"x": n, "y": n})})
            if not g2.is_zero():
                failures.append(rows[-1])
    return PropertyResult(name, not failures, len(rows), {"cases": rows},
                          failures[0] if failures else None)


def criterion_taylor_vanishing(cfg: Config, literal: bool = True) -> PropertyResult:
    """Second Taylor piece of sum v_i^e in characteristic p.

    The literal list includes (p, e) = (2, 3), where the piece w v^2 is nonzero.
    """
    if literal:
        return _taylor_vanishing("char-p-taylor-vanishing", TAYLOR_CASES_LITERAL)
    res = _taylor_vanishing("char-p-taylor-vanishing", TAYLOR_CASES_SCOPED)
    extra = _taylor_vanishing("p2-cubic", [(2, 3)])
    res.details["observed_p2_cubic_nonzero"] = not extra.passed
    return res


def singularity_corpus(cfg: Config, count: int = 50, point_budget: int = 2**20, max_candidates: int = 400):
    """Instances (f, exact rank, stable c(f)) for the rank/singularity inequalities."""
    rng = stream(cfg.seed, "singularity-corpus")
    out = []
    boundary = parse_poly("x1*x2+x3*x4", get_field(2), 4)
    candidates = [boundary]
    while len(candidates) < max_candidates:
        ctx = _pick(rng, [get_field(2), get_field(3)])
        d = _pick(rng, [2, 2, 3])
        n = int(rng.integers(2, 5))
        kind = int(rng.integers(3))
        if kind == 0:
            f = random_form(ctx, n, d, rng, density=0.5)
        elif kind == 1:
            f = random_low_rank_form(ctx, n, d, int(rng.integers(1, 3)), rng)
        else:
            r = int(rng.integers(1, n // d + 1)) if n >= d else 1
            f = product_sum_form(ctx, max(n, d), r, d)
        if not f.is_zero():
            candidates.append(f)
    for f in candidates:
        if len(out) == count:
            break
        rk = schmidt_rank(f, r_max=4).rank
        if not rk.is_exact:
            continue
        c = singular_codim([f], budget=point_budget, shards=cfg.shards)
        if not c.stable:
            continue
        out.append((f, rk.value, c))
    return out


def criterion_rank_lower(cfg: Config, count: int = 50, corpus=None) -> PropertyResult:
    """rk(f) >= ceil(c(f)/2)."""
    name = "rank-singularity-lower"
    corpus = corpus if corpus is not None else singularity_corpus(cfg, count)
    rows = []
    for f, rk, c in corpus:
        rows.append({"f": format_poly(f), "field": f.ctx.spec, "rank": rk, "c": c.codim, "empty": c.empty})
        if rk < math.ceil(c.codim / 2):
            return PropertyResult(name, False, len(rows), {"rows": rows}, _poly_json(f))
    boundary = rows and rows[0]["f"] == "x1*x2+x3*x4" and (rows[0]["rank"], rows[0]["c"]) == (2, 4)
    return PropertyResult(name, len(rows) == count and bool(boundary), len(rows),
                          {"rows": rows, "boundary_instance": bool(boundary)})


def criterion_rank_upper(cfg: Config, count: int = 50, corpus=None) -> PropertyResult:
    """rk(f) <= (d-1) c(f) on char-coprime instances, with the rank also taken over GF(q^2)."""
    name = "rank-singularity-upper"
    corpus = corpus if corpus is not None else singularity_corpus(cfg, count)
    rows = []
    for f, rk, c in corpus:
        d = f.form_degree()
        if d % f.ctx.p == 0:
            continue
        bound = (d - 1) * c.codim
        ext = get_field(f.ctx.p, 2)
        ext_rank = schmidt_rank(change_field(f, ext), r_max=rk).rank
        ext_value = ext_rank.value if ext_rank.is_exact else rk
        rows.append({"f": format_poly(f), "field": f.ctx.spec, "d": d, "rank": rk,
                     "rank_ext": ext_value, "c": c.codim, "bound": bound})
        if ext_value > bound:
            return PropertyResult(name, False, len(rows), {"rows": rows}, _poly_json(f))
    caveat = ("the inequality is stated over an algebraically closed field; ranks are computed over "
              "GF(q) and GF(q^2) as proxies and c(f) is a point-count estimate")
    return PropertyResult(name, bool(rows), len(rows), {"rows": rows, "caveat": caveat})


def regularization_inputs(cfg: Config, count: int = 100):
    rng = stream(cfg.seed, "regularization-inputs")
    out = []
    for _ in range(count):
        ctx = _pick(rng, [get_field(2), get_field(3)])
        n = int(rng.integers(2, 5))
        s = int(rng.integers(1, 4))
        t = int(rng.integers(0, 3))
        forms = []
        for _ in range(s):
            d = int(rng.integers(1, 4))
            forms.append(random_form(ctx, n, d, rng, density=float(rng.choice([0.3, 0.6]))))
        out.append((forms, t))
    return out


def criterion_regularization(cfg: Config, count: int = 100, r_max: int = 3) -> PropertyResult:
    """Output tower: inputs in its ideal, (1,1,t)-regular, size <= n_1."""
    name = "regularization-contract"
    rows = []
    for forms, t in regularization_inputs(cfg, count):
        tower, trace = regularize(forms, 1, 1, t, r_max=r_max, budget=cfg.budget)
        member = all(in_ideal(g, tower.members) for g in forms)
        report = check_regularity(tower, 1, 1, t, r_max=r_max, budget=cfg.budget)
        n1 = trace.bounds[0] if trace.bounds else 0
        row = {"inputs": [format_poly(f) for f in forms], "field": forms[0].ctx.spec, "t": t,
               "steps": len(trace.steps), "size": tower.size, "n1": n1,
               "member": member, "regular": report.regular, "replay": trace.replay_membership()}
        rows.append(row)
        if not (member and report.regular and tower.size <= n1 and row["replay"]):
            return PropertyResult(name, False, len(rows), {"last": row}, row)
    return PropertyResult(name, True, len(rows), {
        "total_steps": sum(r["steps"] for r in rows),
        "max_size": max(r["size"] for r in rows),
    })


def criterion_gowers(cfg: Config, count: int = 50, point_budget: int = 2**16) -> PropertyResult:
    name = "gowers-exactness"
    rng = stream(cfg.seed, name)
    F2 = get_field(2)
    base = gowers_norm(parse_poly("x1*x2", F2, 2), 2, shards=cfg.shards)
    ok = abs(base.norm - 2 ** -0.5) <= TOLERANCE and abs(base.raw_average - 0.25) <= TOLERANCE
    worst_raw = base.raw_average.real
    annihilated = 0
    fields = [get_field(2), get_field(3), get_field(2, 2)]
    while annihilated < count:
        ctx = _pick(rng, fields)
        d = int(rng.integers(2, 4))
        n = int(rng.integers(1, 4))
        if ctx.q ** (n * (d + 1)) > point_budget:
            continue
        f = Polynomial.zero(ctx, n)
        for e in range(d):
            f = f + random_form(ctx, n, e, rng, density=0.7, nonzero=False)
        res = gowers_norm(f, d, shards=cfg.shards)
        worst_raw = min(worst_raw, res.raw_average.real)
        annihilated += 1
        if abs(res.norm - 1) > TOLERANCE or res.raw_average.real < -TOLERANCE or abs(res.raw_average.imag) > TOLERANCE:
            return PropertyResult(name, False, annihilated, counterexample={**_poly_json(f), "d": d})
        # same form at degree d-1 exercises a non-trivial average
        if d > 1:
            lower = gowers_norm(f, d - 1, shards=cfg.shards)
            worst_raw = min(worst_raw, lower.raw_average.real)
            if lower.raw_average.real < -TOLERANCE:
                return PropertyResult(name, False, annihilated, counterexample={**_poly_json(f), "d": d - 1})
    return PropertyResult(name, ok, annihilated + 1, {
        "x1*x2 norm": base.norm,
        "x1*x2 raw": base.raw_average.real,
        "min_raw_average": worst_raw,
    })


def criterion_diagonal_bridge(cfg: Config, count: int = 100) -> PropertyResult:
    """F(x,..,x,e_j) = (p-1)! d_j f for F the polarization of a degree-p form."""
    name = "diagonal-bridge"
    rng = stream(cfg.seed, name)
    for i in range(count):
        p = _pick(rng, [2, 3])
        ctx = _pick(rng, [get_field(p), get_field(p, 2)])
        n = int(rng.integers(1, 5))
        f = random_form(ctx, n, p, rng, density=0.6)
        F = polarize(f)
        fact = ctx.from_int(math.factorial(p - 1))
        for j in range(n):
            if diagonal_contraction(F, j) != f.partial(j).scale(fact):
                return PropertyResult(name, False, i + 1, counterexample={**_poly_json(f), "j": j + 1})
    return PropertyResult(name, True, count)


def low_rank_corpus(cfg: Config, count: int = 30, point_budget: int = 2**16, max_candidates: int = 300):
    """(f, G, report) with rk_{I(G)}(f) = r >= 1 exact and stable dimension estimates."""
    rng = stream(cfg.seed, "low-rank-corpus")
    F2 = get_field(2)
    fixed = [(parse_poly("x1*x2", F2, 4), []), (parse_poly("x1*x2+x3*x4", F2, 4), []),
             (parse_poly("x1*x2+x3*x4", get_field(3), 4), [])]

    def candidates():
        yield from fixed
        for _ in range(max_candidates):
            ctx = _pick(rng, [get_field(2), get_field(3)])
            n = int(rng.integers(2, 5))
            gens = [random_form(ctx, n, int(rng.integers(1, 3)), rng, density=0.5) for _ in range(int(rng.integers(0, 3)))]
            d = _pick(rng, [2, 3])
            f = random_low_rank_form(ctx, n, d, int(rng.integers(1, 3)), rng)
            for g in gens:
                e = g.form_degree()
                if e < d:
                    f = f + g * random_form(ctx, n, d - e, rng, density=0.5)
            yield f, gens

    out = []
    for f, gens in candidates():
        if len(out) == count:
            break
        rk = relative_rank(f, gens, r_max=3).rank
        if not rk.is_exact or rk.value == 0:
            continue
        try:
            rep = low_rank_singularity_check(f, gens, rk.value, budget=point_budget, shards=cfg.shards)
        except BudgetExceeded:
            continue
        if rep.stable:
            out.append((f, gens, rep))
    return out


def criterion_low_rank_singularity(cfg: Config, count: int = 30) -> PropertyResult:
    name = "low-rank-singularity"
    rows = []
    for f, gens, rep in low_rank_corpus(cfg, count):
        rows.append({"f": format_poly(f), "G": [format_poly(g) for g in gens], "field": f.ctx.spec,
                     **rep.to_json()})
        if not rep.holds:
            return PropertyResult(name, False, len(rows), {"rows": rows}, rows[-1])
    return PropertyResult(name, len(rows) == count, len(rows), {"rows": rows})


def tiny_multilinear_towers(cfg: Config, count: int = 10):
    """Distinct towers over GF(2) on V_1 x V_2 with dims <= 2: an optional linear layer, then bilinear forms."""
    rng = stream(cfg.seed, "tiny-towers")
    ctx = get_field(2)
    out, seen = [], set()
    while len(out) < count:
        dims = (int(rng.integers(1, 3)), int(rng.integers(1, 3)))
        layers = []
        if rng.random() < 0.6:
            slot = int(rng.integers(2))
            v = rng.integers(0, 2, size=dims[slot])
            if v.any():
                layers.append([(MultilinearForm(ctx, (dims[slot],), {(int(i),): 1 for i in np.flatnonzero(v)}), (slot,))])
        top = []
        for _ in range(int(rng.integers(1, 3))):
            M = rng.integers(0, 2, size=dims)
            if M.any():
                top.append((MultilinearForm(ctx, dims, {(int(i), int(j)): 1 for i, j in np.argwhere(M)}), (0, 1)))
        if not top:
            continue
        layers.append(top)
        G = MultilinearTower(ctx, dims, layers)
        key = repr([[format_poly(G.member_polynomial(f, I)) for f, I in layer] for layer in layers]) + repr(dims)
        if key in seen:
            continue
        seen.add(key)
        out.append(G)
    return out


def _layer_ranks(tower: MultilinearTower, r_max: int = 4):
    polys = tower.polynomial_layers()
    ranks = []
    for i, layer in enumerate(polys):
        gens = [g for lower in polys[:i] for g in lower]
        ranks.append(collection_rank(layer, gens, r_max=r_max).rank)
    return ranks


def criterion_coefficient_rank(cfg: Config, count: int = 10) -> PropertyResult:
    """rk_{I(C_<i)}(C_i) >= rk_{I(G_<i)}(G_i) for coefficient towers of tiny towers."""
    name = "coefficient-tower-rank"
    rows = []
    for G in tiny_multilinear_towers(cfg, count):
        h = len(G.layers)
        Ns = list(range(h + 1, 1, -1)) if h > 1 else [2]
        N = Ns[0]
        C = coefficient_tower(G, N, Ns)
        g_ranks = _layer_ranks(G)
        c_ranks = _layer_ranks(C)
        ok = all(_rank_at_least(c, g) for c, g in zip(c_ranks, g_ranks))
        rows.append({
            "dims": list(G.dims),
            "layers": [[format_poly(G.member_polynomial(f, I)) for f, I in layer] for layer in G.layers],
            "N": N, "Ns": Ns,
            "coefficient_sizes": [len(layer) for layer in C.layers],
            "rank_G": [r.to_json() for r in g_ranks],
            "rank_C": [r.to_json() for r in c_ranks],
        })
        if not ok:
            return PropertyResult(name, False, len(rows), {"rows": rows}, rows[-1])
    return PropertyResult(name, True, len(rows), {"rows": rows})


def _rank_at_least(c: RankValue, g: RankValue) -> bool:
    if c.infinite:
        return True
    if g.infinite:
        return False
    if c.is_exact:
        return g.is_exact and c.value >= g.value
    return g.is_exact and c.exceeds >= g.value


# -- further properties ----------------------------------------------------------------

def prop_field_axioms(cfg: Config) -> PropertyResult:
    name = "field-axioms"
    checked = 0
    for p, k in [(2, 1), (3, 1), (5, 1), (2, 2), (2, 3), (3, 2)]:
        ctx = get_field(p, k)
        q = ctx.q
        a, b, c = np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij")
        A, M = ctx.ADD, ctx.MUL
        ok = (
            np.array_equal(A[A[a, b], c], A[a, A[b, c]])
            and np.array_equal(M[M[a, b], c], M[a, M[b, c]])
            and np.array_equal(M[a, A[b, c]], A[M[a, b], M[a, c]])
            and np.array_equal(A, A.T) and np.array_equal(M, M.T)
            and all(M[x, ctx.INV[x]] == 1 for x in range(1, q))
            and all(A[x, ctx.NEG[x]] == 0 for x in range(q))
        )
        frob = np.array([ctx.pow(x, p) for x in range(q)])
        ok = ok and np.array_equal(frob[A[a[:, :, 0], b[:, :, 0]]], A[frob[a[:, :, 0]], frob[b[:, :, 0]]])
        checked += q**3
        if not ok:
            return PropertyResult(name, False, checked, counterexample={"field": ctx.spec})
    return PropertyResult(name, True, checked)


def prop_modulus_irreducible(cfg: Config) -> PropertyResult:
    bad = [f"{p}^{k}" for (p, k), mod in sorted(CONWAY.items()) if not is_irreducible(mod, p)]
    return PropertyResult("modulus-irreducible", not bad, len(CONWAY), counterexample={"bad": bad} if bad else None)


def prop_character(cfg: Config) -> PropertyResult:
    checked = 0
    for p, k in [(2, 1), (3, 1), (2, 2), (3, 2), (5, 1)]:
        ctx = get_field(p, k)
        chi = Character(ctx)
        vals = chi.values
        ok = np.allclose(vals[ctx.ADD], vals[:, None] * vals[None, :], atol=TOLERANCE)
        ok = ok and np.any(np.abs(vals - 1) > 0.5)
        checked += ctx.q**2
        if not ok:
            return PropertyResult("character-additive", False, checked, counterexample={"field": ctx.spec})
    return PropertyResult("character-additive", True, checked)


def prop_format_roundtrip(cfg: Config, count: int = 100) -> PropertyResult:
    name = "format-parse-roundtrip"
    rng = stream(cfg.seed, name)
    for i in range(count):
        ctx = _pick(rng, [get_field(2), get_field(3), get_field(2, 2), get_field(5)])
        n = int(rng.integers(1, 5))
        f = random_form(ctx, n, int(rng.integers(0, 4)), rng, density=0.5, nonzero=False)
        if parse_poly(format_poly(f), ctx, n) != f:
            return PropertyResult(name, False, i + 1, counterexample=_poly_json(f))
    return PropertyResult(name, True, count)


def prop_product_rule(cfg: Config, count: int = 100) -> PropertyResult:
    name = "product-rule"
    rng = stream(cfg.seed, name)
    for i in range(count):
        ctx = _pick(rng, [get_field(2), get_field(3), get_field(2, 2)])
        n = int(rng.integers(1, 4))
        f = random_form(ctx, n, int(rng.integers(1, 3)), rng, density=0.6)
        g = random_form(ctx, n, int(rng.integers(1, 3)), rng, density=0.6)
        j = int(rng.integers(n))
        if (f * g).partial(j) != f.partial(j) * g + f * g.partial(j):
            return PropertyResult(name, False, i + 1, counterexample={**_poly_json(f), "g": format_poly(g)})
    return PropertyResult(name, True, count)


def prop_taylor_recombination(cfg: Config, count: int = 100) -> PropertyResult:
    name = "taylor-recombination"
    rng = stream(cfg.seed, name)
    for i in range(count):
        ctx = _pick(rng, [get_field(2), get_field(3), get_field(2, 2)])
        n = int(rng.integers(1, 4))
        f = random_form(ctx, n, int(rng.integers(1, 4)), rng, density=0.6)
        x0 = [int(v) for v in rng.integers(0, ctx.q, size=n)]
        layers = taylor_layers(f, x0)
        total = Polynomial.zero(ctx, n)
        for piece in layers:
            total = total + piece
        bi = biform_layers(f)
        point = x0 + [0] * n
        ok = total == translate(f, x0) and layers[0].evaluate([0] * n) == f.evaluate(x0)
        ok = ok and all(piece.evaluate(point) == 0 for piece in bi[1:]) and bi[0].evaluate(point) == f.evaluate(x0)
        if not ok:
            return PropertyResult(name, False, i + 1, counterexample={**_poly_json(f), "x0": x0})
    return PropertyResult(name, True, count)


def prop_ideal_cofactors(cfg: Config, count: int = 60) -> PropertyResult:
    name = "ideal-cofactors"
    rng = stream(cfg.seed, name)
    for i in range(count):
        ctx = _pick(rng, [get_field(2), get_field(3)])
        n = int(rng.integers(2, 5))
        gens = [random_form(ctx, n, int(rng.integers(1, 3)), rng, density=0.5) for _ in range(int(rng.integers(1, 3)))]
        d = 3
        f = Polynomial.zero(ctx, n)
        for g in gens:
            f = f + g * random_form(ctx, n, d - g.form_degree(), rng, density=0.5, nonzero=False)
        if f.is_zero():
            continue
        ok, hs = ideal_member(f, graded_piece(gens, d, ctx, n))
        total = Polynomial.zero(ctx, n)
        for h, g in zip(hs or [], gens):
            total = total + h * g
        if not ok or total != f:
            return PropertyResult(name, False, i + 1, counterexample=_poly_json(f))
    return PropertyResult(name, True, count)


def prop_quadric_oracle(cfg: Config, count: int = 60) -> PropertyResult:
    """Search rank of quadrics over odd fields against the Gram-matrix classification."""
    name = "quadric-oracle-agreement"
    rng = stream(cfg.seed, name)
    for i in range(count):
        ctx = _pick(rng, [get_field(3), get_field(5)])
        n = int(rng.integers(1, 5))
        f = random_form(ctx, n, 2, rng, density=0.5)
        res = schmidt_rank(f, r_max=4)
        oracle = quadric_rank_oracle(f)
        ok = res.rank.is_exact and res.rank.value == oracle and res.certificate.verify([f])
        if not ok:
            return PropertyResult(name, False, i + 1, counterexample={**_poly_json(f), "oracle": oracle,
                                                                      "search": res.rank.to_json()})
    return PropertyResult(name, True, count)


def prop_relative_coset(cfg: Config, count: int = 40) -> PropertyResult:
    """relative_rank against min over the coset f + I_d of the Schmidt rank."""
    name = "relative-rank-coset-oracle"
    rng = stream(cfg.seed, name)
    checked = 0
    while checked < count:
        ctx = _pick(rng, [get_field(2), get_field(3)])
        n = int(rng.integers(2, 4))
        gens = [random_form(ctx, n, 1, rng, density=0.6)]
        if rng.random() < 0.5:
            gens.append(random_form(ctx, n, 2, rng, density=0.4))
        f = random_form(ctx, n, 2, rng, density=0.6)
        piece = graded_piece(gens, 2, ctx, n)
        if ctx.q ** piece.dim > 2**12:
            continue
        checked += 1
        res = relative_rank(f, gens, r_max=3)
        oracle = coset_enumeration_rank(f, gens, r_max=3)
        same = res.rank == oracle or (res.rank.is_exact and oracle.is_exact and res.rank.value == oracle.value)
        if not same or (res.certificate is not None and not res.certificate.verify([f], gens)):
            return PropertyResult(name, False, checked, counterexample={
                **_poly_json(f), "G": [format_poly(g) for g in gens],
                "search": res.rank.to_json(), "oracle": oracle.to_json()})
    return PropertyResult(name, True, checked)


def prop_truncation(cfg: Config) -> PropertyResult:
    """With r_max below the true rank the search reports exceeds(r_max), never a false value."""
    name = "truncation-semantics"
    r_max = cfg.r_max if cfg.r_max is not None else 2
    rng = stream(cfg.seed, name)
    ctx = get_field(3)
    corpus = [product_sum_form(ctx, 6, 3, 2), parse_poly("x1*x2+x3*x4+x5^2", ctx, 5)]
    corpus += [random_form(ctx, 5, 2, rng, density=0.8) for _ in range(4)]
    rows = []
    for f in corpus:
        oracle = quadric_rank_oracle(f)
        res = schmidt_rank(f, r_max=r_max)
        rk = res.rank
        if rk.is_exact:
            ok = rk.value == oracle and res.certificate.verify([f])
        else:
            ok = rk.exceeds == r_max and oracle > r_max
        rows.append({"f": format_poly(f), "rank": rk.to_json(), "oracle": oracle})
        if not ok:
            return PropertyResult(name, False, len(rows), {"rows": rows}, rows[-1])
    return PropertyResult(name, True, len(rows), {"r_max": r_max, "rows": rows})


def prop_partition_rank_matrix(cfg: Config, count: int = 40) -> PropertyResult:
    """Arity-2 partition rank equals log_q |image of the coefficient matrix|."""
    name = "prank-matrix-rank"
    rng = stream(cfg.seed, name)
    for i in range(count):
        ctx = _pick(rng, [get_field(2), get_field(3)])
        dims = (int(rng.integers(1, 4)), int(rng.integers(1, 4)))
        M = rng.integers(0, ctx.q, size=dims) * (rng.random(dims) < 0.6)
        F = MultilinearForm(ctx, dims, {(int(a), int(b)): int(M[a, b]) for a, b in np.argwhere(M)})
        res = partition_rank(F, r_max=4)
        xs = enumerate_vectors(ctx, dims[1])
        image = {tuple(int(v) for v in row) for row in linalg.matmul(M, xs.T, ctx).T}
        oracle = round(math.log(len(image), ctx.q))
        ok = res.rank == oracle and reconstruct_partition(res.certificate, dims, ctx) == F
        if not ok:
            return PropertyResult(name, False, i + 1, counterexample={"tensor": F.to_json(), "oracle": oracle})
    return PropertyResult(name, True, count)


def prop_partition_rank_search(cfg: Config, count: int = 12) -> PropertyResult:
    """Arity-3 certificates reconstruct the tensor, and rank is at most the planted number of terms."""
    name = "prank-planted"
    rng = stream(cfg.seed, name)
    ctx = get_field(2)
    for i in range(count):
        dims = (2, 2, 2)
        planted = int(rng.integers(1, 3))
        F = MultilinearForm(ctx, dims)
        for _ in range(planted):
            I = _pick(rng, [(0,), (1,), (2,)])
            comp = tuple(s for s in range(3) if s not in I)
            G = MultilinearForm(ctx, [dims[s] for s in I], {(int(j),): 1 for j in range(dims[I[0]]) if rng.random() < 0.7})
            H = MultilinearForm(ctx, [dims[s] for s in comp],
                                {(int(a), int(b)): 1 for a in range(2) for b in range(2) if rng.random() < 0.5})
            F = F + reconstruct_partition([(I, G, H)], dims, ctx)
        res = partition_rank(F, r_max=3)
        ok = res.rank is not None and res.rank <= planted
        ok = ok and reconstruct_partition(res.certificate, dims, ctx) == F
        if not ok:
            return PropertyResult(name, False, i + 1, counterexample={"tensor": F.to_json(), "planted": planted})
    return PropertyResult(name, True, count)


def prop_n_bounds(cfg: Config) -> PropertyResult:
    cases = [
        (([0, 1], 1, 1, 2), [3, 1]),
        (([1, 1], 1, 1, 0), [2, 1]),
        (([2, 3, 1], 0, 1, 0), [2, 3, 1]),
    ]
    bad = [c for c, want in cases if n_bounds(*c) != want]
    n3 = 1
    n2 = 0 + n3 * 2 * (n3 + 1) ** 2
    n1 = 1 + n2 * 2 * (n2 + 1) ** 2
    ok = not bad and n_bounds([1, 0, 1], 2, 2, 1) == [n1, n2, n3]
    return PropertyResult("n-bounds", ok, len(cases) + 1)


def prop_tz_restriction(cfg: Config, count: int = 40) -> PropertyResult:
    name = "tz-restriction"
    rng = stream(cfg.seed, name)
    for i in range(count):
        ctx = _pick(rng, [get_field(2), get_field(3)])
        nx, ny = int(rng.integers(0, 3)), int(rng.integers(1, 3))
        n = nx + ny
        blocks = {"x": nx, "y": ny}
        layers = [[random_form(ctx, n, d, rng, density=0.6) for _ in range(int(rng.integers(1, 3)))] for d in (1, 2)]
        T = Tower(ctx, n, layers, [1, 2], blocks)
        Z = tz_tower(T)
        zero_z = [Polynomial.var(ctx, n, j) for j in range(n)] + [Polynomial.zero(ctx, n)] * ny
        restricted = [[f.compose(zero_z) for f in layer] for layer in Z.layers]
        ok = True
        for orig, layer in zip(T.layers, restricted):
            kept, rest = layer[: len(orig)], layer[len(orig):]
            ok = ok and list(kept) == list(orig) and all(f.is_zero() for f in rest)
        if not ok:
            return PropertyResult(name, False, i + 1, counterexample=T.to_json())
    return PropertyResult(name, True, count)


def prop_dl_consistency(cfg: Config, count: int = 30) -> PropertyResult:
    """Substituting w into D_l G gives the same members as dl_specialize."""
    name = "dl-specialize-consistency"
    rng = stream(cfg.seed, name)
    for i in range(count):
        ctx = _pick(rng, [get_field(2), get_field(3)])
        n = int(rng.integers(1, 4))
        l = int(rng.integers(1, 3))
        layers = [[random_form(ctx, n, d, rng, density=0.6)] for d in (1, 2, 3)[: int(rng.integers(1, 4))]]
        G = Tower(ctx, n, layers)
        ws = [[int(v) for v in rng.integers(0, ctx.q, size=n)] for _ in range(l)]
        D = dl_tower(G, l)
        images = []
        for lam in range(l):
            images += [Polynomial.constant(ctx, n, ws[lam][j]) for j in range(n)]
        images += [Polynomial.var(ctx, n, j) for j in range(n)]
        from_dl = sorted(format_poly(f.compose(images)) for f in D.members)
        spec = dl_specialize(G, ws)
        ok = True
        expect = []
        for g in (f for layer in G.layers for f in layer):
            expect.append(format_poly(g))
            for w in ws:
                expect += [format_poly(p) for p in taylor_layers(g, w)[:-1]]
        ok = from_dl == sorted(expect)
        got = sorted(format_poly(f) for f in spec.tower.members)
        want = sorted(e for e in expect if e != "0" and _positive_degree(e))
        ok = ok and got == want
        if not ok:
            return PropertyResult(name, False, i + 1, counterexample={"tower": G.to_json(), "w": ws})
    return PropertyResult(name, True, count)


def _positive_degree(text: str) -> bool:
    return any(ch == "x" for ch in text)


def prop_linear_dimension(cfg: Config, count: int = 30) -> PropertyResult:
    name = "linear-dimension-exact"
    rng = stream(cfg.seed, name)
    for i in range(count):
        ctx = _pick(rng, [get_field(2), get_field(3)])
        n = int(rng.integers(1, 5))
        forms = [random_form(ctx, n, 1, rng, density=0.6) for _ in range(int(rng.integers(1, n + 1)))]
        est = dim_estimate(Locus(ctx, n, forms), budget=2**16)
        if est.estimate != linear_dimension(forms) or not est.stable:
            return PropertyResult(name, False, i + 1, counterexample={"forms": [format_poly(f) for f in forms]})
    return PropertyResult(name, True, count)


def prop_rt_linear(cfg: Config, count: int = 15) -> PropertyResult:
    name = "rt-generic-linear"
    rng = stream(cfg.seed, name)
    checked = 0
    while checked < count:
        ctx = _pick(rng, [get_field(2), get_field(3)])
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, n))
        forms = [random_form(ctx, n, 1, rng, density=0.8) for _ in range(m)]
        if linear_dimension(forms) != n - m:
            continue
        checked += 1
        for t in range(n - m):
            if not rt_check(forms, t, budget=2**16).passed:
                return PropertyResult(name, False, checked, counterexample={"forms": [format_poly(f) for f in forms], "t": t})
    return PropertyResult(name, True, checked)


def prop_gowers_nesting(cfg: Config, count: int = 20) -> PropertyResult:
    name = "gowers-nesting"
    rng = stream(cfg.seed, name)
    checked = 0
    while checked < count:
        ctx = _pick(rng, [get_field(2), get_field(3)])
        n = int(rng.integers(1, 3))
        d = int(rng.integers(1, 3))
        if ctx.q ** (n * (d + 2)) > 2**16:
            continue
        checked += 1
        f = random_form(ctx, n, int(rng.integers(2, 4)), rng, density=0.7)
        a = gowers_norm(f, d, shards=cfg.shards).norm
        b = gowers_norm(f, d + 1, shards=cfg.shards).norm
        if a > b + TOLERANCE:
            return PropertyResult(name, False, checked, counterexample={**_poly_json(f), "d": d})
    return PropertyResult(name, True, checked)


def prop_gowers_modulation(cfg: Config, count: int = 20) -> PropertyResult:
    name = "gowers-modulation"
    rng = stream(cfg.seed, name)
    checked = 0
    while checked < count:
        ctx = _pick(rng, [get_field(2), get_field(3)])
        n = int(rng.integers(1, 3))
        d = int(rng.integers(2, 4))
        if ctx.q ** (n * (d + 1)) > 2**16:
            continue
        checked += 1
        f = random_form(ctx, n, d, rng, density=0.7)
        h = random_form(ctx, n, d - 1, rng, density=0.7, nonzero=False)
        a = gowers_norm(f, d, shards=cfg.shards).norm
        b = gowers_norm(f + h, d, shards=cfg.shards).norm
        if abs(a - b) > TOLERANCE:
            return PropertyResult(name, False, checked, counterexample={**_poly_json(f), "h": format_poly(h)})
    return PropertyResult(name, True, checked)


def prop_universal_target(cfg: Config) -> PropertyResult:
    """The bilinear universal target with r = 1 has partition rank 2; r = 0 gives zero."""
    ctx = get_field(2)
    G = MultilinearTower(ctx, (1, 1), [[(MultilinearForm(ctx, (1, 1), {(0, 0): 1}), (0, 1))]])
    H = universal_target(G, [1])
    h = H.layers[0][0][0]
    prk = partition_rank(h, r_max=3)
    H0 = universal_target(G, [0])
    ok = prk.rank == 2 and H0.layers[0][0][0].is_zero()
    return PropertyResult("universal-target", ok, 2, {"prank": prk.rank})


def prop_regularize_examples(cfg: Config) -> PropertyResult:
    F2 = get_field(2)
    f = parse_poly("x1*x2+x3*x4", F2, 4)
    tower, trace = regularize([f], 1, 1, 2, r_max=3)
    ok = tower.to_json()["layers"] == [["x1", "x3"]] and trace.bounds == [3, 1] and trace.replay_membership()
    t2, _ = regularize([parse_poly("x1*x2", F2, 2)], 0, 1, 0)
    ok = ok and t2.to_json()["layers"] == [["x1*x2"]]
    return PropertyResult("regularize-examples", ok, 2, {"final": tower.to_json()})


# -- suites ----------------------------------------------------------------------------

def _suite_table():
    return {
        "field": [prop_field_axioms, prop_modulus_irreducible, prop_character],
        "poly": [criterion_euler, prop_format_roundtrip, prop_product_rule, prop_taylor_recombination,
                 prop_ideal_cofactors],
        "rank": [prop_quadric_oracle, prop_relative_coset, prop_truncation, prop_partition_rank_matrix,
                 prop_partition_rank_search],
        "tower": [prop_n_bounds, prop_regularize_examples, criterion_regularization, prop_tz_restriction,
                  prop_dl_consistency],
        "variety": [_lower_and_upper, criterion_low_rank_singularity, prop_linear_dimension, prop_rt_linear],
        "gowers": [criterion_gowers, prop_gowers_nesting, prop_gowers_modulation],
        "paper-identities": [criterion_polarization, _taylor_scoped, criterion_diagonal_bridge,
                             criterion_coefficient_rank, prop_universal_target],
    }


def _taylor_scoped(cfg: Config) -> PropertyResult:
    return criterion_taylor_vanishing(cfg, literal=False)


def _lower_and_upper(cfg: Config):
    corpus = singularity_corpus(cfg, 50)
    return [criterion_rank_lower(cfg, 50, corpus), criterion_rank_upper(cfg, 50, corpus)]


def run_suite(suite: str, cfg: Config) -> dict:
    table = _suite_table()
    if suite not in SUITES:
        raise PreconditionFailed(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
    names = list(table) if suite == "all" else [suite]
    results = []
    for s in names:
        for prop in table[s]:
            out = prop(cfg)
            for res in out if isinstance(out, list) else [out]:
                results.append({"suite": s, **res.to_json()})
    return {
        "suite": suite,
        "seed": cfg.seed,
        "r_max": cfg.r_max,
        "results": results,
        "passed": sum(r["pass"] for r in results),
        "failed": sum(not r["pass"] for r in results),
        "pass": all(r["pass"] for r in results),
    }
