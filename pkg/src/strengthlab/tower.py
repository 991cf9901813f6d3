"""Towers of forms, (A,B,t)-regularity and the regularization procedure.

A tower is an ordered list of layers; layer i holds forms of one degree d_i.
Degrees need not increase (the specialized Taylor tower repeats 1, 2, ...),
and a layer may be empty when the degree vector is fixed in advance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DegreeMismatch, DimensionMismatch, PreconditionFailed
from .poly import (
    Polynomial,
    biform_layers,
    directional_difference,
    format_poly,
    in_ideal,
    parse_poly,
    taylor_layers,
)
from .rank import (
    DEFAULT_RMAX,
    RankCertificate,
    RankValue,
    collection_rank,
    collection_upper_bound,
)


class Tower:
    __slots__ = ("ctx", "nvars", "layers", "degrees", "blocks")

    def __init__(self, ctx, nvars: int, layers, degrees=None, blocks=None):
        self.ctx = ctx
        self.nvars = int(nvars)
        self.layers = [tuple(layer) for layer in layers]
        if degrees is None:
            degrees = []
            for layer in self.layers:
                if not layer:
                    raise DegreeMismatch("empty layer needs an explicit degree")
                degrees.append(layer[0].form_degree())
        self.degrees = [int(d) for d in degrees]
        if len(self.degrees) != len(self.layers):
            raise DimensionMismatch("one degree per layer")
        for d, layer in zip(self.degrees, self.layers):
            if d < 1:
                raise DegreeMismatch("layer degrees must be >= 1")
            for f in layer:
                if f.nvars != self.nvars or f.ctx != ctx:
                    raise DimensionMismatch("tower members must share the ring")
                if not f.is_zero() and not f.is_homogeneous(d):
                    raise DegreeMismatch(f"member {format_poly(f)} is not a form of degree {d}")
        self.blocks = dict(blocks) if blocks else None

    @property
    def sizes(self) -> list:
        return [len(layer) for layer in self.layers]

    @property
    def size(self) -> int:
        return sum(self.sizes)

    @property
    def members(self) -> list:
        return [f for layer in self.layers for f in layer]

    def below(self, i: int) -> list:
        """Members of the truncation F_{<i} (0-based layer index)."""
        return [f for layer in self.layers[:i] for f in layer]

    def nonempty(self) -> "Tower":
        keep = [i for i, layer in enumerate(self.layers) if layer]
        return Tower(self.ctx, self.nvars, [self.layers[i] for i in keep],
                     [self.degrees[i] for i in keep], self.blocks)

    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def __eq__(self, other):
        return (
            isinstance(other, Tower)
            and self.ctx == other.ctx
            and self.nvars == other.nvars
            and self.degrees == other.degrees
            and self.layers == other.layers
        )

    def __repr__(self):
        return f"Tower(degrees={self.degrees}, sizes={self.sizes})"

    def to_json(self) -> dict:
        blocks = self.blocks or {"x": self.nvars}
        return {
            "degrees": list(self.degrees),
            "layers": [[format_poly(f, self.blocks) for f in layer] for layer in self.layers],
            "blocks": dict(blocks),
        }

    @classmethod
    def from_json(cls, data: dict, ctx) -> "Tower":
        blocks = data.get("blocks")
        nvars = sum(int(v) for v in blocks.values()) if blocks else int(data["nvars"])
        use_blocks = blocks if blocks and set(blocks) != {"x"} else None
        layers = [[parse_poly(s, ctx, nvars, use_blocks) for s in layer] for layer in data["layers"]]
        return cls(ctx, nvars, layers, data.get("degrees"), use_blocks)


# -- regularity ----------------------------------------------------------------

def threshold(A, B, mass, t):
    """A (m_i + ... + m_h + t)^B."""
    return A * (mass + t) ** B


@dataclass
class LayerVerdict:
    index: int
    degree: int
    rank: RankValue
    threshold: float
    passed: bool
    certificate: RankCertificate | None = None
    upper_bound: int | None = None

    def to_json(self, blocks=None) -> dict:
        out = {
            "layer": self.index + 1,
            "degree": self.degree,
            "rank": self.rank.to_json(),
            "threshold": self.threshold,
            "pass": self.passed,
        }
        if self.upper_bound is not None:
            out["upper_bound"] = self.upper_bound
        return out


@dataclass
class RegularityReport:
    layers: list
    A: float
    B: float
    t: float

    @property
    def regular(self) -> bool:
        return all(v.passed for v in self.layers)

    def first_failure(self):
        return next((v for v in self.layers if not v.passed), None)

    def to_json(self, blocks=None) -> dict:
        return {
            "A": self.A,
            "B": self.B,
            "t": self.t,
            "layers": [v.to_json(blocks) for v in self.layers],
            "regular": self.regular,
        }


def decide_layer(forms, generators, thr, r_max=DEFAULT_RMAX, budget=None):
    """(rank value, passed, certificate or None, upper bound or None) for rank > thr.

    The search only needs to reach floor(thr).  When floor(thr) exceeds
    r_max, the trivial certificate settles the question if its size is at
    most thr; otherwise the layer is undecidable and PreconditionFailed is
    raised.
    """
    forms = [f for f in forms]
    if thr < 0:
        return RankValue.exceeded(-1), True, None, None
    limit = math.floor(thr)
    res = collection_rank(forms, generators, min(limit, r_max), budget)
    decided = res.rank.gt(thr)
    if decided is not None:
        return res.rank, decided, res.certificate, None
    bound = collection_upper_bound(forms, generators)
    if bound is not None and bound[0] <= thr:
        rk, idx, cert = bound
        combo = tuple(1 if j == idx else 0 for j in range(len(forms)))
        cert = RankCertificate(cert.pairs, cert.target, cert.coset_witness, combo)
        return res.rank, False, cert, rk
    raise PreconditionFailed(
        f"threshold {thr} exceeds r_max={r_max} and the trivial bound "
        f"{bound[0] if bound else None}; rank search cannot decide this layer"
    )


def check_regularity(tower: Tower, A=1, B=1, t=0, r_max: int = DEFAULT_RMAX, budget=None) -> RegularityReport:
    verdicts = []
    sizes = tower.sizes
    for i, layer in enumerate(tower.layers):
        thr = threshold(A, B, sum(sizes[i:]), t)
        if not layer:
            verdicts.append(LayerVerdict(i, tower.degrees[i], RankValue.inf(), thr, True))
            continue
        rk, ok, cert, ub = decide_layer(list(layer), tower.below(i), thr, r_max, budget)
        verdicts.append(LayerVerdict(i, tower.degrees[i], rk, thr, ok, cert, ub))
    return RegularityReport(verdicts, A, B, t)


def n_bounds(m, A=1, B=1, t=0) -> list:
    """n_d = m_d and n_i = m_i + n_{i+1} A (n_{i+1} + t)^B, with m indexed by degree 1..d."""
    m = list(m)
    if not m:
        return []
    n = [0] * len(m)
    n[-1] = m[-1]
    for i in range(len(m) - 2, -1, -1):
        n[i] = m[i] + n[i + 1] * A * (n[i + 1] + t) ** B
    return n


# -- regularization --------------------------------------------------------------

@dataclass
class RegularizationStep:
    layer_degree: int
    threshold: float
    combination: tuple
    certificate: RankCertificate
    deleted: Polynomial
    added: dict  # degree -> list of forms

    def to_json(self, blocks=None) -> dict:
        ctx = self.deleted.ctx
        return {
            "failing_layer_degree": self.layer_degree,
            "threshold": self.threshold,
            "combination": [ctx.format(a) for a in self.combination],
            "certificate": self.certificate.to_json(blocks),
            "deleted": format_poly(self.deleted, blocks),
            "added": {str(e): [format_poly(g, blocks) for g in gs] for e, gs in sorted(self.added.items())},
        }


@dataclass
class RegularizationTrace:
    inputs: list
    A: float
    B: float
    t: float
    steps: list = field(default_factory=list)
    dropped_inputs: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)  # tower after each step
    final: Tower | None = None
    bounds: list = field(default_factory=list)

    def to_json(self, blocks=None) -> dict:
        return {
            "A": self.A,
            "B": self.B,
            "t": self.t,
            "inputs": [format_poly(f, blocks) for f in self.inputs],
            "dropped_zero_inputs": len(self.dropped_inputs),
            "steps": [s.to_json(blocks) for s in self.steps],
            "final": self.final.to_json() if self.final is not None else None,
            "final_size": self.final.size if self.final is not None else None,
            "n_bounds": list(self.bounds),
        }

    def replay_membership(self) -> bool:
        """Every input lies in the ideal of every intermediate tower."""
        for tower in self.snapshots:
            gens = tower.members
            if not all(in_ideal(g, gens) for g in self.inputs):
                return False
        return True


def _as_tower(by_degree, ctx, nvars, blocks):
    degs = sorted(e for e, forms in by_degree.items() if forms)
    return Tower(ctx, nvars, [by_degree[e] for e in degs], degs, blocks)


def regularize(forms, A=1, B=1, t=0, r_max: int = DEFAULT_RMAX, budget=None, blocks=None):
    """Return (tower, trace): an (A,B,t)-regular tower whose ideal contains every input.

    Repeatedly finds the lowest layer whose relative rank is at most its
    threshold, deletes the member at the first nonzero index of the
    offending combination and adds the first factor of each certificate
    product to the layer of its degree.
    """
    forms = list(forms)
    if not forms:
        raise PreconditionFailed("regularize needs at least one form")
    ctx, nvars = forms[0].ctx, forms[0].nvars
    kept = [f for f in forms if not f.is_zero()]
    trace = RegularizationTrace(inputs=kept, A=A, B=B, t=t,
                                dropped_inputs=[f for f in forms if f.is_zero()])
    by_degree = {}
    for f in kept:
        e = f.form_degree()
        if e < 1:
            raise DegreeMismatch("inputs must have positive degree")
        by_degree.setdefault(e, []).append(f)
    d = max(by_degree, default=1)
    trace.bounds = n_bounds([len(by_degree.get(e, [])) for e in range(1, d + 1)], A, B, t)
    while True:
        tower = _as_tower(by_degree, ctx, nvars, blocks)
        sizes = tower.sizes
        step = None
        for i, layer in enumerate(tower.layers):
            thr = threshold(A, B, sum(sizes[i:]), t)
            _, ok, cert, _ = decide_layer(list(layer), tower.below(i), thr, r_max, budget)
            if ok:
                continue
            combo = cert.combination
            j = next(k for k, a in enumerate(combo) if a)
            e = tower.degrees[i]
            deleted = by_degree[e].pop(j)
            added = {}
            for g, _ in cert.pairs:
                if g.is_zero():
                    continue
                ge = g.form_degree()
                by_degree.setdefault(ge, []).append(g)
                added.setdefault(ge, []).append(g)
            step = RegularizationStep(e, thr, combo, cert, deleted, added)
            break
        if step is None:
            trace.final = tower
            return tower, trace
        trace.steps.append(step)
        trace.snapshots.append(_as_tower(by_degree, ctx, nvars, blocks))


# -- derived towers ----------------------------------------------------------------

def tz_tower(tower: Tower) -> Tower:
    """T_z F: keep F and add f(x, y+z) - f(x, y) for every member of positive y-degree."""
    blocks = tower.blocks
    if not blocks or "y" not in blocks:
        raise PreconditionFailed("T_z needs x/y block metadata")
    nx, ny = int(blocks.get("x", 0)), int(blocks["y"])
    if blocks.get("z"):
        raise PreconditionFailed("tower already carries a z block")
    n = tower.nvars + ny
    out = []
    for layer in tower.layers:
        new = [f.embed(n) for f in layer]
        for f in layer:
            if any(f.degree_in(nx, nx + ny) - {0}):
                new.append(directional_difference(f, nx, nx + ny))
        out.append(new)
    return Tower(tower.ctx, n, out, tower.degrees, {"x": nx, "y": ny, "z": ny})


def d_tower(tower: Tower) -> Tower:
    """D G on V + V: layer i holds g^k(w, v) for k = 0..d_i."""
    n = tower.nvars
    out = []
    for layer in tower.layers:
        out.append([piece for g in layer for piece in biform_layers(g)])
    return Tower(tower.ctx, 2 * n, out, tower.degrees, {"x": n, "y": n})


def dl_tower(tower: Tower, l: int) -> Tower:
    """D_l G on V^l + V: layer i holds g(v) and g^k(w_lambda, v) for k < d_i, lambda in [l].

    Variables: w_1, ..., w_l (n each) followed by v.
    """
    if l < 1:
        raise PreconditionFailed("l must be positive")
    n = tower.nvars
    total = (l + 1) * n
    out = []
    for layer in tower.layers:
        members = [g.embed(total, l * n) for g in layer]
        for g in layer:
            pieces = biform_layers(g)
            for k in range(len(pieces) - 1):
                for lam in range(l):
                    members.append(_place_biform(pieces[k], n, lam, l))
        out.append(members)
    return Tower(tower.ctx, total, out, tower.degrees, {"x": l * n, "y": n})


def _place_biform(piece: Polynomial, n: int, lam: int, l: int) -> Polynomial:
    """Move a biform in (w, v) on 2n variables to (w_lam, v) inside V^l + V."""
    total = (l + 1) * n
    terms = {}
    for e, c in piece.terms.items():
        exps = [0] * total
        exps[lam * n: (lam + 1) * n] = e[:n]
        exps[l * n:] = e[n:]
        terms[tuple(exps)] = c
    return Polynomial(piece.ctx, total, terms)


@dataclass
class SpecializedTower:
    tower: Tower
    dropped: list  # (layer index in the full scheme, member description)

    def to_json(self) -> dict:
        return {"tower": self.tower.to_json(), "dropped": [list(x) for x in self.dropped]}


def dl_specialize(tower: Tower, ws) -> SpecializedTower:
    """D_l G(w): for each layer of G, layers 1..d_r-1 of g^i(w_lambda, v), then G_r itself.

    ws is a list of l points of V.  Zero members are dropped and recorded
    as (layer position, source layer, member index, lambda).
    """
    ctx = tower.ctx
    n = tower.nvars
    ws = [[ctx.code(c) for c in w] for w in ws]
    for w in ws:
        if len(w) != n:
            raise DimensionMismatch("base points must lie in V")
    layers, degrees, dropped = [], [], []
    for r, (dr, layer) in enumerate(zip(tower.degrees, tower.layers)):
        expansions = [[taylor_layers(g, w) for w in ws] for g in layer]
        for i in range(1, dr):
            members = []
            for j in range(len(layer)):
                for lam in range(len(ws)):
                    piece = expansions[j][lam][i]
                    if piece.is_zero():
                        dropped.append((len(layers) + 1, r + 1, j + 1, lam + 1))
                    else:
                        members.append(piece)
            layers.append(members)
            degrees.append(i)
        layers.append(list(layer))
        degrees.append(dr)
    return SpecializedTower(Tower(ctx, n, layers, degrees), dropped)
