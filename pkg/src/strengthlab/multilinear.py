"""Multilinear forms: polarization, partition rank, multilinear towers.

A MultilinearForm on V_1 x ... x V_d stores its coefficient array sparsely
as {(i_1, ..., i_d): code} with 0-based indices.  Converted to a
polynomial, slot s occupies a contiguous block of variables; by default the
blocks are laid out in slot order.

For the coefficient tower, a matrix A_k in M_{n_k x N} is flattened row by
row: entry (s, t) is variable s*N + t of slot k.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import BudgetExceeded, DegreeMismatch, DimensionMismatch
from .field import FieldCtx, check_budget
from .poly import Polynomial

DEFAULT_SEARCH_BUDGET = 2**26


class MultilinearForm:
    __slots__ = ("ctx", "dims", "coeffs")

    def __init__(self, ctx: FieldCtx, dims, coeffs=None):
        self.ctx = ctx
        self.dims = tuple(int(n) for n in dims)
        clean = {}
        for idx, c in (coeffs or {}).items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != len(self.dims) or any(not 0 <= i < n for i, n in zip(idx, self.dims)):
                raise DimensionMismatch(f"index {idx} outside dims {self.dims}")
            if c:
                clean[idx] = int(c)
        self.coeffs = clean

    @property
    def arity(self) -> int:
        return len(self.dims)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (
            isinstance(other, MultilinearForm)
            and self.ctx == other.ctx
            and self.dims == other.dims
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.dims, frozenset(self.coeffs.items())))

    def __repr__(self):
        return f"MultilinearForm(dims={self.dims}, {len(self.coeffs)} entries)"

    def __add__(self, other):
        if self.dims != other.dims:
            raise DimensionMismatch("dims differ")
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            out[idx] = self.ctx.add(out.get(idx, 0), c)
        return MultilinearForm(self.ctx, self.dims, out)

    def scale(self, c: int):
        return MultilinearForm(self.ctx, self.dims, {i: self.ctx.mul(c, v) for i, v in self.coeffs.items()})

    def permute(self, perm):
        """Slot s of the result is slot perm[s] of self."""
        dims = [self.dims[p] for p in perm]
        return MultilinearForm(self.ctx, dims, {tuple(idx[p] for p in perm): c for idx, c in self.coeffs.items()})

    def is_symmetric(self) -> bool:
        return all(self.permute(perm) == self for perm in itertools.permutations(range(self.arity)))

    def evaluate(self, vectors) -> int:
        add, mul = self.ctx._add, self.ctx._mul
        acc = 0
        for idx, c in self.coeffs.items():
            v = c
            for vec, i in zip(vectors, idx):
                v = mul[v][int(vec[i])]
                if not v:
                    break
            acc = add[acc][v]
        return acc

    def to_vector(self) -> np.ndarray:
        v = np.zeros(int(np.prod(self.dims)), dtype=np.int64)
        for idx, c in self.coeffs.items():
            v[np.ravel_multi_index(idx, self.dims)] = c
        return v

    @classmethod
    def from_vector(cls, ctx, dims, v):
        dims = tuple(dims)
        nz = np.flatnonzero(v)
        return cls(ctx, dims, {tuple(int(i) for i in np.unravel_index(j, dims)): int(v[j]) for j in nz})

    def to_polynomial(self, nvars: int | None = None, offsets=None) -> Polynomial:
        """Polynomial in which slot s, coordinate i is variable offsets[s] + i."""
        if offsets is None:
            offsets = list(itertools.accumulate((0,) + self.dims[:-1]))
        if nvars is None:
            nvars = sum(self.dims)
        terms = {}
        for idx, c in self.coeffs.items():
            exps = [0] * nvars
            for off, i in zip(offsets, idx):
                exps[off + i] += 1
            terms[tuple(exps)] = c
        return Polynomial(self.ctx, nvars, terms)

    def diagonal(self) -> Polynomial:
        """F(x, ..., x) as a polynomial in x (all slots must share a dimension)."""
        n = self.dims[0] if self.dims else 0
        if any(m != n for m in self.dims):
            raise DimensionMismatch("diagonal needs equal slot dimensions")
        terms = {}
        add = self.ctx._add
        for idx, c in self.coeffs.items():
            exps = [0] * n
            for i in idx:
                exps[i] += 1
            key = tuple(exps)
            terms[key] = add[terms.get(key, 0)][c]
        return Polynomial(self.ctx, n, terms)

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "entries": [{"idx": list(idx), "c": self.ctx.format(c)} for idx, c in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_json(cls, data: dict, ctx: FieldCtx) -> "MultilinearForm":
        return cls(ctx, data["dims"], {tuple(e["idx"]): ctx.parse(str(e["c"])) for e in data["entries"]})


def polarize(g: Polynomial) -> MultilinearForm:
    """The symmetric multilinear form with g~(x, ..., x) = d! g(x).

    A monomial c * x^alpha contributes c * prod_j alpha_j! to every index
    tuple whose multiset of entries is alpha.
    """
    d = g.form_degree()
    n = g.nvars
    ctx = g.ctx
    coeffs = {}
    for exps, c in g.terms.items():
        weight = ctx.from_int(math.prod(math.factorial(a) for a in exps))
        val = ctx.mul(c, weight)
        if not val:
            continue
        letters = [i for i, a in enumerate(exps) for _ in range(a)]
        for idx in set(itertools.permutations(letters)):
            coeffs[idx] = ctx.add(coeffs.get(idx, 0), val)
    return MultilinearForm(ctx, (n,) * d, coeffs)


def diagonal_contraction(F: MultilinearForm, j: int) -> Polynomial:
    """F(x, ..., x, e_j) as a polynomial in x (the first arity-1 slots must share a dimension)."""
    if F.arity < 1:
        raise DegreeMismatch("arity must be >= 1")
    n = F.dims[0]
    if any(m != n for m in F.dims[:-1]):
        raise DimensionMismatch("diagonal needs equal dimensions on the first slots")
    if not 0 <= j < F.dims[-1]:
        raise DimensionMismatch(f"basis index {j} out of range")
    terms = {}
    add = F.ctx._add
    for idx, c in F.coeffs.items():
        if idx[-1] != j:
            continue
        exps = [0] * n
        for i in idx[:-1]:
            exps[i] += 1
        key = tuple(exps)
        terms[key] = add[terms.get(key, 0)][c]
    return Polynomial(F.ctx, n, terms)


# -- partition rank ------------------------------------------------------------

@dataclass
class PartitionRankResult:
    rank: int | None
    exceeds: int | None = None
    certificate: list = field(default_factory=list)  # (slots I, G on V^I, H on V^{complement})
    candidates_tested: int = 0

    def to_json(self) -> dict:
        return {
            "prank": self.rank if self.rank is not None else {"exceeds": self.exceeds},
            "terms": [
                {"I": list(I), "G": G.to_json(), "H": H.to_json()} for I, G, H in self.certificate
            ],
            "candidates_tested": self.candidates_tested,
        }


def _slot_partitions(d):
    """Unordered splits {I, I^c} of [d], each listed with 0 in I."""
    rest = list(range(1, d))
    out = []
    for size in range(0, d - 1):
        for extra in itertools.combinations(rest, size):
            out.append((0,) + extra)
    return out


def _product_rows(G_vec, I, dims):
    """Rows G(x_I) * e_beta(x_rest) for every basis index beta of the complementary slots."""
    d = len(dims)
    rest = [s for s in range(d) if s not in I]
    rest_dims = [dims[s] for s in rest]
    I_dims = [dims[s] for s in I]
    nrest = int(np.prod(rest_dims)) if rest else 1
    total = int(np.prod(dims))
    out = np.zeros((nrest, total), dtype=np.int64)
    I_idx = np.array(list(np.ndindex(*I_dims)), dtype=np.int64).reshape(-1, len(I))
    for b, beta in enumerate(np.ndindex(*rest_dims)):
        full = np.zeros((I_idx.shape[0], d), dtype=np.int64)
        full[:, list(I)] = I_idx
        full[:, rest] = beta
        pos = np.ravel_multi_index(full.T, dims)
        out[b, pos] = G_vec
    return out


def _matrix_partition_rank(F):
    ctx = F.ctx
    M = F.to_vector().reshape(F.dims)
    R, piv = linalg.rref(M, ctx)
    C = M[:, piv]
    cert = []
    for k in range(len(piv)):
        G = MultilinearForm(ctx, (F.dims[0],), {(i,): int(C[i, k]) for i in range(F.dims[0])})
        H = MultilinearForm(ctx, (F.dims[1],), {(j,): int(R[k, j]) for j in range(F.dims[1])})
        cert.append(((0,), G, H))
    return len(piv), cert


def partition_rank(F: MultilinearForm, r_max: int = 4, budget: int | None = None) -> PartitionRankResult:
    """Minimal r with F = sum_i G_i(x_{I_i}) H_i(x_{complement}), by iterative deepening on r.

    For each split {I, I^c} only the span of the G's placed on the smaller
    side matters, so the search enumerates subspaces (sparsest first) of
    multilinear forms on that side and solves for the H's linearly.
    Arity 2 is plain matrix rank.
    """
    d = F.arity
    if d < 2:
        raise DegreeMismatch("partition rank needs arity >= 2")
    if F.is_zero():
        return PartitionRankResult(0)
    if d == 2:
        r, cert = _matrix_partition_rank(F)
        if r > r_max:
            return PartitionRankResult(None, exceeds=r_max)
        return PartitionRankResult(r, certificate=cert)
    ctx, dims, q = F.ctx, F.dims, F.ctx.q
    budget = DEFAULT_SEARCH_BUDGET if budget is None else budget
    target = F.to_vector()
    splits = []
    for I in _slot_partitions(d):
        comp = tuple(s for s in range(d) if s not in I)
        dim_I = int(np.prod([dims[s] for s in I]))
        dim_c = int(np.prod([dims[s] for s in comp]))
        small = I if dim_I <= dim_c else comp
        splits.append((tuple(sorted(small)), int(np.prod([dims[s] for s in small]))))
    spent = tested = 0
    for r in range(1, r_max + 1):
        choices = [c for c in itertools.combinations_with_replacement(range(len(splits)), r)
                   if all(c.count(k) <= splits[k][1] for k in set(c))]
        cost = sum(
            math.prod(linalg.gaussian_binomial(splits[k][1], c.count(k), q) for k in set(c)) for c in choices
        )
        if spent + cost > budget:
            raise BudgetExceeded(f"partition rank search at r={r} needs {spent + cost} candidates")
        spent += cost
        for c in choices:
            used = sorted(set(c))
            iters = [linalg.iter_subspaces(splits[k][1], c.count(k), q) for k in used]
            for subs in itertools.product(*iters):
                tested += 1
                blocks, owners = [], []
                for k, sub in zip(used, subs):
                    I = splits[k][0]
                    for row in sub:
                        block = _product_rows(row, I, dims)
                        owners.append((I, row, block.shape[0]))
                        blocks.append(block)
                M = np.concatenate(blocks)
                coeffs = linalg.solve_left(M, target, ctx)
                if coeffs is None:
                    continue
                cert, pos = [], 0
                for I, row, nb in owners:
                    comp = tuple(s for s in range(d) if s not in I)
                    G = MultilinearForm.from_vector(ctx, [dims[s] for s in I], row)
                    H = MultilinearForm.from_vector(ctx, [dims[s] for s in comp], coeffs[pos:pos + nb])
                    pos += nb
                    cert.append((I, G, H))
                return PartitionRankResult(r, certificate=cert, candidates_tested=tested)
    return PartitionRankResult(None, exceeds=r_max, candidates_tested=tested)


def reconstruct_partition(cert, dims, ctx) -> MultilinearForm:
    """Sum of the products G_i(x_I) H_i(x_rest) in a partition-rank certificate."""
    d = len(dims)
    total = {}
    for I, G, H in cert:
        comp = [s for s in range(d) if s not in I]
        for gi, gc in G.coeffs.items():
            for hi, hc in H.coeffs.items():
                idx = [0] * d
                for s, i in zip(I, gi):
                    idx[s] = i
                for s, i in zip(comp, hi):
                    idx[s] = i
                key = tuple(idx)
                total[key] = ctx.add(total.get(key, 0), ctx.mul(gc, hc))
    return MultilinearForm(ctx, dims, total)


# -- multilinear towers --------------------------------------------------------

@dataclass
class MultilinearTower:
    """Layers of (form, slots) pairs over V_1 x ... x V_d with dimensions ``dims``.

    ``slots`` is the sorted tuple I of factors the member depends on; the
    member's own dims are (dims[k] for k in I).
    """

    ctx: FieldCtx
    dims: tuple
    layers: list

    @property
    def degrees(self) -> list:
        return [len(layer[0][1]) if layer else 0 for layer in self.layers]

    @property
    def size(self) -> int:
        return sum(len(layer) for layer in self.layers)

    @property
    def nvars(self) -> int:
        return sum(self.dims)

    def offsets(self) -> list:
        return list(itertools.accumulate((0,) + tuple(self.dims[:-1])))

    def member_polynomial(self, form: MultilinearForm, slots) -> Polynomial:
        offs = self.offsets()
        return form.to_polynomial(self.nvars, [offs[k] for k in slots])

    def polynomial_layers(self) -> list:
        return [[self.member_polynomial(f, I) for f, I in layer] for layer in self.layers]

    def validate(self):
        for layer in self.layers:
            for f, I in layer:
                if tuple(f.dims) != tuple(self.dims[k] for k in I):
                    raise DimensionMismatch(f"member dims {f.dims} do not match slots {I}")
                if layer and len(I) != len(layer[0][1]):
                    raise DegreeMismatch("members of one layer must share a degree")


def tilde_tower(tower) -> MultilinearTower:
    """Polarized tower: each g of degree d_i is placed on every slot set E of size d_i in [d]."""
    layers = tower.layers
    d = max(tower.degrees)
    n = tower.nvars
    ctx = tower.ctx
    out = []
    for di, layer in zip(tower.degrees, layers):
        members = []
        for g in layer:
            G = polarize(g)
            for E in itertools.combinations(range(d), di):
                members.append((G, E))
        out.append(members)
    return MultilinearTower(ctx, (n,) * d, out)


def coefficient_tower(G: MultilinearTower, N: int, Ns) -> MultilinearTower:
    """Coefficient forms C^l_{i,j}(A) = (g_{i,j} o A)(e_{l_k}) for l in [N_i]^I.

    Slot k of the result is the flattened matrix space M_{n_k x N}.
    """
    Ns = list(Ns)
    if len(Ns) != len(G.layers):
        raise DimensionMismatch("need one N_i per layer")
    if Ns and (N < Ns[0] or any(a <= b for a, b in zip(Ns, Ns[1:])) or Ns[-1] < 1):
        raise DegreeMismatch("need N >= N_1 > ... > N_h >= 1")
    dims = tuple(n * N for n in G.dims)
    out = []
    for layer, Ni in zip(G.layers, Ns):
        members = []
        for g, I in layer:
            for l in itertools.product(range(Ni), repeat=len(I)):
                coeffs = {
                    tuple(i * N + lk for i, lk in zip(idx, l)): c for idx, c in g.coeffs.items()
                }
                members.append((MultilinearForm(G.ctx, [dims[k] for k in I], coeffs), I))
        out.append(members)
    return MultilinearTower(G.ctx, dims, out)


def universal_target(G: MultilinearTower, rs) -> MultilinearTower:
    """Tower H with |H_i^I| = |G_i^I| and h_{i,j} = sum_{s < 2 r_i} prod_{k in I} X_k(i)[j, s].

    Each slot space is k^N with N = sum_i m_i * 2 r_i, viewed as the product
    of m_i x 2 r_i matrices X_k(i).
    """
    rs = list(rs)
    sizes = [len(layer) for layer in G.layers]
    offsets = list(itertools.accumulate([0] + [m * 2 * r for m, r in zip(sizes, rs)]))
    N = offsets[-1]
    d = len(G.dims)
    out = []
    for i, layer in enumerate(G.layers):
        members = []
        width = 2 * rs[i]
        for j, (_, I) in enumerate(layer):
            coeffs = {
                (offsets[i] + j * width + s,) * len(I): 1 for s in range(width)
            }
            members.append((MultilinearForm(G.ctx, [N] * len(I), coeffs), I))
        out.append(members)
    return MultilinearTower(G.ctx, (N,) * d, out)


def check_surjectivity(G: MultilinearTower, budget: int | None = None) -> bool:
    """Is x -> (g(x))_{g in G} onto k^{|G|}?  Decided by listing the whole image."""
    members = [f for layer in G.polynomial_layers() for f in layer]
    if not members:
        return True
    q = G.ctx.q
    if q ** len(members) > q ** G.nvars:
        return False
    check_budget(q ** G.nvars, budget, "surjectivity check")
    from .field import enumerate_vectors

    pts = enumerate_vectors(G.ctx, G.nvars, budget)
    code = np.zeros(pts.shape[0], dtype=np.int64)
    for f in members:
        code = code * q + f.evaluate_many(pts)
    return np.unique(code).size == q ** len(members)


def slot_counts(G: MultilinearTower) -> list:
    """Per layer, Counter of slot sets (the |G_i^I| shape data)."""
    return [Counter(I for _, I in layer) for layer in G.layers]
