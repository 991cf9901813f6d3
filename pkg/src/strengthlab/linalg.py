"""Dense linear algebra over GF(q) on integer-code matrices.

Gaussian elimination uses first-nonzero pivoting in column order, so every
routine here is deterministic.  Matrices are int64 numpy arrays of field
codes; arithmetic goes through the FieldCtx lookup tables.
"""

from __future__ import annotations

import itertools

import numpy as np

from .field import FieldCtx


def rref(M: np.ndarray, ctx: FieldCtx):
    """Reduced row echelon form.

    Returns (R, pivots) where R holds only the nonzero rows and pivots[i] is
    the pivot column of row i.
    """
    R = np.array(M, dtype=np.int64, copy=True)
    if R.ndim != 2 or R.shape[0] == 0:
        return R.reshape(0, R.shape[-1] if R.ndim == 2 else 0), []
    m, n = R.shape
    pivots = []
    row = 0
    ADD, MUL, NEG, INV = ctx.ADD, ctx.MUL, ctx.NEG, ctx.INV
    for col in range(n):
        if row == m:
            break
        nz = np.flatnonzero(R[row:, col])
        if nz.size == 0:
            continue
        r = row + int(nz[0])
        if r != row:
            R[[row, r]] = R[[r, row]]
        lead = int(R[row, col])
        if lead != 1:
            R[row] = MUL[INV[lead], R[row]]
        factors = NEG[R[:, col]]
        factors[row] = 0
        hit = np.flatnonzero(factors)
        if hit.size:
            R[hit] = ADD[R[hit], MUL[factors[hit, None], R[row][None, :]]]
        pivots.append(col)
        row += 1
    return R[:row], pivots


def rank(M: np.ndarray, ctx: FieldCtx) -> int:
    return len(rref(M, ctx)[1])


def reduce_rows(V: np.ndarray, R: np.ndarray, pivots, ctx: FieldCtx) -> np.ndarray:
    """Reduce each row of V modulo the row space of an RREF matrix R."""
    V = np.array(V, dtype=np.int64, copy=True)
    if V.ndim == 1:
        return reduce_rows(V[None, :], R, pivots, ctx)[0]
    ADD, MUL, NEG = ctx.ADD, ctx.MUL, ctx.NEG
    for i, col in enumerate(pivots):
        factors = NEG[V[:, col]]
        hit = np.flatnonzero(factors)
        if hit.size:
            V[hit] = ADD[V[hit], MUL[factors[hit, None], R[i][None, :]]]
    return V


def in_row_space(v: np.ndarray, R: np.ndarray, pivots, ctx: FieldCtx) -> bool:
    return not reduce_rows(v, R, pivots, ctx).any()


def left_kernel(M: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """RREF basis of {a : a @ M = 0}."""
    m = M.shape[0]
    aug = np.concatenate([np.asarray(M, dtype=np.int64), np.eye(m, dtype=np.int64)], axis=1)
    R, pivots = rref(aug, ctx)
    n = M.shape[1]
    rows = [R[i, n:] for i, c in enumerate(pivots) if c >= n]
    if not rows:
        return np.zeros((0, m), dtype=np.int64)
    return rref(np.array(rows), ctx)[0]


def solve_left(M: np.ndarray, b: np.ndarray, ctx: FieldCtx):
    """Some c with c @ M = b, or None if b is outside the row space of M."""
    M = np.asarray(M, dtype=np.int64)
    m, n = M.shape
    if m == 0:
        return np.zeros(0, dtype=np.int64) if not np.any(b) else None
    # row-reduce [M | I]; each reduced row records which combination of M produced it
    aug = np.concatenate([M, np.eye(m, dtype=np.int64)], axis=1)
    R, pivots = rref(aug, ctx)
    ADD, MUL, NEG = ctx.ADD, ctx.MUL, ctx.NEG
    resid = np.array(b, dtype=np.int64, copy=True)
    coeffs = np.zeros(m, dtype=np.int64)
    for i, col in enumerate(pivots):
        if col >= n:
            break
        c = int(resid[col])
        if c:
            resid = ADD[resid, MUL[NEG[c], R[i, :n]]]
            coeffs = ADD[coeffs, MUL[c, R[i, n:]]]
    if resid.any():
        return None
    return coeffs


def matmul(A: np.ndarray, B: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for t in range(A.shape[1]):
        out = ctx.ADD[out, ctx.MUL[A[:, t, None], B[None, t, :]]]
    return out


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of GF(q)^n."""
    if k < 0 or k > n:
        return 0
    num, den = 1, 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def iter_subspaces(n: int, k: int, q: int):
    """Yield every k-dimensional subspace of GF(q)^n exactly once, as its RREF basis.

    Sparsest first: ordered by the number of nonzero free entries, then by
    pivot set (combinations order), then by the positions and values of the
    free entries.
    """
    if k == 0:
        yield np.zeros((0, n), dtype=np.int64)
        return
    shapes = []
    for piv in itertools.combinations(range(n), k):
        pivset = set(piv)
        free = [(i, c) for i, p in enumerate(piv) for c in range(p + 1, n) if c not in pivset]
        base = np.zeros((k, n), dtype=np.int64)
        base[np.arange(k), list(piv)] = 1
        shapes.append((base, free))
    max_weight = max(len(free) for _, free in shapes)
    for weight in range(max_weight + 1):
        for base, free in shapes:
            if weight > len(free):
                continue
            for where in itertools.combinations(free, weight):
                rows = [w[0] for w in where]
                cols = [w[1] for w in where]
                for vals in itertools.product(range(1, q), repeat=weight):
                    B = base.copy()
                    if weight:
                        B[rows, cols] = vals
                    yield B


def iter_projective(s: int, q: int):
    """Nonzero vectors of GF(q)^s whose first nonzero coordinate is 1, lexicographically."""
    for lead in range(s - 1, -1, -1):
        for tail in itertools.product(range(q), repeat=s - lead - 1):
            yield (0,) * lead + (1,) + tail


def batch_rank(Ms: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """Ranks of a stack of matrices, shape (N, s, n) -> (N,)."""
    M = np.array(Ms, dtype=np.int64, copy=True)
    N, s, n = M.shape
    rank = np.zeros(N, dtype=np.int64)
    if s == 0 or N == 0:
        return rank
    rows = np.arange(s)
    pts = np.arange(N)
    ADD, MUL, NEG, INV = ctx.ADD, ctx.MUL, ctx.NEG, ctx.INV
    for col in range(n):
        mask = (M[:, :, col] != 0) & (rows[None, :] >= rank[:, None])
        has = mask.any(axis=1)
        if not has.any():
            continue
        sel = pts[has]
        piv = mask[sel].argmax(axis=1)
        tgt = rank[sel]
        # swap the pivot row into position
        prow = M[sel, piv].copy()
        M[sel, piv] = M[sel, tgt]
        M[sel, tgt] = MUL[INV[prow[:, col]][:, None], prow]
        prow = M[sel, tgt]
        factors = NEG[M[sel, :, col]]
        factors[np.arange(sel.size), tgt] = 0
        M[sel] = ADD[M[sel], MUL[factors[:, :, None], prow[:, None, :]]]
        rank[sel] += 1
        if (rank == s).all():
            break
    return rank
