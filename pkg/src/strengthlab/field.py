"""Exact arithmetic in GF(p) and small extensions GF(p^k).

Elements are stored as integer codes 0 <= c < q.  The code of the element
c_0 + c_1 u + ... + c_{k-1} u^{k-1} (u a root of the modulus polynomial) is
c_0 + c_1 p + ... + c_{k-1} p^{k-1}, so the prime subfield occupies codes
0..p-1.  Addition, multiplication, negation and inversion go through
precomputed q x q tables, which also back the vectorised numpy routines
used by the linear algebra and the point counters.

Extensions use the Conway polynomial for (p, k) when it is in the table
below, and otherwise the lexicographically first monic irreducible.
"""

from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import BudgetExceeded, InverseOfZero, ParseError, PreconditionFailed

DEFAULT_ENUMERATION_BUDGET = 2**24
MAX_PRIME = 31
MAX_FIELD_SIZE = 64

# Conway polynomials, coefficients listed from the constant term up.
CONWAY = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (7, 2): (3, 6, 1),
}


def enumeration_budget(budget: int | None = None) -> int:
    """Resolve an enumeration budget: explicit value, then $STRENGTHLAB_BUDGET, then 2^24."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("STRENGTHLAB_BUDGET")
    if env:
        return int(env)
    return DEFAULT_ENUMERATION_BUDGET


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


# -- dense polynomials over GF(p), constant term first -------------------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, m, p):
    a = _trim(a)
    m = _trim(m)
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        a = _trim(a)
    return a


def is_irreducible(poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _trim(poly)
    k = len(poly) - 1
    if k < 1:
        return False
    for deg in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            if not _pmod(poly, list(low) + [1], p):
                return False
    return True


def default_modulus(p: int, k: int) -> tuple:
    if k == 1:
        return (0, 1)
    if (p, k) in CONWAY:
        return CONWAY[(p, k)]
    for low in itertools.product(range(p), repeat=k):
        cand = tuple(reversed(low)) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise PreconditionFailed(f"no irreducible polynomial of degree {k} over GF({p})")


class FieldCtx:
    """Arithmetic context for GF(p^k).

    Immutable after construction; all operations are pure functions of
    integer codes.
    """

    def __init__(self, p: int, k: int = 1, modulus_poly=None, *, max_size: int = MAX_FIELD_SIZE):
        if not _is_prime(p) or p > MAX_PRIME:
            raise PreconditionFailed(f"p must be a prime <= {MAX_PRIME}, got {p}")
        if k < 1:
            raise PreconditionFailed("extension degree must be >= 1")
        if p**k > max_size:
            raise PreconditionFailed(f"field size {p}^{k} exceeds cap {max_size}")
        self.p = p
        self.k = k
        self.q = p**k
        if k == 1:
            self.modulus_poly = (0, 1)
        else:
            mod = tuple(default_modulus(p, k) if modulus_poly is None else modulus_poly)
            if len(_trim(mod)) != k + 1 or mod[-1] != 1:
                raise PreconditionFailed("modulus must be monic of degree k")
            if not is_irreducible(mod, p):
                raise PreconditionFailed(f"modulus {mod} is reducible over GF({p})")
            self.modulus_poly = mod
        self._build_tables()

    def _build_tables(self):
        q, p, k = self.q, self.p, self.k
        vecs = [self.to_coeffs(c) for c in range(q)]
        add = np.zeros((q, q), dtype=np.int64)
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(q):
                add[a, b] = self.from_coeffs([(x + y) % p for x, y in zip(vecs[a], vecs[b])])
                if k == 1:
                    mul[a, b] = a * b % p
                else:
                    prod = [0] * (2 * k - 1)
                    for i, x in enumerate(vecs[a]):
                        if x:
                            for j, y in enumerate(vecs[b]):
                                prod[i + j] = (prod[i + j] + x * y) % p
                    red = _pmod(prod, self.modulus_poly, p)
                    mul[a, b] = self.from_coeffs(red + [0] * (k - len(red)))
        neg = np.array([self.from_coeffs([(-x) % p for x in vecs[a]]) for a in range(q)], dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        sub = add[:, neg]
        self.ADD, self.MUL, self.NEG, self.INV, self.SUB = add, mul, neg, inv, sub
        for t in (add, mul, neg, inv, sub):
            t.setflags(write=False)
        # plain-list copies: scalar lookups on lists are much cheaper than on ndarrays
        self._add = add.tolist()
        self._mul = mul.tolist()
        self._neg = neg.tolist()
        self._inv = inv.tolist()
        self._sub = sub.tolist()

    # -- representation ---------------------------------------------------

    def to_coeffs(self, code: int) -> tuple:
        out = []
        for _ in range(self.k):
            out.append(code % self.p)
            code //= self.p
        return tuple(out)

    def from_coeffs(self, coeffs) -> int:
        coeffs = list(coeffs)
        if len(coeffs) > self.k:
            raise PreconditionFailed(f"coefficient vector longer than k={self.k}")
        code = 0
        for c in reversed(coeffs):
            code = code * self.p + (int(c) % self.p)
        return code

    def element(self, value) -> "FieldElement":
        return FieldElement(self, self.coerce(value))

    def coerce(self, value) -> int:
        """Integer code of an int (reduced into the prime field), coefficient list, or FieldElement."""
        if isinstance(value, FieldElement):
            if value.ctx != self:
                raise PreconditionFailed("element from a different field")
            return value.code
        if isinstance(value, (list, tuple)):
            return self.from_coeffs(value)
        return int(value) % self.p

    def code(self, value) -> int:
        """Like coerce, except that a plain int is read as an element code (0 <= c < q)."""
        if isinstance(value, (FieldElement, list, tuple)):
            return self.coerce(value)
        v = int(value)
        if self.k == 1:
            return v % self.p
        if not 0 <= v < self.q:
            raise PreconditionFailed(f"code {v} outside GF({self.q})")
        return v

    # -- scalar arithmetic on codes ----------------------------------------

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._sub[a][b]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def inv(self, a: int) -> int:
        if a == 0:
            raise InverseOfZero("inverse of zero")
        return self._inv[a]

    def pow(self, a: int, e: int) -> int:
        result = 1
        base = a
        while e:
            if e & 1:
                result = self._mul[result][base]
            base = self._mul[base][base]
            e >>= 1
        return result

    def from_int(self, n: int) -> int:
        """Image of an integer under Z -> GF(p) -> GF(q)."""
        return n % self.p

    @cached_property
    def trace_table(self) -> np.ndarray:
        """Absolute trace Tr(a) = a + a^p + ... + a^{p^{k-1}} as a residue mod p."""
        out = np.zeros(self.q, dtype=np.int64)
        for a in range(self.q):
            acc, x = 0, a
            for _ in range(self.k):
                acc = self._add[acc][x]
                x = self.pow(x, self.p)
            out[a] = acc  # lands in the prime subfield, whose codes are the residues
        return out

    def is_square(self, a: int) -> bool:
        if a == 0:
            return True
        if self.p == 2:
            return True
        return self.pow(a, (self.q - 1) // 2) == 1

    def power_table(self, max_exp: int) -> np.ndarray:
        """table[a, e] = a^e for 0 <= e <= max_exp (with 0^0 = 1)."""
        table = np.ones((self.q, max_exp + 1), dtype=np.int64)
        for e in range(1, max_exp + 1):
            table[:, e] = self.MUL[table[:, e - 1], np.arange(self.q)]
        return table

    # -- enumeration --------------------------------------------------------

    def elements(self) -> list:
        return list(range(self.q))

    def format(self, code: int) -> str:
        if self.k == 1:
            return str(code)
        return "[" + ",".join(str(c) for c in self.to_coeffs(code)) + "]"

    def parse(self, text: str) -> int:
        text = text.strip()
        if text.startswith("["):
            if not text.endswith("]"):
                raise ParseError(f"bad field literal {text!r}")
            parts = [s for s in text[1:-1].split(",") if s.strip()]
            try:
                return self.from_coeffs([int(s) for s in parts])
            except ValueError as exc:
                raise ParseError(f"bad field literal {text!r}") from exc
        if not text.isdigit():
            raise ParseError(f"bad field literal {text!r}")
        return int(text) % self.p

    @property
    def spec(self) -> str:
        return f"GF({self.p})" if self.k == 1 else f"GF({self.p}^{self.k})"

    def __repr__(self):
        return f"FieldCtx({self.spec})"

    def __eq__(self, other):
        return (
            isinstance(other, FieldCtx)
            and (self.p, self.k, self.modulus_poly) == (other.p, other.k, other.modulus_poly)
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus_poly))

    def __reduce__(self):
        return (_ctx_from_state, (self.p, self.k, self.modulus_poly))


def _ctx_from_state(p, k, modulus_poly):
    return get_field(p, k, modulus_poly)


@lru_cache(maxsize=None)
def get_field(p: int, k: int = 1, modulus_poly=None) -> FieldCtx:
    """Cached FieldCtx constructor (table construction is the expensive part)."""
    return FieldCtx(p, k, modulus_poly)


_FIELD_RE = re.compile(r"^\s*GF\(\s*(\d+)\s*(?:\^\s*(\d+)\s*)?\)\s*$")


def parse_field(spec: str) -> FieldCtx:
    """Parse "GF(p)" or "GF(p^k)".  A plain prime power such as GF(4) is accepted too."""
    m = _FIELD_RE.match(spec)
    if not m:
        raise ParseError(f"bad field spec {spec!r}")
    base = int(m.group(1))
    k = int(m.group(2)) if m.group(2) else 1
    if k == 1 and not _is_prime(base):
        for p in range(2, base + 1):
            if _is_prime(p):
                e, n = 0, base
                while n % p == 0:
                    n //= p
                    e += 1
                if n == 1:
                    return get_field(p, e)
        raise ParseError(f"{base} is not a prime power")
    return get_field(base, k)


@dataclass(frozen=True)
class FieldElement:
    ctx: FieldCtx
    code: int

    @property
    def repr(self) -> tuple:
        return self.ctx.to_coeffs(self.code)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise PreconditionFailed("elements of different fields")
            return other.code
        return self.ctx.coerce(other)

    def __add__(self, other):
        return FieldElement(self.ctx, self.ctx.add(self.code, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self.code, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self._other(other), self.code))

    def __mul__(self, other):
        return FieldElement(self.ctx, self.ctx.mul(self.code, self._other(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.code))

    def __truediv__(self, other):
        return FieldElement(self.ctx, self.ctx.mul(self.code, self.ctx.inv(self._other(other))))

    def __pow__(self, e: int):
        if e < 0:
            return FieldElement(self.ctx, self.ctx.pow(self.ctx.inv(self.code), -e))
        return FieldElement(self.ctx, self.ctx.pow(self.code, e))

    def inverse(self):
        return FieldElement(self.ctx, self.ctx.inv(self.code))

    def __bool__(self):
        return self.code != 0

    def __str__(self):
        return self.ctx.format(self.code)


def field_add(a: FieldElement, b: FieldElement, ctx: FieldCtx) -> FieldElement:
    return FieldElement(ctx, ctx.add(ctx.coerce(a), ctx.coerce(b)))


def field_mul(a: FieldElement, b: FieldElement, ctx: FieldCtx) -> FieldElement:
    return FieldElement(ctx, ctx.mul(ctx.coerce(a), ctx.coerce(b)))


def field_neg(a: FieldElement, ctx: FieldCtx) -> FieldElement:
    return FieldElement(ctx, ctx.neg(ctx.coerce(a)))


def field_inv(a: FieldElement, ctx: FieldCtx) -> FieldElement:
    return FieldElement(ctx, ctx.inv(ctx.coerce(a)))


def enumerate_field(ctx: FieldCtx) -> list:
    return [FieldElement(ctx, c) for c in range(ctx.q)]


def check_budget(count: int, budget: int | None, what: str) -> None:
    cap = enumeration_budget(budget)
    if count > cap:
        raise BudgetExceeded(f"{what}: {count} exceeds enumeration budget {cap}")


def enumerate_vectors(ctx: FieldCtx, n: int, budget: int | None = None) -> np.ndarray:
    """All q^n vectors as rows of codes, in lexicographic order."""
    check_budget(ctx.q**n, budget, f"enumerating GF({ctx.q})^{n}")
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((ctx.q,) * n).reshape(n, -1).T
    return np.ascontiguousarray(grids, dtype=np.int64)


def vector_index(vectors: np.ndarray, q: int) -> np.ndarray:
    """Inverse of enumerate_vectors: row -> position in the lexicographic list."""
    n = vectors.shape[-1]
    radix = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return vectors @ radix


def iter_vector_chunks(ctx: FieldCtx, n: int, chunk: int = 1 << 16, budget: int | None = None, start: int = 0, stop: int | None = None):
    """Yield consecutive blocks of the lexicographic list of GF(q)^n (rows start..stop)."""
    total = ctx.q**n
    check_budget(total, budget, f"enumerating GF({ctx.q})^{n}")
    stop = total if stop is None else stop
    radix = ctx.q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    for lo in range(start, stop, chunk):
        idx = np.arange(lo, min(lo + chunk, stop), dtype=np.int64)
        yield (idx[:, None] // radix[None, :]) % ctx.q


@lru_cache(maxsize=None)
def field_embedding(small: FieldCtx, big: FieldCtx) -> tuple:
    """Codes of the images of GF(small) inside GF(big), as a tuple indexed by small codes.

    The generator of the small field goes to the first root (lowest code) of
    its modulus in the big field.
    """
    if small.p != big.p or big.k % small.k:
        raise PreconditionFailed(f"{small.spec} does not embed in {big.spec}")
    if small.k == 1:
        return tuple(range(small.q))
    mod = small.modulus_poly
    for beta in range(big.q):
        acc = 0
        for c in reversed(mod):
            acc = big.add(big.mul(acc, beta), c)
        if acc == 0:
            break
    else:
        raise PreconditionFailed("no root of the modulus found")
    powers = [big.pow(beta, i) for i in range(small.k)]
    image = []
    for code in range(small.q):
        acc = 0
        for c, b in zip(small.to_coeffs(code), powers):
            acc = big.add(acc, big.mul(c, b))
        image.append(acc)
    return tuple(image)
