"""Bihomogeneous polynomials in C[Y, X] with N+1 variables in each block.

A monomial Y^a X^b is packed into one Python integer: exponent slot ``k``
occupies bits ``[8k, 8k+8)``, with Y_i in slot ``i`` and X_i in slot
``N+1+i``.  Multiplying monomials is then integer addition, and the packed
integer doubles as a hashable monomial identifier.

Within a graded piece S_{m,n} monomials are ranked by graded reverse
lexicographic order inside each block, Y-block major: rank 0 is the
largest monomial and ``rank = yrank * dim C[X]_n + xrank``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Iterator, Mapping

BITS = 8
MASK = (1 << BITS) - 1
MAX_EXPONENT = MASK


class PolyError(ValueError):
    """Malformed, non-bihomogeneous or incompatible polynomial data."""


@dataclass(frozen=True, order=True)
class BiDegree:
    m: int
    n: int

    def __add__(self, other: "BiDegree") -> "BiDegree":
        return BiDegree(self.m + other.m, self.n + other.n)

    def __sub__(self, other: "BiDegree") -> "BiDegree":
        return BiDegree(self.m - other.m, self.n - other.n)

    @property
    def empty(self) -> bool:
        return self.m < 0 or self.n < 0

    def __iter__(self):
        return iter((self.m, self.n))


def bideg(m, n: int | None = None) -> BiDegree:
    if isinstance(m, BiDegree):
        return m
    if n is None:
        m, n = m
    return BiDegree(int(m), int(n))


def piece_dimension(N: int, b) -> int:
    m, n = bideg(b)
    if m < 0 or n < 0:
        return 0
    return comb(m + N, N) * comb(n + N, N)


def block_dimension(N: int, k: int) -> int:
    """dim of the degree-k part of a polynomial ring in N+1 variables."""
    return comb(k + N, N) if k >= 0 else 0


# ---------------------------------------------------------------------------
# packing


def pack(ey: Iterable[int], ex: Iterable[int]) -> int:
    ey, ex = tuple(ey), tuple(ex)
    if len(ey) != len(ex):
        raise PolyError("Y and X exponent vectors must have equal length")
    N1 = len(ey)
    key = 0
    for k, e in enumerate(ey + ex):
        if e < 0 or e > MAX_EXPONENT:
            raise PolyError(f"exponent {e} out of range")
        key |= e << (BITS * k)
    return key


def unpack(key: int, N: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    N1 = N + 1
    ex = [(key >> (BITS * k)) & MASK for k in range(2 * N1)]
    return tuple(ex[:N1]), tuple(ex[N1:])


def exponent(key: int, slot: int) -> int:
    return (key >> (BITS * slot)) & MASK


def y_slot(i: int) -> int:
    return i


def x_slot(i: int, N: int) -> int:
    return N + 1 + i


def unit(slot: int) -> int:
    return 1 << (BITS * slot)


def key_bidegree(key: int, N: int) -> BiDegree:
    ey, ex = unpack(key, N)
    return BiDegree(sum(ey), sum(ex))


# ---------------------------------------------------------------------------
# monomial enumeration and ranking


def _grevlex_desc(nvars: int, deg: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree ``deg``, largest first in grevlex."""
    if deg < 0:
        return []
    vecs = []
    for combo in combinations_with_replacement(range(nvars), deg):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        vecs.append(tuple(e))
    # a > b in grevlex iff the last nonzero entry of a - b is negative,
    # so ascending order of the reversed vectors lists the largest first
    vecs.sort(key=lambda e: e[::-1])
    return vecs


def grevlex_greater(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    """True when a > b in graded reverse lexicographic order."""
    if sum(a) != sum(b):
        return sum(a) > sum(b)
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return x < y
    return False


class MonomialBasis:
    """Ranked monomial basis of S_{m,n}."""

    def __init__(self, N: int, b):
        b = bideg(b)
        self.N = N
        self.bidegree = b
        if b.empty:
            self.yexps: list[tuple[int, ...]] = []
            self.xexps: list[tuple[int, ...]] = []
        else:
            self.yexps = _grevlex_desc(N + 1, b.m)
            self.xexps = _grevlex_desc(N + 1, b.n)
        ykeys = [pack(e, (0,) * (N + 1)) for e in self.yexps]
        xkeys = [pack((0,) * (N + 1), e) for e in self.xexps]
        self.dim_y = len(ykeys)
        self.dim_x = len(xkeys)
        self.keys: list[int] = [yk | xk for yk in ykeys for xk in xkeys]
        self.index: dict[int, int] = {k: i for i, k in enumerate(self.keys)}

    @property
    def size(self) -> int:
        return len(self.keys)

    def __len__(self) -> int:
        return len(self.keys)

    def __iter__(self) -> Iterator[int]:
        return iter(self.keys)

    def rank(self, ey, ex) -> int:
        ey, ex = tuple(ey), tuple(ex)
        if len(ey) != self.N + 1 or len(ex) != self.N + 1:
            raise PolyError("exponent vector length does not match N+1")
        if (sum(ey), sum(ex)) != (self.bidegree.m, self.bidegree.n):
            raise PolyError(f"exponent totals {(sum(ey), sum(ex))} do not match {tuple(self.bidegree)}")
        return self.index[pack(ey, ex)]

    def unrank(self, r: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        if not 0 <= r < len(self.keys):
            raise IndexError(r)
        return self.yexps[r // self.dim_x], self.xexps[r % self.dim_x]


@lru_cache(maxsize=256)
def monomial_basis(N: int, m: int, n: int) -> MonomialBasis:
    return MonomialBasis(N, BiDegree(m, n))


def basis_of(N: int, b) -> MonomialBasis:
    b = bideg(b)
    return monomial_basis(N, b.m, b.n)


def monomial_rank(N: int, b, ey, ex) -> int:
    return basis_of(N, b).rank(ey, ex)


def monomial_unrank(N: int, b, r: int):
    return basis_of(N, b).unrank(r)


# ---------------------------------------------------------------------------
# polynomials


Terms = dict  # packed monomial -> coefficient


class SparseBiPoly:
    """A bihomogeneous polynomial: packed monomial -> nonzero coefficient.

    Coefficients are Python ints or Fractions (characteristic zero) or
    residues mod p when the polynomial was produced inside a prime field.
    """

    __slots__ = ("N", "bidegree", "terms")

    def __init__(self, N: int, b, terms: Mapping[int, object] | None = None, check: bool = True):
        self.N = N
        self.bidegree = bideg(b)
        self.terms: dict = {k: v for k, v in (terms or {}).items() if v}
        if check:
            for k in self.terms:
                if key_bidegree(k, N) != self.bidegree:
                    raise PolyError(f"monomial of bidegree {tuple(key_bidegree(k, N))} in a polynomial of bidegree {tuple(self.bidegree)}")

    # construction helpers ---------------------------------------------------
    @classmethod
    def zero(cls, N: int, b) -> "SparseBiPoly":
        return cls(N, b, {}, check=False)

    @classmethod
    def one(cls, N: int) -> "SparseBiPoly":
        return cls(N, (0, 0), {0: 1}, check=False)

    @classmethod
    def monomial(cls, N: int, ey, ex, coeff=1) -> "SparseBiPoly":
        return cls(N, (sum(ey), sum(ex)), {pack(ey, ex): coeff}, check=False)

    @classmethod
    def variable(cls, N: int, block: str, i: int) -> "SparseBiPoly":
        ey = [0] * (N + 1)
        ex = [0] * (N + 1)
        (ey if block == "Y" else ex)[i] = 1
        return cls.monomial(N, ey, ex)

    # inspection ---------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseBiPoly):
            return NotImplemented
        if self.N != other.N:
            return False
        if not self.terms and not other.terms:
            return True
        return self.bidegree == other.bidegree and self.terms == other.terms

    def __hash__(self):
        return hash((self.N, self.bidegree, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"SparseBiPoly(N={self.N}, bidegree={tuple(self.bidegree)}, {format_poly(self)!r})"

    def by_rank(self) -> dict[int, object]:
        """Coefficients keyed by rank in the monomial basis of the bidegree."""
        idx = basis_of(self.N, self.bidegree).index
        return {idx[k]: v for k, v in self.terms.items()}

    def x_degree(self) -> int:
        return self.bidegree.n

    def in_field(self, F) -> "SparseBiPoly":
        return SparseBiPoly(self.N, self.bidegree, {k: F.coerce(v) for k, v in self.terms.items()}, check=False)

    # arithmetic ---------------------------------------------------------------
    def _compat(self, other: "SparseBiPoly") -> None:
        if self.N != other.N:
            raise PolyError(f"ambient mismatch: N={self.N} vs N={other.N}")

    def add(self, other: "SparseBiPoly", F=None) -> "SparseBiPoly":
        self._compat(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        if self.bidegree != other.bidegree:
            raise PolyError("cannot add polynomials of different bidegrees")
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
            if F is not None:
                out[k] = F.norm(out[k])
        return SparseBiPoly(self.N, self.bidegree, out, check=False)

    def scale(self, c, F=None) -> "SparseBiPoly":
        if F is None:
            return SparseBiPoly(self.N, self.bidegree, {k: v * c for k, v in self.terms.items()}, check=False)
        return SparseBiPoly(self.N, self.bidegree, {k: F.norm(v * c) for k, v in self.terms.items()}, check=False)

    def sub(self, other: "SparseBiPoly", F=None) -> "SparseBiPoly":
        return self.add(other.scale(-1, F), F)

    def multiply(self, other: "SparseBiPoly", F=None) -> "SparseBiPoly":
        self._compat(other)
        return SparseBiPoly(self.N, self.bidegree + other.bidegree, mul_terms(self.terms, other.terms, F), check=False)

    def power(self, k: int, F=None) -> "SparseBiPoly":
        out = SparseBiPoly.one(self.N)
        for _ in range(k):
            out = out.multiply(self, F)
        return out

    __add__ = add
    __sub__ = sub
    __mul__ = multiply

    def __neg__(self) -> "SparseBiPoly":
        return self.scale(-1)


def mul_terms(a: Mapping[int, object], b: Mapping[int, object], F=None) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = ka + kb
            out[k] = out.get(k, 0) + va * vb
    if F is not None:
        return {k: v for k, v in ((k, F.norm(v)) for k, v in out.items()) if v}
    return {k: v for k, v in out.items() if v}


def add_into(acc: dict, terms: Mapping[int, object], scale=1) -> None:
    for k, v in terms.items():
        acc[k] = acc.get(k, 0) + v * scale


def q_poly(N: int) -> SparseBiPoly:
    """q = X_0 Y_0 + ... + X_N Y_N, bidegree (1,1)."""
    return SparseBiPoly(N, (1, 1), {unit(y_slot(i)) + unit(x_slot(i, N)): 1 for i in range(N + 1)}, check=False)


def dense_multiply(p: SparseBiPoly, r: SparseBiPoly) -> SparseBiPoly:
    """Schoolbook product through exponent-vector convolution (test oracle)."""
    out: dict[tuple, object] = {}
    for ka, va in p.terms.items():
        ea = unpack(ka, p.N)
        for kb, vb in r.terms.items():
            eb = unpack(kb, r.N)
            e = tuple(x + y for x, y in zip(ea[0] + ea[1], eb[0] + eb[1]))
            out[e] = out.get(e, 0) + va * vb
    N1 = p.N + 1
    return SparseBiPoly(p.N, p.bidegree + r.bidegree, {pack(e[:N1], e[N1:]): v for e, v in out.items() if v})


# ---------------------------------------------------------------------------
# parsing and printing


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>[XY])(?P<idx>\d+)|(?P<op>[-+*^]))")


class ParseError(PolyError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _tokens(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = mt.start() + (len(mt.group(0)) - len(mt.group(0).lstrip()))
        if mt.group("num") is not None:
            toks.append(("num", mt.group("num"), start))
        elif mt.group("var") is not None:
            toks.append(("var", mt.group("var") + mt.group("idx"), start))
        else:
            toks.append(("op", mt.group("op"), start))
        pos = mt.end()
    return toks


def parse_poly(text: str, N: int) -> SparseBiPoly:
    """Parse ``expr := term (('+'|'-') term)*`` into an exact integer polynomial."""
    toks = _tokens(text)
    pos = 0
    end = len(text)

    def peek():
        return toks[pos] if pos < len(toks) else None

    terms: dict[tuple, int] = {}
    first = True
    while True:
        sign = 1
        tok = peek()
        if tok and tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            pos += 1
        elif not first:
            if tok is None:
                break
            raise ParseError(f"expected '+' or '-' but found {tok[1]!r}", tok[2])
        first = False
        # term := coef? ('*'? factor)*
        tok = peek()
        if tok is None:
            raise ParseError("expected a term", end)
        coef = 1
        seen = False
        if tok[0] == "num":
            coef = int(tok[1])
            pos += 1
            seen = True
        ey = [0] * (N + 1)
        ex = [0] * (N + 1)
        while True:
            tok = peek()
            if tok is None:
                break
            if tok[0] == "op" and tok[1] == "*":
                nxt = toks[pos + 1] if pos + 1 < len(toks) else None
                if nxt is None or nxt[0] != "var":
                    raise ParseError("expected a variable after '*'", nxt[2] if nxt else end)
                pos += 1
                continue
            if tok[0] != "var":
                break
            name = tok[1]
            idx = int(name[1:])
            if idx > N:
                raise ParseError(f"variable {name} has index > N={N}", tok[2])
            pos += 1
            power = 1
            tok2 = peek()
            if tok2 and tok2[0] == "op" and tok2[1] == "^":
                pos += 1
                tok3 = peek()
                if tok3 is None or tok3[0] != "num":
                    raise ParseError("expected an exponent after '^'", tok3[2] if tok3 else end)
                power = int(tok3[1])
                pos += 1
            (ey if name[0] == "Y" else ex)[idx] += power
            seen = True
        if not seen:
            tok = peek()
            raise ParseError("expected a coefficient or variable", tok[2] if tok else end)
        key = (tuple(ey), tuple(ex))
        terms[key] = terms.get(key, 0) + sign * coef
    terms = {k: v for k, v in terms.items() if v}
    if not terms:
        return SparseBiPoly.zero(N, (0, 0))
    degs = {(sum(ey), sum(ex)) for ey, ex in terms}
    if len(degs) != 1:
        raise PolyError(f"not bihomogeneous: bidegrees {sorted(degs)}")
    (b,) = degs
    for ey, ex in terms:
        if max(ey + ex) > MAX_EXPONENT:
            raise PolyError("exponent too large")
    return SparseBiPoly(N, b, {pack(ey, ex): v for (ey, ex), v in terms.items()}, check=False)


def _fmt_coeff(v) -> str:
    if isinstance(v, Fraction):
        return f"({v.numerator}/{v.denominator})"
    return str(v)


def format_poly(p: SparseBiPoly) -> str:
    """Print in the parser grammar, monomials in descending basis order."""
    if not p.terms:
        return "0"
    basis = basis_of(p.N, p.bidegree)
    items = sorted(p.terms.items(), key=lambda kv: basis.index[kv[0]])
    parts = []
    for key, v in items:
        ey, ex = unpack(key, p.N)
        factors = []
        for name, exps in (("Y", ey), ("X", ex)):
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append(f"{name}{i}")
                elif e > 1:
                    factors.append(f"{name}{i}^{e}")
        neg = v < 0
        a = -v if neg else v
        if not factors:
            body = _fmt_coeff(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = _fmt_coeff(a) + "*" + "*".join(factors)
        parts.append(("-" if neg else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for s, body in parts[1:]:
        out += f" {s} {body}"
    return out


def x_homogeneous_degree(p: SparseBiPoly) -> int:
    """Degree of a pure-X polynomial; raises if p involves Y or is zero."""
    if p.is_zero():
        raise PolyError("zero polynomial has no degree")
    if p.bidegree.m != 0:
        raise PolyError("expected a polynomial in the X variables only")
    return p.bidegree.n
