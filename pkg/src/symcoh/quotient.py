"""Graded pieces of quotients S/(g_1, ..., g_t).

Two kinds of ideals occur: (q^k) and (P_1, ..., P_c, q^k).  Both are handled
through an explicit normal form modulo q^k.  With X_0 Y_0 the leading
monomial of q, the monomials not divisible by (X_0 Y_0)^k form a basis of
S/(q^k) in every bidegree; a monomial M = (X_0 Y_0)^j M' with j >= k
reduces, using X_0 Y_0 = q - r with r = sum_{i>=1} X_i Y_i, to

    M' * sum_{t<k} c(j,t,k) (X_0 Y_0)^t r^(j-t),
    c(j,t,k) = sum_{s=t}^{k-1} C(j,s) C(s,t) (-1)^(j-s).

Every monomial in the reduction comes after M in the global monomial
order, so the reduced echelon form of the whole ideal piece has the
non-standard monomials as pivots plus the pivots of the remaining
generators' rows after normal form.  Ideals without a power of q fall back
to plain elimination over all ambient monomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Sequence

from .field_linalg import EchelonForm, PrimeField, SparseMatrix, echelonize, rank
from .polyspace import (
    BiDegree,
    PolyError,
    SparseBiPoly,
    basis_of,
    bideg,
    mul_terms,
    q_poly,
    unit,
    x_slot,
    y_slot,
)


# ---------------------------------------------------------------------------
# normal form modulo q^k


@lru_cache(maxsize=None)
def _c(j: int, t: int, k: int) -> int:
    return sum(comb(j, s) * comb(s, t) * (-1) ** (j - s) for s in range(t, k))


@lru_cache(maxsize=None)
def _r_power(N: int, e: int) -> tuple[tuple[int, int], ...]:
    """Terms of (X_1 Y_1 + ... + X_N Y_N)^e."""
    r = {unit(y_slot(i)) + unit(x_slot(i, N)): 1 for i in range(1, N + 1)}
    out = {0: 1}
    for _ in range(e):
        out = mul_terms(out, r)
    return tuple(out.items())


class QPowerNormalForm:
    """Cached normal form modulo q^k with integer coefficients."""

    def __init__(self, N: int, k: int):
        if k < 1:
            raise ValueError("q-power must be >= 1")
        self.N = N
        self.k = k
        self._x0 = x_slot(0, N)
        self._xy0 = unit(y_slot(0)) + unit(self._x0)
        self._cache: dict[int, tuple[tuple[int, int], ...]] = {}

    def depth(self, key: int) -> int:
        """min(exponent of Y_0, exponent of X_0)."""
        return min(key & 0xFF, (key >> (8 * self._x0)) & 0xFF)

    def is_standard(self, key: int) -> bool:
        return self.depth(key) < self.k

    def __call__(self, key: int) -> tuple[tuple[int, int], ...]:
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        j = self.depth(key)
        if j < self.k:
            res = ((key, 1),)
        else:
            base = key - j * self._xy0
            out: dict[int, int] = {}
            for t in range(self.k):
                c = _c(j, t, self.k)
                if not c:
                    continue
                b2 = base + t * self._xy0
                for kr, vr in _r_power(self.N, j - t):
                    kk = b2 + kr
                    out[kk] = out.get(kk, 0) + c * vr
            res = tuple((kk, v) for kk, v in out.items() if v)
        self._cache[key] = res
        return res

    def reduce_terms(self, terms: dict, p: int = 0) -> dict:
        out: dict[int, int] = {}
        for key, v in terms.items():
            for k2, c in self(key):
                out[k2] = out.get(k2, 0) + v * c
        if p:
            return {k: v for k, v in ((k, v % p) for k, v in out.items()) if v}
        return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def q_normal_form(N: int, k: int) -> QPowerNormalForm:
    return QPowerNormalForm(N, k)


@lru_cache(maxsize=512)
def standard_keys(N: int, m: int, n: int, k: int) -> tuple[int, ...]:
    """Monomials of S_{m,n} not divisible by (X_0 Y_0)^k, in basis order."""
    nf = q_normal_form(N, k)
    return tuple(key for key in basis_of(N, (m, n)).keys if nf.is_standard(key))


def standard_dimension(N: int, b, k: int) -> int:
    b = bideg(b)
    if b.empty:
        return 0
    return len(standard_keys(N, b.m, b.n, k))


# ---------------------------------------------------------------------------
# ideals


@dataclass(frozen=True)
class IdealSpec:
    """Bihomogeneous generators; a generator equal to q^k enables the fast path."""

    N: int
    generators: tuple[SparseBiPoly, ...]
    q_power: int = 0  # k when q^k is among the generators
    others: tuple[SparseBiPoly, ...] = field(default=(), repr=False)

    @classmethod
    def make(cls, N: int, generators: Sequence[SparseBiPoly]) -> "IdealSpec":
        gens = tuple(generators)
        for g in gens:
            if g.is_zero():
                raise PolyError("ideal generators must be nonzero")
            if g.N != N:
                raise PolyError("ambient mismatch in ideal generators")
        q = q_poly(N)
        k_found = 0
        others = []
        for g in gens:
            b = g.bidegree
            if not k_found and b.m == b.n and b.m >= 1 and g == q.power(b.m):
                k_found = b.m
            else:
                others.append(g)
        return cls(N, gens, k_found, tuple(others))

    @classmethod
    def q_power_ideal(cls, N: int, k: int, others: Sequence[SparseBiPoly] = ()) -> "IdealSpec":
        q = q_poly(N)
        qk = q.power(k)
        return cls(N, tuple(others) + (qk,), k, tuple(others))

    def key(self):
        return (self.N, self.q_power, tuple(sorted((tuple(g.bidegree), tuple(sorted(g.terms.items()))) for g in self.others)))


# ---------------------------------------------------------------------------
# quotient pieces


class QuotientPiece:
    """(S/I)_b realized through echelon data over a prime field."""

    def __init__(self, ideal: IdealSpec, b, F: PrimeField):
        self.ideal = ideal
        self.N = ideal.N
        self.bidegree = bideg(b)
        self.field = F
        self.p = F.modulus
        self.ambient = basis_of(self.N, self.bidegree)
        self._echelon: EchelonForm | None = None
        self._reduce_cache: dict[int, dict[int, int]] = {}
        self._other_rows: list[dict[int, int]] | None = None
        self._rank_other: int | None = None
        if self.bidegree.empty:
            self._std: tuple[int, ...] = ()
        elif ideal.q_power:
            self._std = standard_keys(self.N, self.bidegree.m, self.bidegree.n, ideal.q_power)
        else:
            self._std = tuple(self.ambient.keys)
        self._nf = q_normal_form(self.N, ideal.q_power) if ideal.q_power else None

    # generator rows ---------------------------------------------------------
    def generator_rows(self) -> list[dict[int, int]]:
        """Rows (ambient rank -> value) spanning the ideal modulo the q-power part."""
        if self._other_rows is not None:
            return self._other_rows
        p = self.p
        index = self.ambient.index
        rows: list[dict[int, int]] = []
        if not self.bidegree.empty:
            gens = self.ideal.others if self.ideal.q_power else self.ideal.generators
            for g in gens:
                hb = self.bidegree - g.bidegree
                if hb.empty:
                    continue
                gt = [(k, v % p) for k, v in g.terms.items() if v % p]
                if self._nf is not None:
                    hkeys = standard_keys(self.N, hb.m, hb.n, self.ideal.q_power)
                else:
                    hkeys = basis_of(self.N, hb).keys
                for h in hkeys:
                    terms = {h + kg: vg for kg, vg in gt}
                    if self._nf is not None:
                        terms = self._nf.reduce_terms(terms, p)
                    row = {index[k]: v for k, v in terms.items()}
                    if row:
                        rows.append(row)
        self._other_rows = rows
        return rows

    def generator_rank(self) -> int:
        if self._rank_other is None:
            if self._echelon is not None:
                self._rank_other = self._echelon.rank
            else:
                M = SparseMatrix.from_rows(self.generator_rows(), len(self.ambient), self.p)
                self._rank_other = rank(M, self.field)
        return self._rank_other

    def echelon(self) -> EchelonForm:
        """Reduced echelon form of the generator rows (standard columns only on the fast path)."""
        if self._echelon is None:
            M = SparseMatrix.from_rows(self.generator_rows(), len(self.ambient), self.p)
            self._echelon = echelonize(M, self.field)
            self._rank_other = self._echelon.rank
            self._pivot_rows = self._echelon.pivot_row()
            pivset = set(self._echelon.pivots)
            idx = self.ambient.index
            self._basis_keys = tuple(k for k in self._std if idx[k] not in pivset)
            self._coord = {idx[k]: i for i, k in enumerate(self._basis_keys)}
        return self._echelon

    # spec-level data --------------------------------------------------------
    @property
    def dimension(self) -> int:
        return len(self._std) - self.generator_rank()

    @property
    def standard_count(self) -> int:
        return len(self._std)

    def standard_keys(self) -> tuple[int, ...]:
        return self._std

    def basis_keys(self) -> tuple[int, ...]:
        self.echelon()
        return self._basis_keys

    @property
    def quotient_basis(self) -> list[int]:
        """Ambient ranks of the non-pivot monomials."""
        idx = self.ambient.index
        return [idx[k] for k in self.basis_keys()]

    @property
    def pivots(self) -> list[int]:
        """Pivot columns of the full ideal piece (ambient ranks)."""
        E = self.echelon()
        idx = self.ambient.index
        nonstd = [] if self._nf is None else [i for i, k in enumerate(self.ambient.keys) if not self._nf.is_standard(k)]
        return sorted(nonstd + list(E.pivots))

    @property
    def ideal_rows(self) -> EchelonForm:
        """Reduced echelon form of the full ideal piece over all ambient monomials."""
        E = self.echelon()
        if self._nf is None:
            return E
        idx = self.ambient.index
        rows = {c: r for c, r in zip(E.pivots, E.rows)}
        for key in self.ambient.keys:
            if self._nf.is_standard(key):
                continue
            vec = self._ambient_reduce({key: 1})
            # key - (its canonical representative) lies in the ideal
            row = {i: (-v) % self.p for i, v in vec.items()}
            row[idx[key]] = 1
            rows[idx[key]] = {i: v for i, v in row.items() if v}
        piv = sorted(rows)
        return EchelonForm(len(self.ambient), tuple(piv), tuple(rows[c] for c in piv))

    # reduction --------------------------------------------------------------
    def _ambient_reduce(self, terms: dict) -> dict[int, int]:
        """Canonical representative, keyed by ambient rank."""
        self.echelon()
        p = self.p
        idx = self.ambient.index
        if self._nf is not None:
            terms = self._nf.reduce_terms(terms, p)
        vec = {}
        for k, v in terms.items():
            v %= p
            if v:
                vec[idx[k]] = v
        for c in [c for c in vec if c in self._pivot_rows]:
            f = vec.get(c)
            if not f:
                continue
            for j, v in self._pivot_rows[c].items():
                nv = (vec.get(j, 0) - f * v) % p
                if nv:
                    vec[j] = nv
                else:
                    vec.pop(j, None)
        return vec

    def reduce_terms(self, terms: dict) -> dict[int, int]:
        """Quotient coordinates of a polynomial given as packed terms."""
        self.echelon()
        out: dict[int, int] = {}
        p = self.p
        for key, v in terms.items():
            v %= p
            if not v:
                continue
            red = self._reduce_cache.get(key)
            if red is None:
                vec = self._ambient_reduce({key: 1})
                red = {self._coord[i]: c for i, c in vec.items()}
                self._reduce_cache[key] = red
            for i, c in red.items():
                out[i] = (out.get(i, 0) + v * c) % p
        return {i: c for i, c in out.items() if c}

    def reduce(self, poly: SparseBiPoly) -> dict[int, int]:
        if poly.is_zero():
            return {}
        if poly.bidegree != self.bidegree:
            raise PolyError(f"bidegree {tuple(poly.bidegree)} does not match quotient piece {tuple(self.bidegree)}")
        return self.reduce_terms({k: self.field.coerce(v) for k, v in poly.terms.items()})

    def lift(self, v: dict[int, int]) -> SparseBiPoly:
        keys = self.basis_keys()
        return SparseBiPoly(self.N, self.bidegree, {keys[i]: c % self.p for i, c in v.items() if c % self.p}, check=False)

    def __repr__(self) -> str:
        return f"QuotientPiece(N={self.N}, b={tuple(self.bidegree)}, q^{self.ideal.q_power}, +{len(self.ideal.others)} gens)"


def ideal_image_piece(I: IdealSpec, b, F: PrimeField) -> EchelonForm:
    """Echelon form of sum_j g_j * S_{b - bidegree(g_j)} inside S_b."""
    return QuotientPiece(I, b, F).ideal_rows


def quotient_piece(I: IdealSpec, b, F: PrimeField) -> QuotientPiece:
    Q = QuotientPiece(I, b, F)
    Q.echelon()
    return Q


def ideal_spanning_terms(Q: QuotientPiece) -> list[dict]:
    """All products g*h (h a monomial) spanning the ideal piece of Q."""
    out = []
    p = Q.p
    if Q.bidegree.empty:
        return out
    for g in Q.ideal.generators:
        hb = Q.bidegree - g.bidegree
        if hb.empty:
            continue
        gt = [(k, v % p) for k, v in g.terms.items() if v % p]
        for h in basis_of(Q.N, hb).keys:
            out.append({h + kg: vg for kg, vg in gt})
    return out


def well_definedness_check(op, source: QuotientPiece, target: QuotientPiece, F: PrimeField, raise_on_error: bool = False) -> bool:
    """op maps the source ideal piece into the target ideal piece."""
    from .operators import OperatorError, apply_terms, compile_op

    if target.bidegree != source.bidegree + op.shift:
        raise OperatorError("bidegree mismatch in well-definedness check")
    fn = compile_op(op, F)
    for terms in ideal_spanning_terms(source):
        img = apply_terms(fn, terms, F)
        if target.reduce_terms(img):
            if raise_on_error:
                raise OperatorError(f"{op!r} does not descend from {source!r} to {target!r}")
            return False
    return True
