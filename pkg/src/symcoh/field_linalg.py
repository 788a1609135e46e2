"""Exact linear algebra over prime fields.

Matrices are stored column-compressed (scipy CSC, int64 entries reduced
mod p).  Rank, reduced echelon forms and nullspaces are computed block by
block: the bipartite row/column incidence graph is split into connected
components, each component is eliminated densely with FLINT's ``nmod_mat``
(or a small pure-Python routine), and the results are glued back together.
Because the reduced row echelon form of a matrix is unique, the result does
not depend on how the blocks are processed, and the pivot set is the one
produced by the smallest-column-first rule.
"""

from __future__ import annotations

import heapq

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Iterable, Iterator, Sequence

import flint
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

DEFAULT_PRIMES: tuple[int, ...] = (1000003, 2000003)
EXTRA_PRIMES: tuple[int, ...] = (3000017, 4000037, 5000011, 6000011)

# dense blocks above this many entries fall back to sparse elimination
DENSE_LIMIT = 60_000_000
# blocks with at most this many rows and columns are eliminated in Python
SMALL_BLOCK = 6
# bound on min(nrows, ncols) for the exact rational path
EXACT_BOUND = 2000
# blocks sparser than this go through sparse elimination for ranks
SPARSE_FILL = 0.02
# sparse elimination hands over to dense once this full and this large
DENSE_SWITCH_FILL = 0.05
DENSE_SWITCH_MIN = 200


class FieldError(ValueError):
    """Raised when a modulus is unusable for the requested computation."""


def is_prime(n: int) -> bool:
    return n >= 2 and bool(flint.fmpz(n).is_prime())


class PrimeField:
    """The field F_p for an odd word-sized prime p."""

    __slots__ = ("modulus",)

    def __init__(self, modulus: int):
        modulus = int(modulus)
        if modulus % 2 == 0 or not is_prime(modulus):
            raise FieldError(f"modulus {modulus} is not an odd prime")
        if modulus >= 2**31:
            raise FieldError(f"modulus {modulus} does not fit the int64 kernels")
        self.modulus = modulus

    exact = False

    def __repr__(self) -> str:
        return f"PrimeField({self.modulus})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.modulus == self.modulus

    def __hash__(self) -> int:
        return hash(("F", self.modulus))

    def norm(self, x: int) -> int:
        return x % self.modulus

    def coerce(self, x) -> int:
        if isinstance(x, Fraction):
            return x.numerator * self.inv(x.denominator) % self.modulus
        return int(x) % self.modulus

    def inv(self, a: int) -> int:
        a %= self.modulus
        if a == 0:
            raise FieldError(f"{self.modulus} divides a required denominator")
        return pow(a, -1, self.modulus)

    def frac(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.modulus

    def require_units(self, values: Iterable[int]) -> None:
        """Fail if p divides one of ``values`` (degrees, factorials, 2)."""
        for v in values:
            if v % self.modulus == 0:
                raise FieldError(f"prime {self.modulus} divides required factor {v}")


class RationalField:
    """Characteristic zero coefficients (ints and Fractions)."""

    exact = True
    modulus = 0

    def __repr__(self) -> str:
        return "QQ"

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("QQ")

    @staticmethod
    def norm(x):
        if isinstance(x, Fraction) and x.denominator == 1:
            return x.numerator
        return x

    @staticmethod
    def coerce(x):
        return RationalField.norm(x)

    @staticmethod
    def inv(a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return Fraction(1, 1) / a

    @staticmethod
    def frac(a, b):
        return RationalField.norm(Fraction(a, b))

    @staticmethod
    def require_units(values: Iterable[int]) -> None:
        for v in values:
            if v == 0:
                raise FieldError("zero denominator")


QQ = RationalField()


# ---------------------------------------------------------------------------
# sparse matrices


class SparseMatrix:
    """Immutable sparse matrix with integer entries, stored by columns."""

    __slots__ = ("_csc",)

    def __init__(self, csc: sp.csc_matrix):
        csc = sp.csc_matrix(csc, dtype=np.int64)
        csc.sum_duplicates()
        csc.eliminate_zeros()
        csc.sort_indices()
        self._csc = csc

    # constructors ---------------------------------------------------------
    @classmethod
    def from_columns(cls, columns: Sequence[dict], nrows: int, modulus: int = 0) -> "SparseMatrix":
        """Columns given as ``{row: value}`` dicts."""
        indptr = [0]
        indices: list[int] = []
        data: list[int] = []
        for col in columns:
            for r, v in col.items():
                if modulus:
                    v %= modulus
                if v:
                    indices.append(r)
                    data.append(v)
            indptr.append(len(indices))
        return cls._from_arrays(indptr, indices, data, (nrows, len(columns)))

    @classmethod
    def from_rows(cls, rows: Sequence[dict], ncols: int, modulus: int = 0) -> "SparseMatrix":
        """Rows given as ``{column: value}`` dicts."""
        return cls.from_columns(rows, ncols, modulus).T

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]], modulus: int = 0) -> "SparseMatrix":
        arr = np.array(rows, dtype=object).reshape(len(rows), -1) if len(rows) else np.zeros((0, 0), dtype=object)
        if modulus:
            arr = arr % modulus
        return cls(sp.csc_matrix(arr.astype(np.int64)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(sp.csc_matrix((nrows, ncols), dtype=np.int64))

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(sp.identity(n, dtype=np.int64, format="csc"))

    @staticmethod
    def _from_arrays(indptr, indices, data, shape) -> "SparseMatrix":
        csc = sp.csc_matrix(
            (np.asarray(data, dtype=np.int64), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
            shape=shape,
        )
        return SparseMatrix(csc)

    # accessors ------------------------------------------------------------
    @property
    def nrows(self) -> int:
        return self._csc.shape[0]

    @property
    def ncols(self) -> int:
        return self._csc.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._csc.shape

    @property
    def nnz(self) -> int:
        return self._csc.nnz

    @property
    def T(self) -> "SparseMatrix":
        return SparseMatrix(self._csc.T.tocsc())

    def column(self, j: int) -> list[tuple[int, int]]:
        a, b = self._csc.indptr[j], self._csc.indptr[j + 1]
        return list(zip(self._csc.indices[a:b].tolist(), self._csc.data[a:b].tolist()))

    def columns(self) -> Iterator[list[tuple[int, int]]]:
        for j in range(self.ncols):
            yield self.column(j)

    def rows(self) -> list[dict[int, int]]:
        csr = self._csc.tocsr()
        out = []
        for i in range(self.nrows):
            a, b = csr.indptr[i], csr.indptr[i + 1]
            out.append(dict(zip(csr.indices[a:b].tolist(), csr.data[a:b].tolist())))
        return out

    def to_dense(self) -> list[list[int]]:
        return self._csc.toarray().tolist()

    def to_scipy(self) -> sp.csc_matrix:
        return self._csc.copy()

    def reduce(self, modulus: int) -> "SparseMatrix":
        return SparseMatrix(sp.csc_matrix((self._csc.data % modulus, self._csc.indices, self._csc.indptr), shape=self.shape))

    def hstack(self, other: "SparseMatrix") -> "SparseMatrix":
        return SparseMatrix(sp.hstack([self._csc, other._csc], format="csc"))

    def vstack(self, other: "SparseMatrix") -> "SparseMatrix":
        return SparseMatrix(sp.vstack([self._csc, other._csc], format="csc"))

    def permute(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "SparseMatrix":
        return SparseMatrix(self._csc[list(row_perm), :][:, list(col_perm)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix) or other.shape != self.shape:
            return False
        return (self._csc != other._csc).nnz == 0

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


def matmul(A: SparseMatrix, B: SparseMatrix, F: PrimeField) -> SparseMatrix:
    """A·B over F (entries of A and B must already be reduced)."""
    if A.ncols != B.nrows:
        raise ValueError(f"shape mismatch {A.shape} x {B.shape}")
    p = F.modulus
    # split B into 16-bit halves so int64 accumulation cannot overflow
    b = B._csc
    lo = sp.csc_matrix((b.data & 0xFFFF, b.indices, b.indptr), shape=b.shape)
    hi = sp.csc_matrix((b.data >> 16, b.indices, b.indptr), shape=b.shape)
    a = A._csc
    prod_lo = (a @ lo).tocsc()
    prod_hi = (a @ hi).tocsc()
    prod_lo.data %= p
    prod_hi.data %= p
    prod_hi.data *= 65536
    prod_hi.data %= p
    res = sp.csc_matrix(prod_lo + prod_hi)
    res.data %= p
    res.eliminate_zeros()
    return SparseMatrix(res)


def is_zero(M: SparseMatrix) -> bool:
    return M.nnz == 0


# ---------------------------------------------------------------------------
# block decomposition


@dataclass
class _Block:
    rows: np.ndarray  # global row indices (sorted)
    cols: np.ndarray  # global column indices (sorted)
    r_loc: np.ndarray  # local row index of each entry
    c_loc: np.ndarray  # local column index of each entry
    vals: np.ndarray


def _blocks(M: SparseMatrix) -> Iterator[_Block]:
    """Connected components of the nonzero pattern, ordered by first column."""
    coo = M._csc.tocoo()
    if coo.nnz == 0:
        return
    r, c = M.shape
    rows = coo.row.astype(np.int64)
    cols = coo.col.astype(np.int64)
    n = r + c
    g = sp.coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols + r)), shape=(n, n))
    _, labels = connected_components(g, directed=False)
    lab = labels[cols + r]
    order = np.lexsort((rows, cols, lab))
    lab = lab[order]
    rows = rows[order]
    cols = cols[order]
    vals = coo.data[order]
    cuts = np.flatnonzero(np.diff(lab)) + 1
    bounds = np.concatenate(([0], cuts, [len(lab)]))
    blocks = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        br, bc = rows[a:b], cols[a:b]
        ur, r_loc = np.unique(br, return_inverse=True)
        uc, c_loc = np.unique(bc, return_inverse=True)
        blocks.append(_Block(ur, uc, r_loc, c_loc, vals[a:b]))
    blocks.sort(key=lambda blk: int(blk.cols[0]))
    yield from blocks


def _block_rows(blk: _Block) -> list[dict[int, int]]:
    rows: list[dict[int, int]] = [dict() for _ in range(len(blk.rows))]
    for i, j, v in zip(blk.r_loc.tolist(), blk.c_loc.tolist(), blk.vals.tolist()):
        rows[i][j] = v
    return rows


def _dense(blk: _Block, p: int) -> flint.nmod_mat:
    # filling a zero matrix entry by entry beats a flat list for sparse blocks
    M = flint.nmod_mat(len(blk.rows), len(blk.cols), p)
    for i, j, v in zip(blk.r_loc.tolist(), blk.c_loc.tolist(), blk.vals.tolist()):
        M[i, j] = v
    return M


def _python_rref(rows: list[dict[int, int]], p: int) -> tuple[list[int], list[dict[int, int]]]:
    """Gauss-Jordan on sparse dict rows; pivot = smallest available column."""
    basis: dict[int, dict[int, int]] = {}

    def axpy(target: dict[int, int], f: int, src: dict[int, int]) -> None:
        for k, v in src.items():
            nv = (target.get(k, 0) - f * v) % p
            if nv:
                target[k] = nv
            else:
                target.pop(k, None)

    for row in rows:
        row = {c: v % p for c, v in row.items() if v % p}
        for pc in sorted(basis):
            f = row.get(pc)
            if f:
                axpy(row, f, basis[pc])
        if not row:
            continue
        c = min(row)
        inv = pow(row[c], -1, p)
        row = {k: v * inv % p for k, v in row.items()}
        for other in basis.values():
            f = other.get(c)
            if f:
                axpy(other, f, row)
        basis[c] = row
    pivots = sorted(basis)
    return pivots, [basis[c] for c in pivots]


def _small(blk: _Block) -> bool:
    return len(blk.rows) <= SMALL_BLOCK and len(blk.cols) <= SMALL_BLOCK


def _too_big(blk: _Block) -> bool:
    return len(blk.rows) * len(blk.cols) > DENSE_LIMIT


def _sparse_rank(rows: list[dict[int, int]], p: int) -> int:
    """Rank by sparse elimination, finishing densely once fill-in builds up.

    Pivots follow a Markowitz-style rule: the column with fewest entries,
    then the shortest row in it.  The choice only affects speed.
    """
    rows = [dict(r) for r in rows if r]
    alive = set(range(len(rows)))
    colrows: dict[int, set[int]] = {}
    for i, r in enumerate(rows):
        for c in r:
            colrows.setdefault(c, set()).add(i)
    nnz = sum(len(r) for r in rows)
    rk = 0
    # lazy heap of (count, column); stale counts are refreshed when popped
    heap = [(len(v), c) for c, v in colrows.items()]
    heapq.heapify(heap)
    while heap:
        nr, nc = len(alive), len(colrows)
        if min(nr, nc) > DENSE_SWITCH_MIN and nnz > DENSE_SWITCH_FILL * nr * nc:
            break
        cnt, c = heapq.heappop(heap)
        if c not in colrows:
            continue
        if len(colrows[c]) > cnt:
            heapq.heappush(heap, (len(colrows[c]), c))
            continue
        cand = colrows.pop(c)
        if not cand:
            continue
        piv = min(cand, key=lambda i: len(rows[i]))
        prow = rows[piv]
        inv = pow(prow[c], -1, p)
        for i in cand:
            if i == piv:
                continue
            r = rows[i]
            f = r.pop(c) * inv % p
            nnz -= 1
            for k, v in prow.items():
                if k == c:
                    continue
                old = r.get(k)
                nv = ((old or 0) - f * v) % p
                if nv:
                    if old is None:
                        colrows[k].add(i)
                        nnz += 1
                    r[k] = nv
                elif old is not None:
                    del r[k]
                    colrows[k].discard(i)
                    nnz -= 1
            if not r:
                alive.discard(i)
        for k in prow:
            if k != c:
                colrows[k].discard(piv)
        nnz -= len(prow)
        alive.discard(piv)
        rows[piv] = {}
        rk += 1
    rest = [rows[i] for i in sorted(alive) if rows[i]]
    if rest:
        cols = sorted({k for r in rest for k in r})
        ci = {k: j for j, k in enumerate(cols)}
        M = flint.nmod_mat(len(rest), len(cols), p)
        for i, r in enumerate(rest):
            for k, v in r.items():
                M[i, ci[k]] = v
        rk += M.rank()
    return rk


def _block_rank(blk: _Block, p: int) -> int:
    if len(blk.vals) == 1:
        return 1
    if _small(blk) or _too_big(blk):
        return len(_python_rref(_block_rows(blk), p)[0])
    if len(blk.vals) < SPARSE_FILL * len(blk.rows) * len(blk.cols):
        return _sparse_rank(_block_rows(blk), p)
    nr, nc = len(blk.rows), len(blk.cols)
    if nr > 4 * nc:
        # rank of a tall block equals the rank of its Gram-free transpose
        return _dense(_Block(blk.cols, blk.rows, blk.c_loc, blk.r_loc, blk.vals), p).rank()
    return _dense(blk, p).rank()


def _block_rref(blk: _Block, p: int) -> tuple[list[int], list[dict[int, int]]]:
    """Local pivots and reduced rows (local column indices)."""
    if _small(blk) or _too_big(blk):
        return _python_rref(_block_rows(blk), p)
    R, rk = _dense(blk, p).rref()
    nc = R.ncols()
    flat = np.fromiter(map(int, R.entries()[: rk * nc]), dtype=np.int64, count=rk * nc)
    A = flat.reshape(rk, nc)
    pivots: list[int] = []
    rows: list[dict[int, int]] = []
    for row in A:
        nz = np.flatnonzero(row)
        pivots.append(int(nz[0]))
        rows.append(dict(zip(nz.tolist(), row[nz].tolist())))
    return pivots, rows


# ---------------------------------------------------------------------------
# public operations


def _check_field(F) -> int:
    if not isinstance(F, PrimeField):
        raise FieldError("a PrimeField is required; use exact_rank for the rational path")
    return F.modulus


def rank(M: SparseMatrix, F: PrimeField) -> int:
    """Dimension of the row space of M over F."""
    p = _check_field(F)
    return sum(_block_rank(blk, p) for blk in _blocks(M))


@dataclass(frozen=True)
class EchelonForm:
    """Reduced row echelon form: pivot columns and the matching rows."""

    ncols: int
    pivots: tuple[int, ...]
    rows: tuple[dict, ...] = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def pivot_row(self) -> dict[int, dict[int, int]]:
        return dict(zip(self.pivots, self.rows))


def echelonize(M: SparseMatrix, F: PrimeField) -> EchelonForm:
    p = _check_field(F)
    pairs: list[tuple[int, dict[int, int]]] = []
    for blk in _blocks(M):
        gcols = blk.cols.tolist()
        piv, rows = _block_rref(blk, p)
        for c, row in zip(piv, rows):
            pairs.append((gcols[c], {gcols[k]: v for k, v in row.items()}))
    pairs.sort(key=lambda t: t[0])
    return EchelonForm(M.ncols, tuple(c for c, _ in pairs), tuple(r for _, r in pairs))


def nullspace(M: SparseMatrix, F: PrimeField) -> list[dict[int, int]]:
    """Basis of {v : M·v = 0} as sparse coordinate vectors ``{column: value}``."""
    p = _check_field(F)
    basis: list[dict[int, int]] = []
    touched = np.zeros(M.ncols, dtype=bool)
    for blk in _blocks(M):
        touched[blk.cols] = True
        gcols = blk.cols.tolist()
        if _small(blk) or _too_big(blk) or len(blk.vals) == 1:
            piv, rows = _python_rref(_block_rows(blk), p)
            pset = set(piv)
            for f in range(len(gcols)):
                if f in pset:
                    continue
                v = {gcols[f]: 1}
                for c, row in zip(piv, rows):
                    x = row.get(f, 0)
                    if x:
                        v[gcols[c]] = (-x) % p
                basis.append(v)
            continue
        X, k = _dense(blk, p).nullspace()
        cols = X.tolist()
        for j in range(k):
            v = {}
            for i in range(len(gcols)):
                x = int(cols[i][j])
                if x:
                    v[gcols[i]] = x
            basis.append(v)
    for j in np.flatnonzero(~touched).tolist():
        basis.append({j: 1})
    basis.sort(key=lambda v: min(v))
    return basis


def apply(M: SparseMatrix, v: dict[int, int], F: PrimeField) -> dict[int, int]:
    """M·v for a sparse coordinate vector v."""
    p = _check_field(F)
    out: dict[int, int] = {}
    for j, x in v.items():
        for i, a in M.column(j):
            out[i] = (out.get(i, 0) + a * x) % p
    return {i: a for i, a in out.items() if a}


@dataclass(frozen=True)
class MultiPrimeRank:
    rank: int
    per_prime: dict
    agree: bool


class PrimeDisagreement(ArithmeticError):
    """Ranks differ between primes: at least one prime is bad for this input."""


def multi_prime_rank(builder: Callable[[PrimeField], SparseMatrix], primes: Sequence[int], strict: bool = False) -> MultiPrimeRank:
    """Rank at several primes; the maximum is the best lower bound for the rank over Q."""
    if len(set(primes)) != len(primes) or not primes:
        raise FieldError("primes must be distinct and nonempty")
    per = {}
    for p in primes:
        F = PrimeField(p)
        per[p] = rank(builder(F), F)
    agree = len(set(per.values())) == 1
    if strict and not agree:
        raise PrimeDisagreement(f"ranks disagree across primes: {per}")
    return MultiPrimeRank(max(per.values()), per, agree)


def exact_rank(M: SparseMatrix, bound: int = EXACT_BOUND) -> int:
    """Rank over Q of an integer matrix, block by block with FLINT fmpz_mat."""
    total = 0
    for blk in _blocks(M):
        nr, nc = len(blk.rows), len(blk.cols)
        if min(nr, nc) > bound:
            raise FieldError(f"exact path limited to blocks with min(nrows, ncols) <= {bound} (got {nr}x{nc})")
        arr = [[0] * nc for _ in range(nr)]
        for i, j, v in zip(blk.r_loc.tolist(), blk.c_loc.tolist(), blk.vals.tolist()):
            arr[i][j] = v
        total += flint.fmpz_mat(arr).rank()
    return total


def integer_columns(columns: Sequence[dict]) -> list[dict[int, int]]:
    """Clear denominators column by column (column scaling preserves rank)."""
    out = []
    for col in columns:
        den = 1
        for v in col.values():
            if isinstance(v, Fraction):
                den = lcm(den, v.denominator)
        out.append({i: int(v * den) for i, v in col.items() if v})
    return out
