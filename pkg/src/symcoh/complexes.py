"""Cohomology-computing complexes of graded quotient pieces.

Three complexes are built here, all at a query (m, n) with n' = n - (N+1):

* ``complex1`` (any codimension c): the dualized Koszul complex of
  A = S/(P_1, ..., P_c, q) with C_k = sum over |T| = k of
  A_{m-k, n' + |d| + sum_{i in T}(d_i - 1)}; position k computes H^{N-c-k}.
* ``complex2`` for hypersurfaces: (S/q) -> (S/q^2) -> (S/q) through
  beta*(P) and alpha*(P); position k computes H^{N-k}.
* ``complex2`` for codimension two: five positions of pieces of S/q^k
  connected by the g-maps; position k computes H^{N-k}.

Ranks of differentials between quotients of the first complex are obtained
without building quotient coordinates: since D(I_source) lies in I_target,

    rank(D) = rank[images of source standard monomials ; target ideal rows]
              - rank[target ideal rows].

The explicit path (quotient coordinates, exact D^2 = 0 check,
well-definedness, kernels for witnesses) is available as well.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .field_linalg import (
    DEFAULT_PRIMES,
    EXACT_BOUND,
    QQ,
    exact_rank,
    PrimeDisagreement,
    PrimeField,
    SparseMatrix,
    matmul,
    nullspace,
    rank,
)
from .operators import OperatorSpec, alpha_star, apply_terms, beta_star, compile_op, mul, scaled_sum
from .polyspace import BiDegree, PolyError, SparseBiPoly, basis_of, parse_poly, x_homogeneous_degree
from .quotient import IdealSpec, QuotientPiece, q_normal_form, standard_keys, well_definedness_check


class ValidityError(ValueError):
    """A query outside the range where the requested model is valid."""


class ConsistencyError(ArithmeticError):
    """An internal assertion failed (D^2 != 0, negative dimension, disagreement)."""


# The printed codimension-two complex has beta*(P_1)(D) with a minus sign in
# g_32; with that sign the composite of consecutive maps is
# P_1 alpha*(P_2) - q alpha*(P_1) alpha*(P_2) on the first summand, which is
# nonzero modulo q^2.  A plus sign makes every composite vanish.
G32_D_SIGN = 1


# ---------------------------------------------------------------------------
# problems


@dataclass(frozen=True)
class Problem:
    N: int
    polys: tuple[SparseBiPoly, ...]
    description: str = ""

    def __post_init__(self):
        if not self.polys:
            raise ValidityError("a problem needs at least one polynomial")
        if self.N < 1:
            raise ValidityError("N must be >= 1")
        for P in self.polys:
            if P.N != self.N:
                raise ValidityError("polynomial ambient does not match N")
            try:
                d = x_homogeneous_degree(P)
            except PolyError as exc:
                raise ValidityError(str(exc)) from exc
            if d < 1:
                raise ValidityError("defining polynomials must have degree >= 1")
        if len(self.polys) > self.N:
            raise ValidityError("codimension must be at most N")

    @classmethod
    def from_strings(cls, N: int, polys: Sequence[str], description: str = "") -> "Problem":
        return cls(N, tuple(parse_poly(s, N) for s in polys), description)

    @property
    def c(self) -> int:
        return len(self.polys)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(P.bidegree.n for P in self.polys)

    @property
    def total_degree(self) -> int:
        return sum(self.degrees)

    @property
    def dim(self) -> int:
        return self.N - self.c

    def required_units(self, m: int) -> list[int]:
        """Integers that must be invertible: degrees, 2, and factorials up to m."""
        out = list(self.degrees) + [2, 3]
        k = 1
        for j in range(2, max(m, 2) + 1):
            k *= j
            out.append(k)
        return out

    def key(self):
        return (self.N, tuple(tuple(sorted(P.terms.items())) for P in self.polys))


# ---------------------------------------------------------------------------
# complex data


@dataclass(frozen=True)
class Summand:
    label: str
    q_power: int
    with_polys: bool  # True: quotient by (P_1..P_c, q^k); False: by q^k only
    bidegree: BiDegree

    def describe(self) -> str:
        ideal = "(P,q)" if self.with_polys and self.q_power == 1 else ("(P,q^%d)" % self.q_power if self.with_polys else ("(q)" if self.q_power == 1 else "(q^%d)" % self.q_power))
        return f"{self.label}: (S/{ideal})_{{{self.bidegree.m},{self.bidegree.n}}}"


@dataclass(frozen=True)
class Block:
    source: int  # index into the source position's summands
    target: int  # index into the target position's summands
    op: OperatorSpec


@dataclass(frozen=True)
class ComplexTermSpec:
    position: int
    summands: tuple[Summand, ...]


@dataclass
class ComplexInstance:
    problem: Problem
    m: int
    n: int
    kind: str  # "complex1" | "complex2"
    terms: list[ComplexTermSpec]
    blocks: list[list[Block]]  # blocks[k]: position k -> k+1
    degree_of: dict[int, int]  # position -> cohomological degree
    flags: list[str] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.terms)

    def describe(self) -> list[str]:
        return [", ".join(s.describe() for s in t.summands) for t in self.terms]


def _ideal_for(problem: Problem, s: Summand) -> IdealSpec:
    return IdealSpec.q_power_ideal(problem.N, s.q_power, problem.polys if s.with_polys else ())


def _check_wiring(instance: ComplexInstance) -> None:
    for k, blocks in enumerate(instance.blocks):
        src = instance.terms[k].summands
        tgt = instance.terms[k + 1].summands
        for blk in blocks:
            expect = src[blk.source].bidegree + blk.op.shift
            if tgt[blk.target].bidegree != expect:
                raise ConsistencyError(
                    f"wiring bug: {blk.op!r} maps {src[blk.source].label}{tuple(src[blk.source].bidegree)} to "
                    f"{tuple(expect)}, not {tgt[blk.target].label}{tuple(tgt[blk.target].bidegree)}"
                )


def _wire(problem: Problem, positions: list[list[Summand]], components: list[list[tuple[str, str, OperatorSpec]]]) -> list[list[Block]]:
    """Turn labelled components into blocks, checking bidegree compatibility.

    The target is the summand whose bidegree equals source + shift; when two
    summands qualify (equal degrees) the labelled one is used.
    """
    out = []
    for k, comps in enumerate(components):
        src = positions[k]
        tgt = positions[k + 1]
        merged: dict[tuple[int, int], list[tuple[object, OperatorSpec]]] = {}
        for sl, tl, op in comps:
            si = next(i for i, s in enumerate(src) if s.label == sl)
            want = src[si].bidegree + op.shift
            compatible = [i for i, t in enumerate(tgt) if t.bidegree == want]
            if not compatible:
                raise ConsistencyError(f"component {op!r} from {sl} has no bidegree-compatible target")
            labelled = [i for i in compatible if tgt[i].label == tl]
            if len(compatible) > 1 and not labelled:
                raise ConsistencyError(f"ambiguous target for component from {sl}")
            if not labelled:
                raise ConsistencyError(f"component from {sl} labelled {tl} lands on {tgt[compatible[0]].label}")
            ti = labelled[0]
            merged.setdefault((si, ti), []).append((1, op))
        blocks = []
        for (si, ti), parts in sorted(merged.items()):
            op = parts[0][1] if len(parts) == 1 else scaled_sum(parts)
            blocks.append(Block(si, ti, op))
        out.append(blocks)
    return out


def _half(op: OperatorSpec, sign: int = 1) -> tuple[Fraction, OperatorSpec]:
    return Fraction(sign, 2), op


def build_complex1(prob: Problem, m: int, n: int) -> ComplexInstance:
    """Dualized Koszul complex of S/(P_1, ..., P_c, q)."""
    c = prob.c
    if m < c:
        raise ValidityError(f"complex1 needs m >= c (m={m}, c={c})")
    if n < 2:
        raise ValidityError(f"complex1 needs n >= 2 (n={n})")
    N = prob.N
    d = prob.degrees
    base = n - (N + 1) + prob.total_degree
    subsets = [list(combinations(range(c), k)) for k in range(c + 1)]
    positions: list[list[Summand]] = []
    for k in range(c + 1):
        row = []
        for T in subsets[k]:
            b = BiDegree(m - k, base + sum(d[i] - 1 for i in T))
            row.append(Summand("T" + "".join(str(i + 1) for i in T) if T else "T", 1, True, b))
        positions.append(row)
    blocks = []
    for k in range(c):
        index = {T: i for i, T in enumerate(subsets[k + 1])}
        blk = []
        for si, T in enumerate(subsets[k]):
            for j in range(c):
                if j in T:
                    continue
                sign = (-1) ** sum(1 for i in T if i < j)
                op = alpha_star(prob.polys[j])
                if sign < 0:
                    op = scaled_sum([(-1, op)])
                blk.append(Block(si, index[tuple(sorted(T + (j,)))], op))
        blocks.append(blk)
    inst = ComplexInstance(
        prob,
        m,
        n,
        "complex1",
        [ComplexTermSpec(k, tuple(r)) for k, r in enumerate(positions)],
        blocks,
        {k: N - c - k for k in range(c + 1)},
    )
    if m == c and 1 in d:
        inst.flags.append("m_equals_c_with_linear_equation")
    _check_wiring(inst)
    return inst


def build_complex2_hyp(prob: Problem, m: int, n: int) -> ComplexInstance:
    if prob.c != 1:
        raise ValidityError("complex2 for hypersurfaces needs c = 1")
    if m < 1:
        raise ValidityError(f"complex2 needs m >= 1 (m={m})")
    if n < 2:
        raise ValidityError(f"complex2 needs n >= 2 (n={n})")
    N = prob.N
    (P,) = prob.polys
    d = prob.degrees[0]
    n1 = n - (N + 1)
    positions = [
        [Summand("Z", 1, False, BiDegree(m, n1))],
        [Summand("A", 2, False, BiDegree(m, n1 + d))],
        [Summand("B", 1, False, BiDegree(m - 1, n1 + 2 * d - 1))],
    ]
    comps = [[("Z", "A", beta_star(P))], [("A", "B", alpha_star(P))]]
    inst = ComplexInstance(
        prob, m, n, "complex2", [ComplexTermSpec(k, tuple(r)) for k, r in enumerate(positions)], _wire(prob, positions, comps), {k: N - k for k in range(3)}
    )
    _check_wiring(inst)
    return inst


def build_complex2_ci2(prob: Problem, m: int, n: int, g32_d_sign: int = G32_D_SIGN) -> ComplexInstance:
    if prob.c != 2:
        raise ValidityError("complex2 for complete intersections needs c = 2")
    if m < 2:
        raise ValidityError(f"complex2 (c=2) needs m >= 2 (m={m})")
    if n < 2:
        raise ValidityError(f"complex2 needs n >= 2 (n={n})")
    N = prob.N
    P1, P2 = prob.polys
    d1, d2 = prob.degrees
    dd = d1 + d2
    n1 = n - (N + 1)
    positions = [
        [Summand("Z", 1, False, BiDegree(m, n1))],
        [Summand("A1", 2, False, BiDegree(m, n1 + d1)), Summand("B1", 2, False, BiDegree(m, n1 + d2))],
        [
            Summand("A2", 1, False, BiDegree(m - 1, n1 + 2 * d1 - 1)),
            Summand("B2", 1, False, BiDegree(m - 1, n1 + 2 * d2 - 1)),
            Summand("C2", 3, False, BiDegree(m, n1 + dd)),
            Summand("D2", 1, False, BiDegree(m - 1, n1 + dd - 1)),
        ],
        [
            Summand("F3", 2, False, BiDegree(m - 1, n1 + 2 * dd - d2 - 1)),
            Summand("E3", 2, False, BiDegree(m - 1, n1 + 2 * dd - d1 - 1)),
        ],
        [Summand("G4", 1, False, BiDegree(m - 2, n1 + 2 * dd - 2))],
    ]
    a1, a2 = alpha_star(P1), alpha_star(P2)
    b1, b2 = beta_star(P1), beta_star(P2)
    comps = [
        # g11, g12
        [("Z", "A1", b1), ("Z", "B1", b2)],
        # g21, g22, g23, g24
        [
            ("A1", "A2", a1),
            ("B1", "B2", a2),
            ("A1", "C2", scaled_sum([_half(b2), _half(mul(P2))])),
            ("B1", "C2", scaled_sum([_half(b1, -1), _half(mul(P1), -1)])),
            ("A1", "D2", scaled_sum([_half(a2, -1)])),
            ("B1", "D2", scaled_sum([_half(a1, -1)])),
        ],
        # g31 -> E3, g32 -> F3
        [
            ("B2", "E3", b1),
            ("C2", "E3", a2),
            ("D2", "E3", b2),
            ("A2", "F3", b2),
            ("C2", "F3", scaled_sum([(-1, a1)])),
            ("D2", "F3", b1 if g32_d_sign > 0 else scaled_sum([(-1, b1)])),
        ],
        # g4
        [("E3", "G4", a1), ("F3", "G4", a2)],
    ]
    inst = ComplexInstance(
        prob, m, n, "complex2", [ComplexTermSpec(k, tuple(r)) for k, r in enumerate(positions)], _wire(prob, positions, comps), {k: N - k for k in range(5)}
    )
    if g32_d_sign < 0:
        inst.flags.append("g32_printed_sign")
    _check_wiring(inst)
    return inst


def build_complex2(prob: Problem, m: int, n: int) -> ComplexInstance:
    if prob.c == 1:
        return build_complex2_hyp(prob, m, n)
    if prob.c == 2:
        return build_complex2_ci2(prob, m, n)
    raise ValidityError("complex2 exists only for c <= 2")


def build(prob: Problem, m: int, n: int, method: str) -> ComplexInstance:
    if method == "complex1":
        return build_complex1(prob, m, n)
    if method == "complex2":
        return build_complex2(prob, m, n)
    raise ValidityError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# engines


class _SummandData:
    """Standard monomials, column indices and ideal rows of one summand."""

    def __init__(self, prob: Problem, s: Summand, F: PrimeField, cache: dict):
        self.summand = s
        b = s.bidegree
        N = prob.N
        self.nf = q_normal_form(N, s.q_power)
        self.std = () if b.empty else standard_keys(N, b.m, b.n, s.q_power)
        self.col = {k: i for i, k in enumerate(self.std)}
        self.piece: QuotientPiece | None = None
        if s.with_polys and not b.empty:
            ck = ("piece", prob.key(), s.q_power, tuple(b), F.modulus)
            piece = cache.get(ck)
            if piece is None:
                piece = QuotientPiece(_ideal_for(prob, s), b, F)
                cache[ck] = piece
            self.piece = piece

    def ideal_rows_local(self) -> list[dict[int, int]]:
        if self.piece is None:
            return []
        keys = self.piece.ambient.keys
        col = self.col
        return [{col[keys[a]]: v for a, v in row.items()} for row in self.piece.generator_rows()]

    def ideal_rank(self) -> int:
        return 0 if self.piece is None else self.piece.generator_rank()

    @property
    def dimension(self) -> int:
        return len(self.std) - self.ideal_rank()


def _image_rows(datas_src, datas_tgt, blocks: list[Block], F: PrimeField, offsets: list[int]) -> list[dict[int, int]]:
    p = F.modulus
    by_source: dict[int, list[tuple[int, object]]] = {}
    for blk in blocks:
        by_source.setdefault(blk.source, []).append((blk.target, compile_op(blk.op, F)))
    rows = []
    for si, ds in enumerate(datas_src):
        outs = by_source.get(si, [])
        for h in ds.std:
            row: dict[int, int] = {}
            for ti, fn in outs:
                dt = datas_tgt[ti]
                nf = dt.nf
                col = dt.col
                off = offsets[ti]
                for key, v in fn(h).items():
                    v %= p
                    if not v:
                        continue
                    for k2, c in nf(key):
                        j = off + col[k2]
                        row[j] = (row.get(j, 0) + v * c) % p
            rows.append({j: v for j, v in row.items() if v})
    return rows


@dataclass
class EngineResult:
    term_dims: list[int]
    ranks: list[int]
    h_by_position: list[int]


def stacked_ranks(inst: ComplexInstance, F: PrimeField, cache: dict | None = None) -> EngineResult:
    """Term dimensions and differential ranks without quotient coordinates."""
    cache = {} if cache is None else cache
    F_units = inst.problem.required_units(inst.m)
    F.require_units(F_units)
    datas = [[_SummandData(inst.problem, s, F, cache) for s in t.summands] for t in inst.terms]
    dims = [sum(d.dimension for d in row) for row in datas]
    ranks = []
    for k, blocks in enumerate(inst.blocks):
        src, tgt = datas[k], datas[k + 1]
        if dims[k] == 0 or dims[k + 1] == 0 or not blocks:
            ranks.append(0)
            continue
        offsets = []
        total = 0
        for dt in tgt:
            offsets.append(total)
            total += len(dt.std)
        rows = _image_rows(src, tgt, blocks, F, offsets)
        ideal_rank = 0
        for ti, dt in enumerate(tgt):
            off = offsets[ti]
            rows.extend({off + j: v for j, v in r.items()} for r in dt.ideal_rows_local())
            ideal_rank += dt.ideal_rank()
        M = SparseMatrix.from_rows(rows, total, F.modulus)
        ranks.append(rank(M, F) - ideal_rank)
    h = _h_from(dims, ranks)
    return EngineResult(dims, ranks, h)


def _exact_ideal_rows(prob: Problem, s: Summand, col: dict[int, int], nf) -> list[dict[int, int]]:
    if not s.with_polys or s.bidegree.empty:
        return []
    rows = []
    for P in prob.polys:
        hb = s.bidegree - P.bidegree
        if hb.empty:
            continue
        for h in standard_keys(prob.N, hb.m, hb.n, s.q_power):
            row = nf.reduce_terms({h + kg: v for kg, v in P.terms.items()})
            if row:
                rows.append({col[k]: v for k, v in row.items()})
    return rows


def _integer_row(row: dict) -> dict[int, int]:
    den = 1
    for v in row.values():
        den = math.lcm(den, Fraction(v).denominator)
    return {j: int(Fraction(v) * den) for j, v in row.items() if v}


def exact_ranks(inst: ComplexInstance, bound: int = EXACT_BOUND) -> EngineResult:
    """The stacked-rank computation over Q (blocks limited by ``bound``)."""
    prob = inst.problem
    datas = []
    for t in inst.terms:
        row = []
        for s in t.summands:
            std = () if s.bidegree.empty else standard_keys(prob.N, s.bidegree.m, s.bidegree.n, s.q_power)
            col = {k: i for i, k in enumerate(std)}
            nf = q_normal_form(prob.N, s.q_power)
            row.append((std, col, nf, _exact_ideal_rows(prob, s, col, nf)))
        datas.append(row)
    ideal_ranks = []
    for row in datas:
        ideal_ranks.append([exact_rank(SparseMatrix.from_rows(d[3], len(d[0])), bound) if d[3] else 0 for d in row])
    dims = [sum(len(d[0]) - r for d, r in zip(row, rr)) for row, rr in zip(datas, ideal_ranks)]
    ranks = []
    for k, blocks in enumerate(inst.blocks):
        src, tgt = datas[k], datas[k + 1]
        if dims[k] == 0 or dims[k + 1] == 0 or not blocks:
            ranks.append(0)
            continue
        offsets, total = [], 0
        for d in tgt:
            offsets.append(total)
            total += len(d[0])
        by_source: dict[int, list] = {}
        for blk in blocks:
            by_source.setdefault(blk.source, []).append((blk.target, compile_op(blk.op, QQ)))
        rows = []
        for si, d in enumerate(src):
            for h in d[0]:
                acc: dict[int, Fraction] = {}
                for ti, fn in by_source.get(si, []):
                    _, col, nf, _ = tgt[ti]
                    for key, v in fn(h).items():
                        for k2, c in nf(key):
                            j = offsets[ti] + col[k2]
                            acc[j] = acc.get(j, 0) + v * c
                r = _integer_row(acc)
                if r:
                    rows.append(r)
        for ti, d in enumerate(tgt):
            rows.extend({offsets[ti] + j: v for j, v in r.items()} for r in d[3])
        M = SparseMatrix.from_rows(rows, total)
        ranks.append(exact_rank(M, bound) - sum(ideal_ranks[k + 1]))
    return EngineResult(dims, ranks, _h_from(dims, ranks))


def _h_from(dims: list[int], ranks: list[int]) -> list[int]:
    h = []
    for k, dk in enumerate(dims):
        out_r = ranks[k] if k < len(ranks) else 0
        in_r = ranks[k - 1] if k > 0 else 0
        val = dk - out_r - in_r
        if val < 0:
            raise ConsistencyError(f"negative cohomology dimension at position {k}: {dims} {ranks}")
        h.append(val)
    return h


class ExplicitComplex:
    """Quotient pieces with echelon data and differentials in quotient coordinates."""

    def __init__(self, inst: ComplexInstance, F: PrimeField, cache: dict | None = None):
        cache = {} if cache is None else cache
        F.require_units(inst.problem.required_units(inst.m))
        self.inst = inst
        self.field = F
        prob = inst.problem
        self.pieces: list[list[QuotientPiece]] = []
        for t in inst.terms:
            row = []
            for s in t.summands:
                ck = ("xpiece", prob.key(), s.q_power, s.with_polys, tuple(s.bidegree), F.modulus)
                Q = cache.get(ck)
                if Q is None:
                    Q = QuotientPiece(_ideal_for(prob, s), s.bidegree, F)
                    Q.echelon()
                    cache[ck] = Q
                row.append(Q)
            self.pieces.append(row)
        self.dims = [[Q.dimension for Q in row] for row in self.pieces]
        self._matrices: dict[int, SparseMatrix] = {}

    def offsets(self, k: int) -> list[int]:
        out, total = [], 0
        for d in self.dims[k]:
            out.append(total)
            total += d
        return out

    def matrix(self, k: int) -> SparseMatrix:
        """D_k in quotient coordinates: columns = basis of C_k, rows = basis of C_{k+1}."""
        if k in self._matrices:
            return self._matrices[k]
        F = self.field
        p = F.modulus
        src, tgt = self.pieces[k], self.pieces[k + 1]
        toff = self.offsets(k + 1)
        by_source: dict[int, list[tuple[int, object]]] = {}
        for blk in self.inst.blocks[k]:
            by_source.setdefault(blk.source, []).append((blk.target, compile_op(blk.op, F)))
        cols = []
        for si, Q in enumerate(src):
            outs = by_source.get(si, [])
            for key in Q.basis_keys():
                col: dict[int, int] = {}
                for ti, fn in outs:
                    off = toff[ti]
                    for j, v in tgt[ti].reduce_terms(fn(key)).items():
                        col[off + j] = (col.get(off + j, 0) + v) % p
                cols.append(col)
        M = SparseMatrix.from_columns(cols, sum(self.dims[k + 1]), p)
        self._matrices[k] = M
        return M

    def ranks(self) -> EngineResult:
        dims = [sum(r) for r in self.dims]
        ranks = [rank(self.matrix(k), self.field) for k in range(len(self.inst.blocks))]
        return EngineResult(dims, ranks, _h_from(dims, ranks))

    def check_d_squared(self) -> bool:
        for k in range(len(self.inst.blocks) - 1):
            prod = matmul(self.matrix(k + 1), self.matrix(k), self.field)
            if prod.nnz:
                return False
        return True

    def check_well_defined(self) -> bool:
        for k, blocks in enumerate(self.inst.blocks):
            for blk in blocks:
                if not well_definedness_check(blk.op, self.pieces[k][blk.source], self.pieces[k + 1][blk.target], self.field):
                    return False
        return True

    def kernel(self, k: int) -> list[dict[int, int]]:
        """Kernel of the outgoing differential at position k (all of C_k at the last position)."""
        if k < len(self.inst.blocks):
            return nullspace(self.matrix(k), self.field)
        return [{i: 1} for i in range(sum(self.dims[k]))]

    def lift(self, k: int, vec: dict[int, int]) -> list[SparseBiPoly]:
        """Split a coordinate vector of C_k into canonical summand representatives."""
        out = []
        offs = self.offsets(k)
        for si, Q in enumerate(self.pieces[k]):
            lo, hi = offs[si], offs[si] + self.dims[k][si]
            out.append(Q.lift({j - lo: v for j, v in vec.items() if lo <= j < hi}))
        return out


# ---------------------------------------------------------------------------
# reports


@dataclass
class CohomologyReport:
    query: dict
    h: dict[int, int]
    term_dims: list[int]
    ranks: list[int]
    primes: list[int]
    per_prime: dict = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)
    elapsed_ms: float = 0.0
    valid: bool = True

    def to_dict(self) -> dict:
        return {
            "query": self.query,
            "h": {str(i): v for i, v in sorted(self.h.items())},
            "term_dims": self.term_dims,
            "ranks": self.ranks,
            "primes": self.primes,
            "per_prime": {str(p): {str(i): v for i, v in sorted(h.items())} for p, h in self.per_prime.items()},
            "flags": self.flags,
            "valid": self.valid,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


def h_map(inst: ComplexInstance, res: EngineResult) -> tuple[dict[int, int], list[str]]:
    dim = inst.problem.dim
    h = {i: 0 for i in range(dim + 1)}
    flags = []
    for pos, val in enumerate(res.h_by_position):
        i = inst.degree_of[pos]
        if 0 <= i <= dim:
            h[i] = val
        elif val:
            flags.append(f"nonzero_outside_range:pos{pos}:h{i}={val}")
    return h, flags


def cohomology(
    inst: ComplexInstance,
    primes: Sequence[int] = DEFAULT_PRIMES,
    engine: str = "stacked",
    verify_level: int = 0,
    cache: dict | None = None,
    exact: bool = False,
) -> CohomologyReport:
    """Cohomology dimensions of a built complex, at each prime, with consensus.

    With ``exact`` the ranks are also computed over Q and must match.
    """
    t0 = time.perf_counter()
    per_prime: dict = {}
    flags = list(inst.flags)
    first: EngineResult | None = None
    if exact:
        res = exact_ranks(inst)
        h, fl = h_map(inst, res)
        flags.extend(f for f in fl if f not in flags)
        per_prime["QQ"] = h
        first = res
    for p in primes:
        F = PrimeField(p)
        if engine == "explicit" or verify_level >= 1:
            ex = ExplicitComplex(inst, F, cache)
            if not ex.check_d_squared():
                raise ConsistencyError(f"D^2 != 0 for {inst.kind} at (m,n)=({inst.m},{inst.n}), p={p}")
            if verify_level >= 2 and not ex.check_well_defined():
                raise ConsistencyError(f"ill-defined differential for {inst.kind} at (m,n)=({inst.m},{inst.n}), p={p}")
            res = ex.ranks()
            if engine != "explicit":
                res2 = stacked_ranks(inst, F, cache)
                if res2.h_by_position != res.h_by_position:
                    raise ConsistencyError("stacked and explicit engines disagree")
        else:
            res = stacked_ranks(inst, F, cache)
        h, fl = h_map(inst, res)
        for f in fl:
            if f not in flags:
                flags.append(f)
        per_prime[p] = h
        if first is None:
            first = res
    assert first is not None
    if len({tuple(sorted(h.items())) for h in per_prime.values()}) > 1:
        raise PrimeDisagreement(f"cohomology differs across primes: {per_prime}")
    h = per_prime["QQ"] if exact else per_prime[primes[0]]
    return CohomologyReport(
        query={"N": inst.problem.N, "degrees": list(inst.problem.degrees), "m": inst.m, "n": inst.n, "method": inst.kind},
        h=h,
        term_dims=first.term_dims,
        ranks=first.ranks,
        primes=(["QQ"] if exact else []) + list(primes),
        per_prime=per_prime,
        flags=flags,
        elapsed_ms=(time.perf_counter() - t0) * 1000.0,
    )


def euler_characteristic_ok(res: EngineResult) -> bool:
    a = sum((-1) ** k * d for k, d in enumerate(res.term_dims))
    b = sum((-1) ** k * h for k, h in enumerate(res.h_by_position))
    return a == b
