"""User-facing cohomology queries.

Everything here is a thin layer over :mod:`symcoh.complexes` plus a few
independent models used as oracles:

* ``h_i``: h^i(X, S^m Omega_X(m - n)) for n >= 2, by either complex or both;
* ``h0_surface_positive_twist``: H^0 at positive twists on surfaces, read
  off as an h^2 through duality and adjunction;
* ``phi_kernel`` / ``psi_kernel``: the cokernel-of-delta models of global
  symmetric differentials;
* ``ample_check``: three vanishing conditions that imply ampleness of
  Omega_X for surfaces in P^4;
* ``plane_curve_oracle`` and ``delta_model``: closed or elementary formulas
  for plane curves and for P^N itself;
* ``witness``: an explicit kernel polynomial with rational coefficients,
  recovered from several primes and re-checked at a fresh one;
* ``sweep``: batch queries with per-cell error capture.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Sequence

from .bott import proj_cotangent_cohomology, sym_power_dim
from .complexes import (
    CohomologyReport,
    ConsistencyError,
    ExplicitComplex,
    Problem,
    ValidityError,
    build,
    cohomology,
)
from .field_linalg import DEFAULT_PRIMES, EXTRA_PRIMES, QQ, PrimeDisagreement, PrimeField, SparseMatrix, nullspace, rank
from .operators import apply, apply_terms, compile_op, delta, delta_power, differential_poly, mul, operator_matrix, substitute_y_by_x
from .polyspace import BiDegree, SparseBiPoly, basis_of, format_poly, piece_dimension, unpack
from .quotient import IdealSpec, QuotientPiece

METHODS = ("complex1", "complex2", "both")


# ---------------------------------------------------------------------------
# h^i at n >= 2


def h_i(
    prob: Problem,
    m: int,
    n: int,
    i: int | None = None,
    method: str = "complex1",
    primes: Sequence[int] = DEFAULT_PRIMES,
    verify_level: int = 0,
    cache: dict | None = None,
    exact: bool = False,
) -> CohomologyReport:
    """h^i(X, S^m Omega_X(m-n)); with i=None every degree is reported."""
    if method not in METHODS:
        raise ValidityError(f"unknown method {method!r}; expected one of {METHODS}")
    if i is not None and not 0 <= i <= prob.dim:
        raise ValidityError(f"degree i={i} outside [0, {prob.dim}]")
    cache = {} if cache is None else cache
    t0 = time.perf_counter()
    if method == "both":
        # validate both before spending time on either
        insts = [build(prob, m, n, "complex1"), build(prob, m, n, "complex2")]
        reps = [cohomology(x, primes, verify_level=verify_level, cache=cache, exact=exact) for x in insts]
        if reps[0].h != reps[1].h:
            raise ConsistencyError(f"methods disagree at (m,n)=({m},{n}): complex1 {reps[0].h}, complex2 {reps[1].h}")
        rep = reps[0]
        rep.query["method"] = "both"
        rep.flags = sorted(set(reps[0].flags) | set(reps[1].flags)) + ["methods_agree"]
        rep.term_dims = {"complex1": reps[0].term_dims, "complex2": reps[1].term_dims}
        rep.ranks = {"complex1": reps[0].ranks, "complex2": reps[1].ranks}
    else:
        rep = cohomology(build(prob, m, n, method), primes, verify_level=verify_level, cache=cache, exact=exact)
    if i is not None:
        rep.query["i"] = i
    rep.elapsed_ms = (time.perf_counter() - t0) * 1000.0
    return rep


def h0_surface_positive_twist(prob: Problem, m: int, t: int, method: str = "complex1", primes: Sequence[int] = DEFAULT_PRIMES, verify_level: int = 0) -> CohomologyReport:
    """h^0(X, S^m Omega_X(m + t)) for a surface X, computed as an h^2.

    On a surface S^m T_X = S^m Omega_X (x) K_X^{-m}; with Serre duality and
    K_X = O_X(|d| - N - 1) the group is dual to h^2 at
    n = 2m + t + (m - 1)(|d| - N - 1).
    """
    if prob.dim != 2:
        raise ValidityError(f"surface duality needs dim X = 2 (got {prob.dim})")
    n = surface_dual_n(prob, m, t)
    if n < 2:
        raise ValidityError(f"dual bidegree n={n} < 2 is outside the computable range")
    rep = h_i(prob, m, n, 2, method, primes, verify_level)
    rep.query.update({"t": t, "dual_of": "h0", "value": rep.h[2]})
    return rep


def surface_dual_n(prob: Problem, m: int, t: int) -> int:
    return 2 * m + t + (m - 1) * (prob.total_degree - prob.N - 1)


# ---------------------------------------------------------------------------
# cokernel-of-delta models


@dataclass
class KernelResult:
    dimension: int
    domain_dimension: int
    basis: list[list[SparseBiPoly]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    prime: int = 0

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "domain_dimension": self.domain_dimension,
            "basis": [[format_poly(a) for a in vec] for vec in self.basis],
            "warnings": self.warnings,
            "prime": self.prime,
        }


def _balanced(v: int, p: int) -> int:
    """Residue in (-p/2, p/2]."""
    v %= p
    return v - p if v > p // 2 else v


def _coker_kernel(N: int, gens: Sequence[SparseBiPoly], a_deg: int, delta_src: BiDegree, F: PrimeField, want_basis: bool) -> KernelResult:
    """Kernel of (A_1..A_k) -> sum g_j A_j in coker(delta: S_src -> S_src + (-1, 1)).

    The A_j range over C[Y]_{a_deg}; every g_j has bidegree (1, delta_src.n + 1).
    """
    tgt = delta_src + BiDegree(-1, 1)
    p = F.modulus
    k = len(gens)
    a_keys = basis_of(N, BiDegree(a_deg, 0)).keys if a_deg >= 0 else ()
    dom = k * len(a_keys)
    if dom == 0:
        return KernelResult(0, 0, prime=p)
    D = operator_matrix(delta(N), delta_src, tgt, F) if not delta_src.empty else SparseMatrix.zeros(len(basis_of(N, tgt)), 0)
    index = basis_of(N, tgt).index
    cols = []
    for g in gens:
        gt = [(kg, F.coerce(v)) for kg, v in g.terms.items()]
        for a in a_keys:
            col: dict[int, int] = {}
            for kg, v in gt:
                j = index[a + kg]
                col[j] = (col.get(j, 0) + v) % p
            cols.append({j: v for j, v in col.items() if v})
    Phi = SparseMatrix.from_columns(cols, len(index), p)
    both = D.hstack(Phi)
    rD = rank(D, F)
    r_img = rank(both, F) - rD
    result = KernelResult(dom - r_img, dom, prime=p)
    if want_basis and result.dimension:
        # kernel vectors of [D | Phi] projected on the Phi block span ker(phi)
        vecs = nullspace(both, F)
        off = D.ncols
        proj = [{j - off: v for j, v in vec.items() if j >= off} for vec in vecs]
        proj = [v for v in proj if v]
        E = SparseMatrix.from_rows(proj, dom, p) if proj else SparseMatrix.zeros(0, dom)
        from .field_linalg import echelonize

        ech = echelonize(E, F)
        assert ech.rank == result.dimension
        for row in ech.rows:
            vec = []
            for jg in range(k):
                terms = {a_keys[i]: _balanced(row[jg * len(a_keys) + i], p) for i in range(len(a_keys)) if row.get(jg * len(a_keys) + i)}
                vec.append(SparseBiPoly(N, (a_deg, 0), terms, check=False))
            result.basis.append(vec)
    return result


def phi_kernel(prob: Problem, m: int, prime: int = DEFAULT_PRIMES[0], want_basis: bool = False) -> KernelResult:
    """dim ker phi_m for the quadrics among the defining equations.

    phi_m sends (A_1..A_k) in C[Y]_{m-2}^k to sum (dq_j)_X(Y) A_j in the
    cokernel of delta: S_{m,0} -> S_{m-1,1}.
    """
    quads = [P for P in prob.polys if P.bidegree.n == 2]
    if not quads:
        raise ValidityError("phi_kernel needs at least one quadric among the equations")
    if m < 2:
        raise ValidityError("phi_kernel needs m >= 2")
    F = PrimeField(prime)
    F.require_units(prob.required_units(m))
    res = _coker_kernel(prob.N, [differential_poly(P) for P in quads], m - 2, BiDegree(m, 0), F, want_basis)
    if not 2 * prob.c < prob.N:
        res.warnings.append(f"c={prob.c} is not < N/2; the symmetric-algebra isomorphism is not guaranteed")
    return res


def symmetric_algebra_dim(k: int, m: int) -> int:
    """dim C[q_1..q_k]_{m/2} (0 for odd m)."""
    if m % 2:
        return 0
    return sym_power_dim(m // 2, k)


def psi_kernel(prob: Problem, prime: int = DEFAULT_PRIMES[0], want_basis: bool = False) -> KernelResult:
    """dim ker psi~ for the equations of minimal degree d.

    psi~ sends (A_1..A_k) in C[Y]_{m-2}^k to sum (dP_j)_X(Y) A_j in the
    cokernel of delta: S_{m,d-2} -> S_{m-1,d-1}, with m = d-1 (m = 2 if d = 2).
    """
    d = min(prob.degrees)
    if d < 2:
        raise ValidityError("psi_kernel needs min degree >= 2")
    m = 2 if d == 2 else d - 1
    gens = [P for P in prob.polys if P.bidegree.n == d]
    F = PrimeField(prime)
    F.require_units(prob.required_units(m))
    res = _coker_kernel(prob.N, [differential_poly(P) for P in gens], m - 2, BiDegree(m, d - 2), F, want_basis)
    return res


def y_form(P: SparseBiPoly) -> SparseBiPoly:
    """P(Y) for a pure-X polynomial P."""
    return substitute_y_by_x(P)


def certified_element(P1: SparseBiPoly, A: SparseBiPoly) -> SparseBiPoly:
    """B = sum_{i=1}^{d-2} (-1)^i delta^{d-2-i}(A) delta^i(P1(Y)), exact over Q."""
    N = P1.N
    d = P1.bidegree.n
    PY = y_form(P1)
    out = None
    for i in range(1, d - 1):
        left = apply(delta_power(N, d - 2 - i), A)
        right = apply(delta_power(N, i), PY)
        term = left.multiply(right).scale((-1) ** i)
        out = term if out is None else out.add(term)
    if out is None:
        return SparseBiPoly.zero(N, (d - 1, d - 2))
    return out


def certified_identity_holds(P1: SparseBiPoly, A: SparseBiPoly) -> bool:
    """delta(B) == (-1)^(d-2) (d-1)! A (dP1)_X(Y) exactly."""
    d = P1.bidegree.n
    B = certified_element(P1, A)
    lhs = apply(delta(P1.N), B)
    rhs = A.multiply(differential_poly(P1)).scale((-1) ** (d - 2) * math.factorial(d - 1))
    return lhs == rhs


# ---------------------------------------------------------------------------
# ampleness criterion


@dataclass
class AmpleReport:
    ample_certified: bool
    groups: list[dict]
    offending: list[str]

    def to_dict(self) -> dict:
        return {"ample_certified": self.ample_certified, "groups": self.groups, "offending": self.offending}


def ample_queries(m: int) -> list[tuple[str, int, int, int]]:
    """(name, m, n, i) for H^1(S^m Omega(-1)), H^2(S^m Omega(-2)), H^2(S^{m-1} Omega(-3))."""
    out = []
    for name, mm, twist, i in (("H1(S^m Omega(-1))", m, -1, 1), ("H2(S^m Omega(-2))", m, -2, 2), ("H2(S^(m-1) Omega(-3))", m - 1, -3, 2)):
        # S^mm Omega(mm - n) has twist mm - n
        out.append((name, mm, mm - twist, i))
    return out


def ample_check(prob: Problem, m: int, method: str = "complex1", primes: Sequence[int] = DEFAULT_PRIMES, verify_level: int = 0) -> AmpleReport:
    if prob.N != 4 or prob.c != 2:
        raise ValidityError("ample_check is for complete intersection surfaces in P^4 (N=4, c=2)")
    if m < 3:
        raise ValidityError("ample_check needs m >= 3")
    groups, bad = [], []
    for name, mm, n, i in ample_queries(m):
        rep = h_i(prob, mm, n, i, method, primes, verify_level)
        val = rep.h[i]
        groups.append({"group": name, "m": mm, "n": n, "i": i, "h": val})
        if val:
            bad.append(name)
    return AmpleReport(not bad, groups, bad)


# ---------------------------------------------------------------------------
# independent oracles


def _count(k: int, nvars: int = 3) -> int:
    return math.comb(k + nvars - 1, nvars - 1) if k >= 0 else 0


def plane_curve_oracle(d: int, m: int, n: int) -> tuple[int, int]:
    """(h^0, h^1) of S^m Omega_H(m - n) = O_H(m(d-2) - n) on a smooth plane curve of degree d."""
    k = m * (d - 2) - n
    return _count(k) - _count(k - d), _count(d - k - 3) - _count(-k - 3)


def laurent_top_kernel(N: int, m: int, n: int, F: PrimeField) -> int:
    """dim ker(H^N(O(n)) (x) S^m -> H^N(O(n+1)) (x) S^{m-1}) through Cech Laurent monomials.

    H^N(P^N, O(k)) has basis X^{-g} with every g_i >= 1 and |g| = -k; writing
    g = e + 1 turns multiplication by X_i into lowering e_i (zero when e_i = 0).
    """
    e_src = -n - (N + 1)
    e_tgt = e_src - 1
    if m < 0 or e_src < 0:
        return 0
    src = basis_of(N, BiDegree(m, e_src))
    if e_tgt < 0 or m == 0:
        return len(src)
    tgt = basis_of(N, BiDegree(m - 1, e_tgt))
    p = F.modulus
    cols = []
    for key in src.keys:
        ey, ex = unpack(key, N)
        col = {}
        for i in range(N + 1):
            if ey[i] and ex[i]:
                ny = list(ey)
                nx = list(ex)
                ny[i] -= 1
                nx[i] -= 1
                col[tgt.rank(ny, nx)] = ey[i] % p
        cols.append(col)
    M = SparseMatrix.from_columns(cols, len(tgt), p)
    return len(src) - rank(M, F)


def delta_model(N: int, m: int, n: int, prime: int = DEFAULT_PRIMES[0]) -> dict[int, int]:
    """h^i(P^N, S^m Omega(m + n)) from the generalized Euler sequence.

    h^0 = dim ker delta and h^1 = dim coker delta on S_{m,n} -> S_{m-1,n+1};
    h^N = the Laurent top-Cech kernel; everything in between vanishes (N >= 2).
    """
    if N < 2:
        raise ValidityError("delta_model needs N >= 2")
    F = PrimeField(prime)
    src, tgt = BiDegree(m, n), BiDegree(m - 1, n + 1)
    ds = piece_dimension(N, src)
    dt = piece_dimension(N, tgt)
    r = rank(operator_matrix(delta(N), src, tgt, F), F) if ds and dt else 0
    out = {0: ds - r, 1: dt - r, N: laurent_top_kernel(N, m, n, F)}
    return {i: v for i, v in out.items() if v}


def top_dual_dimension(N: int, m: int, n: int) -> int:
    """dim (S/q)_{m, -n-N-1} = h^0(P^N, S^m T(-n-N-1)), the Serre dual of h^N."""
    k = -n - N - 1
    if k < 0 or m < 0:
        return 0
    return piece_dimension(N, BiDegree(m, k)) - piece_dimension(N, BiDegree(m - 1, k - 1))


def bott_grid(Ns: Iterable[int], ms: Iterable[int], ns: Iterable[int], prime: int = DEFAULT_PRIMES[0]) -> list[tuple]:
    """Cells (N, m, n, bott, delta-model) where the two disagree."""
    bad = []
    for N, m, n in product(Ns, ms, ns):
        b = proj_cotangent_cohomology(N, m, n)
        dm = delta_model(N, m, n, prime)
        if b != dm or dm.get(N, 0) != top_dual_dimension(N, m, n):
            bad.append((N, m, n, b, dm))
    return bad


# ---------------------------------------------------------------------------
# witnesses


def rational_reconstruction(a: int, M: int) -> Fraction | None:
    """The fraction r/s with |r|, s <= sqrt(M/2) and r = a s mod M, if any."""
    a %= M
    bound = math.isqrt(M // 2)
    r0, r1 = M, a
    s0, s1 = 0, 1
    while r1 > bound:
        qt = r0 // r1
        r0, r1 = r1, r0 - qt * r1
        s0, s1 = s1, s0 - qt * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _crt(residues: Sequence[int], moduli: Sequence[int]) -> tuple[int, int]:
    x, M = 0, 1
    for r, p in zip(residues, moduli):
        t = ((r - x) * pow(M, -1, p)) % p
        x += M * t
        M *= p
    return x % M, M


@dataclass
class WitnessReport:
    polynomial: SparseBiPoly
    bidegree: tuple[int, int]
    kernel_dimension: int
    primes_used: list[int]
    verify_prime: int
    nonzero_in_quotient: bool
    in_kernel: bool
    terms: int

    def to_dict(self) -> dict:
        return {
            "polynomial": format_poly(self.polynomial),
            "bidegree": list(self.bidegree),
            "terms": self.terms,
            "kernel_dimension": self.kernel_dimension,
            "primes_used": self.primes_used,
            "verification": {"prime": self.verify_prime, "nonzero_in_quotient": self.nonzero_in_quotient, "in_kernel": self.in_kernel},
        }


def _modular_witness(inst, p: int, position: int, cache: dict) -> tuple[dict[int, int], int, tuple]:
    """Normalized kernel vector at one prime, as {monomial key: residue}."""
    F = PrimeField(p)
    ex = ExplicitComplex(inst, F, cache)
    kern = ex.kernel(position)
    if position > 0:
        img = ex.matrix(position - 1)
        r_img = rank(img, F)
        cls = len(kern) - r_img
        keep = None
        for vec in kern:
            if rank(img.hstack(SparseMatrix.from_columns([vec], img.nrows, p)), F) > r_img:
                keep = vec
                break
    else:
        cls = len(kern)
        keep = kern[0] if kern else None
    if keep is None or cls == 0:
        raise ValidityError(f"trivial cohomology at position {position}: no witness exists")
    lead = min(keep)
    inv = pow(keep[lead], -1, p)
    vec = {j: v * inv % p for j, v in keep.items()}
    parts = ex.lift(position, vec)
    flat: dict[tuple[int, int], int] = {}
    for si, poly in enumerate(parts):
        for k, v in poly.terms.items():
            flat[(si, k)] = v % p
    shape = tuple(tuple(Q.basis_keys()) for Q in ex.pieces[position])
    return flat, cls, shape


def witness(
    prob: Problem,
    m: int,
    n: int,
    position: int = 0,
    method: str = "complex1",
    primes: Sequence[int] = DEFAULT_PRIMES,
    verify_prime: int | None = None,
    max_primes: int = 8,
) -> WitnessReport:
    """A canonical kernel polynomial at ``position``, with rational coefficients.

    The kernel vector is normalized (first coordinate 1) at each prime and
    lifted through CRT and rational reconstruction; primes are added until the
    reconstruction is stable.  The result is then re-checked from scratch at
    a prime not used for the reconstruction.
    """
    inst = build(prob, m, n, method)
    if not 0 <= position < inst.length:
        raise ValidityError(f"position {position} outside 0..{inst.length - 1}")
    if len(inst.terms[position].summands) != 1:
        raise ValidityError("witness extraction supports positions with a single summand")
    pool = list(primes) + [p for p in EXTRA_PRIMES if p not in primes]
    cache: dict = {}
    residues: list[dict] = []
    used: list[int] = []
    cls = None
    shape = None
    previous = None
    W = None
    for p in pool[:max_primes]:
        flat, c, sh = _modular_witness(inst, p, position, cache)
        if shape is None:
            shape, cls = sh, c
        elif sh != shape or c != cls:
            raise PrimeDisagreement(f"witness structure differs at prime {p}")
        residues.append(flat)
        used.append(p)
        keys = sorted(set().union(*residues))
        coeffs = {}
        ok = True
        for k in keys:
            x, M = _crt([r.get(k, 0) for r in residues], used)
            fr = rational_reconstruction(x, M)
            if fr is None:
                ok = False
                break
            if fr:
                coeffs[k] = fr
        if not ok:
            continue
        if previous == coeffs:
            W = coeffs
            break
        previous = coeffs
    if W is None:
        raise ConsistencyError(f"rational reconstruction did not stabilize within {max_primes} primes")
    summand = inst.terms[position].summands[0]
    poly = SparseBiPoly(prob.N, summand.bidegree, {k: (int(v) if v.denominator == 1 else v) for (_, k), v in W.items()}, check=False)
    vp = verify_prime or next(p for p in pool if p not in used)
    nonzero, in_ker = verify_witness(inst, position, poly, vp)
    if not (nonzero and in_ker):
        raise ConsistencyError(f"witness failed re-verification at prime {vp}")
    return WitnessReport(poly, tuple(summand.bidegree), cls, used, vp, nonzero, in_ker, len(poly.terms))


def verify_witness(inst, position: int, W: SparseBiPoly, prime: int) -> tuple[bool, bool]:
    """From scratch at ``prime``: W is nonzero in its quotient and its image vanishes."""
    F = PrimeField(prime)
    prob = inst.problem
    s = inst.terms[position].summands[0]
    src = QuotientPiece(IdealSpec.q_power_ideal(prob.N, s.q_power, prob.polys if s.with_polys else ()), s.bidegree, F)
    terms = {k: F.coerce(v) for k, v in W.terms.items()}
    nonzero = bool(src.reduce_terms(terms))
    in_ker = True
    if position < len(inst.blocks):
        targets = {}
        for blk in inst.blocks[position]:
            t = inst.terms[position + 1].summands[blk.target]
            if blk.target not in targets:
                targets[blk.target] = [QuotientPiece(IdealSpec.q_power_ideal(prob.N, t.q_power, prob.polys if t.with_polys else ()), t.bidegree, F), {}]
            img = apply_terms(compile_op(blk.op, F), terms, F)
            acc = targets[blk.target][1]
            for k, v in img.items():
                acc[k] = (acc.get(k, 0) + v) % prime
        for Q, acc in targets.values():
            if Q.reduce_terms({k: v for k, v in acc.items() if v}):
                in_ker = False
    return nonzero, in_ker


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepRow:
    m: int
    n: int
    i: int
    h: int | None
    method: str
    prime: int
    status: str = "ok"

    def to_dict(self) -> dict:
        return {"m": self.m, "n": self.n, "i": self.i, "h": self.h, "method": self.method, "prime": self.prime, "status": self.status}


def _sweep_cell(args) -> list[SweepRow]:
    prob, m, n, degs, method, primes = args
    try:
        rep = h_i(prob, m, n, None, method, primes)
    except ValidityError as exc:
        return [SweepRow(m, n, i, None, method, primes[0], f"n/a: {exc}") for i in degs]
    return [SweepRow(m, n, i, rep.h.get(i, 0), method, primes[0]) for i in degs]


def sweep(
    prob: Problem,
    ms: Iterable[int],
    ns: Iterable[int],
    degrees: Iterable[int] | None = None,
    method: str = "complex1",
    primes: Sequence[int] = DEFAULT_PRIMES,
    keep: Callable[[int, int], bool] | None = None,
    threads: int = 1,
) -> list[SweepRow]:
    """Batch h^i over a grid; validity errors become rows with status, not exceptions.

    Cells are independent; with ``threads > 1`` they run in a process pool
    and are collected back in grid order.
    """
    degs = list(range(prob.dim + 1)) if degrees is None else list(degrees)
    cells = [(prob, m, n, degs, method, tuple(primes)) for m, n in product(ms, ns) if keep is None or keep(m, n)]
    if threads > 1 and len(cells) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_sweep_cell, cells))
    else:
        chunks = [_sweep_cell(c) for c in cells]
    return [row for chunk in chunks for row in chunk]


def vanishing_hyp_cells(N: int, d: int, m_max: int, n_thm_range: Iterable[int]) -> list[tuple[int, int, int]]:
    """(m, n_thm, n) with m(d-3) > n_thm and n >= 2 for split-form hypersurfaces.

    The vanishing concerns H^{N-1}(S^m Omega(d - n_thm - N - 1)); matching the
    twist m - n gives n = m - d + n_thm + N + 1.
    """
    out = []
    for m in range(1, m_max + 1):
        for nt in n_thm_range:
            if m * (d - 3) <= nt:
                continue
            n = m - d + nt + N + 1
            if n >= 2:
                out.append((m, nt, n))
    return out
