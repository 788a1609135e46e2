"""Differential and multiplication operators on S = C[Y, X].

Every operator is an immutable :class:`OperatorSpec` with a fixed bidegree
shift.  Operators are applied monomial by monomial after being compiled for
a coefficient field (``QQ`` for exact Fraction arithmetic or a
``PrimeField``).  Composite operators (beta, beta_star, scaled sums) are
kept compositional and never expanded symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from .field_linalg import QQ, PrimeField, SparseMatrix, nullspace, rank
from .polyspace import (
    BiDegree,
    PolyError,
    SparseBiPoly,
    basis_of,
    bideg,
    exponent,
    q_poly,
    unit,
    x_slot,
    y_slot,
)


class OperatorError(ValueError):
    """Invalid operator data or a bidegree mismatch."""


KINDS = (
    "delta_power",
    "delta_rev",
    "delta_f",
    "mul",
    "alpha",
    "beta",
    "alpha_star",
    "beta_star",
    "renormalize",
    "scaled_sum",
    "compose",
)


def _x_degree(P: SparseBiPoly) -> int:
    if P.is_zero():
        raise OperatorError("P must be nonzero")
    if P.bidegree.m != 0:
        raise OperatorError("P must be a polynomial in X only (X-homogeneous)")
    if P.bidegree.n < 1:
        raise OperatorError("P must have positive X-degree")
    return P.bidegree.n


@dataclass(frozen=True)
class OperatorSpec:
    kind: str
    N: int
    polys: tuple[SparseBiPoly, ...] = ()
    k: int = 1
    parts: tuple[tuple[object, "OperatorSpec"], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise OperatorError(f"unknown operator kind {self.kind!r}")
        for P in self.polys:
            if P.N != self.N:
                raise OperatorError("ambient mismatch between operator and polynomial")

    # shift ----------------------------------------------------------------
    @property
    def shift(self) -> BiDegree:
        kind = self.kind
        if kind == "delta_power":
            return BiDegree(-self.k, self.k)
        if kind == "delta_rev":
            return BiDegree(1, -1)
        if kind == "delta_f":
            return BiDegree(-1, self.polys[0].bidegree.n)
        if kind == "mul":
            return self.polys[0].bidegree
        if kind == "renormalize":
            return BiDegree(0, 0)
        if kind in ("alpha", "beta", "alpha_star", "beta_star"):
            d = self.polys[0].bidegree.n
            return {
                "alpha": BiDegree(1, d - 1),
                "beta": BiDegree(0, d),
                "alpha_star": BiDegree(-1, d - 1),
                "beta_star": BiDegree(0, d),
            }[kind]
        if kind == "scaled_sum":
            return self.parts[0][1].shift
        if kind == "compose":
            return self.parts[0][1].shift + self.parts[1][1].shift
        raise AssertionError(kind)

    def denominators(self) -> set[int]:
        """Integers that must be invertible in the coefficient field."""
        out: set[int] = set()
        if self.kind in ("alpha", "beta", "alpha_star", "beta_star"):
            out.add(self.polys[0].bidegree.n)
        for c, op in self.parts:
            out |= op.denominators()
            if isinstance(c, Fraction):
                out.add(c.denominator)
        return out

    def __call__(self, p: SparseBiPoly, F=QQ) -> SparseBiPoly:
        return apply(self, p, F)

    def __repr__(self) -> str:
        if self.kind in ("scaled_sum", "compose"):
            return f"{self.kind}({', '.join(f'{c}*{op!r}' for c, op in self.parts)})"
        if self.kind == "delta_power":
            return f"delta^{self.k}"
        return self.kind if not self.polys else f"{self.kind}(deg {self.polys[0].bidegree.n})"


# constructors ---------------------------------------------------------------


def delta_power(N: int, k: int = 1) -> OperatorSpec:
    if k < 0:
        raise OperatorError("delta power must be nonnegative")
    return OperatorSpec("delta_power", N, k=k)


def delta(N: int) -> OperatorSpec:
    return delta_power(N, 1)


def delta_rev(N: int) -> OperatorSpec:
    return OperatorSpec("delta_rev", N)


def delta_f(polys: Sequence[SparseBiPoly]) -> OperatorSpec:
    """f -> sum_i P_i d/dY_i, for N+1 X-polynomials of a common degree."""
    polys = tuple(polys)
    if not polys:
        raise OperatorError("delta_f needs N+1 polynomials")
    N = polys[0].N
    if len(polys) != N + 1:
        raise OperatorError(f"delta_f needs exactly N+1={N + 1} polynomials")
    degs = {_x_degree(P) for P in polys}
    if len(degs) != 1:
        raise OperatorError(f"delta_f polynomials must share one degree, got {sorted(degs)}")
    return OperatorSpec("delta_f", N, polys=polys)


def mul(A: SparseBiPoly) -> OperatorSpec:
    return OperatorSpec("mul", A.N, polys=(A,))


def alpha(P: SparseBiPoly) -> OperatorSpec:
    _x_degree(P)
    return OperatorSpec("alpha", P.N, polys=(P,))


def beta(P: SparseBiPoly) -> OperatorSpec:
    _x_degree(P)
    return OperatorSpec("beta", P.N, polys=(P,))


def alpha_star(P: SparseBiPoly) -> OperatorSpec:
    _x_degree(P)
    return OperatorSpec("alpha_star", P.N, polys=(P,))


def beta_star(P: SparseBiPoly) -> OperatorSpec:
    _x_degree(P)
    return OperatorSpec("beta_star", P.N, polys=(P,))


def renormalize(N: int) -> OperatorSpec:
    return OperatorSpec("renormalize", N)


def scaled_sum(parts: Sequence[tuple[object, OperatorSpec]]) -> OperatorSpec:
    parts = tuple((c, op) for c, op in parts)
    if not parts:
        raise OperatorError("empty scaled sum")
    shifts = {op.shift for _, op in parts}
    if len(shifts) != 1:
        raise OperatorError(f"scaled sum of operators with different shifts {sorted(map(tuple, shifts))}")
    return OperatorSpec("scaled_sum", parts[0][1].N, parts=parts)


def compose(outer: OperatorSpec, inner: OperatorSpec) -> OperatorSpec:
    """outer o inner."""
    return OperatorSpec("compose", outer.N, parts=((1, outer), (1, inner)))


# ---------------------------------------------------------------------------
# polynomial helpers


def x_partial(P: SparseBiPoly, i: int) -> dict:
    s = x_slot(i, P.N)
    out = {}
    for key, v in P.terms.items():
        e = exponent(key, s)
        if e:
            out[key - unit(s)] = v * e
    return out


def alpha_poly(P: SparseBiPoly, F=QQ) -> SparseBiPoly:
    """(1/d) sum_i dP/dX_i Y_i, i.e. (dP)_X(Y)/d, bidegree (1, d-1)."""
    d = _x_degree(P)
    out: dict = {}
    for i in range(P.N + 1):
        for key, v in x_partial(P, i).items():
            k = key + unit(y_slot(i))
            out[k] = out.get(k, 0) + v
    inv = F.frac(1, d)
    return SparseBiPoly(P.N, (1, d - 1), {k: F.norm(v * inv) for k, v in out.items()}, check=False)


def differential_poly(P: SparseBiPoly) -> SparseBiPoly:
    """(dP)_X(Y) = sum_i dP/dX_i(X) Y_i."""
    d = _x_degree(P)
    out: dict = {}
    for i in range(P.N + 1):
        for key, v in x_partial(P, i).items():
            k = key + unit(y_slot(i))
            out[k] = out.get(k, 0) + v
    return SparseBiPoly(P.N, (1, d - 1), out, check=False)


def substitute_y_by_x(R: SparseBiPoly) -> SparseBiPoly:
    """R(X) -> R(Y): move the X exponents of a pure-X polynomial to Y."""
    N = R.N
    out = {}
    for key, v in R.terms.items():
        k = 0
        for i in range(N + 1):
            k += exponent(key, x_slot(i, N)) * unit(y_slot(i))
        out[k] = v
    return SparseBiPoly(N, (R.bidegree.n, R.bidegree.m), out, check=False)


# ---------------------------------------------------------------------------
# compilation


MonoMap = Callable[[int], dict]


def _coerce_terms(terms: dict, F) -> dict:
    return {k: c for k, c in ((k, F.coerce(v)) for k, v in terms.items()) if c}


def compile_op(op: OperatorSpec, F=QQ) -> MonoMap:
    """Return key -> image terms (unnormalized sums of products) for ``op``."""
    N = op.N
    F.require_units(op.denominators())
    kind = op.kind
    ys = [unit(y_slot(i)) for i in range(N + 1)]
    xs = [unit(x_slot(i, N)) for i in range(N + 1)]

    if kind == "delta_power":
        k = op.k

        def one_delta(terms: dict) -> dict:
            out: dict = {}
            for key, c in terms.items():
                for i in range(N + 1):
                    a = (key >> (8 * i)) & 0xFF
                    if a:
                        nk = key - ys[i] + xs[i]
                        out[nk] = out.get(nk, 0) + c * a
            return out

        def f(key: int) -> dict:
            terms = {key: 1}
            for _ in range(k):
                terms = one_delta(terms)
            return terms

        return f

    if kind == "delta_rev":

        def f(key: int) -> dict:
            out = {}
            for i in range(N + 1):
                b = (key >> (8 * (N + 1 + i))) & 0xFF
                if b:
                    out[key + ys[i] - xs[i]] = b
            return out

        return f

    if kind in ("delta_f", "alpha_star"):
        if kind == "delta_f":
            coeffs = [_coerce_terms(P.terms, F) for P in op.polys]
        else:
            P = op.polys[0]
            inv = F.frac(1, P.bidegree.n)
            coeffs = [{k: F.norm(F.coerce(v) * inv) for k, v in x_partial(P, i).items()} for i in range(N + 1)]
        pairs = [(i, list(c.items())) for i, c in enumerate(coeffs) if c]

        def f(key: int) -> dict:
            out: dict = {}
            for i, cs in pairs:
                a = (key >> (8 * i)) & 0xFF
                if a:
                    base = key - ys[i]
                    for kp, vp in cs:
                        nk = base + kp
                        out[nk] = out.get(nk, 0) + a * vp
            return out

        return f

    if kind in ("mul", "alpha"):
        A = op.polys[0] if kind == "mul" else alpha_poly(op.polys[0], F)
        items = list(_coerce_terms(A.terms, F).items())

        def f(key: int) -> dict:
            return {key + ka: va for ka, va in items}

        return f

    if kind == "renormalize":

        def f(key: int) -> dict:
            den = 1
            for i in range(N + 1):
                den *= factorial((key >> (8 * i)) & 0xFF)
            return {key: F.frac(1, den)}

        return f

    if kind == "beta":
        P = op.polys[0]
        return compile_op(scaled_sum([(1, mul(P)), (-1, compose(alpha(P), delta(N)))]), F)

    if kind == "beta_star":
        P = op.polys[0]
        return compile_op(scaled_sum([(1, mul(P)), (-1, compose(mul(q_poly(N)), alpha_star(P)))]), F)

    if kind == "scaled_sum":
        subs = [(F.coerce(c), compile_op(sub, F)) for c, sub in op.parts]

        def f(key: int) -> dict:
            out: dict = {}
            for c, g in subs:
                for k2, v in g(key).items():
                    out[k2] = out.get(k2, 0) + c * v
            return out

        return f

    if kind == "compose":
        outer = compile_op(op.parts[0][1], F)
        inner = compile_op(op.parts[1][1], F)

        def f(key: int) -> dict:
            out: dict = {}
            for k1, v1 in inner(key).items():
                if F.exact:
                    v1 = F.norm(v1)
                else:
                    v1 %= F.modulus
                if not v1:
                    continue
                for k2, v2 in outer(k1).items():
                    out[k2] = out.get(k2, 0) + v1 * v2
            return out

        return f

    raise AssertionError(kind)


def apply_terms(fn: MonoMap, terms: dict, F) -> dict:
    out: dict = {}
    for key, c in terms.items():
        for k2, v in fn(key).items():
            out[k2] = out.get(k2, 0) + c * v
    if F.exact:
        return {k: v for k, v in ((k, F.norm(v)) for k, v in out.items()) if v}
    p = F.modulus
    return {k: v for k, v in ((k, v % p) for k, v in out.items()) if v}


def apply(op: OperatorSpec, p: SparseBiPoly, F=QQ) -> SparseBiPoly:
    """op(p); the result has bidegree bidegree(p) + shift(op) (or is zero)."""
    if p.N != op.N:
        raise OperatorError(f"ambient mismatch: operator N={op.N}, polynomial N={p.N}")
    terms = p.terms if F.exact else {k: F.coerce(v) for k, v in p.terms.items()}
    out = apply_terms(compile_op(op, F), terms, F)
    return SparseBiPoly(op.N, p.bidegree + op.shift, out, check=False)


# ---------------------------------------------------------------------------
# matrices


def operator_matrix(op: OperatorSpec, source, target, F: PrimeField, check: bool = False) -> SparseMatrix:
    """Matrix of ``op`` from a piece (BiDegree) or QuotientPiece to another.

    Column j is the image of the j-th source basis element, written in the
    target basis (reduced into the target quotient when target is one).
    """
    from .quotient import QuotientPiece, well_definedness_check

    sb = source.bidegree if isinstance(source, QuotientPiece) else bideg(source)
    tb = target.bidegree if isinstance(target, QuotientPiece) else bideg(target)
    if tb != sb + op.shift:
        raise OperatorError(f"target bidegree {tuple(tb)} != source {tuple(sb)} + shift {tuple(op.shift)}")
    fn = compile_op(op, F)
    N = op.N
    if isinstance(source, QuotientPiece):
        src_keys = source.basis_keys()
    else:
        src_keys = basis_of(N, sb).keys
    if isinstance(target, QuotientPiece):
        ncols_t = target.dimension
        to_coords = target.reduce_terms
    else:
        index = basis_of(N, tb).index
        ncols_t = len(index)
        p = F.modulus

        def to_coords(terms: dict) -> dict:
            out = {}
            for k, v in terms.items():
                v %= p
                if v:
                    out[index[k]] = v
            return out

    cols = [to_coords(fn(k)) for k in src_keys]
    if check and isinstance(source, QuotientPiece) and isinstance(target, QuotientPiece):
        well_definedness_check(op, source, target, F, raise_on_error=True)
    return SparseMatrix.from_columns(cols, ncols_t, F.modulus)


def delta_f_injectivity(polys: Sequence[SparseBiPoly], m: int, n: int, F: PrimeField) -> bool:
    """Whether sum_i P_i d/dY_i : S_{m,n} -> S_{m-1,n+d} has trivial kernel."""
    op = delta_f(polys)
    d = op.shift.n
    M = operator_matrix(op, BiDegree(m, n), BiDegree(m - 1, n + d), F)
    return rank(M, F) == M.ncols


def kernel_polys(op: OperatorSpec, b, F: PrimeField) -> list[SparseBiPoly]:
    """Kernel of op on the full piece S_b, as polynomials over F."""
    b = bideg(b)
    M = operator_matrix(op, b, b + op.shift, F)
    keys = basis_of(op.N, b).keys
    return [SparseBiPoly(op.N, b, {keys[j]: v for j, v in vec.items()}, check=False) for vec in nullspace(M, F)]
