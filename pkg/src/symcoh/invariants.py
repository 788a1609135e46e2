"""Self-checks run by ``symcoh verify``.

Each check returns ``(passed, detail)``; :func:`run_suite` runs groups of
them and tallies the results.  The random cases use a seeded generator so
two runs of the suite do the same work.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .bott import proj_cotangent_cohomology
from .complexes import ExplicitComplex, Problem, build, build_complex2_ci2
from .field_linalg import DEFAULT_PRIMES, QQ, PrimeField
from .operators import (
    alpha,
    alpha_star,
    apply,
    beta_star,
    delta,
    delta_power,
    delta_rev,
    differential_poly,
    renormalize,
    substitute_y_by_x,
)
from .polyspace import BiDegree, SparseBiPoly, basis_of, exponent, q_poly, unit, x_slot, y_slot
from .quotient import q_normal_form


def random_poly(rng: random.Random, N: int, m: int, n: int, terms: int = 6, coeff: int = 9) -> SparseBiPoly:
    keys = basis_of(N, BiDegree(m, n)).keys
    chosen = rng.sample(list(keys), min(terms, len(keys)))
    out = {}
    for k in chosen:
        v = rng.randint(-coeff, coeff)
        if v:
            out[k] = v
    return SparseBiPoly(N, (m, n), out, check=False)


def random_form(rng: random.Random, N: int, d: int, terms: int = 5) -> SparseBiPoly:
    """A nonzero X-homogeneous polynomial of degree d."""
    while True:
        P = random_poly(rng, N, 0, d, terms)
        if not P.is_zero():
            return P


def dual_euler(A: SparseBiPoly) -> SparseBiPoly:
    """q * A + sum_i X_i Y_i^2 dA/dY_i (the dual of delta)."""
    N = A.N
    out = dict(q_poly(N).multiply(A).terms)
    for key, v in A.terms.items():
        for i in range(N + 1):
            e = exponent(key, y_slot(i))
            if e:
                k = key + unit(y_slot(i)) + unit(x_slot(i, N))
                out[k] = out.get(k, 0) + e * v
    return SparseBiPoly(N, A.bidegree + BiDegree(1, 1), {k: v for k, v in out.items() if v}, check=False)


# ---------------------------------------------------------------------------
# operator identities


def check_delta_power(rng: random.Random) -> tuple[bool, str]:
    """delta^{d-1}(R(Y)) = (d-1)! (dR)_X(Y)."""
    N = rng.randint(1, 3)
    d = rng.randint(2, 6)
    R = random_form(rng, N, d)
    lhs = apply(delta_power(N, d - 1), substitute_y_by_x(R))
    rhs = differential_poly(R).scale(math.factorial(d - 1))
    return lhs == rhs, f"N={N} d={d}"


def check_commutator(rng: random.Random) -> tuple[bool, str]:
    """delta alpha(P) - alpha(P) delta = multiplication by P."""
    N = rng.randint(1, 3)
    d = rng.randint(1, 4)
    P = random_form(rng, N, d)
    p = random_poly(rng, N, rng.randint(0, 3), rng.randint(0, 3))
    lhs = apply(delta(N), apply(alpha(P), p)).sub(apply(alpha(P), apply(delta(N), p)))
    return lhs == P.multiply(p), f"N={N} d={d}"


def check_euler(rng: random.Random) -> tuple[bool, str]:
    """alpha*(P)(q) = P."""
    N = rng.randint(1, 4)
    P = random_form(rng, N, rng.randint(1, 5))
    return apply(alpha_star(P), q_poly(N)) == P, f"N={N}"


def check_beta_star_descent(rng: random.Random) -> tuple[bool, str]:
    """beta*(P)(q A) lies in (q^2)."""
    N = rng.randint(1, 3)
    P = random_form(rng, N, rng.randint(1, 4))
    A = random_poly(rng, N, rng.randint(0, 2), rng.randint(0, 2))
    img = apply(beta_star(P), q_poly(N).multiply(A))
    return not q_normal_form(N, 2).reduce_terms(dict(img.terms)), f"N={N}"


def check_delta_rev(rng: random.Random) -> tuple[bool, str]:
    """delta_rev(delta(B)) = m B on pure-Y polynomials of degree m."""
    N = rng.randint(1, 3)
    m = rng.randint(0, 5)
    B = random_poly(rng, N, m, 0)
    return apply(delta_rev(N), apply(delta(N), B)) == B.scale(m), f"N={N} m={m}"


def check_renormalization(rng: random.Random) -> tuple[bool, str]:
    """u(delta*(A)) = q u(A) for A in C[Y]_m (x) C[X]_n."""
    N = rng.randint(1, 3)
    A = random_poly(rng, N, rng.randint(0, 4), rng.randint(0, 2))
    u = renormalize(N)
    return apply(u, dual_euler(A)) == q_poly(N).multiply(apply(u, A)), f"N={N}"


OPERATOR_CHECKS: dict[str, Callable] = {
    "delta_power": check_delta_power,
    "commutator": check_commutator,
    "euler": check_euler,
    "beta_star_descent": check_beta_star_descent,
    "delta_rev": check_delta_rev,
    "renormalization": check_renormalization,
}


# ---------------------------------------------------------------------------
# complexes and oracles


SMALL_PROBLEMS = (
    (2, ("X0^3 + X1^3 + X2^3",)),
    (2, ("X0^4 + X1^4 + X2^4 + X0*X1^3",)),
    (3, ("X0^2 + X1^2 + X2^2 + X3^2", "X0^2 + 2*X1^2 + 3*X2^2 + 5*X3^2")),
    (3, ("X0^3 + X1^3 + X2^3 + X3^3",)),
)


def check_d_squared(prob: Problem, m: int, n: int, method: str, prime: int) -> tuple[bool, str]:
    ex = ExplicitComplex(build(prob, m, n, method), PrimeField(prime))
    return ex.check_d_squared() and ex.check_well_defined(), f"{method} N={prob.N} d={prob.degrees} (m,n)=({m},{n})"


def check_methods_agree(prob: Problem, m: int, n: int, prime: int) -> tuple[bool, str]:
    from .complexes import cohomology

    a = cohomology(build(prob, m, n, "complex1"), (prime,)).h
    b = cohomology(build(prob, m, n, "complex2"), (prime,)).h
    return a == b, f"N={prob.N} d={prob.degrees} (m,n)=({m},{n}) {a} {b}"


def check_plane_curve(d: int, m: int, n: int, prime: int) -> tuple[bool, str]:
    from .cohomology import h_i, plane_curve_oracle

    prob = Problem.from_strings(2, (f"X0^{d} + X1^{d} + X2^{d}",))
    h = h_i(prob, m, n, None, "complex1", (prime,)).h
    return (h[0], h[1]) == plane_curve_oracle(d, m, n), f"d={d} (m,n)=({m},{n})"


def check_bott(N: int, m: int, n: int, prime: int) -> tuple[bool, str]:
    from .cohomology import delta_model

    return proj_cotangent_cohomology(N, m, n) == delta_model(N, m, n, prime), f"N={N} m={m} n={n}"


# ---------------------------------------------------------------------------
# suite


@dataclass
class SuiteResult:
    passed: int = 0
    failed: int = 0
    failures: list[str] = field(default_factory=list)
    groups: dict[str, list[int]] = field(default_factory=dict)

    def record(self, group: str, ok: bool, detail: str) -> None:
        g = self.groups.setdefault(group, [0, 0])
        if ok:
            self.passed += 1
            g[0] += 1
        else:
            self.failed += 1
            g[1] += 1
            self.failures.append(f"{group}: {detail}")

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "failed": self.failed,
            "groups": {k: {"passed": v[0], "failed": v[1]} for k, v in sorted(self.groups.items())},
            "failures": self.failures,
        }


def run_suite(level: int = 0, prime: int = DEFAULT_PRIMES[0], seed: int = 20240101, cases: int = 25) -> SuiteResult:
    """Operator identities, D^2 = 0, method agreement and oracle grids.

    ``level`` widens the grids: 0 is quick, 2 is the full small grid.
    """
    rng = random.Random(seed)
    res = SuiteResult()
    n_cases = cases * (1 + level)
    for name, fn in OPERATOR_CHECKS.items():
        for _ in range(n_cases):
            ok, detail = fn(rng)
            res.record(f"operator:{name}", ok, detail)
    m_max = 2 + level
    n_max = 3 + level
    for N, polys in SMALL_PROBLEMS:
        prob = Problem.from_strings(N, polys)
        for m in range(prob.c, m_max + 1):
            for n in range(2, n_max + 1):
                for method in ("complex1", "complex2"):
                    if method == "complex2" and m < prob.c:
                        continue
                    ok, detail = check_d_squared(prob, m, n, method, prime)
                    res.record("complex:d_squared", ok, detail)
                ok, detail = check_methods_agree(prob, m, n, prime)
                res.record("complex:methods_agree", ok, detail)
    for d in (3, 4):
        for m in range(1, m_max + 2):
            for n in range(2, n_max + 3):
                ok, detail = check_plane_curve(d, m, n, prime)
                res.record("oracle:plane_curve", ok, detail)
    for N in (2, 3):
        for m in range(0, m_max + 2):
            for n in range(-6, 4):
                ok, detail = check_bott(N, m, n, prime)
                res.record("oracle:bott", ok, detail)
    return res
