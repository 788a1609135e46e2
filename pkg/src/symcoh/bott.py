"""Closed-form cohomology from Bott's formulas.

A weight alpha in Z^n is normalized by the rho-shifted action
sigma~(a) = sigma(a + rho) - rho with rho = (n-1, ..., 0).  If alpha + rho
has a repeated entry all cohomology vanishes; otherwise exactly one degree,
the number of inversions needed to sort alpha + rho decreasingly, carries
the Schur module of the dominant weight.  The determinant twist that makes
the last entry zero does not change dimensions and is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import comb, prod
from typing import Sequence


@dataclass(frozen=True)
class BottOutcome:
    vanishes_all: bool
    degree: int
    dominant: tuple[int, ...]
    dimension: int

    def as_map(self) -> dict[int, int]:
        if self.vanishes_all or self.dimension == 0:
            return {}
        return {self.degree: self.dimension}


def rho(n: int) -> tuple[int, ...]:
    return tuple(range(n - 1, -1, -1))


def _inversions(seq: Sequence[int]) -> int:
    """Pairs i<j with seq[i] < seq[j] (steps needed to sort decreasingly)."""
    return sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] < seq[j])


def schur_dim(lam: Sequence[int], n: int | None = None) -> int:
    """Weyl dimension formula for GL_n; lam non-increasing, padded with zeros."""
    lam = list(lam)
    if n is None:
        n = len(lam)
    if len(lam) > n:
        if any(lam[n:]):
            raise ValueError("weight longer than n")
        lam = lam[:n]
    lam = lam + [0] * (n - len(lam))
    if any(lam[i] < lam[i + 1] for i in range(n - 1)):
        raise ValueError(f"weight {tuple(lam)} is not dominant")
    num = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            num *= Fraction(lam[i] - lam[j] + j - i, j - i)
    assert num.denominator == 1
    return int(num)


def dominance_normalize(alpha: Sequence[int]) -> BottOutcome:
    alpha = tuple(int(a) for a in alpha)
    n = len(alpha)
    shifted = tuple(a + r for a, r in zip(alpha, rho(n)))
    if len(set(shifted)) < n:
        return BottOutcome(True, 0, (), 0)
    length = _inversions(shifted)
    srt = sorted(shifted, reverse=True)
    dom = tuple(s - r for s, r in zip(srt, rho(n)))
    return BottOutcome(False, length, dom, schur_dim(dom, n))


def proj_cotangent_cohomology(N: int, m: int, n: int) -> dict[int, int]:
    """h^i(P^N, S^m Omega(m+n)) via the weight (n, m, 0, ..., 0)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    alpha = (n, m) + (0,) * (N - 1)
    return dominance_normalize(alpha).as_map()


def flag12_cohomology(N: int, m: int, n: int) -> dict[int, int]:
    """Cohomology of L_{m,n} on Flag_(1,2) C^{N+1} by explicit Weyl-group search."""
    if m < 0:
        raise ValueError("m must be >= 0")
    alpha = (n, m) + (0,) * (N - 1)
    size = N + 1
    r = rho(size)
    shifted = [a + x for a, x in zip(alpha, r)]
    for perm in permutations(range(size)):
        if perm != tuple(range(size)) and all(shifted[perm[i]] == shifted[i] for i in range(size)):
            return {}
    for perm in permutations(range(size)):
        image = [shifted[perm[i]] - r[i] for i in range(size)]
        if all(image[i] >= image[i + 1] for i in range(size - 1)):
            length = sum(1 for i in range(size) for j in range(i + 1, size) if perm[i] > perm[j])
            dim = _weyl_product(image)
            return {length: dim} if dim else {}
    raise AssertionError("no dominant representative found")


def _weyl_product(lam: Sequence[int]) -> int:
    n = len(lam)
    num = prod(lam[i] - lam[j] + j - i for i in range(n) for j in range(i + 1, n))
    den = prod(j - i for i in range(n) for j in range(i + 1, n))
    assert num % den == 0
    return num // den


def sym_power_dim(k: int, n: int) -> int:
    """dim S^k C^n."""
    return comb(k + n - 1, n - 1) if k >= 0 else 0
