import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symcoh.field_linalg import (
    QQ,
    FieldError,
    PrimeDisagreement,
    PrimeField,
    SparseMatrix,
    apply,
    echelonize,
    exact_rank,
    is_zero,
    matmul,
    multi_prime_rank,
    nullspace,
    rank,
)

P = 1000003
F = PrimeField(P)


def gauss_rank(rows, p):
    """Textbook dense elimination mod p."""
    A = [[x % p for x in r] for r in rows]
    r = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        r += 1
    return r


def bareiss_rank(rows):
    """Fraction-free elimination over Z."""
    A = [list(r) for r in rows]
    if not A:
        return 0
    m, n = len(A), len(A[0])
    prev = 1
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, m):
            for j in range(c + 1, n):
                A[i][j] = (A[i][j] * A[r][c] - A[i][c] * A[r][j]) // prev
            A[i][c] = 0
        prev = A[r][c]
        r += 1
        if r == m:
            break
    return r


def random_sparse(rng, nr, nc, density, lo=-5, hi=5):
    rows = [[0] * nc for _ in range(nr)]
    for i in range(nr):
        for j in range(nc):
            if rng.random() < density:
                rows[i][j] = rng.randint(lo, hi)
    return rows


small_matrices = st.integers(1, 9).flatmap(
    lambda r: st.integers(1, 9).flatmap(lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r))
)


class TestPrimeField:
    def test_rejects_composite_and_even(self):
        with pytest.raises(FieldError):
            PrimeField(15)
        with pytest.raises(FieldError):
            PrimeField(2)

    def test_inverse_and_fraction(self):
        assert F.inv(2) * 2 % P == 1
        assert F.frac(1, 3) * 3 % P == 1

    def test_required_units(self):
        with pytest.raises(FieldError):
            PrimeField(5).require_units([2, 3, 120])
        PrimeField(7).require_units([2, 3, 5])


class TestRank:
    def test_identity(self):
        assert rank(SparseMatrix.identity(7), F) == 7

    def test_proportional_rows(self):
        assert rank(SparseMatrix.from_dense([[1, 2], [2, 4]], P), F) == 1

    def test_empty(self):
        assert rank(SparseMatrix.zeros(0, 0), F) == 0
        assert rank(SparseMatrix.zeros(4, 3), F) == 0

    def test_random_50x60_against_dense_elimination(self):
        rng = random.Random(3)
        for density in (0.05, 0.2, 0.6):
            rows = random_sparse(rng, 50, 60, density)
            assert rank(SparseMatrix.from_dense(rows, P), F) == gauss_rank(rows, P)

    def test_sparse_path_on_larger_blocks(self):
        # low fill so the Markowitz elimination path is taken
        rng = random.Random(11)
        rows = random_sparse(rng, 220, 260, 0.012)
        for i in range(40):
            rows[i + 100] = [a + 2 * b for a, b in zip(rows[i], rows[i + 50])]
        assert rank(SparseMatrix.from_dense(rows, P), F) == gauss_rank(rows, P)

    def test_dense_path_on_larger_blocks(self):
        rng = random.Random(12)
        rows = random_sparse(rng, 90, 70, 0.3)
        rows[5] = rows[6]
        assert rank(SparseMatrix.from_dense(rows, P), F) == gauss_rank(rows, P)

    @settings(max_examples=60, deadline=None)
    @given(small_matrices)
    def test_permutation_invariance(self, rows):
        M = SparseMatrix.from_dense(rows, P)
        rp = list(range(M.nrows))[::-1]
        cp = list(range(M.ncols))
        random.Random(len(rows)).shuffle(cp)
        assert rank(M.permute(rp, cp), F) == rank(M, F)

    @settings(max_examples=60, deadline=None)
    @given(small_matrices)
    def test_rank_nullity(self, rows):
        M = SparseMatrix.from_dense(rows, P)
        assert rank(M, F) + len(nullspace(M, F)) == M.ncols

    @settings(max_examples=60, deadline=None)
    @given(small_matrices)
    def test_modular_rank_matches_bareiss(self, rows):
        assert rank(SparseMatrix.from_dense(rows, P), F) == bareiss_rank(rows)

    def test_requires_prime_field(self):
        with pytest.raises(FieldError):
            rank(SparseMatrix.identity(2), QQ)


class TestEchelon:
    def test_zero_matrix(self):
        assert echelonize(SparseMatrix.zeros(3, 4), F).pivots == ()

    def test_identity(self):
        assert echelonize(SparseMatrix.identity(5), F).pivots == tuple(range(5))

    def test_hand_elimination(self):
        E = echelonize(SparseMatrix.from_dense([[1, 1, 0], [0, 1, 1]], P), F)
        assert E.pivots == (0, 1)
        assert E.rows[0] == {0: 1, 2: P - 1}
        assert E.rows[1] == {1: 1, 2: 1}

    @settings(max_examples=60, deadline=None)
    @given(small_matrices)
    def test_reduced_form_invariants(self, rows):
        M = SparseMatrix.from_dense(rows, P)
        E = echelonize(M, F)
        assert list(E.pivots) == sorted(set(E.pivots))
        for c, row in zip(E.pivots, E.rows):
            assert row[c] == 1
            assert min(row) == c
            for c2, row2 in zip(E.pivots, E.rows):
                if row2 is not row:
                    assert c not in row2
        # same row space: stacking does not raise the rank
        stacked = [[row.get(j, 0) for j in range(M.ncols)] for row in E.rows] + [[x % P for x in r] for r in rows]
        assert gauss_rank(stacked, P) == len(E.pivots)

    def test_smallest_column_rule_on_larger_block(self):
        rng = random.Random(5)
        rows = random_sparse(rng, 80, 90, 0.1)
        E = echelonize(SparseMatrix.from_dense(rows, P), F)
        # reduced echelon form is unique: compare with a python rref
        A = [[x % P for x in r] for r in rows]
        pivots, r = [], 0
        for c in range(90):
            piv = next((i for i in range(r, 80) if A[i][c]), None)
            if piv is None:
                continue
            A[r], A[piv] = A[piv], A[r]
            inv = pow(A[r][c], -1, P)
            A[r] = [x * inv % P for x in A[r]]
            for i in range(80):
                if i != r and A[i][c]:
                    f = A[i][c]
                    A[i] = [(x - f * y) % P for x, y in zip(A[i], A[r])]
            pivots.append(c)
            r += 1
        assert list(E.pivots) == pivots
        for i, row in enumerate(E.rows):
            assert row == {j: v for j, v in enumerate(A[i]) if v}


class TestNullspace:
    def test_identity(self):
        assert nullspace(SparseMatrix.identity(4), F) == []

    def test_single_row(self):
        (v,) = nullspace(SparseMatrix.from_dense([[1, 1]], P), F)
        assert (v[0] + v[1]) % P == 0 and v[0]

    def test_vectors_are_in_kernel(self):
        rng = random.Random(8)
        for density in (0.05, 0.3):
            rows = random_sparse(rng, 40, 70, density)
            M = SparseMatrix.from_dense(rows, P)
            basis = nullspace(M, F)
            assert len(basis) == 70 - rank(M, F)
            for v in basis:
                assert apply(M, v, F) == {}


class TestMultiPrime:
    def test_bad_prime_flagged(self):
        q = 2000003
        res = multi_prime_rank(lambda K: SparseMatrix.from_dense([[1, 0], [0, P]], K.modulus), [P, q])
        assert res.per_prime == {P: 1, q: 2}
        assert not res.agree and res.rank == 2
        with pytest.raises(PrimeDisagreement):
            multi_prime_rank(lambda K: SparseMatrix.from_dense([[1, 0], [0, P]], K.modulus), [P, q], strict=True)

    def test_identity_agrees(self):
        res = multi_prime_rank(lambda K: SparseMatrix.identity(6), [P, 2000003])
        assert res.agree and res.rank == 6

    def test_consensus_equals_exact_rank(self):
        rng = random.Random(21)
        primes = [P, 2000003, 3000017]
        for _ in range(10):
            rows = random_sparse(rng, 12, 15, 0.4, -20, 20)
            rows[3] = [a - b for a, b in zip(rows[1], rows[2])]
            res = multi_prime_rank(lambda K: SparseMatrix.from_dense(rows, K.modulus), primes)
            assert res.agree
            assert res.rank == bareiss_rank(rows) == exact_rank(SparseMatrix.from_dense(rows))

    def test_distinct_primes_required(self):
        with pytest.raises(FieldError):
            multi_prime_rank(lambda K: SparseMatrix.identity(2), [P, P])


class TestExactAndProducts:
    def test_exact_rank_bound(self):
        with pytest.raises(FieldError):
            exact_rank(SparseMatrix.from_dense([[1] * 5] * 5), bound=3)
        # the bound applies per connected block
        assert exact_rank(SparseMatrix.identity(5), bound=3) == 5

    def test_matmul_against_dense(self):
        rng = random.Random(4)
        A = random_sparse(rng, 30, 20, 0.3, 0, P - 1)
        B = random_sparse(rng, 20, 25, 0.3, 0, P - 1)
        got = matmul(SparseMatrix.from_dense(A, P), SparseMatrix.from_dense(B, P), F).to_dense()
        want = [[sum(A[i][k] * B[k][j] for k in range(20)) % P for j in range(25)] for i in range(30)]
        assert got == want

    def test_is_zero(self):
        assert is_zero(SparseMatrix.zeros(3, 3))
        assert not is_zero(SparseMatrix.identity(1))

    def test_no_stored_zeros(self):
        M = SparseMatrix.from_dense([[0, P], [2, 0]], P)
        assert M.nnz == 1
