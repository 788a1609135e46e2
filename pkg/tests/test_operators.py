import random
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symcoh.field_linalg import FieldError, PrimeField, SparseMatrix, matmul, rank
from symcoh.invariants import OPERATOR_CHECKS, dual_euler, random_form, random_poly
from symcoh.operators import (
    OperatorError,
    alpha,
    alpha_star,
    apply,
    beta,
    beta_star,
    compose,
    delta,
    delta_f,
    delta_f_injectivity,
    delta_power,
    delta_rev,
    differential_poly,
    kernel_polys,
    mul,
    operator_matrix,
    renormalize,
    scaled_sum,
    substitute_y_by_x,
)
from symcoh.polyspace import BiDegree, PolyError, SparseBiPoly, basis_of, parse_poly, q_poly, unpack
from symcoh.quotient import q_normal_form

P_ = 1000003
F = PrimeField(P_)


def evaluate(poly, ys, xs, p):
    total = 0
    for key, v in poly.terms.items():
        ey, ex = unpack(key, poly.N)
        t = v
        for e, y in zip(ey, ys):
            t = t * pow(y, e, p) % p
        for e, x in zip(ex, xs):
            t = t * pow(x, e, p) % p
        total += t
    return total % p


class TestExamples:
    def test_basic_kernel_element(self):
        assert apply(delta(2), parse_poly("Y0*X1 - Y1*X0", 2)).is_zero()

    def test_euler_on_fermat(self):
        P = parse_poly("X0^4+X1^4+X2^4+X3^4", 3)
        assert apply(alpha_star(P), q_poly(3)) == P

    def test_delta_power_on_cubic_form(self):
        # R = X0^2 X1, d = 3
        R = parse_poly("X0^2*X1", 2)
        lhs = apply(delta_power(2, 2), substitute_y_by_x(R))
        assert lhs == parse_poly("2*X0^2*Y1 + 4*X0*X1*Y0", 2)
        assert lhs == differential_poly(R).scale(factorial(2))

    def test_shifts(self):
        P = parse_poly("X0^3 + X1^3", 1)
        assert delta_power(1, 3).shift == BiDegree(-3, 3)
        assert delta_rev(1).shift == BiDegree(1, -1)
        assert delta_f([parse_poly("X0^2", 1), parse_poly("X1^2", 1)]).shift == BiDegree(-1, 2)
        assert mul(q_poly(1)).shift == BiDegree(1, 1)
        assert alpha(P).shift == BiDegree(1, 2)
        assert beta(P).shift == BiDegree(0, 3)
        assert alpha_star(P).shift == BiDegree(-1, 2)
        assert beta_star(P).shift == BiDegree(0, 3)
        assert renormalize(1).shift == BiDegree(0, 0)

    def test_applied_bidegree_matches_shift(self):
        rng = random.Random(2)
        P = random_form(rng, 2, 3)
        ops = [delta(2), delta_rev(2), mul(q_poly(2)), alpha(P), beta(P), alpha_star(P), beta_star(P), renormalize(2)]
        for op in ops:
            p = random_poly(rng, 2, 2, 2)
            out = apply(op, p)
            if not out.is_zero():
                assert out.bidegree == p.bidegree + op.shift

    def test_linearity(self):
        rng = random.Random(3)
        P = random_form(rng, 2, 3)
        a, b = random_poly(rng, 2, 2, 1), random_poly(rng, 2, 2, 1)
        for op in (beta_star(P), alpha_star(P), delta(2)):
            assert apply(op, a.add(b.scale(5))) == apply(op, a).add(apply(op, b).scale(5))

    def test_invalid_polynomial(self):
        with pytest.raises(PolyError):
            alpha_star(parse_poly("X0^2 + X1", 2))

    def test_modulus_dividing_denominator(self):
        with pytest.raises(FieldError):
            apply(alpha_star(parse_poly("X0^7", 2)), q_poly(2), PrimeField(7))

    def test_scaled_sum_and_compose(self):
        P = parse_poly("X0^2 - X1^2", 1)
        p = parse_poly("Y0*X1", 1)
        both = scaled_sum([(1, mul(P)), (-1, compose(mul(q_poly(1)), alpha_star(P)))])
        assert apply(both, p) == apply(beta_star(P), p)


class TestMatrices:
    def test_delta_s11_to_s02(self):
        M = operator_matrix(delta(2), (1, 1), (0, 2), F)
        assert M.shape == (6, 9)
        assert rank(M, F) == 6
        assert len(kernel_polys(delta(2), (1, 1), F)) == 3

    def test_mul_q_injective(self):
        M = operator_matrix(mul(q_poly(2)), (0, 2), (1, 3), F)
        assert rank(M, F) == 6

    def test_wrong_target(self):
        with pytest.raises(OperatorError):
            operator_matrix(delta(2), (1, 1), (0, 3), F)

    def test_columns_are_images(self):
        N = 2
        P = parse_poly("X0^3 + 2*X1^3 + X0*X1*X2", N)
        op = beta_star(P)
        src, tgt = BiDegree(1, 1), BiDegree(1, 4)
        M = operator_matrix(op, src, tgt, F)
        tb = basis_of(N, tgt)
        for j, key in enumerate(basis_of(N, src).keys):
            img = apply(op, SparseBiPoly(N, src, {key: 1}), F)
            want = {tb.index[k]: v % P_ for k, v in img.terms.items() if v % P_}
            assert dict(M.column(j)) == want

    def test_renormalize_invertible(self):
        for b in [(2, 1), (1, 3), (3, 0)]:
            M = operator_matrix(renormalize(2), b, b, F)
            assert rank(M, F) == M.nrows == M.ncols

    def test_renormalization_conjugates_dual_euler_to_q(self):
        N = 2
        for m, n in [(1, 1), (2, 0), (2, 2)]:
            src, tgt = BiDegree(m, n), BiDegree(m + 1, n + 1)
            tb = basis_of(N, tgt)
            cols = []
            for key in basis_of(N, src).keys:
                img = dual_euler(SparseBiPoly(N, src, {key: 1}))
                cols.append({tb.index[k]: v % P_ for k, v in img.terms.items() if v % P_})
            dstar = SparseMatrix.from_columns(cols, len(tb), P_)
            lhs = matmul(operator_matrix(renormalize(N), tgt, tgt, F), dstar, F)
            rhs = matmul(operator_matrix(mul(q_poly(N)), src, tgt, F), operator_matrix(renormalize(N), src, src, F), F)
            assert lhs == rhs


class TestIdentities:
    @pytest.mark.parametrize("name", sorted(OPERATOR_CHECKS))
    def test_random_cases(self, name):
        rng = random.Random(sum(map(ord, name)))
        for _ in range(30):
            ok, detail = OPERATOR_CHECKS[name](rng)
            assert ok, detail

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32))
    def test_alpha_star_descends_mod_q(self, seed):
        rng = random.Random(seed)
        N = rng.randint(1, 3)
        P = random_form(rng, N, rng.randint(1, 4))
        A = random_poly(rng, N, rng.randint(0, 2), rng.randint(0, 2))
        diff = apply(alpha_star(P), q_poly(N).multiply(A)).sub(P.multiply(A))
        assert not q_normal_form(N, 1).reduce_terms(dict(diff.terms))

    def test_functional_equation_of_kernel(self):
        rng = random.Random(9)
        N = 2
        for m, n in [(1, 1), (2, 2), (2, 3), (3, 3)]:
            for K in kernel_polys(delta(N), (m, n), F):
                for _ in range(3):
                    ys = [rng.randrange(P_) for _ in range(N + 1)]
                    xs = [rng.randrange(P_) for _ in range(N + 1)]
                    t = rng.randrange(P_)
                    shifted = [(y + t * x) % P_ for y, x in zip(ys, xs)]
                    assert evaluate(K, shifted, xs, P_) == evaluate(K, ys, xs, P_)


class TestInjectivity:
    def test_examples(self):
        P = [parse_poly(f"X{i}^2", 2) for i in range(3)]
        assert delta_f_injectivity(P, 1, 1, F)
        assert not delta_f_injectivity(P, 1, 2, F)

    def test_linear_case_matches_delta(self):
        # f = identity: injective exactly when m > n, the H^0 regime of delta
        for N in (2, 3):
            P = [parse_poly(f"X{i}", N) for i in range(N + 1)]
            for m in range(0, 4):
                for n in range(0, 5):
                    assert delta_f_injectivity(P, m, n, F) == (m > n)

    def test_degree_mismatch(self):
        with pytest.raises(OperatorError):
            delta_f([parse_poly("X0^2", 2), parse_poly("X1^3", 2), parse_poly("X2^2", 2)])

    def test_wrong_count(self):
        with pytest.raises(OperatorError):
            delta_f([parse_poly("X0^2", 2), parse_poly("X1^2", 2)])
