import random
from fractions import Fraction

import pytest

from olnum.errors import DomainError, FieldMismatchError, ParseError
from olnum.field import (
    ComplexQuad,
    RationalInterval,
    RealQuad,
    cq_arith,
    eval_radical,
    rq_arith,
    rq_sign,
    sqrt_interval,
)

PHI = RealQuad(1, 1, 2, 5)          # golden mean
BETA = RealQuad(3, 1, 2, 5)         # its square


class TestRealQuad:
    def test_normalization(self):
        x = RealQuad(2, 4, 6, 5)
        assert (x.a, x.b, x.q, x.d) == (1, 2, 3, 5)
        assert RealQuad(3, 2, 1, 1) == RealQuad(5)     # sqrt(1) folds
        assert RealQuad(3, 7, 1, 0) == RealQuad(3)     # sqrt(0) drops
        assert RealQuad(1, 0, -2).q == 2 and RealQuad(1, 0, -2).a == -1
        assert RealQuad(4, 0, 2, 5).d == 0             # rational canonicalizes d

    def test_squarefree_validation(self):
        with pytest.raises(DomainError):
            RealQuad(1, 1, 1, 12)

    def test_mul_golden_mean_square(self):
        assert PHI * PHI == BETA

    def test_add_identity(self):
        x = RealQuad(7, -3, 4, 5)
        assert x + RealQuad(0) == x

    def test_minimal_polynomial(self):
        # beta + 1/beta = 3 from t^2 - 3t + 1
        assert rq_arith("add", rq_arith("sub", BETA, RealQuad(3)), rq_arith("div", RealQuad(1), BETA)) == RealQuad(0)

    def test_sign_cases(self):
        assert rq_sign(RealQuad(0)) == 0
        assert rq_sign(RealQuad(3, -1, 1, 5)) == 1
        assert rq_sign(RealQuad(2, -1, 1, 5)) == -1
        assert rq_sign(RealQuad(-3, 1, 1, 5)) == -1
        assert rq_sign(RealQuad(-2, 1, 1, 5)) == 1

    def test_sign_agrees_with_high_precision(self):
        import mpmath

        mpmath.mp.dps = 60
        s5 = mpmath.sqrt(5)
        rng = random.Random(42)
        for _ in range(10_000):
            a = rng.randint(-50, 50)
            b = rng.randint(-50, 50)
            q = rng.randint(1, 20)
            x = RealQuad(a, b, q, 5)
            approx = (a + b * s5) / q
            expected = 0 if abs(approx) < mpmath.mpf("1e-40") else (1 if approx > 0 else -1)
            assert x.sign() == expected

    def test_mul_div_roundtrip(self):
        rng = random.Random(1)
        for _ in range(300):
            x = RealQuad(rng.randint(-30, 30), rng.randint(-30, 30), rng.randint(1, 9), 5)
            y = RealQuad(rng.randint(-30, 30), rng.randint(-30, 30), rng.randint(1, 9), 5)
            if y.is_zero():
                continue
            assert rq_arith("div", rq_arith("mul", x, y), y) == x

    def test_field_mismatch(self):
        with pytest.raises(FieldMismatchError):
            RealQuad(1, 1, 1, 5) + RealQuad(1, 1, 1, 3)

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            RealQuad(1) / RealQuad(0)

    def test_comparisons(self):
        assert RealQuad(1, 1, 2, 5) < RealQuad(2)
        assert RealQuad(0, 1, 1, 5) > 2
        assert abs(RealQuad(-3, 0, 2)) == RealQuad(3, 0, 2)

    def test_pow(self):
        assert BETA**0 == RealQuad(1)
        assert BETA**3 == BETA * BETA * BETA
        assert BETA**-2 == (BETA * BETA).inverse()

    def test_sqrt_exact(self):
        assert (BETA * BETA).sqrt_exact() == BETA
        assert RealQuad(9, 0, 4).sqrt_exact() == RealQuad(3, 0, 2)
        assert RealQuad(3).sqrt_exact(hint_d=3) == RealQuad(0, 1, 1, 3)
        assert RealQuad(1, 0, 3).sqrt_exact(hint_d=3) == RealQuad(0, 1, 3, 3)
        assert RealQuad(7).sqrt_exact(hint_d=3) is None
        assert RealQuad(-1).sqrt_exact() is None

    def test_to_interval_encloses(self):
        import mpmath

        mpmath.mp.dps = 40
        x = RealQuad(3, -2, 7, 5)
        iv = x.to_interval(Fraction(1, 10**9))
        true = (3 - 2 * mpmath.sqrt(5)) / 7
        assert mpmath.mpf(float(iv.lo)) - 1e-9 <= true <= mpmath.mpf(float(iv.hi)) + 1e-9
        assert iv.width() <= Fraction(1, 10**9)

    def test_json_roundtrip(self):
        x = RealQuad(3, -1, 2, 5)
        assert RealQuad.from_dict(x.to_dict()) == x
        assert RealQuad.from_dict(4) == RealQuad(4)
        assert RealQuad.from_dict("3/7") == RealQuad(3, 0, 7)
        with pytest.raises(ParseError):
            RealQuad.from_dict({"nope": 1})


class TestComplexQuad:
    def test_norm_sq_eisenstein(self):
        # z = -1 + omega = (-3/2, sqrt3/2): |z|^2 = 3
        z = ComplexQuad(RealQuad(-3, 0, 2), RealQuad(0, 1, 2, 3))
        assert cq_arith("norm_sq", z) == RealQuad(3)

    def test_conj(self):
        two_i = ComplexQuad(RealQuad(0), RealQuad(2))
        assert cq_arith("conj", two_i) == ComplexQuad(RealQuad(0), RealQuad(-2))

    def test_mul_i_squared(self):
        two_i = ComplexQuad(RealQuad(0), RealQuad(2))
        assert cq_arith("mul", two_i, two_i) == ComplexQuad.from_int(-4)

    def test_div(self):
        z = ComplexQuad(RealQuad(3), RealQuad(4))
        w = ComplexQuad(RealQuad(1), RealQuad(-2))
        assert (z / w) * w == z

    def test_abs_interval(self):
        z = ComplexQuad(RealQuad(3), RealQuad(4))
        iv = z.abs_interval(Fraction(1, 10**6))
        assert iv.contains(Fraction(5))


class TestRationalInterval:
    def test_order_validation(self):
        with pytest.raises(DomainError):
            RationalInterval(Fraction(2), Fraction(1))

    def test_arithmetic(self):
        a = RationalInterval(Fraction(1), Fraction(2))
        b = RationalInterval(Fraction(-1), Fraction(3))
        assert (a + b).lo == 0 and (a + b).hi == 5
        assert (a * b).lo == -2 and (a * b).hi == 6
        assert (a - b).lo == -2 and (a - b).hi == 3

    def test_division_through_zero(self):
        a = RationalInterval(Fraction(1), Fraction(2))
        with pytest.raises(DomainError):
            a / RationalInterval(Fraction(-1), Fraction(1))

    def test_sqrt_perfect_square_is_point(self):
        iv = sqrt_interval(Fraction(9, 4), Fraction(1, 10**6))
        assert iv.lo == iv.hi == Fraction(3, 2)

    def test_sqrt_encloses(self):
        iv = sqrt_interval(2, Fraction(1, 10**8))
        assert iv.lo * iv.lo <= 2 <= iv.hi * iv.hi
        assert iv.width() <= Fraction(1, 10**8)


class TestEvalRadical:
    def test_rational_passthrough(self):
        iv = eval_radical("1/12", Fraction(1, 10**6))
        assert iv.lo == iv.hi == Fraction(1, 12)

    def test_eisenstein_dmin_constant(self):
        # oracle (mpmath, 40 digits): 0.3227627305809679863653683808504014284818
        iv = eval_radical("sqrt(3)*(6-sqrt(7))/18", Fraction(1, 10**4))
        assert iv.width() <= Fraction(1, 10**4)
        assert iv.contains(Fraction("0.32276273058096798636"))

    def test_knuth_k_constant(self):
        # oracle (mpmath, 40 digits): 1.342560663732730229809204362978650633145
        iv = eval_radical("sqrt(146)/9", Fraction(1, 10**4))
        assert iv.contains(Fraction("1.3425606637327302298"))

    def test_nesting(self):
        coarse = eval_radical("sqrt(2)+sqrt(3)", Fraction(1, 100))
        fine = eval_radical("sqrt(2)+sqrt(3)", Fraction(1, 10**8))
        assert coarse.contains_interval(fine)

    def test_contains_value_at_higher_precision(self):
        for expr in ("sqrt(7)/2", "(6-sqrt(7))/18", "sqrt(2)*sqrt(3)-sqrt(5)"):
            coarse = eval_radical(expr, Fraction(1, 10**3))
            fine = eval_radical(expr, Fraction(1, 10**12))
            assert coarse.lo <= fine.midpoint() <= coarse.hi

    def test_division_by_zero_interval(self):
        with pytest.raises(DomainError):
            eval_radical("1/(sqrt(2)-sqrt(2))", Fraction(1, 100))

    def test_parse_errors(self):
        with pytest.raises(ParseError):
            eval_radical("sqrt(", Fraction(1, 100))
        with pytest.raises(ParseError):
            eval_radical("2 $ 3", Fraction(1, 100))
