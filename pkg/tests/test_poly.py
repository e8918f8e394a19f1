from fractions import Fraction

import numpy as np
import pytest

from corank1 import _linalg as la
from corank1.poly import Poly, monomials_up_to, parse_poly, parse_tuple

x, y, z = (Poly.var(i) for i in range(3))


class TestParse:
    def test_basic(self):
        assert parse_poly("x*z + y^2") == x * z + y * y

    def test_fraction_coefficient(self):
        p = parse_poly("1/2*x*z - 3*y")
        assert p.coeff((1, 0, 1)) == Fraction(1, 2)
        assert p.coeff((0, 1, 0)) == -3

    def test_unicode_superscript_and_minus(self):
        assert parse_poly("z² − x") == z * z - x

    def test_implicit_power_of_sum(self):
        assert parse_poly("(x + y)^2") == x * x + x * y * 2 + y * y

    def test_tuple(self):
        comps = parse_tuple("(x, y, x*z, y*z, z^2)")
        assert len(comps) == 5
        assert comps[4] == z * z

    @pytest.mark.parametrize("bad", ["x +", "(x, y", "x ** ", "w"])
    def test_syntax_errors(self, bad):
        with pytest.raises(ValueError):
            parse_tuple(bad) if bad.startswith("(") else parse_poly(bad)


class TestArithmetic:
    def test_zero_terms_dropped(self):
        assert (x - x).is_zero()
        assert Poly({(1, 0, 0): 0}).terms == {}

    def test_substitute(self):
        p = x * z
        q = p.substitute([x + y, y, z * 2])
        assert q == x * z * 2 + y * z * 2

    def test_truncate_and_drop(self):
        p = x + x * x + x * x * x
        assert p.truncate(2) == x + x * x
        assert p.drop_below(2) == x * x + x * x * x

    def test_diff(self):
        assert (x * x * z).diff(0) == x * z * 2

    def test_eval_exact(self):
        assert (x * y + z)(Fraction(1, 2), 2, 3) == 4

    def test_float_coefficients_snap(self):
        p = Poly({(1, 0, 0): 1.0, (0, 1, 0): 1e-17})
        assert p.snap(1e-15) == Poly({(1, 0, 0): 1.0})

    def test_monomial_count(self):
        assert len(monomials_up_to(2)) == 10
        assert len(monomials_up_to(4)) == 35

    def test_format_round_trip(self):
        p = x * z * Fraction(-1, 2) + y * y * 3
        assert parse_poly(p.format()) == p


class TestLinalg:
    def test_rank_and_det(self):
        m = la.as_matrix([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
        assert la.rank(m) == 2
        assert la.det(m) == 0

    def test_inverse_exact(self):
        m = la.as_matrix([[2, 1], [1, 1]])
        assert la.matmul(m, la.inverse(m)) == la.identity(2)

    def test_nullspace(self):
        m = la.as_matrix([[1, 1, 0], [0, 0, 1]])
        (v,) = la.nullspace(m)
        assert la.matvec(m, v) == (0, 0)

    def test_rref_pivots(self):
        _, piv = la.rref([[0, 1, 2], [0, 2, 4], [1, 0, 0]])
        assert piv == [0, 1]

    def test_exact_sqrt(self):
        assert la.exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)

    def test_matches_numpy(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            m = rng.integers(-4, 5, size=(4, 4))
            exact = la.det(la.as_matrix(m.tolist()))
            assert float(exact) == pytest.approx(np.linalg.det(m), abs=1e-8)
