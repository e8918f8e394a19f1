from fractions import Fraction

import numpy as np
import pytest

from corank1 import _linalg as la
from corank1.germcore import (
    ConstantTermError,
    GermArityError,
    GermSyntaxError,
    NotCorankOne,
    corank_at_origin,
    first_form_coefficients,
    germ,
    jet_of,
    parse_germ,
    prepare,
    second_form_matrix,
)
from corank1.poly import Poly

CROSSCAP = "(x, y, x*z, y*z, z^2)"


class TestParsing:
    def test_arity(self):
        with pytest.raises(GermArityError):
            parse_germ("(x, y, z)")

    def test_syntax(self):
        with pytest.raises(GermSyntaxError):
            parse_germ("(x, y, x*z, y*z, z^)")

    def test_constant_term(self):
        with pytest.raises(ConstantTermError):
            parse_germ("(x, y, 1 + z^2, 0, 0)")

    def test_germ_builder(self):
        assert germ("x", "y", "x*z", "y*z", "z^2") == parse_germ(CROSSCAP)


class TestCorank:
    @pytest.mark.parametrize("text,cr", [
        (CROSSCAP, 1),
        ("(x, y, z, 0, 0)", 0),
        ("(x, x^2, y*z, 0, 0)", 2),
    ])
    def test_values(self, text, cr):
        assert corank_at_origin(parse_germ(text)) == cr

    def test_prepare_rejects(self):
        with pytest.raises(NotCorankOne):
            prepare(parse_germ("(x, y, z, 0, 0)"))


class TestPrepare:
    def test_already_prepared(self):
        p = prepare(parse_germ(CROSSCAP))
        assert p.components == parse_germ(CROSSCAP).components

    def test_mixed_linear_part(self):
        g = parse_germ("(x + z, y, x*z, y*z + x + z, z^2)")
        p = prepare(g, metric=False)
        x, y = Poly.var(0), Poly.var(1)
        assert p.components[:2] == (x, y)
        assert all(c.min_degree >= 2 or c.is_zero() for c in p.normal)

    def test_metric_frame_orthonormal(self):
        p = prepare(parse_germ("(x + y, y, z^2, x*z, 2*y)"))
        T = la.to_numpy(p.target_change)
        assert np.allclose(T @ T.T, np.eye(5))

    def test_reconstruct_two_jet(self):
        g = parse_germ("(x + z, y, x*z, y*z, z^2 + 2*y - x*y)")
        p = prepare(g, metric=False)
        back = p.reconstruct()
        for a, b in zip(back.components, g.components):
            assert (a - b).truncate(2).is_zero()

    def test_first_form(self):
        ff = first_form_coefficients(parse_germ(CROSSCAP))
        assert (ff.E, ff.F, ff.G) == (1, 0, 1)


class TestJet:
    def test_crosscap_rows(self):
        j = jet_of(parse_germ(CROSSCAP))
        assert j.alpha == ((0, 1, 0), (0, 0, 1), (1, 0, 0))
        assert j.D == 1
        assert j.get("c21") == 1

    def test_second_form_doubles_squares(self):
        m = second_form_matrix(parse_germ("(x, y, x^2 + z^2, 0, 0)"))
        assert m.rows[0] == (2, 0, 0, 2, 0, 0)

    def test_exact(self):
        assert jet_of(parse_germ("(x, y, 1/3*x*z, y*z, z^2)")).get("a22") == Fraction(1, 3)
