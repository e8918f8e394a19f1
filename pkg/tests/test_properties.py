"""Property-based checks over random exact jets."""
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from corank1 import locus as lo
from corank1.classify import apply_witness, classify_orbit, reduce_to_orbit_normal_form
from corank1.germcore import JetCoefficients, eval_second_form, jet_of
from corank1.poly import parse_poly

small = st.integers(-4, 4).map(Fraction)
rows6 = st.lists(st.lists(small, min_size=6, max_size=6), min_size=3, max_size=3)
rational = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@settings(max_examples=60, deadline=None)
@given(rows6)
def test_witness_round_trip(rows):
    j = JetCoefficients.from_rows(rows)
    w = reduce_to_orbit_normal_form(j)
    assert apply_witness(j, w) == w.resulting_jet
    assert classify_orbit(w.resulting_jet) is classify_orbit(j)


@settings(max_examples=60, deadline=None)
@given(rows6)
def test_format_parse_round_trip(rows):
    g = JetCoefficients.from_rows(rows).germ()
    assert jet_of(g) == JetCoefficients.from_rows(rows)
    for c in g.components:
        assert parse_poly(c.format()) == c


@settings(max_examples=40, deadline=None)
@given(rows6, rational, rational)
def test_blowup_exact(rows, t, c):
    g = JetCoefficients.from_rows(rows).germ()
    assert lo.blowup_residual_exact(g, [t], [c]) == 0


@settings(max_examples=40, deadline=None)
@given(rows6, rational, rational)
def test_locus_even(rows, t, c):
    # the locus point depends only on the line through (a, b, c)
    m = lo.coefficient_rows(JetCoefficients.from_rows(rows).germ())
    a, b = lo.circle_point(t)
    assert eval_second_form(m, (a, b, c)) == eval_second_form(m, (-a, -b, -c))


@settings(max_examples=30, deadline=None)
@given(rows6)
def test_hull_bounded_by_rank(rows):
    g = JetCoefficients.from_rows(rows).germ()
    dim = lo.affine_hull_of_locus(g).dimension
    assert dim <= 3
    assert dim <= lo.point_type(g)[0]


@settings(max_examples=30, deadline=None)
@given(rows6)
def test_float_formula_matches_exact(rows):
    g = JetCoefficients.from_rows(rows).germ()
    coeffs = lo.regular_locus_coefficients(lo.lift_to_regular(g))
    theta, phi = np.array([0.3, 2.0]), np.array([1.1, 0.4])
    got = lo.eval_regular_locus(coeffs, theta, phi)
    M = np.array(lo.coefficient_rows(g), dtype=float)
    assert np.allclose(got, lo.sphere_monomials(theta, phi) @ M.T, atol=1e-10)
