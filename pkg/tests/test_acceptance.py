from fractions import Fraction

import numpy as np
import pytest

from corank1 import isometry as iso
from corank1 import locus as lo
from corank1 import nets
from corank1.classify import (
    OrbitLabel,
    TopologicalType,
    apply_witness,
    classify_orbit,
    locus_type_exact,
    reduce_to_orbit_normal_form,
)
from corank1.germcore import JET_MONOMIALS, eval_second_form, jet_of, parse_germ
from corank1.poly import Poly

from helpers import ORBIT_GERMS, random_a2, random_jet, random_rank_alpha, special_jet

CROSSCAP = "(x, y, x*z, y*z, z^2)"

EXAMPLE_GERMS = [
    (CROSSCAP, OrbitLabel.XZ_YZ_Z2),
    ("(x, y, z^2, x*z, 0)", OrbitLabel.Z2_XZ),
    ("(x, y, x*z, y*z, 0)", OrbitLabel.XZ_YZ),
    ("(x, y, z^2, 0, 0)", OrbitLabel.Z2),
    ("(x, y, x*z, 0, 0)", OrbitLabel.XZ),
    ("(x, y, 0, 0, 0)", OrbitLabel.ZERO),
]

LIFT_GERMS = [
    CROSSCAP,
    "(x, y, x^2 + y*z, y^2 + x*z, z^2 + x*y)",
    "(x, y, x^2 - 1/2*y*z, y^2 - 1/2*x*z, z^2 - 1/2*x*y)",
    "(x, y, 3*z^2, x*y + 1/2*x*z, y*z)",
    "(x, y, 3*z^2, x^2 + x*z + 1/2*z^2, y*z)",
]


@pytest.mark.criterion(1)
@pytest.mark.parametrize("text,orbit", EXAMPLE_GERMS)
def test_worked_germs_classify(text, orbit):
    assert classify_orbit(parse_germ(text)) is orbit


@pytest.mark.criterion(2)
@pytest.mark.parametrize("orbit", list(OrbitLabel))
def test_orbit_invariant_under_a2(orbit):
    rng = np.random.default_rng(100 + list(OrbitLabel).index(orbit))
    g = ORBIT_GERMS[orbit]
    for k in range(200):
        h = random_a2(rng, g, quadratic=k % 2 == 0)
        assert classify_orbit(h) is orbit, h.format()


@pytest.mark.criterion(3)
@pytest.mark.parametrize("orbit", list(OrbitLabel))
def test_reduction_witness_verifies(orbit):
    rng = np.random.default_rng(300 + list(OrbitLabel).index(orbit))
    g = ORBIT_GERMS[orbit]
    target = jet_of(g)
    for _ in range(50):
        j = jet_of(random_a2(rng, g))
        w = reduce_to_orbit_normal_form(j)
        assert w.orbit is orbit
        assert w.resulting_jet == target
        assert apply_witness(j, w) == target


@pytest.mark.criterion(4)
def test_special_class_type_and_hull():
    rng = np.random.default_rng(4)
    one_sided = {TopologicalType.PlanarRegion: True, TopologicalType.HalfLine: True,
                 TopologicalType.Plane: False, TopologicalType.Line: False}
    seen = set()
    for k in range(500):
        alpha = random_rank_alpha(rng, k % 4)
        j = special_jet(alpha)
        t = locus_type_exact(j)
        seen.add(t)
        g = j.germ()
        assert t.dimension == lo.affine_hull_of_locus(g).dimension, alpha
        if t in one_sided:
            assert lo.one_sided_direction_exists(g) is one_sided[t], alpha
    assert len(seen) == 6


@pytest.mark.criterion(5)
def test_paraboloid_relation_fails():
    g = parse_germ("(x, y, x*z + y^2, y*z, z^2)")
    assert classify_orbit(g) is OrbitLabel.XZ_YZ_Z2
    rows = lo.coefficient_rows(g)
    w, u, v = eval_second_form(rows, (0, 1, 0))
    assert (w, u, v) == (2, 0, 0)
    assert w * w + u * u - 2 * v == 4
    # the crosscap satisfies it everywhere on exact samples
    ps = lo.default_rational_params(8)
    for w, u, v in lo.sample_singular_exact(parse_germ(CROSSCAP), ps, ps):
        assert w * w + u * u - 2 * v == 0


@pytest.mark.criterion(6)
def test_z2_xz_with_solid_hull():
    g = parse_germ("(x, y, x^2 + z^2, x*y + x*z, y^2)")
    assert classify_orbit(g) is OrbitLabel.Z2_XZ
    assert lo.affine_hull_of_locus(g).dimension == 3


def _regular(rows):
    return lo.RegularGerm((Poly.var(0), Poly.var(1), Poly.var(2))
                          + tuple(Poly(dict(zip(JET_MONOMIALS, r))) for r in rows))


@pytest.mark.criterion(7)
def test_regular_formula_matches_second_form():
    rng = np.random.default_rng(7)
    theta = rng.uniform(0, 2 * np.pi, 10_000)
    phi = rng.uniform(0, np.pi, 10_000)
    u = np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])
    mono = np.column_stack([u[:, 0] ** 2, 2 * u[:, 0] * u[:, 1], u[:, 1] ** 2,
                            u[:, 2] ** 2, 2 * u[:, 0] * u[:, 2], 2 * u[:, 1] * u[:, 2]])
    ps = lo.default_rational_params(5)
    for _ in range(20):
        rows = [[Fraction(int(v)) for v in rng.integers(-5, 6, size=6)] for _ in range(3)]
        g = _regular(rows)
        coeffs = lo.regular_locus_coefficients(g)
        direct = mono @ np.array(lo.coefficient_rows(g), dtype=float).T
        assert np.abs(lo.eval_regular_locus(coeffs, theta, phi) - direct).max() <= 1e-10
        for s in ps:
            for t in ps:
                p = lo.sphere_point(s, t)
                assert lo.eval_regular_locus_uvw(coeffs, *p) == eval_second_form(lo.coefficient_rows(g), p)


@pytest.mark.criterion(8)
@pytest.mark.parametrize("text", LIFT_GERMS)
def test_blowup_identity_examples(text):
    g = parse_germ(text)
    assert lo.blowup_residual(g, lo.GridSpec(180, 90, domain="sphere")) <= 1e-9
    ts = lo.default_rational_params(10)
    assert lo.blowup_residual_exact(g, ts, ts) == 0


@pytest.mark.criterion(8)
def test_blowup_identity_random():
    rng = np.random.default_rng(8)
    spec = lo.GridSpec(180, 90, domain="sphere")
    ts = lo.default_rational_params(6)
    for _ in range(50):
        g = random_jet(rng).germ()
        assert lo.blowup_residual(g, spec) <= 1e-9
        assert lo.blowup_residual_exact(g, ts, ts) == 0


@pytest.mark.criterion(9)
def test_lifted_crosscap_ellipsoid():
    lift = lo.lift_to_regular(parse_germ(CROSSCAP))
    ps = lo.default_rational_params(15)
    pts = lo.sample_regular_exact(lift, ps, ps)[:200]
    assert len(pts) == 200
    for w, u, v in pts:
        assert w * w + u * u + (v - 1) ** 2 == 1


@pytest.mark.criterion(10)
def test_normal_form_discriminants():
    checks = nets.audit_table3()
    assert len(checks) == len(nets.table3_labels())
    for c in checks:
        assert c.matches, c.label
    swapped = sorted(c.label for c in checks if c.swapped)
    assert swapped == ["E_a*", "E_b*"]


@pytest.mark.criterion(11)
@pytest.mark.parametrize("c,g", [(1, 0), (-1, 1), (2, Fraction(1, 2)), (-20, 1)])
def test_family3_discriminant(c, g):
    a = nets.audit_family3(c, g)
    assert a.has_mu2nu
    assert a.corrected_scalar is not None
    assert a.printed_scalar is None
    assert (0, 2, 1) in a.only_in_determinant
    assert (2, 0, 1) in a.only_in_printed


@pytest.mark.criterion(12)
def test_worked_net_pipeline():
    r = nets.verify_example44()
    assert r.chain_verified
    assert r.fa_error <= 1e-12
    assert r.same_discriminant_shape
    for inv in (r.original, r.reduced):
        assert inv.point_type == "M3"
        assert inv.hull_dimension == 3
        assert inv.degree2_forms >= 0 and inv.degree4_forms >= inv.degree2_forms


@pytest.mark.criterion(13)
def test_sixteen_relations_detected():
    rng = np.random.default_rng(13)
    sols = iso.sixteen_solutions()
    for sol in sols:
        for _ in range(20):
            vals = [int(v) for v in rng.integers(1, 4, size=13) * rng.choice([-1, 1], size=13)]
            gA = iso.case_a_germ(vals)
            gB = iso.case_a_germ(sol.apply(vals))
            v = iso.check_jet_isometry_equivalence(gA, gB)
            assert v.equivalent
            assert sol.index in v.matching_indices
            first = sols[v.witness.index - 1]
            assert first.signs == sol.signs


@pytest.mark.criterion(13)
def test_c4_perturbation_certificate():
    rng = np.random.default_rng(130)
    k = iso.CASE_A_NAMES.index("c4")
    for _ in range(20):
        vals = [int(v) for v in rng.integers(1, 4, size=13) * rng.choice([-1, 1], size=13)]
        bumped = list(vals)
        bumped[k] += 1
        if bumped[k] == 0:
            bumped[k] = 1
        v = iso.check_jet_isometry_equivalence(iso.case_a_germ(vals), iso.case_a_germ(bumped))
        assert not v.equivalent
        assert v.certificate == "c4"


@pytest.mark.criterion(13)
def test_relations_closed():
    assert iso.closed_under_composition()


@pytest.mark.criterion(14)
def test_jet_equivalence_matches_locus_isometries():
    rng = np.random.default_rng(14)
    for k in range(30):
        gA = iso.random_case_a_germ(rng)
        gB = iso.random_equivalent(gA, rng) if k % 2 == 0 else iso.random_case_a_germ(rng)
        verdict = iso.check_jet_isometry_equivalence(gA, gB)
        found = iso.locus_isometries(gA, gB)
        assert verdict.equivalent == bool(found), k
        if k % 2 == 0:
            assert verdict.equivalent
