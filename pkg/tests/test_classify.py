import numpy as np
import pytest

from corank1.classify import (
    CASE_OF_ORBIT,
    CASE_ONES,
    CASE_ZEROS,
    NotSpecialClass,
    OrbitLabel,
    TopologicalType,
    classify_orbit,
    is_non_degenerate,
    is_special_class,
    locus_type_exact,
    orbit_type,
    reduce_isometric_prenormal,
    transform_rows,
)
from corank1.germcore import JetCoefficients, NotCorankOne, jet2_coefficients, jet_of, parse_germ
from corank1.isometry import random_orthogonal, transform_germ

from helpers import ORBIT_GERMS, random_a2, random_jet


class TestOrbit:
    def test_normal_forms_fixed(self):
        for label, g in ORBIT_GERMS.items():
            assert classify_orbit(g) is label

    def test_planar_terms_ignored(self):
        g = parse_germ("(x, y, z^2 + x^2 + 3*x*y, x*z - y^2, 0)")
        assert classify_orbit(g) is OrbitLabel.Z2_XZ

    def test_non_degenerate_iff_full_rank(self):
        assert is_non_degenerate(jet_of(ORBIT_GERMS[OrbitLabel.XZ_YZ_Z2]))
        assert not is_non_degenerate(jet_of(ORBIT_GERMS[OrbitLabel.Z2_XZ]))

    def test_float_jet(self):
        rng = np.random.default_rng(1)
        g = transform_germ(ORBIT_GERMS[OrbitLabel.XZ_YZ_Z2], np.eye(3), random_orthogonal(rng, 5))
        assert classify_orbit(g) is OrbitLabel.XZ_YZ_Z2


class TestTypes:
    @pytest.mark.parametrize("label", list(OrbitLabel))
    def test_orbit_type_on_normal_form(self, label):
        assert locus_type_exact(jet_of(ORBIT_GERMS[label])) is orbit_type(label)

    def test_dimensions(self):
        dims = [t.dimension for t in TopologicalType]
        assert sorted(dims) == [0, 1, 1, 2, 2, 3]

    def test_not_special(self):
        j = jet_of(parse_germ("(x, y, x^2 + x*z, y*z, z^2)"))
        assert not is_special_class(j)
        with pytest.raises(NotSpecialClass):
            locus_type_exact(j)


class TestPrenormal:
    @pytest.mark.parametrize("label", list(OrbitLabel))
    def test_prescribed_entries(self, label):
        rng = np.random.default_rng(5)
        for _ in range(5):
            g = random_a2(rng, ORBIT_GERMS[label])
            p = reduce_isometric_prenormal(g)
            case = CASE_OF_ORBIT[label]
            assert p.case == case
            assert p.max_suppressed < 1e-8
            for r, c in CASE_ZEROS[case]:
                assert p.rows[r][c] == 0
            for r, c in CASE_ONES[case]:
                assert p.rows[r][c] == 1

    def test_change_reproduces_rows(self):
        rng = np.random.default_rng(6)
        g = random_a2(rng, ORBIT_GERMS[OrbitLabel.XZ_YZ_Z2])
        p = reduce_isometric_prenormal(g)
        rows = np.array(jet2_coefficients(p.prepared).rows, dtype=float)
        out = transform_rows(rows, p.source_change, p.normal_change)
        assert np.allclose(out, np.array(p.rows), atol=1e-8)
        assert np.allclose(p.normal_change @ p.normal_change.T, np.eye(3))

    def test_canonical_signs(self):
        p = reduce_isometric_prenormal(parse_germ("(x, y, x*z + y*z, 2*y*z + x^2, z^2 - x*z)"))
        assert p.coefficient("b6") > 0
        assert p.coefficient("c4") > 0
        assert abs(p.coefficient("a6")) < 1e-12

    def test_rejects_corank_zero(self):
        with pytest.raises(NotCorankOne):
            reduce_isometric_prenormal(parse_germ("(x, y, z, 0, 0)"))

    def test_case_a_tuple_guard(self):
        p = reduce_isometric_prenormal(ORBIT_GERMS[OrbitLabel.ZERO])
        with pytest.raises(ValueError):
            p.case_a_tuple()


class TestRandomJets:
    def test_orbit_depends_on_alpha_only(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            j = random_jet(rng)
            special = JetCoefficients.from_rows([(0, 0, 0) + tuple(r) for r in j.alpha])
            assert classify_orbit(j) is classify_orbit(special)
