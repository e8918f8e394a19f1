"""Random exact group elements and germs shared by the test modules."""
from fractions import Fraction

import numpy as np

from corank1 import _linalg as la
from corank1.classify import NORMAL_FORM_TEXT, OrbitLabel
from corank1.germcore import JetCoefficients, MapGerm, parse_germ
from corank1.poly import Poly

X, Y, Z = (Poly.var(i) for i in range(3))
QUAD = [X * X, X * Y, Y * Y, Z * Z, X * Z, Y * Z]

ORBIT_GERMS = {label: parse_germ(text) for label, text in NORMAL_FORM_TEXT.items()}


def rint(rng, lo=-3, hi=3):
    return Fraction(int(rng.integers(lo, hi + 1)))


def random_invertible(rng, n, lo=-2, hi=2):
    while True:
        m = tuple(tuple(rint(rng, lo, hi) for _ in range(n)) for _ in range(n))
        if la.det(m) != 0:
            return m


def random_kernel_source(rng, quadratic=True):
    """Images of x, y, z under a source 2-jet whose linear part keeps the z axis."""
    A = random_invertible(rng, 2)
    k = rint(rng, 1, 3) * (1 if rng.random() < 0.5 else -1)
    v = (rint(rng), rint(rng))
    lin = [Poly.linear((A[0][0], A[0][1], 0)), Poly.linear((A[1][0], A[1][1], 0)),
           Poly.linear((v[0], v[1], k))]
    if quadratic:
        lin = [p + sum((q * rint(rng, -1, 1) for q in QUAD), Poly()) for p in lin]
    return lin


def apply_a2(g: MapGerm, images, T, quad=None) -> MapGerm:
    """Target 2-jet (T plus quadratic terms ``quad``) after the source substitution."""
    pulled = [c.substitute(images).truncate(2) for c in g.components]
    out = []
    for i in range(5):
        comp = sum((pulled[j] * T[i][j] for j in range(5)), Poly())
        if quad is not None:
            for (j, k), c in quad[i].items():
                comp = comp + (pulled[j] * pulled[k]).truncate(2) * c
        out.append(comp.truncate(2))
    return MapGerm(tuple(out))


def random_a2(rng, g: MapGerm, quadratic=True) -> MapGerm:
    images = random_kernel_source(rng, quadratic)
    T = random_invertible(rng, 5, -1, 1)
    quad = None
    if quadratic:
        quad = [{(int(rng.integers(5)), int(rng.integers(5))): rint(rng, -1, 1)} for _ in range(5)]
    return apply_a2(g, images, T, quad)


def random_rank_alpha(rng, r, lo=-3, hi=3):
    """3x3 integer matrix of rank r with entries in [lo, hi]."""
    while True:
        rows = [tuple(rint(rng, lo, hi) for _ in range(3)) for _ in range(r)]
        if la.rank(rows) == r:
            break
    while len(rows) < 3:
        if r and rng.random() < 0.5:
            src = rows[int(rng.integers(r))]
            rows.append(tuple(-v for v in src) if rng.random() < 0.5 else src)
        else:
            rows.append((Fraction(0),) * 3)
    order = rng.permutation(3)
    return [rows[i] for i in order]


def special_jet(alpha) -> JetCoefficients:
    return JetCoefficients.from_rows([(0, 0, 0) + tuple(r) for r in alpha])


def random_jet(rng, planar=True, lo=-3, hi=3) -> JetCoefficients:
    r = int(rng.integers(0, 4))
    alpha = random_rank_alpha(rng, r, lo, hi)
    rows = []
    for a in alpha:
        pl = tuple(rint(rng, lo, hi) for _ in range(3)) if planar else (0, 0, 0)
        rows.append(pl + tuple(a))
    return JetCoefficients.from_rows(rows)


def random_regular_rows(rng):
    return np.round(rng.normal(size=(3, 6)), 6)
