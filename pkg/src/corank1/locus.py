"""Curvature loci: cylinder (singular) and sphere (regular) domains, the
regular-locus coefficient formula, lifts, blow-up comparison, affine hulls,
vanishing-form fitting and mesh export."""
from __future__ import annotations

import hashlib
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import _linalg as la
from .germcore import (
    GermArityError,
    MapGerm,
    PreparedGerm,
    SecondFormMatrix,
    eval_second_form,
    prepare,
    second_form_rows,
)
from .poly import Poly, monomials_up_to

NORMAL_NAMES = ("w", "u'", "v'")


class DegenerateSample(ValueError):
    pass


class EmptyGrid(ValueError):
    pass


# ---------------------------------------------------------------------------
# germs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegularGerm:
    """Monge-form germ (x, y, z, f1, f2, f3) of a regular 3-manifold in R^6."""

    components: tuple[Poly, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != 6:
            raise GermArityError("a regular germ has six components")
        for i in range(3):
            if comps[i] != Poly.var(i):
                raise ValueError("first three components must be x, y, z")
        for f in comps[3:]:
            if f.min_degree in (0, 1):
                raise ValueError("normal components must start in degree 2")

    @property
    def normal(self) -> tuple[Poly, ...]:
        return self.components[3:]

    def format(self) -> str:
        return "(" + ", ".join(c.format() for c in self.components) + ")"


def _prepared(g) -> PreparedGerm:
    if isinstance(g, PreparedGerm):
        return g
    if isinstance(g, MapGerm):
        return prepare(g)
    raise TypeError("expected a MapGerm or PreparedGerm")


def lift_to_regular(g) -> RegularGerm:
    p = _prepared(g)
    return RegularGerm((Poly.var(0), Poly.var(1), Poly.var(2)) + tuple(p.normal))


def coefficient_rows(g) -> la.Matrix:
    """3x6 second-form matrix, columns (xx, xy, yy, zz, xz, yz), for any germ kind."""
    if isinstance(g, SecondFormMatrix):
        return g.rows
    if isinstance(g, RegularGerm):
        return second_form_rows(g.normal)
    return second_form_rows(_prepared(g).normal)


def _float_rows(g) -> np.ndarray:
    return la.to_numpy(coefficient_rows(g))


# ---------------------------------------------------------------------------
# grids and samples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    n_theta: int = 180
    n_second: int = 90
    c_max: float = 10.0
    domain: str = "cylinder"

    def __post_init__(self):
        if self.domain not in ("cylinder", "sphere"):
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.n_theta <= 0 or self.n_second <= 0:
            raise EmptyGrid("grid has no points")
        if self.n_theta < 4:
            raise ValueError("need at least 4 theta samples")
        if self.c_max <= 0:
            raise ValueError("c_max must be positive")

    def thetas(self) -> np.ndarray:
        return np.linspace(0.0, 2 * np.pi, self.n_theta)

    def seconds(self) -> np.ndarray:
        if self.domain == "cylinder":
            return np.linspace(-self.c_max, self.c_max, self.n_second)
        k = np.arange(self.n_second)
        return np.pi * (k + 1) / (self.n_second + 1)

    def describe(self) -> str:
        if self.domain == "cylinder":
            return f"cylinder {self.n_theta}x{self.n_second} c_max={self.c_max:g}"
        return f"sphere {self.n_theta}x{self.n_second}"


@dataclass(frozen=True)
class LocusSample:
    domain: str
    grid: GridSpec
    params: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)
    fingerprint: str = ""
    label: str = ""

    @property
    def shape(self) -> tuple[int, int]:
        return (self.grid.n_theta, self.grid.n_second)


def _fingerprint(rows) -> str:
    txt = ";".join(",".join(str(v) for v in r) for r in rows)
    return hashlib.sha256(txt.encode()).hexdigest()[:16]


def cylinder_monomials(theta, c) -> np.ndarray:
    a, b = np.cos(theta), np.sin(theta)
    return np.stack([a * a, 2 * a * b, b * b, c * c, 2 * a * c, 2 * b * c], axis=-1)


def sphere_monomials(theta, phi) -> np.ndarray:
    u = np.sin(phi) * np.cos(theta)
    v = np.sin(phi) * np.sin(theta)
    w = np.cos(phi) * np.ones_like(theta)
    return np.stack([u * u, 2 * u * v, v * v, w * w, 2 * u * w, 2 * v * w], axis=-1)


def eval_cylinder(rows, theta, c) -> np.ndarray:
    return cylinder_monomials(theta, c) @ np.asarray(rows, dtype=float).T


def sample_singular_locus(g, spec: GridSpec = GridSpec(), label: str = "") -> LocusSample:
    rows = coefficient_rows(g)
    T, C = np.meshgrid(spec.thetas(), spec.seconds(), indexing="ij")
    pts = eval_cylinder(la.to_numpy(rows), T.ravel(), C.ravel())
    params = np.column_stack([T.ravel(), C.ravel()])
    return LocusSample("cylinder", spec, params, pts, _fingerprint(rows), label)


def sample_regular_locus(g, spec: GridSpec = GridSpec(domain="sphere"), label: str = "") -> LocusSample:
    rows = coefficient_rows(g)
    coeffs = regular_locus_coefficients(g if isinstance(g, RegularGerm) else lift_to_regular(g))
    T, P = np.meshgrid(spec.thetas(), spec.seconds(), indexing="ij")
    pts = eval_regular_locus(coeffs, T.ravel(), P.ravel())
    params = np.column_stack([T.ravel(), P.ravel()])
    return LocusSample("sphere", spec, params, pts, _fingerprint(rows), label)


def circle_point(t) -> tuple[Fraction, Fraction]:
    """Rational point ((1-t^2)/(1+t^2), 2t/(1+t^2)) on the unit circle."""
    t = Fraction(t)
    d = 1 + t * t
    return ((1 - t * t) / d, 2 * t / d)


def sphere_point(s, t) -> tuple[Fraction, Fraction, Fraction]:
    """Rational point (2s, 2t, 1-s^2-t^2)/(1+s^2+t^2) on the unit sphere."""
    s, t = Fraction(s), Fraction(t)
    d = 1 + s * s + t * t
    return (2 * s / d, 2 * t / d, (1 - s * s - t * t) / d)


def default_rational_params(n: int, lo: int = -3, hi: int = 3) -> list[Fraction]:
    """Deterministic distinct rationals p/q in [lo, hi]."""
    out = []
    seen = set()
    q = 1
    while len(out) < n:
        for p in range(lo * q, hi * q + 1):
            v = Fraction(p, q)
            if v not in seen:
                seen.add(v)
                out.append(v)
                if len(out) == n:
                    break
        q += 1
    return out


def sample_singular_exact(g, ts: Sequence, cs: Sequence) -> list[tuple]:
    """Exact locus points at (circle_point(t), c) for all pairs."""
    rows = coefficient_rows(g)
    out = []
    for t in ts:
        a, b = circle_point(t)
        for c in cs:
            out.append(eval_second_form(rows, (a, b, Fraction(c))))
    return out


def sample_regular_exact(g, ss: Sequence, ts: Sequence) -> list[tuple]:
    rows = coefficient_rows(g)
    return [eval_second_form(rows, sphere_point(s, t)) for s in ss for t in ts]


# ---------------------------------------------------------------------------
# regular locus formula
# ---------------------------------------------------------------------------


class RegularLocusCoefficients(NamedTuple):
    Hvec: tuple
    B1: tuple
    B2: tuple
    B3: tuple
    B4: tuple
    B5: tuple


def regular_locus_coefficients(g) -> RegularLocusCoefficients:
    rows = coefficient_rows(g)
    fxx, fxy, fyy, fzz, fxz, fyz = (tuple(r[k] for r in rows) for k in range(6))

    def comb(*terms):
        return tuple(sum((k * v[i] for k, v in terms), Fraction(0)) for i in range(len(rows)))

    third, twelfth, half = Fraction(1, 3), Fraction(1, 12), Fraction(1, 2)
    H = comb((third, fxx), (third, fyy), (third, fzz))
    B1 = comb((-twelfth, fxx), (-twelfth, fyy), (2 * twelfth, fzz))
    B2 = comb((half, fxx), (-half, fyy))
    return RegularLocusCoefficients(H, B1, B2, tuple(fxy), tuple(fxz), tuple(fyz))


def _coeff_array(coeffs: RegularLocusCoefficients) -> np.ndarray:
    return np.array([[float(v) for v in vec] for vec in coeffs])


def eval_regular_locus(coeffs: RegularLocusCoefficients, theta, phi) -> np.ndarray:
    """The trigonometric formula in (theta, phi); vectorized."""
    K = _coeff_array(coeffs)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    s2 = np.sin(phi) ** 2
    basis = np.stack([
        np.ones_like(theta * phi),
        1 + 3 * np.cos(2 * phi),
        np.cos(2 * theta) * s2,
        np.sin(2 * theta) * s2,
        np.cos(theta) * np.sin(2 * phi),
        np.sin(theta) * np.sin(2 * phi),
    ], axis=-1)
    return basis @ K


def eval_regular_locus_uvw(coeffs: RegularLocusCoefficients, u, v, w, homogeneous: bool = False):
    """The same formula in the (u, v, w) chart.

    With ``homogeneous`` the constant terms are multiplied by u^2 + v^2 + w^2,
    which makes the expression a quadratic form valid off the sphere; this
    version is exact for rational input.
    """
    s = u * u + v * v + w * w if homogeneous else 1
    weights = (s, 4 * s - 6 * u * u - 6 * v * v, u * u - v * v, 2 * u * v, 2 * u * w, 2 * v * w)
    n = len(coeffs.Hvec)
    return tuple(sum((wt * vec[i] for wt, vec in zip(weights, coeffs)), 0 * s) for i in range(n))


class Surd(NamedTuple):
    """coefficient * sqrt(2) when ``root2`` is set, else the plain coefficient."""

    coefficient: Fraction
    root2: bool

    def __float__(self):
        return float(self.coefficient) * (math.sqrt(2.0) if self.root2 else 1.0)


def veronese(u, v, w) -> tuple[Surd, ...]:
    u, v, w = Fraction(u), Fraction(v), Fraction(w)
    return (
        Surd(u * u, False), Surd(v * v, False), Surd(w * w, False),
        Surd(u * v, True), Surd(u * w, True), Surd(v * w, True),
    )


def point_type(g) -> tuple[int, str]:
    r = la.rank(coefficient_rows(g))
    return r, f"M{r}"


# ---------------------------------------------------------------------------
# affine hull
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineHull:
    dimension: int
    base_point: tuple
    directions: tuple[tuple, ...]


def affine_hull_of_locus(g, domain: str = "cylinder") -> AffineHull:
    """Affine hull of the locus as the image of the monomial flat."""
    rows = coefficient_rows(g)
    cols = la.transpose(rows)
    l, m, n, p, q, r = cols
    base = tuple(l)
    if domain == "cylinder":
        dirs = [tuple(a - b for a, b in zip(l, n)), m, p, q, r]
    elif domain == "sphere":
        dirs = [tuple(a - b for a, b in zip(l, n)), tuple(a - b for a, b in zip(l, p)), m, q, r]
    else:
        raise ValueError(f"unknown domain {domain!r}")
    red, piv = la.rref(la.transpose(dirs))
    basis = tuple(tuple(dirs[i]) for i in piv)
    return AffineHull(len(piv), base, basis)


# ---------------------------------------------------------------------------
# blow-up
# ---------------------------------------------------------------------------


def blowup_residual(g, spec: GridSpec = GridSpec(domain="sphere")) -> float:
    """max |eta_sing(theta, cot phi) - (1 + c^2) eta_bar(theta, phi)| over the grid."""
    rows = _float_rows(g)
    coeffs = regular_locus_coefficients(lift_to_regular(g) if not isinstance(g, RegularGerm) else g)
    T, P = np.meshgrid(spec.thetas(), _phi_grid(spec), indexing="ij")
    T, P = T.ravel(), P.ravel()
    c = np.cos(P) / np.sin(P)
    sing = eval_cylinder(rows, T, c)
    reg = eval_regular_locus(coeffs, T, P) * (1 + c * c)[:, None]
    return float(np.max(np.abs(sing - reg))) if len(T) else 0.0


def _phi_grid(spec: GridSpec) -> np.ndarray:
    k = np.arange(spec.n_second)
    return np.pi * (k + 1) / (spec.n_second + 1)


def blowup_residual_exact(g, ts: Sequence, cs: Sequence) -> Fraction:
    """Exact blow-up comparison on rational circle points."""
    rows = coefficient_rows(g)
    coeffs = regular_locus_coefficients(SecondFormMatrix(rows))
    worst = Fraction(0)
    for t in ts:
        a, b = circle_point(t)
        for c in cs:
            c = Fraction(c)
            sing = eval_second_form(rows, (a, b, c))
            # eta_bar at (a, b, c)/sqrt(1+c^2) equals the homogeneous form over 1 + c^2
            hom = eval_regular_locus_uvw(coeffs, a, b, c, homogeneous=True)
            for s, h in zip(sing, hom):
                worst = max(worst, abs(s - h))
    return worst


# ---------------------------------------------------------------------------
# vanishing forms
# ---------------------------------------------------------------------------


def vanishing_forms(points: Sequence[Sequence], degree: int) -> list[Poly]:
    """Exact basis (reduced echelon) of polynomials of degree <= d vanishing on points."""
    monos = monomials_up_to(degree)
    pts = [tuple(Fraction(v) for v in p) for p in points]
    if len(pts) < len(monos):
        raise DegenerateSample(f"{len(pts)} points for {len(monos)} monomials")
    rows = [tuple(p[0] ** i * p[1] ** j * p[2] ** k for (i, j, k) in monos) for p in pts]
    null = la.nullspace(rows)
    if not null:
        return []
    red, _ = la.rref(null)
    return [Poly(dict(zip(monos, r))) for r in red if any(v != 0 for v in r)]


def fit_vanishing_forms(sample, degree: int) -> list[Poly]:
    pts = sample.exact_points if hasattr(sample, "exact_points") else sample
    return vanishing_forms(pts, degree)


def in_span(basis: Sequence[Poly], target: Poly) -> bool:
    monos = sorted({m for p in list(basis) + [target] for m in p.terms})
    mat = [tuple(p.coeff(m) for m in monos) for p in basis]
    return la.rank(mat + [tuple(target.coeff(m) for m in monos)]) == la.rank(mat) if mat else target.is_zero()


# ---------------------------------------------------------------------------
# geometric probes
# ---------------------------------------------------------------------------


def one_sided_direction_exists(g, c_max: float = 10.0, n_theta: int = 100, n_c: int = 100,
                               n_dirs: int = 360, tol: float = 1e-9) -> bool:
    """Sampled boundedness probe.

    For directions n in the span of the locus, compare min <n, eta> over the
    window |c| <= c_max with the same minimum over |c| <= 0.9 c_max.  A locus
    that is one-sided along n attains its minimum inside, so the two agree;
    an unbounded direction keeps decreasing as the window grows.
    """
    rows = _float_rows(g)
    hull = affine_hull_of_locus(g)
    if hull.dimension == 0:
        return True
    basis = la.to_numpy(hull.directions)
    Q, _ = np.linalg.qr(basis.T)
    T, C = np.meshgrid(np.linspace(0, 2 * np.pi, n_theta, endpoint=False),
                       np.linspace(-c_max, c_max, n_c), indexing="ij")
    pts = eval_cylinder(rows, T.ravel(), C.ravel())
    inner = np.abs(C.ravel()) <= 0.9 * c_max
    if Q.shape[1] == 1:
        dirs = np.vstack([Q[:, 0], -Q[:, 0]])
    elif Q.shape[1] == 2:
        ang = np.linspace(0, 2 * np.pi, n_dirs, endpoint=False)
        dirs = np.outer(np.cos(ang), Q[:, 0]) + np.outer(np.sin(ang), Q[:, 1])
    else:
        # Fibonacci points on the sphere of directions
        k = np.arange(n_dirs) + 0.5
        z = 1 - 2 * k / n_dirs
        r = np.sqrt(1 - z * z)
        ang = np.pi * (1 + 5 ** 0.5) * k
        dirs = np.column_stack([r * np.cos(ang), r * np.sin(ang), z]) @ Q.T
    proj = pts @ dirs.T
    full = proj.min(axis=0)
    part = proj[inner].min(axis=0)
    scale = max(1.0, float(np.abs(proj).max()))
    return bool(np.any(full >= part - tol * scale))


def _mon_derivs(theta, c):
    a, b = np.cos(theta), np.sin(theta)
    dth = np.stack([-2 * a * b, 2 * (a * a - b * b), 2 * a * b, np.zeros_like(a), -2 * b * c, 2 * a * c], axis=-1)
    dc = np.stack([np.zeros_like(a), np.zeros_like(a), np.zeros_like(a), 2 * c, 2 * a, 2 * b], axis=-1)
    return dth, dc


def _profile_seeds(M, pts, n_theta: int, chunk: int = 200, n_keep: int = 4):
    """Best (theta, c) per point from exact minimization over c on a theta grid.

    For fixed theta the locus is a parabola in c, so the critical points of
    the squared distance are the real roots of a cubic.
    """
    th = np.linspace(0, 2 * np.pi, n_theta, endpoint=False)
    a, b = np.cos(th), np.sin(th)
    X = np.stack([a * a, 2 * a * b, b * b], axis=-1) @ M[:, :3].T
    L = np.stack([2 * a, 2 * b], axis=-1) @ M[:, 4:].T
    Cv = M[:, 3]
    cc = float(Cv @ Cv)
    best_t = np.empty((len(pts), n_keep))
    best_c = np.empty((len(pts), n_keep))
    for s0 in range(0, len(pts), chunk):
        P = pts[s0:s0 + chunk]
        A = X[None, :, :] - P[:, None, :]
        b2 = 3 * (L @ Cv) / (2 * cc)
        b1 = (np.einsum("tj,tj->t", L, L)[None, :] + 2 * (A @ Cv)) / (2 * cc)
        b0 = np.einsum("ptj,tj->pt", A, L) / (2 * cc)
        comp = np.zeros(b1.shape + (3, 3))
        comp[..., 0, 0] = -np.broadcast_to(b2, b1.shape)
        comp[..., 0, 1] = -b1
        comp[..., 0, 2] = -b0
        comp[..., 1, 0] = 1.0
        comp[..., 2, 1] = 1.0
        roots = np.linalg.eigvals(comp)
        cr = roots.real
        res = A[..., None, :] + cr[..., None] * L[None, :, None, :] + (cr ** 2)[..., None] * Cv
        d = np.einsum("ptkj,ptkj->ptk", res, res)
        # complex roots are not critical points; a real one always exists
        d = np.where(np.abs(roots.imag) > 1e-7 * (1 + np.abs(cr)), np.inf, d)
        ir = np.argmin(d, axis=2)
        prof = np.take_along_axis(d, ir[..., None], axis=2)[..., 0]
        # narrow valleys can hide the global minimum between grid nodes, so
        # keep the lowest few local minima of the profile
        local = (prof <= np.roll(prof, 1, axis=1)) & (prof <= np.roll(prof, -1, axis=1))
        order = np.argsort(np.where(local, prof, np.inf), axis=1)[:, :n_keep]
        rows_ = np.arange(len(P))[:, None]
        best_t[s0:s0 + chunk] = th[order]
        best_c[s0:s0 + chunk] = cr[rows_, order, ir[rows_, order]]
    return best_t, best_c


def distance_to_locus(rows, points, c_window: float = 100.0, n_theta: int = 360, n_c: int = 201,
                      iterations: int = 40, seeds: int = 4) -> np.ndarray:
    """Distance from each point to the full cylinder locus of ``rows``.

    Seeds come from the nearest nodes of a grid over |c| <= c_window and, when
    the z^2 column is nonzero, from exact minimization over c along a fine
    theta grid.  A damped Gauss-Newton refinement over unconstrained
    (theta, c) follows and the best result per point is kept.
    """
    M = np.asarray(rows, dtype=float)
    pts0 = np.atleast_2d(np.asarray(points, dtype=float))
    # sinh spacing: dense near c = 0, still reaching |c| = c_window
    cs = np.sinh(np.linspace(-np.arcsinh(c_window), np.arcsinh(c_window), n_c))
    T, C = np.meshgrid(np.linspace(0, 2 * np.pi, n_theta // 2, endpoint=False), cs, indexing="ij")
    grid = eval_cylinder(M, T.ravel(), C.ravel())
    k = max(1, min(seeds, len(grid)))
    _, idx = cKDTree(grid).query(pts0, k=k)
    idx = np.asarray(idx).reshape(len(pts0), k)
    th = T.ravel()[idx]
    c = C.ravel()[idx]
    if float(M[:, 3] @ M[:, 3]) > 1e-24:
        pt, pc = _profile_seeds(M, pts0, n_theta)
        th = np.column_stack([th, pt])
        c = np.column_stack([c, pc])
    n, k = th.shape
    th, c = th.ravel().copy(), c.ravel().copy()
    pts = np.repeat(pts0, k, axis=0)
    lam = np.full(len(pts), 1e-3)
    res = eval_cylinder(M, th, c) - pts
    cost = np.einsum("ij,ij->i", res, res)
    for _ in range(iterations):
        dth, dc = _mon_derivs(th, c)
        Jt, Jc = dth @ M.T, dc @ M.T
        a11 = np.einsum("ij,ij->i", Jt, Jt)
        a12 = np.einsum("ij,ij->i", Jt, Jc)
        a22 = np.einsum("ij,ij->i", Jc, Jc)
        g1 = np.einsum("ij,ij->i", Jt, res)
        g2 = np.einsum("ij,ij->i", Jc, res)
        d11 = a11 * (1 + lam) + 1e-300
        d22 = a22 * (1 + lam) + 1e-300
        det = d11 * d22 - a12 * a12
        det = np.where(np.abs(det) < 1e-300, 1e-300, det)
        step_t = -(d22 * g1 - a12 * g2) / det
        step_c = -(-a12 * g1 + d11 * g2) / det
        nth, nc = th + step_t, c + step_c
        nres = eval_cylinder(M, nth, nc) - pts
        ncost = np.einsum("ij,ij->i", nres, nres)
        ok = np.isfinite(ncost) & (ncost < cost)
        th = np.where(ok, nth, th)
        c = np.where(ok, nc, c)
        res = np.where(ok[:, None], nres, res)
        cost = np.where(ok, ncost, cost)
        lam = np.where(ok, lam * 0.3, lam * 10)
        lam = np.clip(lam, 1e-12, 1e12)
    return np.sqrt(cost.reshape(n, k).min(axis=1))


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def export_mesh(sample: LocusSample, fmt: str = "obj", germ_text: str = "") -> bytes:
    nt, ns = sample.shape
    if nt * ns == 0 or len(sample.points) == 0:
        raise EmptyGrid("nothing to export")
    buf = io.StringIO()
    if fmt == "obj":
        buf.write(f"# germ {germ_text or sample.label}\n")
        buf.write(f"# grid {sample.grid.describe()}\n")
        for p in sample.points:
            buf.write("v %.17g %.17g %.17g\n" % tuple(p))
        for i in range(nt - 1):
            for j in range(ns - 1):
                a = i * ns + j + 1
                b = (i + 1) * ns + j + 1
                buf.write(f"f {a} {b} {b + 1} {a + 1}\n")
    elif fmt == "csv":
        buf.write("theta,param2,n1,n2,n3\n")
        for (t, s), p in zip(sample.params, sample.points):
            buf.write("%.17g,%.17g,%.17g,%.17g,%.17g\n" % (t, s, p[0], p[1], p[2]))
    else:
        raise ValueError(f"unsupported format {fmt!r}")
    return buf.getvalue().encode()
