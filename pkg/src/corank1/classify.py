"""Six-orbit classification of corank-1 2-jets, constructive reduction, and
isometric prenormal forms."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _linalg as la
from .germcore import (
    JET_MONOMIALS,
    JetCoefficients,
    MapGerm,
    PreparedGerm,
    corank_at_origin,
    jet2_coefficients,
    NotCorankOne,
    prepare,
)
from .poly import Poly

ZERO_TOL = 1e-12


class OrbitLabel(str, enum.Enum):
    XZ_YZ_Z2 = "XZ_YZ_Z2"
    Z2_XZ = "Z2_XZ"
    XZ_YZ = "XZ_YZ"
    Z2 = "Z2"
    XZ = "XZ"
    ZERO = "ZERO"

    @property
    def normal_form(self) -> str:
        return NORMAL_FORM_TEXT[self]


NORMAL_FORM_TEXT = {
    OrbitLabel.XZ_YZ_Z2: "(x, y, x*z, y*z, z^2)",
    OrbitLabel.Z2_XZ: "(x, y, z^2, x*z, 0)",
    OrbitLabel.XZ_YZ: "(x, y, x*z, y*z, 0)",
    OrbitLabel.Z2: "(x, y, z^2, 0, 0)",
    OrbitLabel.XZ: "(x, y, x*z, 0, 0)",
    OrbitLabel.ZERO: "(x, y, 0, 0, 0)",
}

# rows: normal components; columns: (z^2, xz, yz)
_NORMAL_ALPHA = {
    OrbitLabel.XZ_YZ_Z2: ((0, 1, 0), (0, 0, 1), (1, 0, 0)),
    OrbitLabel.Z2_XZ: ((1, 0, 0), (0, 1, 0), (0, 0, 0)),
    OrbitLabel.XZ_YZ: ((0, 1, 0), (0, 0, 1), (0, 0, 0)),
    OrbitLabel.Z2: ((1, 0, 0), (0, 0, 0), (0, 0, 0)),
    OrbitLabel.XZ: ((0, 1, 0), (0, 0, 0), (0, 0, 0)),
    OrbitLabel.ZERO: ((0, 0, 0), (0, 0, 0), (0, 0, 0)),
}


class TopologicalType(str, enum.Enum):
    SubstantialSurface = "SubstantialSurface"
    PlanarRegion = "PlanarRegion"
    Plane = "Plane"
    HalfLine = "HalfLine"
    Line = "Line"
    Point = "Point"

    @property
    def dimension(self) -> int:
        return TYPE_DIMENSION[self]


TYPE_DIMENSION = {
    TopologicalType.SubstantialSurface: 3,
    TopologicalType.PlanarRegion: 2,
    TopologicalType.Plane: 2,
    TopologicalType.HalfLine: 1,
    TopologicalType.Line: 1,
    TopologicalType.Point: 0,
}

_ORBIT_TYPE = {
    OrbitLabel.XZ_YZ_Z2: TopologicalType.SubstantialSurface,
    OrbitLabel.Z2_XZ: TopologicalType.PlanarRegion,
    OrbitLabel.XZ_YZ: TopologicalType.Plane,
    OrbitLabel.Z2: TopologicalType.HalfLine,
    OrbitLabel.XZ: TopologicalType.Line,
    OrbitLabel.ZERO: TopologicalType.Point,
}


class NotSpecialClass(ValueError):
    """The jet has x^2, xy or y^2 terms, so the type is not determined by the orbit."""


def _jet(j) -> JetCoefficients:
    if isinstance(j, JetCoefficients):
        return j
    if isinstance(j, MapGerm):
        return jet2_coefficients(prepare(j, metric=False))
    if isinstance(j, PreparedGerm):
        return jet2_coefficients(j)
    return JetCoefficients.from_rows(j)


def _nz(v) -> bool:
    return v != 0 if isinstance(v, (int, Fraction)) else abs(v) > ZERO_TOL


def classify_orbit(j) -> OrbitLabel:
    j = _jet(j)
    r = j.alpha_rank
    z2 = any(_nz(v) for v in j.z2_column)
    if r == 3:
        return OrbitLabel.XZ_YZ_Z2
    if r == 2:
        return OrbitLabel.Z2_XZ if z2 else OrbitLabel.XZ_YZ
    if r == 1:
        return OrbitLabel.Z2 if z2 else OrbitLabel.XZ
    return OrbitLabel.ZERO


def is_non_degenerate(j) -> bool:
    return _nz(_jet(j).D)


def is_special_class(j) -> bool:
    return not any(_nz(v) for row in _jet(j).planar_part for v in row)


def locus_type_exact(j) -> TopologicalType:
    j = _jet(j)
    if not is_special_class(j):
        raise NotSpecialClass("jet has x^2, xy or y^2 terms")
    return _ORBIT_TYPE[classify_orbit(j)]


def orbit_type(label: OrbitLabel) -> TopologicalType:
    return _ORBIT_TYPE[OrbitLabel(label)]


# ---------------------------------------------------------------------------
# constructive A^2 reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReductionWitness:
    """Changes carrying a prepared 2-jet to its orbit normal form.

    Apply in order: substitute ``source_change`` S (old coordinates = S times
    new), mix components with ``target_change`` T, then subtract
    ``planar_correction`` evaluated on the first two components.  The last
    step is the nonlinear part of the target change; row i holds the
    coefficients of (X^2, XY, Y^2) removed from normal component i.
    """

    orbit: OrbitLabel
    source_change: la.Matrix
    target_change: la.Matrix
    planar_correction: la.Matrix
    resulting_jet: JetCoefficients


def apply_witness(j, w: ReductionWitness) -> JetCoefficients:
    """Independent check: push the jet through the witness by substitution."""
    j = _jet(j)
    x, y = Poly.var(0), Poly.var(1)
    comps = (x, y) + j.normal_polys()
    S = w.source_change
    images = [Poly.linear(S[i]) for i in range(3)]
    pulled = [c.substitute(images) for c in comps]
    T = w.target_change
    mixed = [sum((pulled[k] * T[i][k] for k in range(5)), Poly()).truncate(2) for i in range(5)]
    if mixed[0] != x or mixed[1] != y:
        raise ValueError("witness does not restore the tangent components")
    X, Y = mixed[0], mixed[1]
    out = []
    for i in range(3):
        c = w.planar_correction[i]
        out.append(mixed[2 + i] - (X * X * c[0] + X * Y * c[1] + Y * Y * c[2]))
    return JetCoefficients.from_normal(out)


def _row_transform(A, v, k=Fraction(1)):
    """Matrix R with (z^2, xz, yz)_old = R (z^2, xz, yz)_new mod planar terms.

    Source change: (x, y)_old = A (x, y), z_old = v1 x + v2 y + k z.
    """
    return (
        (k * k, 2 * k * v[0], 2 * k * v[1]),
        (Fraction(0), k * A[0][0], k * A[0][1]),
        (Fraction(0), k * A[1][0], k * A[1][1]),
    )


def _target_mix(G, F) -> la.Matrix:
    """Invertible N with N G = F, given equal row spaces."""
    red, piv_cols = la.rref(la.transpose(G))
    r = len(piv_cols)
    # pivot rows of G: rows appearing as pivot columns of G^T
    basis_rows = piv_cols
    B = [G[i] for i in basis_rows]
    N = []
    for k in range(r):
        # solve sum_m c_m B_m = F_k
        coeffs = la.combination(B, F[k])
        row = [Fraction(0)] * 3
        for c, idx in zip(coeffs, basis_rows):
            row[idx] = c
        N.append(tuple(row))
    for v in la.nullspace(la.transpose(G)):
        N.append(v)
    return tuple(N)


def reduce_to_orbit_normal_form(j) -> ReductionWitness:
    j = _jet(j)
    if not j.is_exact:
        raise ValueError("constructive reduction needs exact coefficients")
    orbit = classify_orbit(j)
    alpha = j.alpha
    one, zero = Fraction(1), Fraction(0)
    A = ((one, zero), (zero, one))
    v = (zero, zero)
    k = one

    if orbit is OrbitLabel.Z2_XZ:
        # plane of the row space: normal vector n, then R e3 = n
        n = la.nullspace(alpha)[0]
        v = (zero, n[0] / 2)
        if n[2] != 0:
            A = ((one, n[1]), (zero, n[2]))
        else:
            A = ((zero, n[1]), (one, n[2]))
    elif orbit is OrbitLabel.Z2:
        w = next(r for r in (alpha[2], alpha[1], alpha[0]) if r[0] != 0)
        v = (-w[1] / (2 * w[0]), -w[2] / (2 * w[0]))
    elif orbit is OrbitLabel.XZ:
        w = next(r for r in (alpha[2], alpha[1], alpha[0]) if any(e != 0 for e in r))
        A = ((w[1], -w[2]), (w[2], w[1]))

    R = _row_transform(A, v, k)
    G = la.matmul(alpha, R)
    F = la.as_matrix(_NORMAL_ALPHA[orbit])
    N = _target_mix(G, F)
    S = (
        (A[0][0], A[0][1], zero),
        (A[1][0], A[1][1], zero),
        (v[0], v[1], k),
    )
    T = la.block_diag(la.inverse(A), N)

    # planar terms left after source substitution and mixing
    x, y = Poly.var(0), Poly.var(1)
    comps = (x, y) + j.normal_polys()
    images = [Poly.linear(S[i]) for i in range(3)]
    pulled = [c.substitute(images) for c in comps]
    mixed = [sum((pulled[m] * T[i][m] for m in range(5)), Poly()) for i in range(2, 5)]
    P = tuple(tuple(q.coeff(mono) for mono in ((2, 0, 0), (1, 1, 0), (0, 2, 0))) for q in mixed)

    w = ReductionWitness(orbit, S, T, P, JetCoefficients.from_rows(
        tuple((zero, zero, zero) + tuple(row) for row in F)))
    return w


# ---------------------------------------------------------------------------
# isometric prenormal forms
# ---------------------------------------------------------------------------

CASE_OF_ORBIT = {
    OrbitLabel.XZ_YZ_Z2: "a",
    OrbitLabel.Z2_XZ: "b",
    OrbitLabel.XZ_YZ: "c",
    OrbitLabel.Z2: "d",
    OrbitLabel.XZ: "e",
    OrbitLabel.ZERO: "f",
}

# entries (row, column) forced to zero in each case; columns follow JET_MONOMIALS
CASE_ZEROS = {
    "a": [(0, 1), (0, 3), (1, 3), (1, 4)],
    "b": [(0, 5), (1, 3), (1, 5), (2, 3), (2, 4), (2, 5)],
    "c": [(0, 1), (0, 3), (0, 5), (1, 1), (1, 3), (2, 3), (2, 4), (2, 5)],
    "d": [(0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)],
    "e": [(0, 0), (0, 1), (0, 3), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)],
    "f": [(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)],
}
# entries forced to one
CASE_ONES = {"a": [(0, 4)], "b": [(1, 4)], "c": [(0, 4)], "d": [(0, 3)], "e": [(0, 4)], "f": []}

CASE_A_NAMES = ("a1", "a3", "a6", "b1", "b2", "b3", "b6", "c1", "c2", "c3", "c4", "c5", "c6")
# position of each case (a) coefficient in the jet rows
CASE_A_SLOTS = {
    "a1": (0, 0), "a3": (0, 2), "a6": (0, 5),
    "b1": (1, 0), "b2": (1, 1), "b3": (1, 2), "b6": (1, 5),
    "c1": (2, 0), "c2": (2, 1), "c3": (2, 2), "c4": (2, 3), "c5": (2, 4), "c6": (2, 5),
}


def jet_to_quadrics(rows) -> np.ndarray:
    """Symmetric matrices Phi_i with f_i(v) = v^T Phi_i v."""
    out = np.zeros((3, 3, 3))
    for i, r in enumerate(rows):
        r = [float(v) for v in r]
        out[i] = [
            [r[0], r[1] / 2, r[4] / 2],
            [r[1] / 2, r[2], r[5] / 2],
            [r[4] / 2, r[5] / 2, r[3]],
        ]
    return out


def quadrics_to_rows(Phi: np.ndarray) -> np.ndarray:
    return np.array([
        [P[0, 0], 2 * P[0, 1], P[1, 1], P[2, 2], 2 * P[0, 2], 2 * P[1, 2]] for P in Phi
    ])


def transform_rows(rows, S, N) -> np.ndarray:
    """Normal rows of N . f(S v)."""
    Phi = jet_to_quadrics(rows)
    S = np.asarray(S, dtype=float)
    pulled = np.einsum("ji,njk,kl->nil", S, Phi, S)
    return quadrics_to_rows(np.einsum("mn,nij->mij", np.asarray(N, dtype=float), pulled))


def _source(V, alpha, beta, gamma) -> np.ndarray:
    return np.array([
        [V[0, 0], V[0, 1], 0.0],
        [V[1, 0], V[1, 1], 0.0],
        [alpha, beta, gamma],
    ])


def _complete_frame(e1, e2=None) -> np.ndarray:
    vecs = [e1] if e2 is None else [e1, e2]
    if e2 is not None:
        vecs.append(np.cross(e1, e2))
        return np.array(vecs)
    for e in np.eye(3):
        w = e - sum(np.dot(e, u) * u for u in vecs)
        if np.linalg.norm(w) > 1e-6:
            vecs.append(w / np.linalg.norm(w))
        if len(vecs) == 3:
            break
    return np.array(vecs)


def _rot(t: float) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s], [s, c]])


def _columns(rows):
    rows = np.asarray(rows, dtype=float)
    X, Y, Z, C, P, Q = (rows[:, k] for k in range(6))
    return X, Y, Z, C, P, Q


def _reduce_case_a(rows, extra_t: float = 0.0):
    C, P, Q = _columns(rows)[3:]
    nc = np.linalg.norm(C)
    ec = C / nc
    proj = np.eye(3) - np.outer(ec, ec)
    _, sig, Vt = np.linalg.svd(proj @ np.column_stack([P, Q]))
    V = Vt.T
    if np.linalg.det(V) < 0:
        V[:, 1] *= -1
    V = V @ _rot(extra_t)
    # rotate the tangent plane first, then shift and scale z
    _, Yr, _, _, Pr, Qr = _columns(transform_rows(rows, _source(V, 0.0, 0.0, 1.0), np.eye(3)))
    Pp, Qp = proj @ Pr, proj @ Qr
    s1 = np.linalg.norm(Pp)
    ea = Pp / s1
    Qperp = Qp - np.dot(Qp, ea) * ea
    eb = Qperp / np.linalg.norm(Qperp)
    gamma = 1.0 / s1
    alpha = -np.dot(Pr, ec) / (2 * nc)
    beta = -(np.dot(Yr, ea) + alpha * np.dot(Qr, ea)) / np.dot(Pr, ea)
    return _source(V, alpha, beta, gamma), np.array([ea, eb, ec]), sig


def _reduce_case_b(rows):
    X, Y, Z, C, P, Q = _columns(rows)
    alpha_m = np.column_stack([C, P, Q])
    _, _, vt = np.linalg.svd(alpha_m)
    lam, mu, nu = vt[-1]
    n = np.hypot(mu, nu)
    V = np.array([[nu, mu], [-mu, nu]]) / n
    Pr = np.column_stack([P, Q]) @ V[:, 0]
    beta = lam / (2 * n)
    ea = C / np.linalg.norm(C)
    Pperp = Pr - np.dot(Pr, ea) * ea
    gamma = 1.0 / np.linalg.norm(Pperp)
    eb = Pperp / np.linalg.norm(Pperp)
    N = _complete_frame(ea, eb)
    return _source(V, 0.0, beta, gamma), N


def _reduce_case_c(rows):
    X, Y, Z, C, P, Q = _columns(rows)
    eb = Q / np.linalg.norm(Q)
    Pperp = P - np.dot(P, eb) * eb
    ea = Pperp / np.linalg.norm(Pperp)
    gamma = 1.0 / np.dot(P, ea)
    beta = -np.dot(Y, ea) / np.dot(P, ea)
    alpha = -(np.dot(Y, eb) + beta * np.dot(P, eb)) / np.dot(Q, eb)
    N = _complete_frame(ea, eb)
    return _source(np.eye(2), alpha, beta, gamma), N


def _reduce_case_d(rows):
    X, Y, Z, C, P, Q = _columns(rows)
    nc = np.linalg.norm(C)
    ea = C / nc
    alpha = -np.dot(P, ea) / (2 * nc)
    beta = -np.dot(Q, ea) / (2 * nc)
    gamma = 1.0 / np.sqrt(nc)
    return _source(np.eye(2), alpha, beta, gamma), _complete_frame(ea)


def _reduce_case_e(rows):
    X, Y, Z, C, P, Q = _columns(rows)
    u = P if np.linalg.norm(P) >= np.linalg.norm(Q) else Q
    u = u / np.linalg.norm(u)
    p, q = np.dot(P, u), np.dot(Q, u)
    n = np.hypot(p, q)
    V = np.array([[p, -q], [q, p]]) / n
    rot = transform_rows(rows, _source(V, 0.0, 0.0, 1.0), np.eye(3))
    Xr, Yr, _, _, Pr, _ = _columns(rot)
    ea = u
    pa = np.dot(Pr, ea)
    alpha = -np.dot(Xr, ea) / pa
    beta = -np.dot(Yr, ea) / pa
    # z_old = alpha x + beta y + gamma z makes the xz coefficient gamma * pa
    gamma = 1.0 / pa
    return _source(V, alpha, beta, gamma), _complete_frame(ea)


@dataclass(frozen=True)
class IsometricPrenormal:
    """Result of the isometric reduction of a prepared germ.

    ``source_change`` and ``normal_change`` act on the metric preparation
    ``prepared``: the normal rows of the result are
    ``normal_change . f(source_change v)``.  The tangent part of the target
    change is the inverse of the upper-left 2x2 block of the source change.
    """

    case: str
    orbit: OrbitLabel
    rows: tuple[tuple[float, ...], ...]
    prepared: PreparedGerm
    source_change: np.ndarray
    normal_change: np.ndarray
    max_suppressed: float
    singular_values: tuple[float, float] | None = None

    def germ(self) -> MapGerm:
        return JetCoefficients.from_rows(self.rows).germ()

    def coefficient(self, name: str) -> float:
        r, c = CASE_A_SLOTS[name]
        return self.rows[r][c]

    def case_a_tuple(self) -> tuple[float, ...]:
        if self.case != "a":
            raise ValueError("case (a) tuple requested for a different case")
        return tuple(self.coefficient(n) for n in CASE_A_NAMES)

    def full_source(self) -> np.ndarray:
        """Source change relative to the original germ coordinates."""
        return la.to_numpy(self.prepared.source_change) @ self.source_change

    def full_target(self) -> np.ndarray:
        """Orthogonal 5x5 target change relative to the original germ."""
        V = self.source_change[:2, :2]
        block = np.zeros((5, 5))
        block[:2, :2] = np.linalg.inv(V)
        block[2:, 2:] = self.normal_change
        return block @ la.to_numpy(self.prepared.target_change)


def _snap(rows, case: str):
    rows = np.array(rows, dtype=float)
    worst = 0.0
    for r, c in CASE_ZEROS[case]:
        worst = max(worst, abs(rows[r, c]))
        rows[r, c] = 0.0
    for r, c in CASE_ONES[case]:
        worst = max(worst, abs(rows[r, c] - 1.0))
        rows[r, c] = 1.0
    rows[np.abs(rows) < ZERO_TOL] = 0.0
    return tuple(tuple(float(v) for v in r) for r in rows), worst


def degenerate_case_a(sig, rel_tol: float = 1e-6) -> bool:
    return sig[0] - sig[1] <= rel_tol * sig[0]


def reduce_isometric_prenormal(g, extra_rotation: float = 0.0) -> IsometricPrenormal:
    """Reduce a corank-1 germ by source changes and target isometries.

    For the non-degenerate orbit the result also satisfies a6 = c5 = 0 and
    b6 > 0, which fixes it up to finitely many sign changes except when the
    two singular values of the xz, yz block agree (then ``extra_rotation``
    selects a member of the remaining one-parameter family).
    """
    if isinstance(g, MapGerm):
        cr = corank_at_origin(g)
        if cr != 1:
            raise NotCorankOne(cr)
        prep = prepare(g, metric=True)
        orbit = classify_orbit(prepare(g, metric=False))
    else:
        prep = g
        orbit = classify_orbit(jet2_coefficients(prep))
    rows = np.array([[float(v) for v in r] for r in jet2_coefficients(prep).rows])
    case = CASE_OF_ORBIT[orbit]
    sig = None
    if case == "a":
        S, N, s = _reduce_case_a(rows, extra_rotation)
        sig = (float(s[0]), float(s[1]))
    elif case == "b":
        S, N = _reduce_case_b(rows)
    elif case == "c":
        S, N = _reduce_case_c(rows)
    elif case == "d":
        S, N = _reduce_case_d(rows)
    elif case == "e":
        S, N = _reduce_case_e(rows)
    else:
        S, N = np.eye(3), np.eye(3)
    out = transform_rows(rows, S, N)
    snapped, worst = _snap(out, case)
    return IsometricPrenormal(case, orbit, snapped, prep, S, N, worst, sig)
