"""Equivalence of corank-1 2-jets under source 2-jets and target isometries,
and the matching isometries between curvature loci."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _linalg as la
from .classify import (
    CASE_A_NAMES,
    CASE_A_SLOTS,
    CASE_ONES,
    CASE_ZEROS,
    OrbitLabel,
    _reduce_case_a,
    _snap,
    classify_orbit,
    degenerate_case_a,
    transform_rows,
)
from .germcore import MapGerm, NotCorankOne, corank_at_origin, jet2_coefficients, prepare
from .locus import distance_to_locus, eval_cylinder

COEFF_TOL = 1e-9
CONTAINMENT_TOL = 1e-6


class UnsupportedOrbit(ValueError):
    def __init__(self, orbit):
        self.orbit = orbit
        super().__init__(f"isometry decision is only available for XZ_YZ_Z2, got {orbit}")


def relation_signs(d: int, h: int, l: int, a44: int) -> tuple[int, ...]:
    """Sign multipliers on (a1, a3, a6, b1, b2, b3, b6, c1, ..., c6) for x -> dx, y -> hy, z -> lz."""
    s1, s2, s3 = d * l, d * h, a44
    return (s1, s1, s2,
            s3, s3 * s2, s3, s3 * s1 * s2,
            1, s2, 1, 1, s1, s1 * s2)


@dataclass(frozen=True)
class IsometrySolution:
    index: int
    d: int
    h: int
    l: int
    a11: int
    a22: int
    a33: int
    a44: int
    a55: int
    signs: tuple[int, ...]

    @property
    def target_signs(self) -> tuple[int, ...]:
        return (self.a11, self.a22, self.a33, self.a44, self.a55)

    def apply(self, coeffs):
        return tuple(s * c for s, c in zip(self.signs, coeffs))

    def source_matrix(self) -> np.ndarray:
        return np.diag([float(self.d), float(self.h), float(self.l)])

    def target_matrix(self) -> np.ndarray:
        return np.diag([float(v) for v in self.target_signs])


def _solution(index, d, h, l, a44) -> IsometrySolution:
    return IsometrySolution(index, d, h, l, d, h, d * l, a44, 1, relation_signs(d, h, l, a44))


# (d, h, l, a44) for items 1..16.  Items 10 and 16 are the two sign choices
# with (d, h, l) = (1, -1, 1), which the printed list omits.
_ITEM_SIGNS = [
    (1, 1, 1, 1), (-1, 1, 1, 1), (1, -1, -1, 1), (-1, -1, -1, 1),
    (-1, -1, 1, -1), (1, 1, -1, -1), (1, 1, -1, 1), (1, 1, 1, -1),
    (-1, 1, -1, 1), (1, -1, 1, 1), (-1, -1, 1, 1), (-1, -1, -1, -1),
    (1, -1, -1, -1), (-1, 1, 1, -1), (-1, 1, -1, -1), (1, -1, 1, -1),
]


def sixteen_solutions() -> list[IsometrySolution]:
    return [_solution(i + 1, *s) for i, s in enumerate(_ITEM_SIGNS)]


def _p(s: str) -> tuple[int, ...]:
    return tuple(-1 if ch == "-" else 1 for ch in s if ch in "+-")


# The list as printed: (d, h, l), (a11, a22, a33, a44, a55) and relation signs.
PRINTED_ITEMS = [
    ((1, 1, 1), (1, 1, 1, 1, 1), _p("+++ ++++ ++++++")),
    ((-1, 1, 1), (-1, 1, -1, 1, 1), _p("--- +-++ +-++-+")),
    ((1, -1, -1), (1, -1, -1, 1, 1), _p("--- +-++ +-++-+")),
    ((-1, -1, -1), (-1, -1, 1, 1, 1), _p("+++ ++++ ++++++")),
    ((-1, -1, 1), (-1, -1, -1, -1, 1), _p("--+ ---+ ++++--")),
    ((1, 1, -1), (1, 1, -1, -1, 1), _p("--+ ---+ ++++--")),
    ((1, 1, -1), (1, 1, 1, 1, 1), _p("--+ +++- ++++--")),
    ((1, 1, 1), (1, 1, 1, -1, 1), _p("+++ ---- ++++++")),
    ((-1, 1, -1), (-1, 1, 1, 1, 1), _p("++- +-+- +-+++-")),
    ((1, 1, -1), (1, 1, -1, 1, 1), _p("--+ +++- ++++--")),
    ((-1, -1, 1), (-1, -1, -1, 1, 1), _p("--+ +++- ++++--")),
    ((-1, -1, -1), (-1, -1, 1, -1, 1), _p("+++ ---- ++++++")),
    ((1, -1, -1), (1, -1, -1, -1, 1), _p("--- -+-- +-++-+")),
    ((-1, 1, 1), (-1, 1, -1, -1, 1), _p("--- -+-- +-++-+")),
    ((-1, 1, -1), (-1, 1, 1, -1, 1), _p("++- -+-+ +-+++-")),
    ((-1, 1, 1), (-1, 1, -1, 1, 1), _p("--- --++ +-++-+")),
]
# item 3 prints "b6c1" as one entry; it is read as b6, c1 with positive signs


@dataclass(frozen=True)
class PrintedItemAudit:
    index: int
    consistent: bool
    issues: tuple[str, ...]


def audit_printed_list() -> list[PrintedItemAudit]:
    """Check each printed item against the sign system it should satisfy."""
    out = []
    seen: dict[tuple, int] = {}
    for i, ((d, h, l), a, signs) in enumerate(PRINTED_ITEMS, start=1):
        issues = []
        if a[0] != d or a[1] != h:
            issues.append("a11, a22 do not match d, h")
        if a[2] != d * l:
            issues.append("a33 != dl")
        if a[4] != 1:
            issues.append("a55 != 1")
        expected = relation_signs(d, h, l, a[3])
        if signs != expected:
            bad = [n for n, s, e in zip(CASE_A_NAMES, signs, expected) if s != e]
            issues.append("relation differs at " + ", ".join(bad))
        # compare on (d, h, l, a44); a33 is determined by d and l
        key = (d, h, l, a[3])
        if key in seen:
            issues.append(f"same sign choice as item {seen[key]}")
        seen.setdefault(key, i)
        out.append(PrintedItemAudit(i, not issues, tuple(issues)))
    return out


def missing_sign_choices() -> list[tuple[int, int, int, int]]:
    """(d, h, l, a44) choices absent from the printed list."""
    present = {(d, h, l, a[3]) for (d, h, l), a, _ in PRINTED_ITEMS}
    out = []
    for d in (1, -1):
        for h in (1, -1):
            for l in (1, -1):
                for a44 in (1, -1):
                    if (d, h, l, a44) not in present:
                        out.append((d, h, l, a44))
    return out


def distinct_relations() -> list[tuple[int, ...]]:
    out = []
    for s in sixteen_solutions():
        if s.signs not in out:
            out.append(s.signs)
    return out


def compose(r1, r2) -> tuple[int, ...]:
    return tuple(a * b for a, b in zip(r1, r2))


def closed_under_composition() -> bool:
    rels = {s.signs for s in sixteen_solutions()}
    return all(compose(a, b) in rels for a in rels for b in rels)


# ---------------------------------------------------------------------------
# reduction helpers
# ---------------------------------------------------------------------------


def _tuple_of(rows) -> tuple[float, ...]:
    return tuple(float(rows[r][c]) for r, c in (CASE_A_SLOTS[n] for n in CASE_A_NAMES))


def _literal_form_a(g: MapGerm, rows) -> bool:
    from .poly import Poly

    if g.components[0] != Poly.var(0) or g.components[1] != Poly.var(1):
        return False
    if any(g.jacobian()[i] != (0, 0, 0) for i in range(2, 5)):
        return False
    return all(rows[r][c] == 0 for r, c in CASE_ZEROS["a"]) and all(rows[r][c] == 1 for r, c in CASE_ONES["a"])


def _prepare_checked(g: MapGerm):
    cr = corank_at_origin(g)
    if cr != 1:
        raise NotCorankOne(cr)
    orbit = classify_orbit(prepare(g, metric=False))
    if orbit != OrbitLabel.XZ_YZ_Z2:
        raise UnsupportedOrbit(orbit)
    prep = prepare(g, metric=True)
    rows = jet2_coefficients(prep).rows
    return prep, rows


def _canonical(rows, t: float = 0.0):
    S, N, sig = _reduce_case_a(rows, t)
    snapped, _ = _snap(transform_rows(rows, S, N), "a")
    return np.array(snapped), S, N, sig


def _scale(*arrays) -> float:
    return 1.0 + max(float(np.abs(a).max()) for a in arrays)


# ---------------------------------------------------------------------------
# decision
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """``index`` is the first matching list item.

    ``source`` (3x3) and ``target`` (5x5) act on the metric preparations:
    the normal rows of B are ``target[2:, 2:] . f_A(source v)``.
    """

    index: int
    source: np.ndarray
    target: np.ndarray
    residual: float


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    witness: Witness | None
    matching_indices: tuple[int, ...]
    reduced_a: tuple[float, ...]
    reduced_b: tuple[float, ...]
    certificate: str | None
    method: str
    max_residual: float
    tolerance: float = COEFF_TOL

    def to_dict(self) -> dict:
        d = {
            "equivalent": self.equivalent,
            "method": self.method,
            "matching_items": list(self.matching_indices),
            "reduced_a": dict(zip(CASE_A_NAMES, self.reduced_a)),
            "reduced_b": dict(zip(CASE_A_NAMES, self.reduced_b)),
            "certificate": self.certificate,
            "max_residual": None if np.isnan(self.max_residual) else self.max_residual,
            "tolerance": self.tolerance,
        }
        if self.witness is not None:
            d["witness"] = {
                "item": self.witness.index,
                "source": self.witness.source.tolist(),
                "target": self.witness.target.tolist(),
                "residual": self.witness.residual,
            }
        return d


def _matches(rel, ta, tb, tol) -> float | None:
    mapped = np.array([s * v for s, v in zip(rel, ta)])
    err = float(np.abs(mapped - np.asarray(tb)).max())
    return err if err <= tol * _scale(mapped, np.asarray(tb)) else None


def _certificate(ta, tb, tol) -> str:
    ta, tb = np.asarray(ta), np.asarray(tb)
    sc = tol * _scale(ta, tb)
    for name in ("c4", "c1", "c3"):
        k = CASE_A_NAMES.index(name)
        if abs(ta[k] - tb[k]) > sc:
            return name
    for k, name in enumerate(CASE_A_NAMES):
        if abs(abs(ta[k]) - abs(tb[k])) > sc:
            return name
    return "sign pattern"


def _embed(N3: np.ndarray, V: np.ndarray) -> np.ndarray:
    T = np.zeros((5, 5))
    T[:2, :2] = np.linalg.inv(V)
    T[2:, 2:] = N3
    return T


def check_jet_isometry_equivalence(gA: MapGerm, gB: MapGerm, tol: float = COEFF_TOL) -> EquivalenceVerdict:
    prepA, rowsA = _prepare_checked(gA)
    prepB, rowsB = _prepare_checked(gB)
    sols = sixteen_solutions()

    literal_cert = None
    if _literal_form_a(gA, rowsA) and _literal_form_a(gB, rowsB):
        ta, tb = _tuple_of(rowsA), _tuple_of(rowsB)
        literal_cert = _certificate(ta, tb, tol)
        hits = [(s, e) for s in sols if (e := _matches(s.signs, ta, tb, tol)) is not None]
        if hits:
            s, _ = hits[0]
            S = s.source_matrix()
            T = s.target_matrix()
            res = float(np.abs(transform_rows(rowsA, S, T[2:, 2:]) - la.to_numpy(rowsB)).max())
            return EquivalenceVerdict(True, Witness(s.index, S, T, res), tuple(x.index for x, _ in hits),
                                      ta, tb, None, "direct", res, tol)

    fA = la.to_numpy(rowsA)
    fB = la.to_numpy(rowsB)
    canA, SA, NA, sigA = _canonical(fA)
    canB, SB, NB, sigB = _canonical(fB)
    ta, tb = _tuple_of(canA), _tuple_of(canB)
    degA, degB = degenerate_case_a(sigA), degenerate_case_a(sigB)
    ratio = lambda s: s[1] / s[0]
    if degA != degB or abs(ratio(sigA) - ratio(sigB)) > 1e-7:
        k = CASE_A_NAMES.index("c4")
        cert = "c4" if abs(ta[k] - tb[k]) > tol * _scale(canA, canB) else "singular values"
        cert = literal_cert or cert
        return EquivalenceVerdict(False, None, (), ta, tb, cert, "canonical", float("nan"), tol)

    best = None
    seen = set()
    for s in sols:
        if s.signs in seen:
            continue
        seen.add(s.signs)
        if degB:
            t_opt, err = _best_rotation(s.signs, ta, fB)
            if err > tol * _scale(canA, canB) * 10:
                continue
            canB_t, SB_t, NB_t, _ = _canonical(fB, t_opt)
        else:
            canB_t, SB_t, NB_t = canB, SB, NB
            if _matches(s.signs, ta, _tuple_of(canB_t), tol) is None:
                continue
        DS, DT = s.source_matrix(), s.target_matrix()[2:, 2:]
        S = SA @ DS @ np.linalg.inv(SB_t)
        N = NB_t.T @ DT @ NA
        res = float(np.abs(transform_rows(fA, S, N) - fB).max())
        if res <= tol * _scale(fA, fB) and (best is None or res < best[2]):
            best = (s, _embed(N, S[:2, :2]), res, S)
            break
    if best is None:
        if not degB:
            cert = _certificate(ta, tb, tol)
        else:
            k = CASE_A_NAMES.index("c4")
            cert = "c4" if abs(ta[k] - tb[k]) > tol * _scale(canA, canB) else "no residual rotation matches"
        cert = literal_cert or cert
        return EquivalenceVerdict(False, None, (), ta, tb, cert, "canonical", float("nan"), tol)
    s, T, res, S = best
    idx = tuple(x.index for x in sols if x.signs == s.signs)
    return EquivalenceVerdict(True, Witness(s.index, S, T, res), idx, ta, tb, None, "canonical", res, tol)


def _best_rotation(signs, ta, fB) -> tuple[float, float]:
    """Rotation parameter of B's canonical family closest to the relation image of ``ta``."""
    target = np.array([s * v for s, v in zip(signs, ta)])

    def resid(t):
        return np.array(_tuple_of(_canonical(fB, t)[0])) - target

    grid = np.linspace(0.0, 2 * np.pi, 180, endpoint=False)
    vals = np.array([np.abs(resid(t)).max() for t in grid])
    best_t, best_e = float(grid[np.argmin(vals)]), float(vals.min())
    for t in grid[np.argsort(vals)[:2]]:
        # Gauss-Newton on the residual vector; it vanishes at an exact match
        for _ in range(8):
            r = resid(t)
            dr = (resid(t + 1e-6) - resid(t - 1e-6)) / 2e-6
            den = float(dr @ dr)
            if den == 0.0:
                break
            t = t - float(dr @ r) / den
        e = float(np.abs(resid(t)).max())
        if e < best_e:
            best_t, best_e = float(t), e
    return best_t, best_e


# ---------------------------------------------------------------------------
# loci
# ---------------------------------------------------------------------------


def _locus_rows(rows) -> np.ndarray:
    """Second-form rows from jet rows (squares double)."""
    out = np.array(rows, dtype=float)
    out[:, [0, 2, 3]] *= 2
    return out


def _window_points(M, n_theta: int = 25, n_c: int = 20, c_max: float = 5.0) -> np.ndarray:
    T, C = np.meshgrid(np.linspace(0, 2 * np.pi, n_theta, endpoint=False),
                       np.linspace(-c_max, c_max, n_c), indexing="ij")
    return eval_cylinder(M, T.ravel(), C.ravel())


@dataclass(frozen=True)
class ContainmentCheck:
    forward: float
    backward: float
    window: float

    @property
    def passed(self) -> bool:
        return max(self.forward, self.backward) <= CONTAINMENT_TOL


def containment(phi, MA, MB, c_max: float = 5.0) -> ContainmentCheck:
    phi = np.asarray(phi, dtype=float)
    # a coarse pass rejects wrong candidates cheaply
    quick = distance_to_locus(MB, _window_points(MA, 5, 5, c_max) @ phi.T).max()
    if quick > CONTAINMENT_TOL:
        return ContainmentCheck(float(quick), float("inf"), c_max)
    fwd = distance_to_locus(MB, _window_points(MA, c_max=c_max) @ phi.T).max()
    if fwd > CONTAINMENT_TOL:
        return ContainmentCheck(float(fwd), float("inf"), c_max)
    bwd = distance_to_locus(MA, _window_points(MB, c_max=c_max) @ phi).max()
    return ContainmentCheck(float(fwd), float(bwd), c_max)


def candidate_isometries(gA: MapGerm, gB: MapGerm) -> list[np.ndarray]:
    _, rowsA = _prepare_checked(gA)
    _, rowsB = _prepare_checked(gB)
    fA, fB = la.to_numpy(rowsA), la.to_numpy(rowsB)
    _, _, NA, _ = _canonical(fA)
    _, _, NB, _ = _canonical(fB)
    cands = [np.eye(3), np.diag([1.0, -1.0, 1.0])]
    for s in sixteen_solutions():
        cands.append(NB.T @ s.target_matrix()[2:, 2:] @ NA)
    v = check_jet_isometry_equivalence(gA, gB)
    if v.witness is not None:
        cands.append(v.witness.target[2:, 2:])
    out = []
    for c in cands:
        if not any(np.allclose(c, o, atol=1e-12) for o in out):
            out.append(c)
    return out


def locus_isometries(gA: MapGerm, gB: MapGerm) -> list[np.ndarray]:
    """Orthogonal maps of the normal space carrying the locus of gA onto that of gB."""
    _, rowsA = _prepare_checked(gA)
    _, rowsB = _prepare_checked(gB)
    MA, MB = _locus_rows(la.to_numpy(rowsA)), _locus_rows(la.to_numpy(rowsB))
    return [phi for phi in candidate_isometries(gA, gB) if containment(phi, MA, MB).passed]


def random_case_a_germ(rng: np.random.Generator, low: int = -3, high: int = 3) -> MapGerm:
    """Form (a) with random integer coefficients, b6 and c4 nonzero."""
    vals = {n: int(rng.integers(low, high + 1)) for n in CASE_A_NAMES}
    for n in ("b6", "c4"):
        while vals[n] == 0:
            vals[n] = int(rng.integers(low, high + 1))
    return case_a_germ(vals)


def case_a_germ(vals) -> MapGerm:
    from .germcore import JetCoefficients

    rows = [[Fraction(0)] * 6 for _ in range(3)]
    rows[0][4] = Fraction(1)
    for name, v in (vals.items() if isinstance(vals, dict) else zip(CASE_A_NAMES, vals)):
        r, c = CASE_A_SLOTS[name]
        rows[r][c] = Fraction(v) if not isinstance(v, float) else v
    return JetCoefficients.from_rows(rows).germ()


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def transform_germ(g: MapGerm, M, Q) -> MapGerm:
    """The germ v -> Q g(M v) for a linear source M and target Q."""
    from .poly import Poly

    M, Q = np.asarray(M, dtype=float), np.asarray(Q, dtype=float)
    images = [Poly.linear([float(v) for v in M[i]]) for i in range(3)]
    pulled = [c.substitute(images) for c in g.components]
    comps = [sum((pulled[j] * float(Q[i, j]) for j in range(5)), Poly()) for i in range(5)]
    return MapGerm(tuple(c.snap(1e-15) for c in comps))


def random_equivalent(g: MapGerm, rng: np.random.Generator) -> MapGerm:
    """Image of ``g`` under a random linear source change and a random isometry of R^5."""
    while True:
        M = rng.normal(size=(3, 3))
        if abs(np.linalg.det(M)) > 0.3:
            break
    return transform_germ(g, M, random_orthogonal(rng, 5))
