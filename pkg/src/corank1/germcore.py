"""Map germs (R^3, 0) -> (R^5, 0), preparation, and fundamental forms at 0."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import _linalg as la
from .poly import Poly, PolySyntaxError, VARS, format_tuple, parse_tuple

ORIGIN = (0, 0, 0)

# column order of the second-form matrix: (l, m, n, p, q, r)
SECOND_ORDER_MONOMIALS = ((2, 0, 0), (1, 1, 0), (0, 2, 0), (0, 0, 2), (1, 0, 1), (0, 1, 1))
SECOND_ORDER_NAMES = ("xx", "xy", "yy", "zz", "xz", "yz")


class GermParseError(ValueError):
    pass


class GermSyntaxError(GermParseError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(message)


class GermArityError(GermParseError):
    pass


class ConstantTermError(GermParseError):
    pass


class NotCorankOne(ValueError):
    def __init__(self, corank: int):
        self.corank = corank
        super().__init__(f"germ has corank {corank} at the origin, expected 1")


@dataclass(frozen=True)
class MapGerm:
    components: tuple[Poly, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        for i, c in enumerate(comps):
            if c.coeff(ORIGIN) != 0:
                raise ConstantTermError(f"component {i + 1} has a nonzero constant term")

    @property
    def target_dim(self) -> int:
        return len(self.components)

    def jacobian(self) -> la.Matrix:
        """Jacobian at the origin, one row per component."""
        return tuple(
            tuple(c.coeff(tuple(int(k == j) for k in range(3))) for j in range(3))
            for c in self.components
        )

    @property
    def is_exact(self) -> bool:
        return all(c.is_exact for c in self.components)

    def format(self) -> str:
        return format_tuple(self.components)

    def __str__(self):
        return self.format()


def germ(*components) -> MapGerm:
    """Build a germ from Poly values or polynomial strings."""
    from .poly import parse_poly

    return MapGerm(tuple(parse_poly(c) if isinstance(c, str) else c for c in components))


def parse_germ(text: str, arity: int = 5) -> MapGerm:
    try:
        comps = parse_tuple(text, VARS)
    except PolySyntaxError as exc:
        raise GermSyntaxError(str(exc), exc.position) from None
    if len(comps) != arity:
        raise GermArityError(f"expected {arity} components, got {len(comps)}")
    return MapGerm(tuple(comps))


def corank_at_origin(g: MapGerm) -> int:
    return 3 - la.rank(g.jacobian())


class TangentVector(NamedTuple):
    a: object
    b: object
    c: object


@dataclass(frozen=True)
class FirstFormCoefficients:
    E: object
    F: object
    G: object
    Hq: object
    Iq: object
    Jq: object

    def as_tuple(self):
        return (self.E, self.F, self.G, self.Hq, self.Iq, self.Jq)


@dataclass(frozen=True)
class SecondFormMatrix:
    rows: tuple[tuple, ...]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def pqr_block(self) -> la.Matrix:
        """Columns (p, q, r): the zz, xz, yz second partials."""
        return tuple(tuple(r[3:]) for r in self.rows)

    @property
    def rank(self) -> int:
        return la.rank(self.rows)

    def to_numpy(self):
        return la.to_numpy(self.rows)


@dataclass(frozen=True)
class PreparedGerm:
    """A germ of the form (x, y, f1, f2, f3) with the changes that produced it.

    ``source_change`` L and ``target_change`` T satisfy
    ``g(L p) = T^{-1} (x + r1, y + r2, f1, f2, f3)(p)`` where (r1, r2) is the
    ``tangent_residual`` (terms of degree >= 2 along the tangent plane).
    Absorbing the residual is a source change tangent to the identity, which
    leaves the 2-jets of f1, f2, f3 unchanged.
    """

    components: tuple[Poly, ...]
    source_change: la.Matrix = field(default_factory=lambda: la.identity(3))
    target_change: la.Matrix = field(default_factory=lambda: la.identity(5))
    tangent_residual: tuple[Poly, Poly] = (Poly(), Poly())
    orthonormal: bool = True
    exact: bool = True

    @property
    def normal(self) -> tuple[Poly, ...]:
        return self.components[2:]

    def as_germ(self) -> MapGerm:
        return MapGerm(self.components)

    def reconstruct(self) -> MapGerm:
        x, y, z = (Poly.var(i) for i in range(3))
        full = (x + self.tangent_residual[0], y + self.tangent_residual[1]) + tuple(self.normal)
        tinv = la.inverse(self.target_change)
        mixed = [sum((full[j] * tinv[i][j] for j in range(5)), Poly()) for i in range(5)]
        linv = la.inverse(self.source_change)
        images = [Poly.linear(linv[i]) for i in range(3)]
        return MapGerm(tuple(m.substitute(images) for m in mixed))

    def format(self) -> str:
        return format_tuple(self.components)


def _is_prepared(g: MapGerm) -> bool:
    x, y = Poly.var(0), Poly.var(1)
    if g.components[0] != x or g.components[1] != y:
        return False
    return all(all(v == 0 for v in row) for row in g.jacobian()[2:])


def prepare(g: MapGerm, metric: bool = True) -> PreparedGerm:
    """Bring a corank-1 germ to the form (x, y, f1, f2, f3).

    With ``metric`` the target change is orthogonal, so the normal frame is
    orthonormal.  Without it the target change is rational (non-orthogonal),
    which is enough for anything invariant under linear changes.
    """
    if g.target_dim != 5:
        raise GermArityError("preparation needs five components")
    J = g.jacobian()
    cr = corank_at_origin(g)
    if cr != 1:
        raise NotCorankOne(cr)
    if _is_prepared(g):
        return PreparedGerm(g.components)

    kernel = la.nullspace(J)[0]
    cols = la.transpose(J)
    # first independent pair of Jacobian columns, in index order
    pair = None
    for i in range(3):
        for j in range(i + 1, 3):
            if la.rank((cols[i], cols[j])) == 2:
                pair = (i, j)
                break
        if pair:
            break
    w1, w2 = cols[pair[0]], cols[pair[1]]

    std = [tuple(Fraction(int(k == i)) for k in range(5)) for i in range(5)]
    completion = []
    span = [w1, w2]
    for e in std:
        if len(completion) == 3:
            break
        if la.rank(span + completion + [e]) == len(span) + len(completion) + 1:
            completion.append(e)

    exact = True
    if metric:
        frame, exact = la.gram_schmidt([w1, w2] + completion)
        T = tuple(tuple(r) for r in frame)
    else:
        T = la.inverse(la.transpose([w1, w2] + completion))

    # source: tangent coordinates map exactly to x, y
    s1 = tuple(Fraction(int(k == pair[0])) for k in range(3))
    s2 = tuple(Fraction(int(k == pair[1])) for k in range(3))
    M = tuple(tuple(la.dot(T[r], w) for w in (w1, w2)) for r in range(2))
    Minv = la.inverse(M)
    S = la.transpose([s1, s2])
    S = la.matmul(S, Minv)
    L = tuple(tuple(S[i]) + (kernel[i],) for i in range(3))

    images = [Poly.linear(L[i]) for i in range(3)]
    pulled = [c.substitute(images) for c in g.components]
    comps = [sum((pulled[j] * T[i][j] for j in range(5)), Poly()) for i in range(5)]
    if not exact:
        comps = [c.snap(1e-14) for c in comps]
    x, y = Poly.var(0), Poly.var(1)
    r1 = (comps[0] - x).drop_below(2)
    r2 = (comps[1] - y).drop_below(2)
    normal = tuple(c.drop_below(2) for c in comps[2:])
    return PreparedGerm(
        components=(x, y) + normal,
        source_change=L,
        target_change=T,
        tangent_residual=(r1, r2),
        orthonormal=metric,
        exact=exact,
    )


def _ensure_prepared(g) -> PreparedGerm:
    if isinstance(g, PreparedGerm):
        return g
    if isinstance(g, MapGerm):
        return prepare(g)
    raise TypeError("expected a MapGerm or PreparedGerm")


def first_form_coefficients(g) -> FirstFormCoefficients:
    p = _ensure_prepared(g)
    J = MapGerm(p.components).jacobian()
    fx, fy, fz = la.transpose(J)
    return FirstFormCoefficients(
        la.dot(fx, fx), la.dot(fx, fy), la.dot(fy, fy), la.dot(fz, fz), la.dot(fx, fz), la.dot(fy, fz)
    )


def second_partial(f: Poly, mono) -> object:
    """Second partial derivative at 0 for the monomial ``mono`` of degree 2."""
    c = f.coeff(mono)
    return c * 2 if max(mono) == 2 else c


def second_form_rows(normal: Sequence[Poly]) -> la.Matrix:
    return tuple(tuple(second_partial(f, m) for m in SECOND_ORDER_MONOMIALS) for f in normal)


def second_form_matrix(g) -> SecondFormMatrix:
    p = _ensure_prepared(g)
    return SecondFormMatrix(second_form_rows(p.normal))


def eval_second_form(m, u) -> tuple:
    """II(u, u) for u = (a, b, c): a^2 l + 2ab m + b^2 n + c^2 p + 2ac q + 2bc r."""
    rows = m.rows if isinstance(m, SecondFormMatrix) else m
    a, b, c = u
    mono = (a * a, 2 * a * b, b * b, c * c, 2 * a * c, 2 * b * c)
    return tuple(sum((k * v for k, v in zip(row, mono)), Fraction(0)) for row in rows)


JET_KEYS = ("20", "11", "02", "21", "22", "12")
JET_MONOMIALS = ((2, 0, 0), (1, 1, 0), (0, 2, 0), (0, 0, 2), (1, 0, 1), (0, 1, 1))


@dataclass(frozen=True)
class JetCoefficients:
    """The 18 quadratic coefficients of (f1, f2, f3) = (a, b, c) rows.

    Each row is ordered (x^2, xy, y^2, z^2, xz, yz), i.e. indices 20, 11, 02,
    21, 22, 12.
    """

    rows: tuple[tuple, tuple, tuple]

    @classmethod
    def from_normal(cls, normal: Sequence[Poly]) -> "JetCoefficients":
        return cls(tuple(tuple(f.coeff(m) for m in JET_MONOMIALS) for f in normal))

    @classmethod
    def from_rows(cls, rows) -> "JetCoefficients":
        return cls(la.as_matrix(rows))

    def get(self, name: str):
        """Coefficient by name, e.g. ``get('b21')``."""
        return self.rows["abc".index(name[0])][JET_KEYS.index(name[1:])]

    @property
    def alpha(self) -> la.Matrix:
        return tuple(tuple(r[3:]) for r in self.rows)

    @property
    def D(self):
        return la.det(self.alpha)

    @property
    def alpha_rank(self) -> int:
        return la.rank(self.alpha)

    @property
    def z2_column(self) -> tuple:
        return tuple(r[3] for r in self.rows)

    @property
    def planar_part(self) -> la.Matrix:
        """The x^2, xy, y^2 coefficients."""
        return tuple(tuple(r[:3]) for r in self.rows)

    @property
    def is_exact(self) -> bool:
        return la.is_exact_matrix(self.rows)

    def normal_polys(self) -> tuple[Poly, Poly, Poly]:
        return tuple(Poly(dict(zip(JET_MONOMIALS, r))) for r in self.rows)

    def germ(self) -> MapGerm:
        return MapGerm((Poly.var(0), Poly.var(1)) + self.normal_polys())


def jet2_coefficients(g) -> JetCoefficients:
    p = _ensure_prepared(g)
    return JetCoefficients.from_normal(p.normal)


def jet_of(g: MapGerm) -> JetCoefficients:
    """Exact 2-jet coefficients via the rational (non-metric) preparation."""
    return jet2_coefficients(prepare(g, metric=False))
