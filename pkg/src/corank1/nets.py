"""Real nets of quadrics: pencils, discriminant cubics, normal forms and the
GL(3) x GL(3) action."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

from . import _linalg as la
from .germcore import GermArityError, GermSyntaxError
from .locus import (
    RegularGerm,
    affine_hull_of_locus,
    default_rational_params,
    point_type,
    sample_regular_exact,
    vanishing_forms,
)
from .poly import Poly, PolySyntaxError, monomials_up_to, parse_tuple

PENCIL_NAMES = ("λ", "μ", "ν")
_QUAD = [m for m in monomials_up_to(2) if sum(m) == 2]


class NetError(ValueError):
    pass


def _form_matrix(q: Poly) -> la.Matrix:
    if not q.is_zero() and (q.degree != 2 or q.min_degree != 2):
        raise NetError(f"not a quadratic form: {q}")
    A = [[Fraction(0)] * 3 for _ in range(3)]
    for (i, j, k), c in q.items():
        idx = [0] * i + [1] * j + [2] * k
        a, b = idx
        if a == b:
            A[a][a] += c
        else:
            A[a][b] += c / 2
            A[b][a] += c / 2
    return tuple(tuple(r) for r in A)


@dataclass(frozen=True)
class Net:
    q1: Poly
    q2: Poly
    q3: Poly

    def __post_init__(self):
        for q in self.forms:
            _form_matrix(q)

    @property
    def forms(self) -> tuple[Poly, Poly, Poly]:
        return (self.q1, self.q2, self.q3)

    @property
    def matrices(self) -> tuple[la.Matrix, ...]:
        """Symmetric matrices; a mixed term 2xy contributes 1 off the diagonal."""
        return tuple(_form_matrix(q) for q in self.forms)

    def format(self, brackets: str = "<>") -> str:
        return brackets[0] + ", ".join(q.format() for q in self.forms) + brackets[1]

    def __str__(self):
        return self.format()


def net(*forms) -> Net:
    from .poly import parse_poly

    return Net(*(parse_poly(f) if isinstance(f, str) else f for f in forms))


def parse_net(text: str) -> Net:
    try:
        forms = parse_tuple(text, require_brackets=False)
    except PolySyntaxError as exc:
        raise GermSyntaxError(str(exc), exc.position) from None
    if len(forms) != 3:
        raise GermArityError(f"a net has three forms, got {len(forms)}")
    return Net(*forms)


def pencil_matrix(n: Net, lam, mu, nu) -> la.Matrix:
    A1, A2, A3 = n.matrices
    return tuple(
        tuple(lam * A1[i][j] + mu * A2[i][j] + nu * A3[i][j] for j in range(3)) for i in range(3)
    )


def _det3(m) -> Poly:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def discriminant_cubic(n: Net) -> Poly:
    """det(λ A1 + μ A2 + ν A3) as a cubic in (λ, μ, ν) (stored in the x, y, z slots)."""
    lam, mu, nu = (Poly.var(i) for i in range(3))
    return _det3(pencil_matrix(n, lam, mu, nu))


def format_cubic(p: Poly) -> str:
    return p.format(PENCIL_NAMES)


def primitive_part(p: Poly) -> tuple[Fraction, Poly]:
    """(content, primitive) with integer coprime coefficients and positive leading term."""
    if p.is_zero():
        return Fraction(0), p
    coeffs = [Fraction(c) for _, c in p.sorted_terms()]
    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    nums = [int(c * den) for c in coeffs]
    g = 0
    for v in nums:
        g = gcd(g, abs(v))
    content = Fraction(g, den)
    if coeffs[0] < 0:
        content = -content
    return content, p * (1 / content)


def proportional(p: Poly, q: Poly) -> Fraction | None:
    """Nonzero k with p = k q, or None.  Two zero polynomials give 1."""
    if p.is_zero() and q.is_zero():
        return Fraction(1)
    if p.is_zero() or q.is_zero():
        return None
    if set(p.terms) != set(q.terms):
        return None
    mono = next(iter(q.terms))
    k = Fraction(p.coeff(mono)) / Fraction(q.coeff(mono))
    return k if p == q * k else None


# ---------------------------------------------------------------------------
# normal forms
# ---------------------------------------------------------------------------

# name -> (normal form for each sign choice, printed discriminant for each sign choice)
TABLE3 = {
    "D_a": (["x^2, y^2, z^2 + 2*x*y"], ["z*(x*y - z^2)"]),
    "D_b,D_c": (["x^2 - y^2, 2*x*y, x^2 + z^2", "x^2 - y^2, 2*x*y, x^2 - z^2"],
                ["z*(x^2 + x*z + y^2)", "z*(x^2 + x*z + y^2)"]),
    "D_a*": (["2*x*z, 2*y*z, z^2 + 2*x*y"], ["z*(2*x*y - z^2)"]),
    "D_b*,D_c*": (["2*x*z, 2*y*z, x^2 + y^2 - z^2", "2*x*z, 2*y*z, x^2 + y^2 + z^2"],
                  ["z*(x^2 + y^2 + z^2)", "z*(x^2 + y^2 - z^2)"]),
    "E_a,E_b": (["x^2 + y^2, 2*x*y, z^2", "x^2 - y^2, 2*x*y, z^2"],
                ["z*(x^2 - y^2)", "z*(x^2 + y^2)"]),
    "E_a*,E_b*": (["x^2 - y^2, 2*x*z, 2*y*z", "x^2 + y^2, 2*x*z, 2*y*z"],
                  ["x*(y^2 + z^2)", "x*(y^2 - z^2)"]),
    "F_a,F_b": (["x^2 + y^2, 2*x*y, 2*y*z", "x^2 - y^2, 2*x*y, 2*y*z"], ["x*z^2", "x*z^2"]),
    "F_a*,F_b*": (["x^2 - y^2, 2*x*z, z^2", "x^2 + y^2, 2*x*z, z^2"],
                  ["x*(x*z - y^2)", "x*(x*z - y^2)"]),
    "G": (["x^2, y^2, 2*y*z"], ["x*z^2"]),
    "G*": (["2*x*y, 2*x*z, z^2"], ["x^2*z"]),
    "H": (["x^2, 2*x*y, y^2 + 2*x*z"], ["z^3"]),
    "I": (["x^2, 2*x*y, y^2"], ["0"]),
    "I*": (["2*x*z, 2*y*z, z^2"], ["0"]),
}


def _variant_names(row: str) -> list[str]:
    names = row.split(",")
    return names if len(names) > 1 else [row]


def table3_labels() -> list[str]:
    out = []
    for row in TABLE3:
        out.extend(_variant_names(row))
    return out


def _locate(name: str) -> tuple[str, int]:
    for row in TABLE3:
        names = _variant_names(row)
        if name in names:
            return row, names.index(name)
    raise NetError(f"unknown normal-form label {name!r}")


def table3_net(name: str, sign_choice: int | None = None) -> Net:
    """Normal form by label (``D_b``) or by row label plus sign index."""
    if sign_choice is not None and name in TABLE3:
        return parse_net(TABLE3[name][0][sign_choice])
    row, k = _locate(name)
    return parse_net(TABLE3[row][0][k])


def printed_discriminant(name: str) -> Poly:
    from .poly import parse_poly

    row, k = _locate(name)
    return parse_poly(TABLE3[row][1][k])


@dataclass(frozen=True)
class Table3Check:
    label: str
    determinant: Poly
    printed: Poly
    scalar: Fraction | None
    swapped: bool

    @property
    def matches(self) -> bool:
        return self.scalar is not None


def audit_table3() -> list[Table3Check]:
    """Compare every sign variant's pencil determinant with the printed entry.

    A variant that only matches its partner's printed entry is reported with
    ``swapped`` set.
    """
    from .poly import parse_poly

    out = []
    for row, (forms, discs) in TABLE3.items():
        names = _variant_names(row)
        for k, name in enumerate(names):
            det = discriminant_cubic(parse_net(forms[k]))
            own = parse_poly(discs[k])
            s = proportional(det, own)
            swapped = False
            if s is None and len(discs) == 2:
                other = parse_poly(discs[1 - k])
                s = proportional(det, other)
                swapped = s is not None
                if swapped:
                    own = other
            out.append(Table3Check(name, det, own, s, swapped))
    return out


def family3_net(c, g) -> tuple[Net, bool]:
    """<2xz + y^2, 2yz, -x^2 - 2g y^2 + c z^2 + 2g xz> and the validity flag c(c + 9g^2) != 0."""
    c, g = Fraction(c), Fraction(g)
    x, y, z = (Poly.var(i) for i in range(3))
    n = Net(x * z * 2 + y * y, y * z * 2, -(x * x) - y * y * (2 * g) + z * z * c + x * z * (2 * g))
    return n, c * (c + 9 * g * g) != 0


def family4_net(c) -> tuple[Net, bool]:
    """Hessian form <x^2 + 2c yz, y^2 + 2c xz, z^2 + 2c xy>."""
    c = Fraction(c)
    x, y, z = (Poly.var(i) for i in range(3))
    n = Net(x * x + y * z * (2 * c), y * y + x * z * (2 * c), z * z + x * y * (2 * c))
    return n, c * (c ** 3 - 1) * (8 * c ** 3 + 1) != 0


def printed_family3_discriminant(c, g) -> Poly:
    """The displayed Δ = -λ^2 ν + (λ - 2gν)(λ^2 + 2gλν + (c + g^2)ν^2)."""
    c, g = Fraction(c), Fraction(g)
    lam, mu, nu = (Poly.var(i) for i in range(3))
    return -(lam * lam * nu) + (lam - nu * (2 * g)) * (lam * lam + lam * nu * (2 * g) + nu * nu * (c + g * g))


def corrected_family3_discriminant(c, g) -> Poly:
    """Δ with the -λ^2 ν term read as -μ^2 ν."""
    c, g = Fraction(c), Fraction(g)
    lam, mu, nu = (Poly.var(i) for i in range(3))
    return -(mu * mu * nu) + (lam - nu * (2 * g)) * (lam * lam + lam * nu * (2 * g) + nu * nu * (c + g * g))


@dataclass(frozen=True)
class Family3Audit:
    c: Fraction
    g: Fraction
    determinant: Poly
    printed: Poly
    corrected: Poly
    printed_scalar: Fraction | None
    corrected_scalar: Fraction | None
    only_in_determinant: tuple
    only_in_printed: tuple

    @property
    def has_mu2nu(self) -> bool:
        return self.determinant.coeff((0, 2, 1)) != 0


def audit_family3(c, g) -> Family3Audit:
    det = discriminant_cubic(family3_net(c, g)[0])
    pr = printed_family3_discriminant(c, g)
    co = corrected_family3_discriminant(c, g)
    k = proportional(det, co)
    scaled = pr * k if k is not None else pr
    only_det = tuple(sorted(m for m in det.terms if scaled.coeff(m) != det.coeff(m) and m not in pr.terms))
    only_pr = tuple(sorted(m for m in pr.terms if scaled.coeff(m) != det.coeff(m)))
    return Family3Audit(Fraction(c), Fraction(g), det, pr, co, proportional(det, pr), k, only_det, only_pr)


def table2_region(c, g) -> str:
    c, g = Fraction(c), Fraction(g)
    if c == 0 and g == 0:
        return "C"
    b = -9 * g * g
    if c < b:
        return "c < -9g^2"
    if c == b:
        return "c = -9g^2"
    if c < 0:
        return "-9g^2 < c < 0"
    if c == 0:
        return "c = 0"
    return "c > 0"


def table2_label(c, g) -> str:
    """Region label; the sublabels follow the table layout with g-sign rows."""
    c, g = Fraction(c), Fraction(g)
    region = table2_region(c, g)
    pos = g > 0
    return {
        "C": "C",
        "c < -9g^2": "A_b",
        "c > 0": "A_d",
        "c = -9g^2": "B_c" if pos else "B_a",
        "-9g^2 < c < 0": "A_c" if pos else "A_a",
        "c = 0": "B*_a" if pos else "B*_c",
    }[region]


# ---------------------------------------------------------------------------
# group action
# ---------------------------------------------------------------------------


def apply_gl_pair(n: Net, S, T) -> Net:
    """Component i of the result is sum_j T[i][j] (q_j o S)."""
    S, T = la.as_matrix(S), la.as_matrix(T)
    for M in (S, T):
        if la.det(M) == 0:
            raise la.SingularMatrix("GL pair needs invertible matrices")
    images = [Poly.linear(S[i]) for i in range(3)]
    pulled = [q.substitute(images) for q in n.forms]
    return Net(*(sum((pulled[j] * T[i][j] for j in range(3)), Poly()) for i in range(3)))


def _coeff_vector(q: Poly) -> tuple:
    return tuple(q.coeff(m) for m in _QUAD)


def solve_target_mix(src: Net, dst: Net) -> la.Matrix | None:
    """Exact T with T . src = dst, if one exists."""
    basis = [_coeff_vector(q) for q in src.forms]
    if la.rank(basis) < 3:
        return None
    T = []
    for q in dst.forms:
        try:
            T.append(la.combination(basis, _coeff_vector(q)))
        except ValueError:
            return None
    return tuple(T)


def net_to_monge(n: Net) -> RegularGerm:
    return RegularGerm((Poly.var(0), Poly.var(1), Poly.var(2)) + n.forms)


def net_rank(n: Net) -> int:
    """Rank of the 3x6 coefficient matrix of the associated Monge germ."""
    return point_type(net_to_monge(n))[0]


# ---------------------------------------------------------------------------
# the worked example
# ---------------------------------------------------------------------------

EXAMPLE44_NET = "(x^2 + y*z, z^2 - y*z, x*z + y*z)"
EXAMPLE44_STEP1 = "(x^2 + z^2, z*(z - y), z*(x + y))"
EXAMPLE44_TARGET = "(y^2 + 2*z^2, x*z, y*z)"


@dataclass(frozen=True)
class ChainStep:
    description: str
    source: la.Matrix
    target: la.Matrix
    result: Net
    expected: Net | None
    verified: bool


def example44_chain() -> list[ChainStep]:
    one, zero = Fraction(1), Fraction(0)
    I3 = la.identity(3)
    q = parse_net(EXAMPLE44_NET)
    steps = []

    T1 = ((one, one, zero), (zero, one, zero), (zero, zero, one))
    r1 = apply_gl_pair(q, I3, T1)
    e1 = parse_net(EXAMPLE44_STEP1)
    steps.append(ChainStep("add the second form to the first", I3, T1, r1, e1, r1 == e1))

    # new coordinates X = x + y, Y = z - y, Z = z, so x = X + Y - Z, y = Z - Y, z = Z
    S2 = ((one, one, -one), (zero, -one, one), (zero, zero, one))
    r2 = apply_gl_pair(r1, S2, I3)
    e2 = net("(x + y - z)^2 + z^2", "y*z", "x*z")
    steps.append(ChainStep("source change X = x + y, Y = z - y", S2, I3, r2, e2, r2 == e2))

    # X' = X + Y, then rename X' -> y and Y -> x
    S3 = ((-one, one, zero), (one, zero, zero), (zero, zero, one))
    pulled = apply_gl_pair(r2, S3, I3)
    e3 = parse_net(EXAMPLE44_TARGET)
    T3 = solve_target_mix(pulled, e3)
    r3 = apply_gl_pair(r2, S3, T3) if T3 is not None else pulled
    steps.append(ChainStep("source change X' = X + Y, swap x and y, clean up the target",
                           S3, T3 if T3 is not None else I3, r3, e3, T3 is not None and r3 == e3))
    return steps


def example44_to_fa(tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray, float]:
    """Real (S, T) carrying (y^2 + 2z^2, xz, yz) to F_a = <x^2 + y^2, 2xy, 2yz>.

    The change needs sqrt(2), so it is checked in floating point.
    """
    r2 = np.sqrt(2.0)
    # rename y -> x, z -> y, x -> z and scale y by 1/sqrt(2)
    S = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0 / r2, 0.0]])
    T = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 2.0 * r2], [0.0, 2.0 * r2, 0.0]])
    src = [la.to_numpy(m) for m in parse_net(EXAMPLE44_TARGET).matrices]
    dst = [la.to_numpy(m) for m in table3_net("F_a").matrices]
    pulled = [S.T @ A @ S for A in src]
    mixed = [sum(T[i, j] * pulled[j] for j in range(3)) for i in range(3)]
    err = max(float(np.abs(mixed[i] - dst[i]).max()) for i in range(3))
    return S, T, err


@dataclass(frozen=True)
class LocusInvariants:
    point_type: str
    hull_dimension: int
    degree2_forms: int
    degree4_forms: int


def locus_invariants(n: Net, n_params: int = 10) -> LocusInvariants:
    g = net_to_monge(n)
    params = default_rational_params(n_params)
    pts = sample_regular_exact(g, params, params)
    return LocusInvariants(
        point_type(g)[1],
        affine_hull_of_locus(g, "sphere").dimension,
        len(vanishing_forms(pts, 2)),
        len(vanishing_forms(pts, 4)),
    )


@dataclass(frozen=True)
class Example44Report:
    chain: list
    chain_verified: bool
    fa_error: float
    discriminant_target: Poly
    discriminant_fa: Poly
    same_discriminant_shape: bool
    original: LocusInvariants
    reduced: LocusInvariants

    @property
    def invariants_distinguish(self) -> bool:
        return self.original != self.reduced


def verify_example44() -> Example44Report:
    chain = example44_chain()
    _, _, err = example44_to_fa()
    d_t = discriminant_cubic(parse_net(EXAMPLE44_TARGET))
    d_f = discriminant_cubic(table3_net("F_a"))
    # both are a linear form times the square of another
    same = _linear_times_square(d_t) and _linear_times_square(d_f)
    return Example44Report(
        chain,
        all(s.verified for s in chain),
        err,
        d_t,
        d_f,
        same,
        locus_invariants(parse_net(EXAMPLE44_NET)),
        locus_invariants(parse_net(EXAMPLE44_TARGET)),
    )


def _linear_times_square(p: Poly) -> bool:
    """True for a cubic of the form k l1 l2^2 with l1, l2 independent coordinate-type forms."""
    if len(p.terms) != 1:
        return False
    (mono,) = p.terms
    return sorted(mono) == [0, 1, 2]
