"""Sparse polynomials in three variables with exact rational coefficients.

A :class:`Poly` maps exponent triples ``(i, j, k)`` to coefficients.  Parsed
input always carries :class:`fractions.Fraction` coefficients; floats are
tolerated so that numerically rotated germs can reuse the same machinery.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Number
from typing import Iterable, Sequence

Monomial = tuple[int, int, int]

VARS = ("x", "y", "z")

_SUPERSCRIPTS = {"²": "^2", "³": "^3", "⁴": "^4"}
_MINUS_SIGNS = {"−": "-", "–": "-"}


def _coerce(c):
    if isinstance(c, bool):
        raise TypeError("boolean coefficient")
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, (Fraction, float)):
        return c
    if isinstance(c, Number):
        return float(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def is_exact_value(c) -> bool:
    return isinstance(c, (int, Fraction))


class Poly:
    """Immutable sparse polynomial in (x, y, z)."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean: dict[Monomial, object] = {}
        if terms:
            for mono, c in dict(terms).items():
                if len(mono) != 3 or any(e < 0 for e in mono):
                    raise ValueError(f"bad exponent triple {mono!r}")
                c = _coerce(c)
                if c != 0:
                    clean[tuple(int(e) for e in mono)] = c
        self._terms = clean
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(0, 0, 0): c})

    @classmethod
    def var(cls, index: int) -> "Poly":
        mono = [0, 0, 0]
        mono[index] = 1
        return cls({tuple(mono): 1})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "Poly":
        return cls({(1, 0, 0): coeffs[0], (0, 1, 0): coeffs[1], (0, 0, 1): coeffs[2]})

    # access -------------------------------------------------------------
    @property
    def terms(self) -> dict[Monomial, object]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, mono: Monomial):
        return self._terms.get(tuple(mono), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    @property
    def min_degree(self) -> int:
        return min((sum(m) for m in self._terms), default=-1)

    @property
    def is_exact(self) -> bool:
        return all(is_exact_value(c) for c in self._terms.values())

    def homogeneous(self, d: int) -> "Poly":
        return Poly({m: c for m, c in self._terms.items() if sum(m) == d})

    def truncate(self, d: int) -> "Poly":
        """Drop every term of total degree above ``d``."""
        return Poly({m: c for m, c in self._terms.items() if sum(m) <= d})

    def drop_below(self, d: int) -> "Poly":
        return Poly({m: c for m, c in self._terms.items() if sum(m) >= d})

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, Number) and not isinstance(other, bool):
            other = _coerce(other)
            return Poly({m: c * other for m, c in self._terms.items()})
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        out: dict[Monomial, object] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return False
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # calculus / evaluation ------------------------------------------------------
    def diff(self, index: int) -> "Poly":
        out = {}
        for m, c in self._terms.items():
            e = m[index]
            if e:
                mm = list(m)
                mm[index] -= 1
                out[tuple(mm)] = c * e
        return Poly(out)

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = tuple(point[0])
        total = 0
        for (i, j, k), c in self._terms.items():
            total += c * point[0] ** i * point[1] ** j * point[2] ** k
        return total

    def substitute(self, images: Sequence["Poly"]) -> "Poly":
        """Compose with ``(x, y, z) -> images``."""
        images = [_as_poly(p) for p in images]
        cache: dict[tuple[int, int], Poly] = {}

        def power(idx, e):
            key = (idx, e)
            if key not in cache:
                cache[key] = images[idx] ** e
            return cache[key]

        out = Poly()
        for (i, j, k), c in self._terms.items():
            out = out + power(0, i) * power(1, j) * power(2, k) * c
        return out

    def map_coeffs(self, fn) -> "Poly":
        return Poly({m: fn(c) for m, c in self._terms.items()})

    def snap(self, tol: float) -> "Poly":
        """Zero out float coefficients with magnitude below ``tol``."""
        return Poly({m: c for m, c in self._terms.items() if is_exact_value(c) or abs(c) > tol})

    # printing -------------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]))

    def format(self, names: Sequence[str] = VARS) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for idx, (mono, c) in enumerate(self.sorted_terms()):
            neg = c < 0
            mag = -c if neg else c
            mono_txt = _format_monomial(mono, names)
            if mono_txt and mag == 1:
                body = mono_txt
            else:
                coeff_txt = _format_coeff(mag)
                body = f"{coeff_txt}*{mono_txt}" if mono_txt else coeff_txt
            if idx == 0:
                pieces.append(f"-{body}" if neg else body)
            else:
                pieces.append(f" - {body}" if neg else f" + {body}")
        return "".join(pieces)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"Poly({self.format()!r})"


def _as_poly(obj):
    if isinstance(obj, Poly):
        return obj
    if isinstance(obj, Number) and not isinstance(obj, bool):
        return Poly.const(obj)
    return NotImplemented


def _grlex_key(mono: Monomial):
    # higher total degree first, then lexicographic with x > y > z
    return (-sum(mono), -mono[0], -mono[1], -mono[2])


def monomials_up_to(degree: int, min_degree: int = 0) -> list[Monomial]:
    """All exponent triples of total degree in [min_degree, degree], grlex order."""
    out = []
    for d in range(min_degree, degree + 1):
        for i in range(d, -1, -1):
            for j in range(d - i, -1, -1):
                out.append((i, j, d - i - j))
    return sorted(out, key=_grlex_key)


def _format_coeff(c) -> str:
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return str(c.numerator)
        return f"{c.numerator}/{c.denominator}"
    return repr(float(c))


def _format_monomial(mono: Monomial, names: Sequence[str]) -> str:
    parts = []
    for name, e in zip(names, mono):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


class PolySyntaxError(ValueError):
    """Malformed polynomial text; ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


def _normalize(text: str) -> str:
    for k, v in _MINUS_SIGNS.items():
        text = text.replace(k, v)
    for k, v in _SUPERSCRIPTS.items():
        text = text.replace(k, v)
    return text


class _Parser:
    def __init__(self, text: str, names: Sequence[str] = VARS):
        self.text = _normalize(text)
        self.names = tuple(names)
        self.pos = 0

    def error(self, msg):
        raise PolySyntaxError(msg, self.pos, self.text)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            found = self.peek() or "end of input"
            self.error(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def at_end(self):
        return self.peek() == ""

    def integer(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected integer")
        return int(self.text[start:self.pos])

    def expr(self) -> Poly:
        result = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> Poly:
        result = self.unary()
        while self.peek() == "*":
            self.pos += 1
            result = result * self.unary()
        return result

    def unary(self) -> Poly:
        ch = self.peek()
        if ch == "-":
            self.pos += 1
            return -self.unary()
        if ch == "+":
            self.pos += 1
            return self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            base = base ** self.integer()
        return base

    def atom(self) -> Poly:
        ch = self.peek()
        if ch.isdigit():
            num = self.integer()
            if self.peek() == "/":
                self.pos += 1
                den_pos = self.pos
                den = self.integer()
                if den == 0:
                    self.pos = den_pos
                    self.error("zero denominator")
                return Poly.const(Fraction(num, den))
            return Poly.const(num)
        if ch == "(":
            self.pos += 1
            inner = self.expr()
            self.expect(")")
            return inner
        for idx, name in enumerate(self.names):
            if self.text.startswith(name, self.pos):
                end = self.pos + len(name)
                if end < len(self.text) and (self.text[end].isalnum() or self.text[end] == "_"):
                    continue
                self.pos = end
                return Poly.var(idx)
        if not ch:
            self.error("unexpected end of input")
        self.error(f"unexpected character {ch!r}")


def parse_poly(text: str, names: Sequence[str] = VARS) -> Poly:
    p = _Parser(text, names)
    result = p.expr()
    if not p.at_end():
        p.error(f"unexpected trailing input {p.peek()!r}")
    return result


_OPEN = {"(": ")", "<": ">", "⟨": "⟩", "[": "]"}


def parse_tuple(text: str, names: Sequence[str] = VARS, require_brackets: bool = True) -> list[Poly]:
    """Parse ``(p1, p2, ...)`` into a list of polynomials."""
    p = _Parser(text, names)
    ch = p.peek()
    close = None
    if ch in _OPEN:
        close = _OPEN[ch]
        p.pos += 1
    elif require_brackets:
        p.error("expected '('")
    items = [p.expr()]
    while p.peek() == ",":
        p.pos += 1
        items.append(p.expr())
    if close is not None:
        p.expect(close)
    if not p.at_end():
        p.error(f"unexpected trailing input {p.peek()!r}")
    return items


def format_tuple(polys: Iterable[Poly], names: Sequence[str] = VARS) -> str:
    return "(" + ", ".join(q.format(names) for q in polys) + ")"
