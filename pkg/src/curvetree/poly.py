"""Exact sparse bivariate polynomials over the rationals.

A :class:`Polynomial` is an immutable map ``(i, j) -> c`` standing for the sum
of ``c * x**i * y**j``.  Coefficients are :class:`fractions.Fraction`, so all
algebra (derivatives, products, resultants) is exact; conversion to floating
point happens only when a polynomial is evaluated at float coordinates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateInput, ExponentOverflow, PolySyntaxError, UnknownIdentifier

MAX_EXPONENT = 64

Monomial = tuple  # (i, j) or, inside the parser, one exponent per variable


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite coefficient {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} as a coefficient")


def _is_exact(value) -> bool:
    return isinstance(value, (int, Fraction, Rational)) and not isinstance(value, bool)


class Polynomial:
    """Immutable polynomial in ``x`` and ``y`` with rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        clean: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in (terms or {}).items():
            i, j = int(i), int(j)
            if i < 0 or j < 0:
                raise ValueError("negative exponent")
            c = _as_fraction(c)
            if c:
                clean[(i, j)] = clean.get((i, j), Fraction(0)) + c
                if not clean[(i, j)]:
                    del clean[(i, j)]
        self._terms = MappingProxyType(dict(sorted(clean.items())))
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> "Polynomial":
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> "Polynomial":
        return cls({(0, 1): 1})

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        return parse_polynomial(text)

    # -- basic properties -------------------------------------------------
    @property
    def terms(self) -> Mapping[tuple[int, int], Fraction]:
        return self._terms

    @property
    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(i + j for i, j in self._terms)

    def degree_in(self, var: str) -> int:
        k = _var_index(var)
        if not self._terms:
            return -1
        return max(m[k] for m in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, i: int, j: int) -> Fraction:
        return self._terms.get((i, j), Fraction(0))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        if _is_exact(other):
            return self == Polynomial.constant(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"

    def __str__(self) -> str:
        return format_polynomial(self)

    # -- ring operations --------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if _is_exact(other):
            return Polynomial.constant(other)
        raise TypeError(f"unsupported operand {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out: dict[tuple[int, int], Fraction] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Polynomial.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- calculus -----------------------------------------------------------
    def derivative(self, var: str) -> "Polynomial":
        k = _var_index(var)
        out = {}
        for m, c in self._terms.items():
            if m[k]:
                new = list(m)
                new[k] -= 1
                out[tuple(new)] = c * m[k]
        return Polynomial(out)

    def scaled(self, a, b) -> "Polynomial":
        """Return the polynomial ``(x, y) -> self(a*x, b*y)``."""
        a, b = _as_fraction(a), _as_fraction(b)
        return Polynomial({(i, j): c * a**i * b**j for (i, j), c in self._terms.items()})

    def is_divisible_by_x(self) -> bool:
        return bool(self._terms) and all(i >= 1 for i, _ in self._terms)

    def is_y_symmetric(self) -> bool:
        """True when ``f(x, -y) == f(x, y)`` identically."""
        return all(j % 2 == 0 for _, j in self._terms)

    def monomial_content(self) -> tuple[int, int]:
        """Largest ``(a, b)`` such that ``x**a * y**b`` divides the polynomial."""
        if not self._terms:
            return (0, 0)
        return (min(i for i, _ in self._terms), min(j for _, j in self._terms))

    def divide_monomial(self, a: int, b: int) -> "Polynomial":
        out = {}
        for (i, j), c in self._terms.items():
            if i < a or j < b:
                raise ValueError("monomial does not divide the polynomial")
            out[(i - a, j - b)] = c
        return Polynomial(out)

    # -- evaluation ---------------------------------------------------------
    def evaluate(self, point: Sequence[float]) -> float:
        return evaluate(self, point)

    def evaluate_exact(self, point: Sequence) -> Fraction:
        x, y = (_as_fraction(v) for v in point)
        return sum((c * x**i * y**j for (i, j), c in self._terms.items()), Fraction(0))

    def abs_scale(self, point: Sequence[float]) -> float:
        """Sum of absolute term values at ``point``; the natural rounding scale."""
        x, y = float(point[0]), float(point[1])
        return math.fsum(abs(float(c)) * abs(x) ** i * abs(y) ** j for (i, j), c in self._terms.items())

    def __call__(self, x, y):
        """Vectorised float evaluation (Horner in ``y`` over Horner in ``x``)."""
        return _horner2(_coeff_table(self), np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def coefficients_in_y(self, x0: float) -> np.ndarray:
        """Float coefficients of ``y -> self(x0, y)``, highest power first."""
        table = _coeff_table(self)
        coeffs = np.array([np.polyval(col, x0) if len(col) else 0.0 for col in table])
        return coeffs[::-1]

    def coefficients_in_y_exact(self, x0) -> list[Fraction]:
        """Exact coefficients of ``y -> self(x0, y)``, lowest power first."""
        x0 = _as_fraction(x0)
        n = self.degree_in("y")
        out = [Fraction(0)] * (n + 1)
        for (i, j), c in self._terms.items():
            out[j] += c * x0**i
        return out


@lru_cache(maxsize=256)
def _coeff_table_cached(items: tuple) -> tuple:
    terms = dict(items)
    if not terms:
        return ()
    ny = max(j for _, j in terms)
    table = []
    for j in range(ny + 1):
        col = {i: float(c) for (i, jj), c in terms.items() if jj == j}
        if col:
            nx = max(col)
            table.append(np.array([col.get(i, 0.0) for i in range(nx, -1, -1)]))
        else:
            table.append(np.zeros(0))
    return tuple(table)


def _coeff_table(p: Polynomial) -> tuple:
    # table[j] holds the x-coefficients (highest power first) of the y**j part
    return _coeff_table_cached(tuple(p.terms.items()))


def _horner2(table, x, y):
    if not table:
        return np.zeros(np.broadcast(x, y).shape)
    acc = np.zeros(np.broadcast(x, y).shape)
    for col in reversed(table):
        cx = np.zeros_like(x) if not len(col) else _horner1(col, x)
        acc = acc * y + cx
    return acc


def _horner1(coeffs, x):
    acc = np.zeros_like(x) + coeffs[0]
    for c in coeffs[1:]:
        acc = acc * x + c
    return acc


def _var_index(var: str) -> int:
    if var == "x":
        return 0
    if var == "y":
        return 1
    raise ValueError(f"variable must be 'x' or 'y', got {var!r}")


def evaluate(p: Polynomial, point: Sequence[float]) -> float:
    """Evaluate ``p`` at a float point using compensated (``fsum``) summation.

    Overflow yields ``inf`` (or ``nan``) together with a ``RuntimeWarning``.
    """
    x, y = float(point[0]), float(point[1])
    try:
        return math.fsum(float(c) * x**i * y**j for (i, j), c in p.terms.items())
    except OverflowError:
        warnings.warn("polynomial evaluation overflowed", RuntimeWarning, stacklevel=2)
        with np.errstate(over="ignore", invalid="ignore"):
            return float(np.sum([float(c) * np.float64(x) ** i * np.float64(y) ** j for (i, j), c in p.terms.items()]))


def partial_derivative(p: Polynomial, var: str) -> Polynomial:
    return p.derivative(var)


# -- Hessian ------------------------------------------------------------------

@dataclass(frozen=True)
class SymMatrix2:
    """Symmetric 2x2 matrix ``[[a11, a12], [a12, a22]]``."""

    a11: object
    a12: object
    a22: object

    @property
    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a12

    def as_array(self) -> np.ndarray:
        return np.array([[float(self.a11), float(self.a12)], [float(self.a12), float(self.a22)]])

    def classify(self) -> str:
        # Sylvester criterion on the leading principal minors
        d = self.det
        if d > 0:
            return "positive_definite" if self.a11 > 0 else "negative_definite"
        if d < 0:
            return "indefinite"
        if self.a11 >= 0 and self.a22 >= 0:
            return "positive_semidefinite"
        return "negative_semidefinite"


def hessian_at(p: Polynomial, point: Sequence) -> SymMatrix2:
    """Second partials of ``p`` at ``point``.

    Exact (``Fraction``) when the coordinates are exact numbers, float otherwise.
    """
    fxx = p.derivative("x").derivative("x")
    fxy = p.derivative("x").derivative("y")
    fyy = p.derivative("y").derivative("y")
    if all(_is_exact(v) for v in point):
        return SymMatrix2(fxx.evaluate_exact(point), fxy.evaluate_exact(point), fyy.evaluate_exact(point))
    return SymMatrix2(evaluate(fxx, point), evaluate(fxy, point), evaluate(fyy, point))


# -- printing -----------------------------------------------------------------

def _format_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _format_monomial(names: Sequence[str], exps: Sequence[int]) -> str:
    parts = []
    for name, e in zip(names, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _format_terms(items: Iterable[tuple[tuple, Fraction]], names: Sequence[str]) -> str:
    # highest total degree first, then lexicographic in the exponent tuple
    items = sorted(items, key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))
    if not items:
        return "0"
    out = []
    for k, (m, c) in enumerate(items):
        sign = "-" if c < 0 else "+"
        a = abs(c)
        mono = _format_monomial(names, m)
        if not mono:
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        if k == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def format_polynomial(p: Polynomial) -> str:
    """Render ``p`` in the input grammar; ``parse(format(p)) == p``."""
    return _format_terms(p.terms.items(), ("x", "y"))


# -- parsing ------------------------------------------------------------------

class _Parser:
    """Recursive-descent parser that expands eagerly into a term dict.

    Grammar (whitespace insignificant, juxtaposition multiplies)::

        expr   := [sign] term (('+'|'-') term)*
        term   := factor ('*'? factor)*
        factor := base ('^' uint)?
        base   := variable | number | '(' expr ')'
        number := uint ('/' uint)? | decimal
    """

    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.variables = tuple(variables)
        self.nvars = len(self.variables)
        self.pos = 0

    # offsets are reported in bytes of the UTF-8 encoding
    def _offset(self, pos=None) -> int:
        pos = self.pos if pos is None else pos
        return len(self.text[:pos].encode("utf-8"))

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _error(self, msg, pos=None, cls=PolySyntaxError):
        raise cls(msg, self._offset(pos))

    def parse(self) -> dict:
        self._skip()
        if not self._peek():
            self._error("empty expression")
        result = self.expr()
        if self._peek():
            self._error(f"unexpected character {self._peek()!r}")
        return result

    def expr(self) -> dict:
        sign = None
        if self._peek() in "+-" and self._peek():
            sign = self._peek()
            self.pos += 1
        acc = self.term()
        if sign == "-":
            acc = _dneg(acc)
        while self._peek() and self._peek() in "+-":
            op = self._peek()
            self.pos += 1
            rhs = self.term()
            acc = _dadd(acc, rhs if op == "+" else _dneg(rhs))
        return acc

    def _starts_base(self, ch: str) -> bool:
        return bool(ch) and (ch.isalpha() or ch.isdigit() or ch in "(.")

    def term(self) -> dict:
        acc = self.factor()
        while True:
            ch = self._peek()
            if ch == "*":
                self.pos += 1
                acc = self._mul_checked(acc, self.factor())
            elif self._starts_base(ch):
                acc = self._mul_checked(acc, self.factor())
            else:
                return acc

    def _mul_checked(self, a: dict, b: dict) -> dict:
        out = _dmul(a, b)
        for m in out:
            if max(m, default=0) > MAX_EXPONENT:
                self._error(f"exponent exceeds {MAX_EXPONENT}", cls=ExponentOverflow)
        return out

    def factor(self) -> dict:
        base = self.base()
        if self._peek() == "^":
            self.pos += 1
            self._skip()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if start == self.pos:
                self._error("expected unsigned integer exponent")
            n = int(self.text[start:self.pos])
            if n > MAX_EXPONENT:
                self._error(f"exponent {n} exceeds {MAX_EXPONENT}", start, cls=ExponentOverflow)
            out = _dpow(base, n, self.nvars)
            for m in out:
                if max(m, default=0) > MAX_EXPONENT:
                    self._error(f"exponent exceeds {MAX_EXPONENT}", start, cls=ExponentOverflow)
            return out
        return base

    def base(self) -> dict:
        ch = self._peek()
        if not ch:
            self._error("unexpected end of input")
        if ch == "(":
            self.pos += 1
            inner = self.expr()
            if self._peek() != ")":
                self._error("expected ')'")
            self.pos += 1
            return inner
        if ch.isdigit() or ch == ".":
            return {(0,) * self.nvars: self.number()}
        if ch.isalpha():
            start = self.pos
            name = ch
            self.pos += 1
            if name in self.variables:
                m = [0] * self.nvars
                m[self.variables.index(name)] = 1
                return {tuple(m): Fraction(1)}
            # report the whole identifier
            while self.pos < len(self.text) and self.text[self.pos].isalnum():
                self.pos += 1
            self._error(f"unknown identifier {self.text[start:self.pos]!r}", start, cls=UnknownIdentifier)
        self._error(f"unexpected character {ch!r}")

    def number(self) -> Fraction:
        start = self.pos
        text = self.text
        while self.pos < len(text) and text[self.pos].isdigit():
            self.pos += 1
        if self.pos < len(text) and text[self.pos] == ".":
            self.pos += 1
            frac_start = self.pos
            while self.pos < len(text) and text[self.pos].isdigit():
                self.pos += 1
            if frac_start == self.pos and frac_start - 1 == start:
                self._error("malformed number", start)
            return Fraction(text[start:self.pos] if text[start] != "." else "0" + text[start:self.pos])
        numer = int(text[start:self.pos])
        save = self.pos
        self._skip()
        if self.pos < len(text) and text[self.pos] == "/":
            self.pos += 1
            self._skip()
            dstart = self.pos
            while self.pos < len(text) and text[self.pos].isdigit():
                self.pos += 1
            if dstart == self.pos:
                self._error("expected denominator", dstart)
            denom = int(text[dstart:self.pos])
            if denom == 0:
                self._error("zero denominator", dstart)
            return Fraction(numer, denom)
        self.pos = save
        return Fraction(numer)


def _dadd(a: dict, b: dict) -> dict:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, Fraction(0)) + c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _dneg(a: dict) -> dict:
    return {m: -c for m, c in a.items()}


def _dmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(u + v for u, v in zip(m1, m2))
            out[m] = out.get(m, Fraction(0)) + c1 * c2
    return {m: c for m, c in out.items() if c}


def _dpow(a: dict, n: int, nvars: int) -> dict:
    result = {(0,) * nvars: Fraction(1)}
    base = a
    while n:
        if n & 1:
            result = _dmul(result, base)
        n >>= 1
        if n:
            base = _dmul(base, base)
    return result


def parse_polynomial(text: str) -> Polynomial:
    """Parse and fully expand a polynomial expression in ``x`` and ``y``.

    >>> parse_polynomial("x^2 + (y^2 - x)^2").terms == {(1, 2): -2, (2, 0): 2, (0, 4): 1}
    True
    """
    terms = _Parser(text, ("x", "y")).parse()
    return Polynomial(terms)


# -- univariate polynomials over Q[x, y] and resultants -------------------------

@dataclass(frozen=True)
class UniPolyOverPoly:
    """Polynomial in an auxiliary variable ``t`` with coefficients in Q[x, y].

    ``coefficients[k]`` multiplies ``t**k``.
    """

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(c if isinstance(c, Polynomial) else Polynomial.constant(c) for c in self.coefficients)
        while coeffs and coeffs[-1].is_zero():
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def parse(cls, text: str) -> "UniPolyOverPoly":
        """Parse an expression in ``x``, ``y`` and ``t``."""
        terms = _Parser(text, ("x", "y", "t")).parse()
        deg = max((m[2] for m in terms), default=0)
        buckets: list[dict] = [{} for _ in range(deg + 1)]
        for (i, j, k), c in terms.items():
            buckets[k][(i, j)] = c
        return cls(tuple(Polynomial(b) for b in buckets))

    def evaluate_t(self, t) -> Polynomial:
        t = _as_fraction(t)
        acc = Polynomial()
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc

    def __str__(self) -> str:
        parts = []
        for k, c in enumerate(self.coefficients):
            if c.is_zero():
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts) or "0"


def sylvester_matrix(g: UniPolyOverPoly, h: UniPolyOverPoly) -> list[list[Polynomial]]:
    m, n = g.degree, h.degree
    size = m + n
    zero = Polynomial()
    rows = []
    g_high = list(reversed(g.coefficients))
    h_high = list(reversed(h.coefficients))
    for r in range(n):
        rows.append([zero] * r + g_high + [zero] * (size - r - len(g_high)))
    for r in range(m):
        rows.append([zero] * r + h_high + [zero] * (size - r - len(h_high)))
    return rows


def determinant(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Exact determinant by Laplace expansion memoised over column subsets."""
    n = len(matrix)
    if n == 0:
        return Polynomial.constant(1)
    memo: dict[int, Polynomial] = {}

    def minor(row: int, cols_mask: int) -> Polynomial:
        # determinant of rows[row:] restricted to the columns in cols_mask
        if row == n:
            return Polynomial.constant(1)
        if cols_mask in memo:
            return memo[cols_mask]
        acc = Polynomial()
        sign = 1
        for col in range(n):
            if not cols_mask >> col & 1:
                continue
            entry = matrix[row][col]
            if not entry.is_zero():
                sub = minor(row + 1, cols_mask & ~(1 << col))
                if not sub.is_zero():
                    acc = acc + entry * sub if sign > 0 else acc - entry * sub
            sign = -sign
        memo[cols_mask] = acc
        return acc

    return minor(0, (1 << n) - 1)


def sylvester_resultant(g: UniPolyOverPoly, h: UniPolyOverPoly) -> Polynomial:
    """Resultant of ``g`` and ``h`` with respect to ``t``.

    Eliminates ``t`` from a parametrisation: for ``g = x - p(t)`` and
    ``h = y - q(t)`` the result vanishes exactly on the parametrised curve.
    """
    if g.degree < 1 or h.degree < 1:
        raise DegenerateInput("resultant needs both inputs of degree >= 1 in t")
    return determinant(sylvester_matrix(g, h))


X = Polynomial.x()
Y = Polynomial.y()
