"""Exact arithmetic in Q and Q(sqrt 2).

Elements of Q(sqrt 2) are stored as pairs of reduced fractions ``a + b*sqrt(2)``.
Because sqrt(2) is irrational, equality and zero tests are component-wise and
exact.  Conversion to float is correctly rounded up to a couple of ulp, even
when ``a`` and ``b*sqrt(2)`` nearly cancel.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

__all__ = [
    "QSqrt2",
    "SQRT2",
    "to_float",
    "is_zero",
    "field_arith",
    "parse_rational",
    "format_rational",
    "rref",
]


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` (or an int) into a reduced Fraction."""
    if isinstance(text, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise TypeError(f"expected a 'p/q' string, got {type(text).__name__}")
    return Fraction(text.strip())


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


class QSqrt2:
    """An element ``a + b*sqrt(2)`` of Q(sqrt 2); immutable."""

    __slots__ = ("_a", "_b")

    def __init__(self, a=0, b=0):
        if isinstance(a, float) or isinstance(b, float):
            raise TypeError("QSqrt2 takes exact rationals, not floats")
        object.__setattr__(self, "_a", Fraction(a))
        object.__setattr__(self, "_b", Fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("QSqrt2 is immutable")

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @classmethod
    def coerce(cls, x) -> "QSqrt2":
        if isinstance(x, QSqrt2):
            return x
        if isinstance(x, (int, Rational)) and not isinstance(x, bool):
            return cls(x, 0)
        raise TypeError(f"cannot convert {x!r} to QSqrt2")

    # -- serialization -------------------------------------------------
    def to_json(self) -> dict:
        return {"a": format_rational(self._a), "b": format_rational(self._b)}

    @classmethod
    def from_json(cls, obj) -> "QSqrt2":
        if not isinstance(obj, dict) or set(obj) - {"a", "b"}:
            raise ValueError(f"expected an object with fields 'a' and 'b', got {obj!r}")
        return cls(parse_rational(obj.get("a", "0")), parse_rational(obj.get("b", "0")))

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self._a + o._a, self._b + o._b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self._a, -self._b)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self._a - o._a, self._b - o._b)

    def __rsub__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        a, b, c, d = self._a, self._b, o._a, o._b
        return QSqrt2(a * c + 2 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def conjugate(self) -> "QSqrt2":
        """Galois conjugate ``a - b*sqrt(2)``."""
        return QSqrt2(self._a, -self._b)

    def norm(self) -> Fraction:
        return self._a * self._a - 2 * self._b * self._b

    def inverse(self) -> "QSqrt2":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 2)")
        return QSqrt2(self._a / n, -self._b / n)

    def __truediv__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = QSqrt2(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison ----------------------------------------------------
    def __eq__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return self._a == o._a and self._b == o._b

    def __hash__(self):
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b))

    def __bool__(self):
        return not (self._a == 0 and self._b == 0)

    def sign(self) -> int:
        """Exact sign of the real number ``a + b*sqrt(2)``."""
        sa = (self._a > 0) - (self._a < 0)
        sb = (self._b > 0) - (self._b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with 2 b^2
        d = self._a * self._a - 2 * self._b * self._b
        return sa if d > 0 else sb

    def __lt__(self, other):
        return (self - QSqrt2.coerce(other)).sign() < 0

    def __float__(self):
        return to_float(self)

    def __repr__(self):
        return f"QSqrt2({format_rational(self._a)!r}, {format_rational(self._b)!r})"

    def __str__(self):
        if self._b == 0:
            return format_rational(self._a)
        b = "" if abs(self._b) == 1 else f"{format_rational(abs(self._b))}*"
        tail = f"{b}sqrt2"
        if self._a == 0:
            return ("-" if self._b < 0 else "") + tail
        return f"{format_rational(self._a)} {'-' if self._b < 0 else '+'} {tail}"


SQRT2 = QSqrt2(0, 1)


def is_zero(x) -> bool:
    if isinstance(x, QSqrt2):
        return x.a == 0 and x.b == 0
    return x == 0


def to_float(x) -> float:
    """Round ``a + b*sqrt(2)`` to the nearest double.

    sqrt(2) is replaced by a dyadic approximation with enough bits that the
    absolute error is far below one ulp of the result; the final Fraction to
    float conversion is correctly rounded.
    """
    if not isinstance(x, QSqrt2):
        return float(x)
    if x.b == 0:
        return float(x.a)
    bits = 80
    while True:
        s = Fraction(math.isqrt(2 << (2 * bits)), 1 << bits)  # sqrt2 - 2^-bits < s <= sqrt2
        approx = x.a + x.b * s
        err = abs(x.b) / Fraction(1 << bits)
        if approx != 0 and err * (1 << 60) < abs(approx):
            return float(approx)
        bits *= 2


def field_arith(x, y, op: str):
    """Apply ``op`` in {'add', 'sub', 'mul', 'div'} to two Q(sqrt 2) elements."""
    x, y = QSqrt2.coerce(x), QSqrt2.coerce(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def rref(rows, ncols):
    """Exact reduced row echelon form over any field (Fraction or QSqrt2 entries).

    Returns ``(reduced_rows, pivot_columns)``; input rows are not modified.
    """
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c] if not isinstance(m[r][c], int) else Fraction(1, m[r][c])
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [vi - f * vr for vi, vr in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots
