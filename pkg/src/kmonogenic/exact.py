"""Exact Gaussian rationals a + b*i with arbitrary-precision rational parts."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

__all__ = ["ExactComplex", "I", "ONE", "ZERO", "Q", "as_exact"]


def Q(x) -> mpq:
    """Coerce an int, Fraction, mpq or 'p/q' string to an exact rational."""
    if isinstance(x, str):
        return mpq(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or a 'p/q' string")
    return mpq(x)


class ExactComplex:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Q(re)
        self.im = Q(im)

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> "ExactComplex":
        z = object.__new__(cls)
        z.re = re
        z.im = im
        return z

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, ExactComplex):
            return ExactComplex._raw(self.re + other.re, self.im + other.im)
        if isinstance(other, Rational):
            return ExactComplex._raw(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ExactComplex):
            return ExactComplex._raw(self.re - other.re, self.im - other.im)
        if isinstance(other, Rational):
            return ExactComplex._raw(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return ExactComplex._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, ExactComplex):
            a, b, c, d = self.re, self.im, other.re, other.im
            return ExactComplex._raw(a * c - b * d, a * d + b * c)
        if isinstance(other, Rational):
            return ExactComplex._raw(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ExactComplex):
            c, d = other.re, other.im
            n = c * c + d * d
            if not n:
                raise ZeroDivisionError("division by exact zero")
            a, b = self.re, self.im
            return ExactComplex._raw((a * c + b * d) / n, (b * c - a * d) / n)
        if isinstance(other, Rational):
            if not other:
                raise ZeroDivisionError("division by exact zero")
            return ExactComplex._raw(self.re / other, self.im / other)
        return NotImplemented

    def __rtruediv__(self, other):
        return ExactComplex(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return ONE / (self ** (-n))
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "ExactComplex":
        return ExactComplex._raw(self.re, -self.im)

    def abs2(self) -> mpq:
        return self.re * self.re + self.im * self.im

    # comparison -------------------------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, ExactComplex):
            return self.re == other.re and self.im == other.im
        if isinstance(other, Rational):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return self.re == other.real and self.im == other.imag
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def is_real(self) -> bool:
        return not self.im

    # conversion -------------------------------------------------------
    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def to_fractions(self) -> tuple[Fraction, Fraction]:
        return (Fraction(int(self.re.numerator), int(self.re.denominator)),
                Fraction(int(self.im.numerator), int(self.im.denominator)))

    def __repr__(self):
        return f"ExactComplex({str(self.re)!r}, {str(self.im)!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re} {sign} {abs(self.im)}*i)"


def as_exact(x) -> ExactComplex:
    if isinstance(x, ExactComplex):
        return x
    if isinstance(x, complex):
        raise TypeError("Python complex is inexact; build ExactComplex from rationals")
    return ExactComplex(x)


ZERO = ExactComplex(0, 0)
ONE = ExactComplex(1, 0)
I = ExactComplex(0, 1)
