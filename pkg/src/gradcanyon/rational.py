"""Exact Gaussian-rational scalars and rational-reconstruction helpers.

``QI`` is the coefficient field for all exact polynomial work: a complex
number with ``fractions.Fraction`` real and imaginary parts.  It is immutable,
hashable, and closed under the four field operations.
"""

from __future__ import annotations

from fractions import Fraction


def as_fraction(x) -> Fraction:
    """Coerce int / Fraction / 'p/q' string to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot build an exact rational from {x!r}")


class QI:
    """A Gaussian rational a + b*i with exact Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", as_fraction(re))
        object.__setattr__(self, "im", as_fraction(im))

    def __setattr__(self, *_):
        raise AttributeError("QI is immutable")

    # -- field operations -------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QI(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QI(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QI(self.re * other.re - self.im * other.im,
                  self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n2 = other.re * other.re + other.im * other.im
        if n2 == 0:
            raise ZeroDivisionError("division by zero QI")
        return QI((self.re * other.re + self.im * other.im) / n2,
                  (self.im * other.re - self.re * other.im) / n2)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("QI powers must be non-negative integers")
        out, base = QI(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- structure ---------------------------------------------------------

    def conj(self) -> "QI":
        return QI(self.re, -self.im)

    def norm2(self) -> Fraction:
        """|self|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        return f"QI({self.re!s}, {self.im!s})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}*i)"


def _coerce(x):
    if isinstance(x, QI):
        return x
    if isinstance(x, (int, Fraction)):
        return QI(x)
    return NotImplemented


QI_ZERO = QI(0)
QI_ONE = QI(1)
QI_I = QI(0, 1)


def reconstruct_fraction(x: float, max_den: int, tol: float = 1e-9):
    """Nearest fraction with denominator <= max_den, or None if not close.

    Continued-fraction reconstruction via Fraction.limit_denominator; the
    candidate is accepted only when it matches ``x`` to ``tol`` (relative
    to max(1, |x|)), which keeps noisy fits from being over-rationalized.
    """
    cand = Fraction(x).limit_denominator(max_den)
    if abs(float(cand) - x) <= tol * max(1.0, abs(x)):
        return cand
    return None


def reconstruct_qi(zval: complex, max_den: int = 64, tol: float = 1e-10):
    """Try to recognize a complex float as an exact QI; None on failure."""
    re = reconstruct_fraction(zval.real, max_den, tol)
    im = reconstruct_fraction(zval.imag, max_den, tol)
    if re is None or im is None:
        return None
    return QI(re, im)
