"""Exact Gaussian-rational scalars and the exact/approximate promotion rules.

Two scalar regimes run through the whole library:

* exact      -- ``GaussianRational``: a complex number with rational real and
                imaginary parts.  Closed under +, -, *, / by nonzero.
* approximate -- the builtin ``complex`` (double precision).

Mixing the two promotes to ``complex``.  ``int`` and ``Fraction`` inputs are
treated as exact and coerced to ``GaussianRational``.
"""

from __future__ import annotations

from fractions import Fraction

_EXACT_REALS = (int, Fraction)


class GaussianRational:
    """Complex number a + b*i with a, b rational.  Immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            if im:
                raise TypeError("cannot combine a GaussianRational with an imaginary part")
            object.__setattr__(self, "re", re.re)
            object.__setattr__(self, "im", re.im)
            return
        if not isinstance(re, _EXACT_REALS + (str,)) or not isinstance(im, _EXACT_REALS + (str,)):
            raise TypeError(
                "GaussianRational parts must be int, Fraction or str; "
                "use GaussianRational.from_number for floats"
            )
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def from_number(cls, value):
        """Exact conversion of int/Fraction/float/complex (binary floats convert exactly)."""
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, _EXACT_REALS):
            return cls(value)
        if isinstance(value, float):
            return cls(Fraction(value))
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        raise TypeError(f"cannot convert {type(value).__name__} to GaussianRational")

    # -- ring operations -------------------------------------------------

    def _coerce(self, other):
        """Return other as GaussianRational, or None if promotion to complex is needed."""
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, _EXACT_REALS):
            return GaussianRational(other)
        if isinstance(other, (float, complex)):
            return None
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return complex(self) + other
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return complex(self) - other
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return other - complex(self)
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return complex(self) * other
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return complex(self) / other
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / n,
            (self.im * o.re - self.re * o.im) / n,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return other / complex(self)
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (GaussianRational(1) / self) ** (-n)
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    # -- structure -------------------------------------------------------

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self):
        """Exact |self|^2 as a Fraction."""
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self):
        return self.im == 0

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __abs__(self):
        return abs(complex(self))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, _EXACT_REALS):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        return format_gaussian(self)


def is_exact_scalar(value):
    return isinstance(value, (GaussianRational,) + _EXACT_REALS)


def as_exact(value):
    """Coerce an exact-regime value to GaussianRational (no float conversion)."""
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, _EXACT_REALS):
        return GaussianRational(value)
    raise TypeError(f"{value!r} is not an exact scalar")


def to_complex(value):
    if isinstance(value, GaussianRational):
        return complex(value)
    return complex(value)


def conj_scalar(value):
    if isinstance(value, GaussianRational):
        return value.conjugate()
    if isinstance(value, _EXACT_REALS):
        return value
    return complex(value).conjugate()


def rationalize(value):
    """Exactly convert a scalar of either regime to GaussianRational."""
    return GaussianRational.from_number(value)


def _format_fraction(f: Fraction) -> str:
    return str(f)


def format_gaussian(g: GaussianRational) -> str:
    """Render in the a/b+c/di convention: '3', '1/2', '2i', '1/3i', '1+i', '1/2-2/3i'."""
    re, im = g.re, g.im
    if im == 0:
        return _format_fraction(re)
    if im == 1:
        im_s = "i"
    elif im == -1:
        im_s = "-i"
    else:
        im_s = _format_fraction(im) + "i"
    if re == 0:
        return im_s
    sign = "+" if im > 0 else "-"
    mag = im_s.lstrip("-")
    return f"{_format_fraction(re)}{sign}{mag}"


def _format_float(x: float) -> str:
    return f"{x:.17g}"


def format_complex(c: complex) -> str:
    """Render a complex double with 17 significant digits per part."""
    re, im = c.real, c.imag
    if im == 0:
        return _format_float(re)
    if im == 1:
        im_s = "i"
    elif im == -1:
        im_s = "-i"
    else:
        im_s = _format_float(im) + "i"
    if re == 0:
        return im_s
    sign = "-" if (im < 0 or im_s.startswith("-")) else "+"
    mag = im_s.lstrip("-")
    return f"{_format_float(re)}{sign}{mag}"


def format_scalar(value) -> str:
    if isinstance(value, GaussianRational):
        return format_gaussian(value)
    if isinstance(value, _EXACT_REALS):
        return format_gaussian(GaussianRational(value))
    return format_complex(complex(value))
