"""Sparse bivariate complex polynomials under the degree-lexicographic order.

A monomial is a pair ``(a, b)``: ``a`` is the exponent of ``w`` (the formal
stand-in for the conjugate variable) and ``b`` the exponent of ``z``.  The
order compares total degree first; within a degree a higher power of ``z``
wins, so ``z^d > z^(d-1) w > ... > w^d`` and the degree-by-degree listing of
monomials runs 1, z, w, z^2, zw, w^2, ...

Coefficients are either all exact (``GaussianRational``) or all approximate
(``complex``); mixing promotes the whole polynomial to approximate.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction

from .scalars import (
    GaussianRational,
    conj_scalar,
    format_scalar,
    is_exact_scalar,
    rationalize,
    to_complex,
)

Monomial = tuple  # (w_exponent, z_exponent)

ONE = (0, 0)
Z = (0, 1)
W = (1, 0)


def monomial_degree(m):
    return m[0] + m[1]


def deglex_key(m):
    """Sort key realizing the order: by total degree, then by z-exponent."""
    return (m[0] + m[1], m[1])


def monomial_compare(m1, m2):
    """-1, 0 or 1 as m1 <, =, > m2 in the degree-lexicographic order."""
    k1, k2 = deglex_key(m1), deglex_key(m2)
    return (k1 > k2) - (k1 < k2)


def monomial_mul(m1, m2):
    return (m1[0] + m2[0], m1[1] + m2[1])


def monomial_divides(m1, m2):
    """True when m1 divides m2."""
    return m1[0] <= m2[0] and m1[1] <= m2[1]


def monomial_div(m1, m2):
    """m1 / m2; requires divisibility."""
    if not monomial_divides(m2, m1):
        raise ValueError(f"monomial {m2} does not divide {m1}")
    return (m1[0] - m2[0], m1[1] - m2[1])


def monomial_lcm(m1, m2):
    return (max(m1[0], m2[0]), max(m1[1], m2[1]))


def monomials_up_to(degree):
    """All monomials of total degree <= degree, ascending in the order."""
    out = []
    for d in range(degree + 1):
        for b in range(d, -1, -1):
            out.append((d - b, b))
    out.sort(key=deglex_key)
    return out


class Polynomial:
    """Immutable sparse polynomial in (z, w) with canonical term map."""

    __slots__ = ("_terms", "_exact")

    def __init__(self, terms=None):
        clean = {}
        exact = True
        if terms:
            for m, c in dict(terms).items():
                m = (int(m[0]), int(m[1]))
                if m[0] < 0 or m[1] < 0:
                    raise ValueError(f"negative exponent in monomial {m}")
                if is_exact_scalar(c):
                    c = GaussianRational(c) if not isinstance(c, GaussianRational) else c
                else:
                    c = complex(c)
                    exact = False
                if m in clean:
                    raise ValueError(f"duplicate monomial {m}")
                if c == 0 or (isinstance(c, GaussianRational) and not c):
                    continue
                clean[m] = c
        if not exact:
            clean = {m: to_complex(c) for m, c in clean.items()}
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_exact", exact or not clean)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def constant(cls, c):
        return cls({ONE: c})

    @classmethod
    def variable(cls, name):
        if name == "z":
            return cls({Z: 1})
        if name == "w":
            return cls({W: 1})
        raise ValueError("variable must be 'z' or 'w'")

    @classmethod
    def from_terms(cls, pairs):
        acc = {}
        for m, c in pairs:
            if m in acc:
                acc[m] = acc[m] + c
            else:
                acc[m] = c
        return cls(acc)

    # -- inspection --------------------------------------------------------

    @property
    def is_exact(self):
        return self._exact

    @property
    def is_zero(self):
        return not self._terms

    def items(self):
        return self._terms.items()

    def monomials(self):
        return self._terms.keys()

    def coefficient(self, m):
        if self._exact:
            return self._terms.get(m, GaussianRational(0))
        return self._terms.get(m, 0j)

    def __len__(self):
        return len(self._terms)

    @property
    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(a + b for a, b in self._terms)

    def leading_monomial(self):
        if not self._terms:
            raise ValueError("the zero polynomial has no leading monomial")
        return max(self._terms, key=deglex_key)

    def leading_coefficient(self):
        return self._terms[self.leading_monomial()]

    def leading_term(self):
        m = self.leading_monomial()
        return m, self._terms[m]

    def coefficient_scale(self):
        """max |coefficient|, 0.0 for the zero polynomial."""
        if not self._terms:
            return 0.0
        return max(abs(to_complex(c)) for c in self._terms.values())

    # -- regime conversion ---------------------------------------------------

    def to_approx(self):
        if not self._exact:
            return self
        return Polynomial({m: to_complex(c) for m, c in self._terms.items()})

    def to_exact(self):
        """Exact (binary-faithful) rationalization of approximate coefficients."""
        if self._exact:
            return self
        return Polynomial({m: rationalize(c) for m, c in self._terms.items()})

    # -- ring operations -----------------------------------------------------

    def _pair(self, other):
        if isinstance(other, Polynomial):
            pass
        elif is_exact_scalar(other) or isinstance(other, (float, complex)):
            other = Polynomial.constant(other)
        else:
            return None, None
        if self._exact and not other._exact:
            return self.to_approx(), other
        if other._exact and not self._exact:
            return self, other.to_approx()
        return self, other

    def __add__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        acc = dict(a._terms)
        for m, c in b._terms.items():
            if m in acc:
                acc[m] = acc[m] + c
            else:
                acc[m] = c
        return Polynomial(acc)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        acc = dict(a._terms)
        for m, c in b._terms.items():
            if m in acc:
                acc[m] = acc[m] - c
            else:
                acc[m] = -c
        return Polynomial(acc)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Polynomial({m: -c for m, c in self._terms.items()})

    def __mul__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        acc = {}
        for m1, c1 in a._terms.items():
            for m2, c2 in b._terms.items():
                m = (m1[0] + m2[0], m1[1] + m2[1])
                prod = c1 * c2
                if m in acc:
                    acc[m] = acc[m] + prod
                else:
                    acc[m] = prod
        return Polynomial(acc)

    __rmul__ = __mul__

    def scale(self, c):
        return Polynomial({m: coeff * c for m, coeff in self._terms.items()})

    def monic(self):
        if not self._terms:
            raise ValueError("cannot make the zero polynomial monic")
        lc = self.leading_coefficient()
        return Polynomial({m: c / lc for m, c in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            if other == 0:
                return not self._terms
            return NotImplemented
        if self._exact != other._exact:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"Polynomial({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)

    # -- the conjugation involution -------------------------------------------

    def conjugate(self):
        """Conjugate every coefficient and swap the two exponents."""
        return Polynomial({(b, a): conj_scalar(c) for (a, b), c in self._terms.items()})

    def is_harmonic(self):
        """True iff no monomial involves both variables (zero mixed derivative)."""
        return all(a == 0 or b == 0 for a, b in self._terms)

    def mixed_partial(self):
        """d^2/dz dw, for cross-checking harmonicity."""
        acc = {}
        for (a, b), c in self._terms.items():
            if a >= 1 and b >= 1:
                acc[(a - 1, b - 1)] = c * (a * b)
        return Polynomial(acc)

    # -- evaluation -------------------------------------------------------------

    def evaluate(self, point):
        """Value at point = (z, w); exact when polynomial and point are exact."""
        zv, wv = point
        exact = self._exact and is_exact_scalar(zv) and is_exact_scalar(wv)
        if exact:
            zv = zv if isinstance(zv, GaussianRational) else GaussianRational(zv)
            wv = wv if isinstance(wv, GaussianRational) else GaussianRational(wv)
            total = GaussianRational(0)
        else:
            zv, wv = to_complex(zv), to_complex(wv)
            total = 0j
        zp = {0: GaussianRational(1) if exact else 1 + 0j}
        wp = {0: GaussianRational(1) if exact else 1 + 0j}

        def power(cache, base, n):
            if n not in cache:
                cache[n] = power(cache, base, n - 1) * base
            return cache[n]

        for (a, b), c in self._terms.items():
            term = c * power(zp, zv, b) * power(wp, wv, a)
            total = total + term
        return total

    # -- real form ---------------------------------------------------------------

    def realify(self):
        """Substitute z = x + iy, w = x - iy; return (real part, imaginary part).

        The results are polynomials with real coefficients living in the same
        representation, with x in the z slot and y in the w slot.
        """
        if self._exact:
            i_unit = GaussianRational(0, 1)
            x_plus = Polynomial({Z: GaussianRational(1), W: i_unit})
            x_minus = Polynomial({Z: GaussianRational(1), W: -i_unit})
        else:
            x_plus = Polynomial({Z: 1 + 0j, W: 1j})
            x_minus = Polynomial({Z: 1 + 0j, W: -1j})
        zp = {0: Polynomial.constant(GaussianRational(1) if self._exact else 1 + 0j)}
        wp = {0: zp[0]}

        def power(cache, base, n):
            if n not in cache:
                cache[n] = power(cache, base, n - 1) * base
            return cache[n]

        total = Polynomial.zero()
        for (a, b), c in self._terms.items():
            total = total + power(zp, x_plus, b) * power(wp, x_minus, a).scale(c)
        re_terms, im_terms = {}, {}
        for m, c in total.items():
            if isinstance(c, GaussianRational):
                if c.re:
                    re_terms[m] = GaussianRational(c.re)
                if c.im:
                    im_terms[m] = GaussianRational(c.im)
            else:
                if c.real:
                    re_terms[m] = complex(c.real)
                if c.imag:
                    im_terms[m] = complex(c.imag)
        return Polynomial(re_terms), Polynomial(im_terms)

    def degree_in(self, slot):
        """Degree in one variable: slot 'z' (second exponent) or 'w' (first)."""
        if not self._terms:
            return -1
        idx = 1 if slot == "z" else 0
        return max(m[idx] for m in self._terms)


def divide(f, G):
    """Multivariate division of f by an ordered list of nonzero divisors.

    Returns (quotients, remainder) with f = sum(q_i g_i) + r, no monomial of r
    divisible by any leading monomial of G, and deg(q_i g_i) <= deg f.  At each
    step the currently largest reducible monomial is reduced by the first
    divisor in list order, which makes the result deterministic.
    """
    G = list(G)
    if any(g.is_zero for g in G):
        raise ValueError("divisors must be nonzero")
    approx = (not f.is_exact) or any(not g.is_exact for g in G)
    if approx:
        f = f.to_approx()
        G = [g.to_approx() for g in G]
    lead = [(g.leading_monomial(), g.leading_coefficient()) for g in G]
    quotients = [dict() for _ in G]
    remainder = {}
    work = dict(f.items())
    while work:
        m = max(work, key=deglex_key)
        c = work.pop(m)
        for idx, (lm, lc) in enumerate(lead):
            if monomial_divides(lm, m):
                q_m = monomial_div(m, lm)
                q_c = c / lc
                qd = quotients[idx]
                qd[q_m] = qd[q_m] + q_c if q_m in qd else q_c
                for gm, gc in G[idx].items():
                    if gm == lm:
                        continue
                    t = (gm[0] + q_m[0], gm[1] + q_m[1])
                    delta = gc * q_c
                    if t in work:
                        new = work[t] - delta
                        if new == 0:
                            del work[t]
                        else:
                            work[t] = new
                    else:
                        work[t] = -delta
                break
        else:
            remainder[m] = c
    return [Polynomial(q) for q in quotients], Polynomial(remainder)


# -- text format ------------------------------------------------------------------

_TOKEN_RE = _re.compile(
    r"""\s*(?:
        (?P<float>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
      | (?P<rational>\d+/\d+|\d+)
      | (?P<imag>i)
      | (?P<var>[zwxy])
      | (?P<caret>\^)
      | (?P<plus>\+)
      | (?P<minus>-)
      | (?P<star>\*)
      | (?P<lparen>\()
      | (?P<rparen>\))
    )""",
    _re.VERBOSE,
)


class PolyParseError(ValueError):
    pass


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise PolyParseError(f"unexpected character {text[pos:].strip()[0]!r} in polynomial")
            break
        pos = m.end()
        kind = m.lastgroup
        value = m.group(kind)
        tokens.append((kind, value))
    return tokens


class _Parser:
    def __init__(self, tokens, variables=("z", "w")):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self):
        terms = []
        sign = 1
        kind, _ = self.peek()
        if kind in ("plus", "minus"):
            sign = -1 if kind == "minus" else 1
            self.take()
        if self.peek()[0] is None:
            raise PolyParseError("empty polynomial text")
        while True:
            m, c = self.parse_term()
            terms.append((m, c if sign == 1 else -c))
            kind, _ = self.peek()
            if kind is None:
                break
            if kind == "plus":
                sign = 1
            elif kind == "minus":
                sign = -1
            else:
                raise PolyParseError(f"expected '+' or '-' between terms, found {self.peek()[1]!r}")
            self.take()
        return Polynomial.from_terms(terms)

    def parse_number(self):
        kind, value = self.peek()
        if kind == "float":
            self.take()
            return float(value)
        if kind == "rational":
            self.take()
            return Fraction(value)
        raise PolyParseError(f"expected a number, found {value!r}")

    def parse_gaussian(self):
        """Number inside parentheses: 'a/b+c/di', '1.5-0.5i', 'i', '2i', '3'."""
        parts = []  # (value, is_imag)
        sign = 1
        kind, _ = self.peek()
        if kind in ("plus", "minus"):
            sign = -1 if kind == "minus" else 1
            self.take()
        while True:
            kind, value = self.peek()
            if kind in ("float", "rational"):
                num = self.parse_number()
                is_imag = False
                if self.peek()[0] == "imag":
                    self.take()
                    is_imag = True
                parts.append((sign * num, is_imag))
            elif kind == "imag":
                self.take()
                parts.append((sign * Fraction(1), True))
            else:
                raise PolyParseError("malformed coefficient")
            kind, _ = self.peek()
            if kind in ("plus", "minus"):
                sign = -1 if kind == "minus" else 1
                self.take()
                continue
            break
        re_val, im_val = Fraction(0), Fraction(0)
        approx = any(isinstance(v, float) for v, _ in parts)
        if approx:
            re_f = sum(float(v) for v, imag in parts if not imag)
            im_f = sum(float(v) for v, imag in parts if imag)
            return complex(re_f, im_f)
        for v, imag in parts:
            if imag:
                im_val += v
            else:
                re_val += v
        return GaussianRational(re_val, im_val)

    def parse_term(self):
        coeff = None
        kind, value = self.peek()
        if kind == "lparen":
            self.take()
            coeff = self.parse_gaussian()
            if self.take()[0] != "rparen":
                raise PolyParseError("missing ')' after coefficient")
        elif kind in ("float", "rational"):
            num = self.parse_number()
            if self.peek()[0] == "imag":
                self.take()
                coeff = (
                    complex(0, num) if isinstance(num, float) else GaussianRational(0, num)
                )
            else:
                coeff = num if isinstance(num, float) else GaussianRational(num)
        elif kind == "imag":
            self.take()
            coeff = GaussianRational(0, 1)
        exps = {self.variables[0]: 0, self.variables[1]: 0}
        saw_var = False
        while True:
            kind, value = self.peek()
            if kind == "star":
                self.take()
                continue
            if kind != "var":
                break
            if value not in exps:
                raise PolyParseError(f"unexpected variable {value!r}")
            self.take()
            e = 1
            if self.peek()[0] == "caret":
                self.take()
                kind2, value2 = self.take()
                if kind2 != "rational" or "/" in value2:
                    raise PolyParseError("exponent must be a nonnegative integer")
                e = int(value2)
            exps[value] += e
            saw_var = True
        if coeff is None:
            if not saw_var:
                raise PolyParseError("empty term")
            coeff = GaussianRational(1)
        if isinstance(coeff, Fraction):
            coeff = GaussianRational(coeff)
        m = (exps[self.variables[1]], exps[self.variables[0]])
        return m, coeff


def parse_poly(text, variables=("z", "w")):
    """Parse the term-list text format: '2z^3 + 3z^2 + w', '(1/2+1/3i)zw', 'z - 8iz'."""
    return _Parser(_tokenize(text), variables).parse()


def _needs_parens(s):
    return "/" in s or "+" in s[1:] or "-" in s[1:]


def format_monomial(m, variables=("z", "w")):
    a, b = m
    if a == 0 and b == 0:
        return "1"
    out = ""
    if b:
        out += variables[0] + (f"^{b}" if b > 1 else "")
    if a:
        out += variables[1] + (f"^{a}" if a > 1 else "")
    return out


def format_poly(p, variables=("z", "w")):
    """Deterministic text form, terms in descending order."""
    if p.is_zero:
        return "0"
    pieces = []
    for m in sorted(p.monomials(), key=deglex_key, reverse=True):
        c = p.coefficient(m)
        if isinstance(c, GaussianRational):
            negative = (c.re < 0) or (c.re == 0 and c.im < 0)
        else:
            negative = (c.real < 0) or (c.real == 0 and c.imag < 0)
        if negative:
            c = -c
        mono = format_monomial(m, variables)
        cs = format_scalar(c)
        if mono == "1":
            body = f"({cs})" if ("+" in cs[1:] or "-" in cs[1:]) else cs
        elif cs == "1":
            body = mono
        else:
            if _needs_parens(cs):
                cs = f"({cs})"
            body = cs + mono
        pieces.append(("-" if negative else "+", body))
    sign, body = pieces[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out
