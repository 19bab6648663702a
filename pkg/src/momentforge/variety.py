"""Finite zero sets of column-relation polynomials.

Pipeline: split p(z, z-bar) into real and imaginary parts, eliminate y with a
Sylvester resultant, find the real x-candidates, back-substitute along both
fiber polynomials, cluster, and verify residuals of p and its conjugate at
(z, conj z).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .poly import Polynomial, deglex_key, format_poly
from .scalars import GaussianRational, is_exact_scalar, to_complex


class NonFiniteVarietyError(ValueError):
    """The zero set contains a curve (or the elimination degenerated)."""


class RootFindingError(RuntimeError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial if partial is not None else []


# -- dense univariate helpers (ascending coefficient lists) --------------------


def _trim(c):
    while c and (c[-1] == 0):
        c.pop()
    return c


def _uni_add(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]
    return _trim(out)


def _uni_sub(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _trim(out)


def _uni_mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _uni_scale(a, s):
    return _trim([x * s for x in a])


def _uni_eval(a, x):
    out = 0
    for c in reversed(a):
        out = out * x + c
    return out


def _uni_deriv(a):
    return _trim([i * c for i, c in enumerate(a)][1:])


def _uni_divmod(a, b):
    """Exact division with remainder; coefficients must support exact division."""
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("univariate division by zero polynomial")
    a = _trim(list(a))
    if len(a) < len(b):
        return [], a
    q = [0] * (len(a) - len(b) + 1)
    lead = b[-1]
    while a and len(a) >= len(b):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - len(b)
        factor = a[-1] / lead
        q[shift] = factor
        for i, c in enumerate(b):
            a[shift + i] -= factor * c
        a.pop()
    return _trim(q), _trim(a)


def _uni_gcd(a, b):
    """Monic gcd over an exact field."""
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _uni_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _poly_to_coeffs(p, slot="z"):
    """Univariate Polynomial (pure powers of one variable) to ascending list."""
    idx = 1 if slot == "z" else 0
    deg = p.degree_in(slot)
    out = [GaussianRational(0) if p.is_exact else 0j] * (deg + 1)
    for m, c in p.items():
        if m[1 - idx] != 0:
            raise ValueError("polynomial is not univariate in the requested variable")
        out[m[idx]] = c
    return out


def _coeffs_to_poly(coeffs, slot="z"):
    idx = 1 if slot == "z" else 0
    terms = {}
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        m = (0, i) if idx == 1 else (i, 0)
        terms[m] = c
    return Polynomial(terms)


def squarefree_part(p, slot="z"):
    """p / gcd(p, p') for an exact univariate polynomial."""
    coeffs = [_to_fraction_like(c) for c in _poly_to_coeffs(p, slot)]
    g = _uni_gcd(coeffs, _uni_deriv(coeffs))
    q, r = _uni_divmod(coeffs, g)
    if _trim(list(r)):
        raise ArithmeticError("squarefree reduction left a remainder")
    return _coeffs_to_poly(q, slot)


def repeated_factor(p, slot="z"):
    """gcd(p, p'): the product of factors of multiplicity above one, monic."""
    coeffs = [_to_fraction_like(c) for c in _poly_to_coeffs(p, slot)]
    g = _uni_gcd(coeffs, _uni_deriv(coeffs))
    return _coeffs_to_poly(g, slot)


def _to_fraction_like(c):
    if isinstance(c, GaussianRational):
        return c
    return c


# -- Sylvester resultant ---------------------------------------------------------


def sylvester_resultant(f, g, eliminate="y"):
    """Determinant of the Sylvester matrix of f and g with respect to one variable.

    f and g live in the (x, y) reading of the representation (x in the z slot,
    y in the w slot).  Eliminating y returns a polynomial in x alone.
    """
    if f.is_zero or g.is_zero:
        raise ValueError("resultant requires nonzero polynomials")
    slot_elim = "w" if eliminate == "y" else "z"
    slot_keep = "z" if eliminate == "y" else "w"
    df = f.degree_in(slot_elim)
    dg = g.degree_in(slot_elim)
    if df < 1 or dg < 1:
        raise ValueError(f"degree-0 in {eliminate}: both polynomials must involve it")
    exact = f.is_exact and g.is_exact
    if f.is_exact != g.is_exact:
        f, g = f.to_approx(), g.to_approx()
        exact = False

    def coeff_rows(p, d):
        """Coefficients of the eliminated variable, highest first, as x-lists."""
        rows = [dict() for _ in range(d + 1)]
        for (a, b), c in p.items():
            e = a if slot_elim == "w" else b
            k = b if slot_elim == "w" else a
            rows[d - e][k] = c
        out = []
        for r in rows:
            deg = max(r) if r else 0
            zero = GaussianRational(0) if exact else 0j
            lst = [r.get(i, zero) for i in range(deg + 1)]
            out.append(_trim(lst))
        return out

    fc = coeff_rows(f, df)
    gc = coeff_rows(g, dg)
    n = df + dg
    matrix = []
    for shift in range(dg):
        row = [[] for _ in range(n)]
        for i, c in enumerate(fc):
            row[shift + i] = c
        matrix.append(row)
    for shift in range(df):
        row = [[] for _ in range(n)]
        for i, c in enumerate(gc):
            row[shift + i] = c
        matrix.append(row)
    det = _poly_entry_det(matrix)
    return _coeffs_to_poly(det, slot_keep)


def _poly_entry_det(matrix):
    """Determinant of a matrix of univariate coefficient lists.

    Laplace expansion along columns with memoization on the set of remaining
    rows; entry polynomials stay small for the matrix sizes that arise here.
    """
    n = len(matrix)
    cache = {}

    def minor(rows, col):
        if col == n:
            return [1]
        key = rows
        if key in cache:
            return cache[key]
        total = []
        sign = 1
        for idx, r in enumerate(rows):
            entry = matrix[r][col]
            if entry:
                sub = minor(rows[:idx] + rows[idx + 1:], col + 1)
                if sub:
                    term = _uni_mul(entry, sub)
                    total = _uni_add(total, term if sign > 0 else _uni_scale(term, -1))
            sign = -sign
        cache[key] = total
        return total

    return minor(tuple(range(n)), 0)


# -- univariate root finding -------------------------------------------------------


def univariate_roots(coeffs, max_iterations=400):
    """All complex roots (with multiplicity) of sum(coeffs[k] x^k).

    Simultaneous iteration started from a perturbed circle, then a few
    polishing steps; raises RootFindingError with partial results when the
    iteration cap is hit before every correction is small.
    """
    a = [to_complex(c) for c in coeffs]
    while a and a[-1] == 0:
        a.pop()
    if len(a) < 2:
        raise ValueError("degree must be at least 1 (after trimming leading zeros)")
    scale = max(abs(c) for c in a)
    # exact zero constant coefficients peel off roots at the origin
    zeros_at_origin = 0
    while a and a[0] == 0:
        a.pop(0)
        zeros_at_origin += 1
    roots = [0j] * zeros_at_origin
    n = len(a) - 1
    if n == 0:
        return roots
    if n == 1:
        roots.append(-a[0] / a[1])
        return sorted(roots, key=lambda r: (r.real, r.imag))

    deriv = [k * a[k] for k in range(1, n + 1)]
    cauchy = 1.0 + max(abs(c) for c in a[:-1]) / abs(a[-1])
    inner = abs(a[0] / a[-1]) ** (1.0 / n) if a[0] != 0 else cauchy / 4
    radius = min(max(inner, 1e-3), cauchy)
    offset = 0.3799321
    zs = np.array(
        [radius * cmath.exp(2j * cmath.pi * (k / n) + 1j * offset) for k in range(n)]
    )

    def horner(vals, cs):
        out = np.zeros_like(vals)
        for c in reversed(cs):
            out = out * vals + c
        return out

    converged = np.zeros(n, dtype=bool)
    for _ in range(max_iterations):
        pv = horner(zs, a)
        dv = horner(zs, deriv)
        dv = np.where(dv == 0, 1e-300, dv)
        newton = pv / dv
        diff = zs[:, None] - zs[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        sums = inv.sum(axis=1)
        denom = 1.0 - newton * sums
        denom = np.where(denom == 0, 1e-300, denom)
        step = newton / denom
        step = np.where(converged, 0.0, step)
        zs = zs - step
        converged = np.abs(step) <= 5e-14 * (1.0 + np.abs(zs))
        if converged.all():
            break

    # polish
    for _ in range(3):
        pv = horner(zs, a)
        dv = horner(zs, deriv)
        safe = np.abs(dv) > 1e-300
        zs = np.where(safe, zs - pv / np.where(safe, dv, 1.0), zs)

    # residual acceptance; the strict bound holds for simple roots and the
    # looser one tolerates the precision loss inherent to root clusters
    residual_bound = 1e-12 * scale
    for r in zs:
        res = abs(_uni_eval(a, r))
        if res > residual_bound * max(1.0, abs(r)) ** n:
            if res > 1e-6 * scale * max(1.0, abs(r)) ** n:
                raise RootFindingError(
                    f"root residual {res:.3e} too large after the iteration cap",
                    partial=sorted(roots + zs.tolist(), key=lambda t: (t.real, t.imag)),
                )
    roots.extend(zs.tolist())
    return sorted(roots, key=lambda r: (r.real, r.imag))


# -- clustering -----------------------------------------------------------------


def cluster_points(raw, tol):
    """Union-find clustering at distance <= tol; returns (centroid, size) pairs."""
    if tol <= 0:
        raise ValueError("clustering tolerance must be positive")
    pts = [to_complex(p) for p in raw]
    n = len(pts)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(pts[i] - pts[j]) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(pts[i])
    out = []
    for members in groups.values():
        centroid = sum(members) / len(members)
        out.append((centroid, len(members)))
    out.sort(key=lambda t: (t[0].real, t[0].imag))
    return out


# -- the conjugate-pair system ----------------------------------------------------


@dataclass(frozen=True)
class VarietyPoint:
    z: complex
    residual: float
    simple: bool = True

    @property
    def pair(self):
        """The point embedded in two complex coordinates: (z, conj z)."""
        return (self.z, self.z.conjugate())


@dataclass(frozen=True)
class Variety:
    points: tuple
    source: tuple
    tol: float

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "source", tuple(self.source))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def zs(self):
        return [p.z for p in self.points]

    @property
    def pairs(self):
        return [p.pair for p in self.points]

    @property
    def all_simple(self):
        return all(p.simple for p in self.points)


def _residual_scale(p, z):
    return max(p.coefficient_scale(), 1.0) * max(1.0, abs(z)) ** max(p.degree, 1)


def _fiber_coeffs(poly, x0, slot_keep="z"):
    """Coefficients in the other variable after substituting x = x0."""
    elim_idx = 0 if slot_keep == "z" else 1
    keep_idx = 1 - elim_idx
    deg = max((m[elim_idx] for m in poly.monomials()), default=0)
    out = [0j] * (deg + 1)
    for m, c in poly.items():
        out[m[elim_idx]] += to_complex(c) * (x0 ** m[keep_idx])
    return _trim(out)


def _real_roots(roots, tol):
    out = []
    for r in roots:
        if abs(r.imag) <= tol * max(1.0, abs(r)):
            out.append(r.real)
    return out


def solve_conjugate_system(p, tol=1e-9):
    """The finite set {z : p(z, conj z) = 0}, with residuals and simplicity flags.

    Raises NonFiniteVarietyError when the zero set contains a curve.  An empty
    variety is a legal result.
    """
    if not isinstance(p, Polynomial) or p.is_zero:
        raise ValueError("expected a nonzero polynomial")
    if p.degree == 0:
        raise ValueError("expected a nonconstant polynomial")
    re_p, im_p = p.realify()
    pbar = p.conjugate()

    if re_p.is_zero or im_p.is_zero:
        live = im_p if re_p.is_zero else re_p
        if live.degree == 0:
            return Variety((), (p, pbar), tol)
        raise NonFiniteVarietyError(
            "non-finite variety: the system degenerates to a single real equation"
        )

    candidates = _x_candidates(re_p, im_p, tol)
    if candidates is None:
        # retry with the roles of x and y swapped
        candidates = _x_candidates(re_p, im_p, tol, swap=True)
        if candidates is None:
            raise NonFiniteVarietyError(
                "non-finite variety: both eliminations give an identically zero resultant"
            )
        xs, swap = candidates, True
    else:
        xs, swap = candidates, False

    raw = []
    for x0 in xs:
        raw.extend(_back_substitute(re_p, im_p, p, pbar, x0, tol, swap))

    if not raw:
        return Variety((), (p, pbar), tol)

    spread = max(max(1.0, abs(z)) for z in raw)
    clustered = cluster_points(raw, tol * spread * 10)

    points = []
    dz = _partial(p, "z")
    dw = _partial(p, "w")
    for z0, _size in clustered:
        pair = (z0, z0.conjugate())
        res = max(
            abs(to_complex(p.evaluate(pair))),
            abs(to_complex(pbar.evaluate(pair))),
        )
        if res > 10 * tol * _residual_scale(p, z0):
            continue
        pz = abs(to_complex(dz.evaluate(pair))) if not dz.is_zero else 0.0
        pw = abs(to_complex(dw.evaluate(pair))) if not dw.is_zero else 0.0
        jac = pz * pz - pw * pw
        jac_scale = pz * pz + pw * pw
        simple = abs(jac) > (tol ** 0.5) * max(jac_scale, 1e-300)
        points.append(VarietyPoint(z=z0, residual=res, simple=simple))
    points.sort(key=lambda q: (q.z.real, q.z.imag))
    return Variety(tuple(points), (p, pbar), tol)


def _partial(p, slot):
    idx = 1 if slot == "z" else 0
    terms = {}
    for m, c in p.items():
        if m[idx] == 0:
            continue
        new = (m[0], m[1] - 1) if idx == 1 else (m[0] - 1, m[1])
        terms[new] = c * m[idx]
    return Polynomial(terms)


def _x_candidates(re_p, im_p, tol, swap=False):
    """Real candidates for the kept coordinate, or None if elimination degenerates."""
    slot_elim = "w" if not swap else "z"   # w slot holds y
    elim_name = "y" if not swap else "x"
    keep = "z" if not swap else "w"
    d_re = re_p.degree_in(slot_elim)
    d_im = im_p.degree_in(slot_elim)
    if d_re >= 1 and d_im >= 1:
        res = sylvester_resultant(re_p, im_p, eliminate=elim_name)
        if res.is_zero:
            return None
        if res.degree == 0:
            return []
        if res.is_exact:
            res = squarefree_part(res, keep)
        roots = univariate_roots(_poly_to_coeffs(res, keep))
        return _real_roots(roots, tol)
    if d_re < 1 and d_im < 1:
        # both parts constrain the kept coordinate only: a common real root
        # leaves the other coordinate free, giving a line
        sets = []
        for part in (re_p, im_p):
            if part.degree_in(keep) < 1:
                return []  # nonzero constant equation: no solutions at all
            sets.append(_real_roots(univariate_roots(_poly_to_coeffs(part, keep)), tol))
        common = [
            a for a in sets[0] if any(abs(a - b) <= tol * max(1.0, abs(a)) for b in sets[1])
        ]
        if common:
            raise NonFiniteVarietyError(
                "non-finite variety: a full line satisfies the system"
            )
        return []
    # exactly one part does not involve the eliminated variable: it constrains x
    flat = re_p if d_re < 1 else im_p
    if flat.degree_in(keep) < 1:
        return []  # nonzero constant: no solutions
    roots = univariate_roots(_poly_to_coeffs(flat, keep))
    return _real_roots(roots, tol)


def _back_substitute(re_p, im_p, p, pbar, x0, tol, swap):
    """Union of the real fiber roots of both parts at x = x0, residual-filtered."""
    keep = "z" if not swap else "w"
    out = []
    scale = _residual_scale(p, complex(x0))
    for fiber_poly in (re_p, im_p):
        coeffs = _fiber_coeffs(fiber_poly, x0, slot_keep=keep)
        cmax = max((abs(c) for c in coeffs), default=0.0)
        if cmax <= 100 * tol * max(1.0, fiber_poly.coefficient_scale()):
            continue  # fiber degenerates; the other branch covers it
        if len(coeffs) < 2:
            continue
        try:
            roots = univariate_roots(coeffs)
        except RootFindingError:
            continue
        for y0 in _real_roots(roots, tol):
            z0 = complex(x0, y0) if not swap else complex(y0, x0)
            pair = (z0, z0.conjugate())
            res = max(
                abs(to_complex(p.evaluate(pair))),
                abs(to_complex(pbar.evaluate(pair))),
            )
            if res <= 100 * tol * scale * max(1.0, abs(z0)) ** max(p.degree, 1):
                out.append(z0)
    return out
