"""Groebner bases under the degree-lexicographic order.

Provides Buchberger's algorithm with interreduction to the unique reduced
monic basis, vanishing ideals of finite point sets via the evaluation-matrix
(Buchberger-Moller) method, normal forms, and standard monomials of the
quotient ring.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .poly import (
    Polynomial,
    deglex_key,
    divide,
    monomial_divides,
    monomial_lcm,
    monomial_div,
)
from .scalars import GaussianRational, is_exact_scalar, to_complex


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced monic basis; elements sorted by leading monomial, largest first."""

    elements: tuple
    provenance: str = "generators"
    order: str = "deglex"

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, idx):
        return self.elements[idx]

    def leading_monomials(self):
        return [g.leading_monomial() for g in self.elements]

    @property
    def is_exact(self):
        return all(g.is_exact for g in self.elements)

    def is_unit_ideal(self):
        return len(self.elements) == 1 and self.elements[0].degree == 0


@dataclass(frozen=True)
class StandardMonomialSet:
    monomials: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(
            self, "monomials", tuple(sorted(self.monomials, key=deglex_key))
        )

    def __iter__(self):
        return iter(self.monomials)

    def __len__(self):
        return len(self.monomials)

    def __contains__(self, m):
        return m in self.monomials


def s_polynomial(f, g):
    """S(f, g) = (L/LT f) f - (L/LT g) g with L = lcm of leading monomials."""
    if f.is_zero or g.is_zero:
        raise ValueError("S-polynomial requires nonzero arguments")
    if f.is_exact != g.is_exact:
        f, g = f.to_approx(), g.to_approx()
    lm_f, lc_f = f.leading_term()
    lm_g, lc_g = g.leading_term()
    lcm = monomial_lcm(lm_f, lm_g)
    tf = Polynomial({monomial_div(lcm, lm_f): 1 / lc_f})
    tg = Polynomial({monomial_div(lcm, lm_g): 1 / lc_g})
    return tf * f - tg * g


def normal_form(p, G):
    """Unique remainder of p modulo the basis; zero iff p lies in the ideal."""
    elements = G.elements if isinstance(G, GroebnerBasis) else list(G)
    _, r = divide(p, elements)
    return r


def _interreduce(basis):
    """From a minimal basis produce the reduced monic one."""
    basis = sorted(basis, key=lambda g: deglex_key(g.leading_monomial()))
    reduced = []
    for i, g in enumerate(basis):
        others = basis[:i] + basis[i + 1:]
        if others:
            _, g = divide(g, others)
        if not g.is_zero:
            reduced.append(g.monic())
    return reduced


def buchberger(F):
    """Reduced monic Groebner basis of the ideal generated by F.

    Approximate coefficients are rationalized first (binary-exact), so the
    computation itself always runs in exact arithmetic and the result is the
    unique reduced basis for the order.
    """
    gens = [f.to_exact() for f in F if isinstance(f, Polynomial) and not f.is_zero]
    if not gens:
        raise ValueError("cannot compute a basis for the zero ideal")
    G = [g.monic() for g in gens]
    lms = [g.leading_monomial() for g in G]
    pairs = {(i, j) for i in range(len(G)) for j in range(i + 1, len(G))}
    done = set()

    while pairs:
        i, j = min(
            pairs,
            key=lambda ij: deglex_key(monomial_lcm(lms[ij[0]], lms[ij[1]])),
        )
        pairs.remove((i, j))
        done.add((i, j))
        lcm = monomial_lcm(lms[i], lms[j])
        # product criterion: coprime leading monomials give a reducible S-pair
        if lcm == (lms[i][0] + lms[j][0], lms[i][1] + lms[j][1]):
            continue
        # chain criterion
        skip = False
        for k in range(len(G)):
            if k in (i, j) or not monomial_divides(lms[k], lcm):
                continue
            a = (min(i, k), max(i, k))
            b = (min(j, k), max(j, k))
            if a in done and b in done:
                skip = True
                break
        if skip:
            continue
        s = s_polynomial(G[i], G[j])
        _, r = divide(s, G)
        if not r.is_zero:
            G.append(r.monic())
            lms.append(r.leading_monomial())
            new = len(G) - 1
            pairs |= {(k, new) for k in range(new)}

    # minimal: drop elements whose leading monomial another one divides
    minimal = []
    for g in sorted(G, key=lambda g: deglex_key(g.leading_monomial())):
        lm = g.leading_monomial()
        if not any(monomial_divides(h.leading_monomial(), lm) for h in minimal):
            minimal.append(g)
    reduced = _interreduce(minimal)
    reduced.sort(key=lambda g: deglex_key(g.leading_monomial()), reverse=True)
    return GroebnerBasis(tuple(reduced), provenance="generators")


def standard_monomials(G):
    """Monomials outside the leading-monomial ideal; requires a finite quotient.

    Finiteness needs pure powers of both variables among the leading
    monomials (otherwise the variety is infinite and this raises).
    """
    lms = G.leading_monomials() if isinstance(G, GroebnerBasis) else [
        g.leading_monomial() for g in G
    ]
    z_pow = min((b for a, b in lms if a == 0), default=None)
    w_pow = min((a for a, b in lms if b == 0), default=None)
    if z_pow is None or w_pow is None:
        raise ValueError("infinite variety: no pure power of each variable among leading monomials")
    out = []
    for a in range(w_pow):
        for b in range(z_pow):
            m = (a, b)
            if not any(monomial_divides(lm, m) for lm in lms):
                out.append(m)
    return StandardMonomialSet(tuple(out))


# -- vanishing ideals of finite point sets -------------------------------------


def _points_are_exact(points):
    return all(is_exact_scalar(z) and is_exact_scalar(w) for z, w in points)


def _check_simple(points):
    n = len(points)
    if n == 0:
        raise ValueError("vanishing ideal requires a nonempty point set")
    exact = _points_are_exact(points)
    for i in range(n):
        for j in range(i + 1, n):
            if exact:
                same = points[i][0] == points[j][0] and points[i][1] == points[j][1]
            else:
                zi, wi = to_complex(points[i][0]), to_complex(points[i][1])
                zj, wj = to_complex(points[j][0]), to_complex(points[j][1])
                scale = max(1.0, abs(zi), abs(zj), abs(wi), abs(wj))
                same = abs(zi - zj) <= 1e-13 * scale and abs(wi - wj) <= 1e-13 * scale
            if same:
                raise ValueError("non-simple point set: duplicate points")


def vanishing_ideal(points, tol=1e-9):
    """Reduced monic Groebner basis of the ideal of a finite set of (z, w) points.

    Runs the evaluation-matrix method: monomials are scanned in increasing
    order; one whose evaluation vector depends linearly on those of the
    current standard monomials contributes a basis element, the others become
    standard monomials.  Exact points give an exact basis; floating points use
    column-pivoted elimination with threshold ``tol`` times the largest pivot.
    """
    points = list(points)
    _check_simple(points)
    exact = _points_are_exact(points)
    if exact:
        pts = [
            (
                z if isinstance(z, GaussianRational) else GaussianRational(z),
                w if isinstance(w, GaussianRational) else GaussianRational(w),
            )
            for z, w in points
        ]
        return _bm_exact(pts)
    pts = [(to_complex(z), to_complex(w)) for z, w in points]
    return _bm_float(pts, tol)


def _bm_candidates():
    """Bookkeeping for the monomial scan shared by both arithmetic regimes."""
    return {"queue": [(0, 0)], "seen": {(0, 0)}}


def _bm_next(state, lms):
    while state["queue"]:
        state["queue"].sort(key=deglex_key)
        m = state["queue"].pop(0)
        if any(monomial_divides(lm, m) for lm in lms):
            continue
        return m
    return None


def _bm_extend(state, m):
    for ext in ((m[0], m[1] + 1), (m[0] + 1, m[1])):
        if ext not in state["seen"]:
            state["seen"].add(ext)
            state["queue"].append(ext)


def _bm_exact(points):
    n = len(points)
    zero = GaussianRational(0)
    rows, combos, pivots = [], [], []
    std, basis, lms = [], [], []
    state = _bm_candidates()
    while True:
        m = _bm_next(state, lms)
        if m is None:
            break
        vec = [(w ** m[0]) * (z ** m[1]) for z, w in points]
        combo = {m: GaussianRational(1)}
        for row, cmb, piv in zip(rows, combos, pivots):
            f = vec[piv] / row[piv]
            if f:
                vec = [v - f * r for v, r in zip(vec, row)]
                for mm, cc in cmb.items():
                    combo[mm] = combo.get(mm, zero) - f * cc
        if all(not v for v in vec):
            basis.append(Polynomial({mm: cc for mm, cc in combo.items() if cc}))
            lms.append(m)
        else:
            piv = next(i for i, v in enumerate(vec) if v)
            rows.append(vec)
            combos.append(combo)
            pivots.append(piv)
            std.append(m)
            _bm_extend(state, m)
        if len(std) > n:
            raise RuntimeError("evaluation matrix produced too many independent monomials")
    if len(std) != n:
        raise RuntimeError("point count must equal the standard monomial count")
    basis.sort(key=lambda g: deglex_key(g.leading_monomial()), reverse=True)
    return GroebnerBasis(tuple(basis), provenance="points")


def _bm_float(points, tol):
    n = len(points)
    zs = np.array([z for z, _ in points], dtype=complex)
    ws = np.array([w for _, w in points], dtype=complex)
    rows, combos, pivots = [], [], []
    std, basis, lms = [], [], []
    state = _bm_candidates()
    prune = tol * 1e-3
    while True:
        m = _bm_next(state, lms)
        if m is None:
            break
        vec = (ws ** m[0]) * (zs ** m[1])
        combo = {m: 1 + 0j}
        for row, cmb, piv in zip(rows, combos, pivots):
            f = vec[piv] / row[piv]
            if f != 0:
                vec = vec - f * row
                for mm, cc in cmb.items():
                    combo[mm] = combo.get(mm, 0j) - f * cc
        residual = float(np.max(np.abs(vec))) if n else 0.0
        pivot_scale = max(
            [float(np.max(np.abs(r))) for r in rows],
            default=1.0,
        )
        own_scale = max(1.0, float(np.max(np.abs((ws ** m[0]) * (zs ** m[1])))))
        if residual <= tol * max(pivot_scale, own_scale):
            coeff_scale = max(abs(c) for c in combo.values())
            basis.append(
                Polynomial(
                    {mm: cc for mm, cc in combo.items() if abs(cc) > prune * coeff_scale}
                )
            )
            lms.append(m)
        else:
            piv = int(np.argmax(np.abs(vec)))
            rows.append(vec)
            combos.append(combo)
            pivots.append(piv)
            std.append(m)
            _bm_extend(state, m)
        if len(std) > n:
            raise RuntimeError("evaluation matrix produced too many independent monomials")
    if len(std) != n:
        raise RuntimeError("point count must equal the standard monomial count")
    basis.sort(key=lambda g: deglex_key(g.leading_monomial()), reverse=True)
    return GroebnerBasis(tuple(basis), provenance="points")


def rationalize_basis(G, max_denominator=10**6, residual=1e-6):
    """Try to recognize a floating basis as one with small Gaussian-rational
    coefficients.  Returns the exact basis when every coefficient rounds to a
    nearby rational and the rounded set passes the Buchberger criterion;
    otherwise None.
    """
    from fractions import Fraction

    exact_elements = []
    for g in G:
        terms = {}
        for m, c in g.items():
            c = to_complex(c)
            re = Fraction(c.real).limit_denominator(max_denominator)
            im = Fraction(c.imag).limit_denominator(max_denominator)
            if abs(complex(float(re), float(im)) - c) > residual * max(1.0, abs(c)):
                return None
            val = GaussianRational(re, im)
            if val:
                terms[m] = val
        if not terms:
            return None
        exact_elements.append(Polynomial(terms))
    candidate = GroebnerBasis(
        tuple(
            sorted(
                (g.monic() for g in exact_elements),
                key=lambda g: deglex_key(g.leading_monomial()),
                reverse=True,
            )
        ),
        provenance=G.provenance if isinstance(G, GroebnerBasis) else "points",
    )
    if not _is_reduced_basis(candidate):
        return None
    return candidate


def _is_reduced_basis(G):
    """Exact check of minimality, reducedness and the Buchberger criterion."""
    elements = list(G)
    if not elements or any(g.is_zero or not g.is_exact for g in elements):
        return False
    lms = [g.leading_monomial() for g in elements]
    for i, g in enumerate(elements):
        if g.leading_coefficient() != GaussianRational(1):
            return False
        for j, lm in enumerate(lms):
            if i == j:
                continue
            if any(monomial_divides(lm, m) for m in g.monomials()):
                return False
    for i in range(len(elements)):
        for j in range(i + 1, len(elements)):
            s = s_polynomial(elements[i], elements[j])
            if s.is_zero:
                continue
            _, r = divide(s, elements)
            if not r.is_zero:
                return False
    return True
