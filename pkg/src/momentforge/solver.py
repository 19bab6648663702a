"""The decision pipeline for moment sequences with a polynomial column relation.

Given a sequence gamma and a relation polynomial p, the solver computes the
finite zero set of p(z, conj z), the basis of its vanishing ideal, rank
against variety cardinality, the per-element moment conditions, full
consistency, and (on success) the representing measure itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .groebner import (
    GroebnerBasis,
    normal_form,
    rationalize_basis,
    standard_monomials,
    vanishing_ideal,
)
from .moment import (
    MomentSequence,
    build_moment_matrix,
    numeric_rank,
    psd_check,
    relation_residual,
    riesz,
)
from .poly import Polynomial, divide, format_monomial, monomials_up_to
from .scalars import (
    GaussianRational,
    format_scalar,
    is_exact_scalar,
    to_complex,
)
from .variety import NonFiniteVarietyError, Variety, solve_conjugate_system


class MeasureExtractionError(ValueError):
    pass


class NotInIdealError(ValueError):
    def __init__(self, message, normal_form):
        super().__init__(message)
        self.normal_form = normal_form


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many atoms with positive densities."""

    atoms: tuple  # of (z, density)

    def __post_init__(self):
        atoms = tuple(self.atoms)
        for z, rho in atoms:
            positive = rho > 0
            if not positive:
                raise ValueError("densities must be positive")
        zs = [to_complex(z) for z, _ in atoms]
        for i in range(len(zs)):
            for j in range(i + 1, len(zs)):
                if zs[i] == zs[j]:
                    raise ValueError("atoms must be pairwise distinct")
        object.__setattr__(self, "atoms", atoms)

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    @property
    def total_mass(self):
        return sum(rho for _, rho in self.atoms)

    @property
    def is_exact(self):
        return all(
            is_exact_scalar(z) and isinstance(rho, (int, Fraction))
            for z, rho in self.atoms
        )


def generate_moments(measure, k):
    """Moments of the measure up to degree 2k; exact when the atoms are exact.

    Only the i <= j triangle is summed; the mirror entries are set to exact
    conjugates so the sequence is Hermitian bit for bit.
    """
    exact = measure.is_exact
    entries = {}
    for i in range(2 * k + 1):
        for j in range(i, 2 * k + 1 - i):
            if exact:
                total = GaussianRational(0)
                for z, rho in measure:
                    z = z if isinstance(z, GaussianRational) else GaussianRational(z)
                    total = total + GaussianRational(Fraction(rho)) * (
                        (z.conjugate() ** i) * (z ** j)
                    )
            else:
                total = 0j
                for z, rho in measure:
                    zc = to_complex(z)
                    total += float(rho) * ((zc.conjugate() ** i) * (zc ** j))
            entries[(i, j)] = total
            if i != j:
                entries[(j, i)] = total.conjugate()
    return MomentSequence(k, entries)


# -- numerical conditions -----------------------------------------------------


@dataclass(frozen=True)
class ReducedTerm:
    kind: str      # "re" | "im" | "plain"
    index: tuple   # (i, j)
    coefficient: object


@dataclass(frozen=True)
class MomentCondition:
    """A linear form in the moments that a representing measure must annul."""

    label: str
    raw: dict          # (i, j) -> coefficient, meaning sum c * gamma[i, j] = 0
    reduced: tuple     # of ReducedTerm, conjugate pairs collapsed

    def evaluate(self, gamma):
        total = None
        for (i, j), c in self.raw.items():
            term = c * gamma.value(i, j)
            total = term if total is None else total + term
        return total if total is not None else 0

    def reduced_vector(self):
        """Mapping (kind, index) -> coefficient for symbolic comparison."""
        return {(t.kind, t.index): t.coefficient for t in self.reduced}

    def normalized_reduced_vector(self):
        """Reduced coefficients divided by the first nonzero one."""
        terms = sorted(
            self.reduced, key=lambda t: (t.index[0] + t.index[1], t.index[0], t.kind)
        )
        if not terms:
            return {}
        lead = terms[0].coefficient
        return {(t.kind, t.index): _div(t.coefficient, lead) for t in terms}

    def render(self):
        terms = sorted(
            self.reduced,
            key=lambda t: (t.index[0] + t.index[1], t.index[0], _KIND_ORDER[t.kind]),
        )
        pieces = []
        for t in terms:
            c = t.coefficient
            if isinstance(c, GaussianRational):
                negative = (c.re < 0) or (c.re == 0 and c.im < 0)
            else:
                c = complex(c)
                negative = (c.real < 0) or (c.real == 0 and c.imag < 0)
            if negative:
                c = -c
            i, j = t.index
            atom = f"gamma[{i},{j}]"
            if t.kind == "re":
                atom = f"Re({atom})"
            elif t.kind == "im":
                atom = f"Im({atom})"
            cs = format_scalar(c)
            if cs == "1":
                body = atom
            else:
                if "/" in cs or "+" in cs[1:] or "-" in cs[1:]:
                    cs = f"({cs})"
                body = f"{cs}*{atom}"
            pieces.append(("-" if negative else "+", body))
        if not pieces:
            return f"{self.label}: 0 = 0"
        sign, body = pieces[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return f"{self.label}: {out} = 0"


_KIND_ORDER = {"plain": 0, "re": 1, "im": 2}


def _div(a, b):
    if isinstance(a, GaussianRational) and isinstance(b, GaussianRational):
        return a / b
    return to_complex(a) / to_complex(b)


def _normalize_raw(raw):
    """Scale a raw form by a positive rational so exact coefficients become
    primitive Gaussian integers; floats are scaled by the largest magnitude."""
    if not raw:
        return raw
    if all(isinstance(c, GaussianRational) for c in raw.values()):
        denoms = [c.re.denominator for c in raw.values()] + [
            c.im.denominator for c in raw.values()
        ]
        lcd = 1
        for d in denoms:
            lcd = lcd * d // _gcd(lcd, d)
        scaled = {ij: c * lcd for ij, c in raw.items()}
        numerators = []
        for c in scaled.values():
            numerators.extend([abs(c.re.numerator), abs(c.im.numerator)])
        content = 0
        for nmr in numerators:
            content = _gcd(content, nmr)
        if content > 1:
            scaled = {ij: c / content for ij, c in scaled.items()}
        return scaled
    mx = max(abs(to_complex(c)) for c in raw.values())
    if mx == 0:
        return raw
    return {ij: to_complex(c) / mx for ij, c in raw.items()}


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _reduce_hermitian(raw):
    """Collapse conjugate orientation pairs into Re/Im terms (representative
    with the larger first index); unpaired and diagonal entries stay plain."""
    out = []
    seen = set()
    for (i, j) in raw:
        if (i, j) in seen:
            continue
        if i == j:
            seen.add((i, j))
            out.append(ReducedTerm("plain", (i, j), raw[(i, j)]))
            continue
        mirror = (j, i)
        if mirror in raw:
            rep = (i, j) if i > j else mirror
            other = (rep[1], rep[0])
            c_rep, c_mir = raw[rep], raw[other]
            seen.add(rep)
            seen.add(other)
            re_coeff = c_rep + c_mir
            im_i = GaussianRational(0, 1) if isinstance(c_rep, GaussianRational) and isinstance(c_mir, GaussianRational) else 1j
            im_coeff = im_i * (c_rep - c_mir)
            if not _is_zero(re_coeff):
                out.append(ReducedTerm("re", rep, re_coeff))
            if not _is_zero(im_coeff):
                out.append(ReducedTerm("im", rep, im_coeff))
        else:
            seen.add((i, j))
            out.append(ReducedTerm("plain", (i, j), raw[(i, j)]))
    out.sort(key=lambda t: (t.index[0] + t.index[1], t.index[0], _KIND_ORDER[t.kind]))
    return tuple(out)


def _is_zero(c):
    if isinstance(c, GaussianRational):
        return not c
    return c == 0


def _condition_from_poly(label, g):
    raw = _normalize_raw({(a, b): c for (a, b), c in g.items()})
    return MomentCondition(label=label, raw=raw, reduced=_reduce_hermitian(raw))


def numerical_conditions(G):
    """The two linear moment conditions per basis element: one from the element
    itself and one from its product with z."""
    z = Polynomial.variable("z")
    conditions = []
    elements = list(G)
    for idx, g in enumerate(elements, start=1):
        conditions.append(_condition_from_poly(f"L(g{idx})", g))
        conditions.append(_condition_from_poly(f"L(z*g{idx})", z * g))
    return conditions


# -- consistency and decomposition ----------------------------------------------


def strict_consistency(gamma, G, tol=1e-9):
    """Does the functional annul m*g for every basis element g and every
    monomial m with deg(m*g) <= 2k?"""
    ok, _ = _consistency_detail(gamma, G, tol)
    return ok


def _consistency_detail(gamma, G, tol):
    k2 = 2 * gamma.k
    scale = max(gamma.scale(), 1.0)
    worst = 0.0
    for g in G:
        if g.degree > k2:
            return False, float("inf")
        gs = max(g.coefficient_scale(), 1.0)
        for m in monomials_up_to(k2 - g.degree):
            value = riesz(gamma, Polynomial({m: 1}) * g)
            mag = abs(to_complex(value))
            worst = max(worst, mag / (scale * gs))
            if mag > tol * scale * gs:
                return False, worst
    return True, worst


@dataclass(frozen=True)
class Decomposition:
    quotients: tuple
    max_quotient_degree: int
    degree_bound_ok: bool


def representation_decompose(p, G, k=None):
    """Write p as an exact combination of the basis elements via division.

    Reports the largest quotient degree and whether it stays within k (the
    degree bound that makes the combination usable for consistency).  Raises
    NotInIdealError when the remainder is nonzero.
    """
    elements = list(G)
    quotients, remainder = divide(p, elements)
    if not remainder.is_zero:
        scale = max(p.coefficient_scale(), 1.0)
        if remainder.is_exact or remainder.coefficient_scale() > 1e-9 * scale:
            raise NotInIdealError(
                "polynomial is not in the ideal: nonzero normal form", remainder
            )
    if k is None:
        k = max((g.degree for g in elements), default=0)
    max_deg = max((q.degree for q in quotients if not q.is_zero), default=-1)
    return Decomposition(
        quotients=tuple(quotients),
        max_quotient_degree=max_deg,
        degree_bound_ok=max_deg <= k,
    )


# -- measure extraction --------------------------------------------------------


def extract_measure(gamma, variety, tol=1e-9):
    """Densities on the variety points reproducing every moment, by least
    squares over all of them; fails when a density is negative beyond
    tolerance or the residual is too large."""
    points = variety.zs if isinstance(variety, Variety) else [to_complex(z) for z in variety]
    if not points:
        raise MeasureExtractionError("no representing measure: empty support")
    indices = [(i, j) for i in range(2 * gamma.k + 1) for j in range(2 * gamma.k + 1 - i)]
    rows = []
    rhs = []
    for (i, j) in indices:
        rows.append([np.conj(z) ** i * z ** j for z in points])
        rhs.append(to_complex(gamma.value(i, j)))
    A = np.array(rows, dtype=complex)
    b = np.array(rhs, dtype=complex)
    # densities are real: solve the realified normal system
    A_real = np.vstack([A.real, A.imag])
    b_real = np.concatenate([b.real, b.imag])
    rho, *_ = np.linalg.lstsq(A_real, b_real, rcond=None)
    gnorm = float(np.linalg.norm(b))
    residual = float(np.linalg.norm(A_real @ rho - b_real))
    if residual > tol * max(gnorm, 1.0):
        raise MeasureExtractionError(
            f"no representing measure supported on the variety: residual {residual:.3e}"
        )
    mass_scale = max(float(np.max(np.abs(rho))), 1.0)
    if np.any(rho < -tol * mass_scale):
        raise MeasureExtractionError(
            "no representing measure supported on the variety: negative density"
        )
    atoms = []
    for z, r in zip(points, rho):
        if r > tol * mass_scale:
            atoms.append((complex(z), float(r)))
    if not atoms:
        raise MeasureExtractionError("no representing measure: all densities vanish")
    return AtomicMeasure(tuple(atoms))


# -- the main pipeline ----------------------------------------------------------


@dataclass(frozen=True)
class BasisElementCheck:
    element: Polynomial
    riesz_value: object          # L(g)
    riesz_shift_value: object    # L(z g)
    relation_residual: float
    riesz_ok: bool
    shift_ok: bool
    relation_ok: bool
    degree_ok: bool

    @property
    def all_ok(self):
        return self.riesz_ok and self.shift_ok and self.relation_ok and self.degree_ok


@dataclass(frozen=True)
class CheckReport:
    verdict: str                 # "yes" | "no" | "inconclusive"
    psd: bool
    strict_inner: bool
    min_eigenvalue: float
    rank: int
    variety_size: int
    extremal: bool
    basis: GroebnerBasis
    basis_checks: tuple
    conditions: tuple            # MomentCondition pairs per element
    conditions_pass: bool        # the {1, z}-multiplier set
    strict_consistency_pass: bool
    measure: AtomicMeasure | None
    variety: Variety
    warnings: tuple = field(default_factory=tuple)

    def failed_items(self):
        out = []
        if not self.psd:
            out.append("positivity")
        for i, bc in enumerate(self.basis_checks, start=1):
            if not bc.riesz_ok:
                out.append(f"L(g{i}) != 0")
            if not bc.shift_ok:
                out.append(f"L(z*g{i}) != 0")
            if not bc.relation_ok:
                out.append(f"g{i} is not a column relation")
            if not bc.degree_ok:
                out.append(f"deg g{i} exceeds k")
        if not self.strict_consistency_pass:
            out.append("strict consistency")
        if not self.extremal:
            out.append("rank != variety cardinality")
        return out


def check_extremal(gamma, p, tol=1e-9):
    """Run the full decision pipeline for the sequence gamma and relation p.

    The verdict is "yes" exactly when positivity, extremality, the
    per-element conditions, and full consistency all hold and a measure is
    recovered; condition failures under positivity give "no"; a rank/variety
    mismatch alone is reported as "inconclusive" (outside the extremal
    setting nothing is decided).
    """
    if p.degree > gamma.k:
        raise ValueError(f"the relation must have degree <= k = {gamma.k}")
    warnings = []
    M = build_moment_matrix(gamma)
    psd = psd_check(M, tol)
    variety = solve_conjugate_system(p, tol)
    v = len(variety)
    r = numeric_rank(M, tol)

    if v == 0:
        # no support is available at all; gamma[0,0] > 0 cannot be represented
        return CheckReport(
            verdict="no",
            psd=psd.psd,
            strict_inner=psd.strict_inner,
            min_eigenvalue=psd.min_eigenvalue,
            rank=r,
            variety_size=0,
            extremal=False,
            basis=GroebnerBasis((Polynomial.constant(1),), provenance="points"),
            basis_checks=(),
            conditions=(),
            conditions_pass=False,
            strict_consistency_pass=False,
            measure=None,
            variety=variety,
            warnings=("empty variety: the unit ideal forces L(1) = gamma[0,0] = 0",),
        )

    if not variety.all_simple:
        warnings.append(
            "variety has non-simple points; the extremal pipeline does not apply"
        )

    basis = vanishing_ideal(variety.pairs, tol)
    if p.is_exact:
        exact = rationalize_basis(basis)
        if exact is not None and _exact_basis_accepts(exact, p, v):
            basis = exact
        elif exact is None:
            warnings.append("basis coefficients did not rationalize; using the floating basis")

    std = standard_monomials(basis)
    if len(std) != v:
        warnings.append("standard monomial count differs from the variety cardinality")

    gamma_eval = gamma if (gamma.is_exact and basis.is_exact) else gamma.to_approx()
    scale = max(gamma.scale(), 1.0)
    z_poly = Polynomial.variable("z")
    checks = []
    for g in basis:
        g_for_eval = g if basis.is_exact and gamma_eval.is_exact else g.to_approx()
        gs = max(g.coefficient_scale(), 1.0)
        lg = riesz(gamma_eval, g_for_eval)
        lzg = riesz(gamma_eval, z_poly * g_for_eval)
        riesz_ok = abs(to_complex(lg)) <= tol * scale * gs
        shift_ok = abs(to_complex(lzg)) <= tol * scale * gs
        degree_ok = g.degree <= gamma.k
        if degree_ok:
            rres = relation_residual(M, g)
            relation_ok = rres <= tol * 10
        else:
            rres = float("inf")
            relation_ok = False
        checks.append(
            BasisElementCheck(
                element=g,
                riesz_value=lg,
                riesz_shift_value=lzg,
                relation_residual=rres,
                riesz_ok=riesz_ok,
                shift_ok=shift_ok,
                relation_ok=relation_ok,
                degree_ok=degree_ok,
            )
        )

    conditions = tuple(numerical_conditions(basis))
    literal_pass = all(c.riesz_ok and c.shift_ok for c in checks)
    relations_pass = all(c.relation_ok and c.degree_ok for c in checks)
    strict_pass, _worst = _consistency_detail(gamma_eval, [g.to_approx() if not gamma_eval.is_exact else g for g in basis], tol)

    if literal_pass != strict_pass:
        warnings.append(
            "the {1, z}-multiplier conditions and full consistency disagree: "
            f"literal={literal_pass}, strict={strict_pass}"
        )

    extremal = (r == v)
    conditions_all = literal_pass and relations_pass and strict_pass

    measure = None
    if not psd.psd:
        verdict = "no"
    elif not conditions_all:
        verdict = "no"
    elif not extremal or not variety.all_simple:
        verdict = "inconclusive"
    else:
        try:
            measure = extract_measure(gamma, variety, max(tol, 1e-10))
            verdict = "yes"
        except MeasureExtractionError as exc:
            verdict = "inconclusive"
            warnings.append(f"extraction failed despite passing conditions: {exc}")

    return CheckReport(
        verdict=verdict,
        psd=psd.psd,
        strict_inner=psd.strict_inner,
        min_eigenvalue=psd.min_eigenvalue,
        rank=r,
        variety_size=v,
        extremal=extremal,
        basis=basis,
        basis_checks=tuple(checks),
        conditions=conditions,
        conditions_pass=literal_pass,
        strict_consistency_pass=strict_pass,
        measure=measure,
        variety=variety,
        warnings=tuple(warnings),
    )


def _exact_basis_accepts(basis, p, v):
    """An exact candidate basis is kept when it contains the relation pair
    and its quotient dimension matches the variety size."""
    try:
        if len(standard_monomials(basis)) != v:
            return False
    except ValueError:
        return False
    pn = p.monic()
    for q in (pn, pn.conjugate().monic()):
        if not normal_form(q, basis).is_zero:
            return False
    return True
