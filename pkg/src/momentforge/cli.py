"""Command-line front end: problem files, reports, and contour-grid sampling.

The problem file is line oriented, one key per line, lists indexed in the
key.  Exact values are rational strings, floats round-trip through 17
significant digits:

    k: 3
    tol: 1e-09
    polynomial: z^3 - 8iz - 5w
    moment[0].i: 0
    moment[0].j: 0
    moment[0].re: 7
    moment[0].im: 0
    atom[0].re: 1
    atom[0].im: 2
    atom[0].density: 1

Exactly one of moments/atoms appears.  Moments may be given for one
orientation only; the mirror entries are completed by conjugation.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

from .groebner import rationalize_basis, standard_monomials, vanishing_ideal
from .moment import MomentSequence, build_moment_matrix, moment_labels
from .poly import Polynomial, format_poly, parse_poly
from .scalars import GaussianRational, format_scalar, is_exact_scalar, to_complex
from .solver import (
    AtomicMeasure,
    MeasureExtractionError,
    check_extremal,
    extract_measure,
    generate_moments,
    numerical_conditions,
)
from .variety import NonFiniteVarietyError, solve_conjugate_system

DEFAULT_TOL = 1e-9
TOL_ENV_VAR = "MOMENT_FORGE_TOL"

_EXACT_VALUE_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_KEY_RE = re.compile(r"^(?P<name>[a-z_]+)(\[(?P<index>\d+)\])?(\.(?P<sub>[a-z_]+))?$")


class ProblemFileError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemFile:
    k: int
    moments: dict | None = None       # (i, j) -> scalar, Hermitian-complete
    atoms: tuple | None = None        # ((z, density), ...)
    polynomial: Polynomial | None = None
    tol: float | None = None

    def __post_init__(self):
        if (self.moments is None) == (self.atoms is None):
            raise ProblemFileError("exactly one of moments or atoms must be present")

    @property
    def mode(self):
        return "moments" if self.moments is not None else "atoms"

    def moment_sequence(self):
        if self.moments is not None:
            return MomentSequence(self.k, self.moments)
        return generate_moments(AtomicMeasure(self.atoms), self.k)


def _parse_value(text, context):
    text = text.strip()
    if _EXACT_VALUE_RE.match(text):
        return Fraction(text)
    try:
        return float(text)
    except ValueError:
        raise ProblemFileError(f"{context}: cannot parse value {text!r}") from None


def parse_problem(path):
    """Read and validate a problem file; errors name the offending key."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_problem_text(fh.read())


def parse_problem_text(text):
    k = None
    tol = None
    polynomial = None
    moment_fields = {}
    atom_fields = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ProblemFileError(f"line {lineno}: expected 'key: value'")
        key, value = line.split(":", 1)
        key, value = key.strip(), value.strip()
        m = _KEY_RE.match(key)
        if not m:
            raise ProblemFileError(f"line {lineno}: malformed key {key!r}")
        name, index, sub = m.group("name"), m.group("index"), m.group("sub")
        if name == "k" and index is None and sub is None:
            k = int(value)
        elif name == "tol" and index is None and sub is None:
            tol = float(value)
        elif name == "polynomial" and index is None and sub is None:
            polynomial = parse_poly(value)
        elif name == "moment" and index is not None and sub in ("i", "j", "re", "im"):
            entry = moment_fields.setdefault(int(index), {})
            if sub in entry:
                raise ProblemFileError(f"line {lineno}: duplicate field {key!r}")
            entry[sub] = (
                int(value) if sub in ("i", "j") else _parse_value(value, key)
            )
        elif name == "atom" and index is not None and sub in ("re", "im", "density"):
            entry = atom_fields.setdefault(int(index), {})
            if sub in entry:
                raise ProblemFileError(f"line {lineno}: duplicate field {key!r}")
            entry[sub] = _parse_value(value, key)
        else:
            raise ProblemFileError(f"line {lineno}: unknown key {key!r}")
    if k is None:
        raise ProblemFileError("missing required key 'k'")

    moments = None
    if moment_fields:
        moments = {}
        for idx in sorted(moment_fields):
            entry = moment_fields[idx]
            for fieldname in ("i", "j", "re", "im"):
                if fieldname not in entry:
                    raise ProblemFileError(f"moment[{idx}]: missing field '{fieldname}'")
            i, j = entry["i"], entry["j"]
            if i < 0 or j < 0 or i + j > 2 * k:
                raise ProblemFileError(
                    f"moment[{idx}]: index ({i}, {j}) outside i + j <= 2k"
                )
            value = _make_scalar(entry["re"], entry["im"])
            if (i, j) in moments:
                raise ProblemFileError(f"moment[{idx}]: duplicate index ({i}, {j})")
            moments[(i, j)] = value
        moments = _hermitian_complete(moments)

    atoms = None
    if atom_fields:
        atoms_list = []
        for idx in sorted(atom_fields):
            entry = atom_fields[idx]
            for fieldname in ("re", "im", "density"):
                if fieldname not in entry:
                    raise ProblemFileError(f"atom[{idx}]: missing field '{fieldname}'")
            z = _make_scalar(entry["re"], entry["im"])
            rho = entry["density"]
            if rho <= 0:
                raise ProblemFileError(f"atom[{idx}]: density must be positive")
            atoms_list.append((z, rho))
        atoms = tuple(atoms_list)

    return ProblemFile(k=k, moments=moments, atoms=atoms, polynomial=polynomial, tol=tol)


def _make_scalar(re_v, im_v):
    if isinstance(re_v, Fraction) and isinstance(im_v, Fraction):
        return GaussianRational(re_v, im_v)
    return complex(float(re_v), float(im_v))


def _conj(v):
    if isinstance(v, GaussianRational):
        return v.conjugate()
    return v.conjugate()


def _hermitian_complete(moments):
    out = dict(moments)
    for (i, j), v in moments.items():
        mirror = (j, i)
        if mirror in moments:
            if i != j and _conj(v) != moments[mirror]:
                raise ProblemFileError(
                    f"asymmetric duplicate entries for ({i}, {j}) and ({j}, {i})"
                )
        else:
            out[mirror] = _conj(v)
    return out


def serialize_problem(pf):
    """Problem file text; parse(serialize(parse(text))) == parse(text)."""
    lines = [f"k: {pf.k}"]
    if pf.tol is not None:
        lines.append(f"tol: {pf.tol:.17g}")
    if pf.polynomial is not None:
        lines.append(f"polynomial: {format_poly(pf.polynomial)}")
    if pf.moments is not None:
        items = sorted(pf.moments.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0]))
        for n, ((i, j), v) in enumerate(items):
            lines.append(f"moment[{n}].i: {i}")
            lines.append(f"moment[{n}].j: {j}")
            re_s, im_s = _scalar_parts(v)
            lines.append(f"moment[{n}].re: {re_s}")
            lines.append(f"moment[{n}].im: {im_s}")
    if pf.atoms is not None:
        for n, (z, rho) in enumerate(pf.atoms):
            re_s, im_s = _scalar_parts(z)
            lines.append(f"atom[{n}].re: {re_s}")
            lines.append(f"atom[{n}].im: {im_s}")
            rho_s = str(rho) if isinstance(rho, (int, Fraction)) else f"{rho:.17g}"
            lines.append(f"atom[{n}].density: {rho_s}")
    return "\n".join(lines) + "\n"


def _scalar_parts(v):
    if isinstance(v, GaussianRational):
        return str(v.re), str(v.im)
    c = complex(v)
    return f"{c.real:.17g}", f"{c.imag:.17g}"


# -- grid sampling ------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    center: complex
    half_width: float
    samples: int

    def __post_init__(self):
        if self.samples < 2:
            raise ValueError("samples per axis must be at least 2")
        if not self.half_width > 0:
            raise ValueError("half-width must be positive")


def grid_sample(p, spec):
    """CSV rows sampling p(x + iy, x - iy): header then n^2 rows, y outer,
    x inner, both ascending."""
    pa = p.to_approx()
    n = spec.samples
    cx, cy = spec.center.real, spec.center.imag
    hw = spec.half_width
    xs = [cx - hw + 2 * hw * i / (n - 1) for i in range(n)]
    ys = [cy - hw + 2 * hw * i / (n - 1) for i in range(n)]
    rows = ["x,y,re,im,abs"]
    for y in ys:
        for x in xs:
            z = complex(x, y)
            val = to_complex(pa.evaluate((z, z.conjugate())))
            rows.append(
                f"{x:.17g},{y:.17g},{val.real:.17g},{val.imag:.17g},{abs(val):.17g}"
            )
    return rows


# -- command implementations -----------------------------------------------------


def _require_polynomial(problem):
    if problem.polynomial is None:
        raise ProblemFileError("this command requires a 'polynomial' entry")
    return problem.polynomial


def _fmt(value):
    return format_scalar(value)


def _cmd_matrix(problem, tol, fmt):
    gamma = problem.moment_sequence()
    M = build_moment_matrix(gamma)
    lines = []
    if fmt == "structured":
        lines.append(f"k: {M.k}")
        lines.append(f"side: {M.side}")
        for r, row in enumerate(M.rows):
            for c, v in enumerate(row):
                lines.append(f"entry[{r}][{c}]: {_fmt(v)}")
    else:
        labels = moment_labels(M.k)
        lines.append(f"moment matrix of order {M.k}, side {M.side}")
        lines.append("columns: " + ", ".join(_label_name(l) for l in labels))
        for row in M.rows:
            lines.append("  ".join(_fmt(v) for v in row))
    return 0, lines


def _label_name(m):
    a, b = m
    if a == 0 and b == 0:
        return "1"
    out = ""
    if b:
        out += "Z" + (f"^{b}" if b > 1 else "")
    if a:
        out += "Zb" + (f"^{a}" if a > 1 else "")
    return out


def _cmd_variety(problem, tol, fmt):
    p = _require_polynomial(problem)
    variety = solve_conjugate_system(p, tol)
    lines = []
    if fmt == "structured":
        lines.append(f"count: {len(variety)}")
        for n, pt in enumerate(variety):
            lines.append(f"point[{n}].re: {pt.z.real:.17g}")
            lines.append(f"point[{n}].im: {pt.z.imag:.17g}")
            lines.append(f"point[{n}].residual: {pt.residual:.17g}")
            lines.append(f"point[{n}].simple: {str(pt.simple).lower()}")
    else:
        lines.append(f"variety of {format_poly(p)}: {len(variety)} point(s)")
        for pt in variety:
            flag = "" if pt.simple else "  [clustered]"
            lines.append(
                f"  z = {format_scalar(pt.z)}   residual {pt.residual:.3e}{flag}"
            )
    return 0, lines


def _basis_for_problem(problem, tol, exact):
    p = _require_polynomial(problem)
    variety = solve_conjugate_system(p, tol)
    if len(variety) == 0:
        raise NonFiniteVarietyError("empty variety: no basis to report")
    basis = vanishing_ideal(variety.pairs, tol)
    if exact or p.is_exact:
        exact_basis = rationalize_basis(basis)
        if exact_basis is not None:
            return exact_basis
        if exact:
            raise ProblemFileError(
                "--exact requested but the basis does not rationalize"
            )
    return basis


def _cmd_groebner(problem, tol, fmt, exact):
    basis = _basis_for_problem(problem, tol, exact)
    std = standard_monomials(basis)
    lines = []
    if fmt == "structured":
        lines.append(f"count: {len(basis)}")
        lines.append(f"standard_monomials: {len(std)}")
        for n, g in enumerate(basis):
            lines.append(f"basis[{n}]: {format_poly(g)}")
    else:
        lines.append(f"reduced basis ({len(basis)} elements, {len(std)} standard monomials):")
        for n, g in enumerate(basis, start=1):
            lines.append(f"  g{n} = {format_poly(g)}")
    return 0, lines


def _cmd_conditions(problem, tol, fmt, exact):
    basis = _basis_for_problem(problem, tol, exact)
    conditions = numerical_conditions(basis)
    lines = []
    if fmt == "structured":
        for n, c in enumerate(conditions):
            lines.append(f"condition[{n}]: {c.render()}")
    else:
        lines.append("moment conditions for a representing measure:")
        for c in conditions:
            lines.append("  " + c.render())
    return 0, lines


def _cmd_check(problem, tol, fmt, exact):
    p = _require_polynomial(problem)
    gamma = problem.moment_sequence()
    report = check_extremal(gamma, p, tol)
    code = {"yes": 0, "no": 2, "inconclusive": 3}[report.verdict]
    lines = _render_check(report, fmt)
    return code, lines


def _render_check(report, fmt):
    lines = []
    if fmt == "structured":
        lines.append(f"verdict: {report.verdict}")
        lines.append(f"psd: {str(report.psd).lower()}")
        lines.append(f"strict_inner: {str(report.strict_inner).lower()}")
        lines.append(f"min_eigenvalue: {report.min_eigenvalue:.17g}")
        lines.append(f"rank: {report.rank}")
        lines.append(f"variety: {report.variety_size}")
        lines.append(f"extremal: {str(report.extremal).lower()}")
        lines.append(f"basis_size: {len(report.basis)}")
        for n, (g, bc) in enumerate(zip(report.basis, report.basis_checks)):
            lines.append(f"basis[{n}]: {format_poly(g)}")
            lines.append(f"basis[{n}].riesz: {_fmt(bc.riesz_value)}")
            lines.append(f"basis[{n}].riesz_shift: {_fmt(bc.riesz_shift_value)}")
            lines.append(f"basis[{n}].relation_residual: {bc.relation_residual:.17g}")
            lines.append(f"basis[{n}].ok: {str(bc.all_ok).lower()}")
        lines.append(f"conditions_pass: {str(report.conditions_pass).lower()}")
        lines.append(
            f"strict_consistency: {str(report.strict_consistency_pass).lower()}"
        )
        for n, w in enumerate(report.warnings):
            lines.append(f"warning[{n}]: {w}")
        if report.measure is not None:
            for n, (z, rho) in enumerate(report.measure):
                lines.append(f"measure[{n}].re: {z.real:.17g}")
                lines.append(f"measure[{n}].im: {z.imag:.17g}")
                lines.append(f"measure[{n}].density: {rho:.17g}")
    else:
        lines.append(f"verdict: {report.verdict}")
        lines.append(
            f"positivity: psd={report.psd}  inner block definite={report.strict_inner}"
            f"  min eigenvalue={report.min_eigenvalue:.3e}"
        )
        lines.append(
            f"rank M(k) = {report.rank}, variety cardinality = {report.variety_size}"
            f"  -> extremal: {report.extremal}"
        )
        lines.append(f"basis ({len(report.basis)} elements):")
        for n, (g, bc) in enumerate(zip(report.basis, report.basis_checks), start=1):
            status = "ok" if bc.all_ok else "FAIL"
            lines.append(f"  g{n} = {format_poly(g)}   [{status}]")
            lines.append(
                f"      L(g{n}) = {_fmt(bc.riesz_value)}   "
                f"L(z*g{n}) = {_fmt(bc.riesz_shift_value)}   "
                f"relation residual {bc.relation_residual:.3e}"
            )
        lines.append(f"conditions (multipliers 1, z): {'pass' if report.conditions_pass else 'fail'}")
        lines.append(
            f"full consistency: {'pass' if report.strict_consistency_pass else 'fail'}"
        )
        for w in report.warnings:
            lines.append(f"warning: {w}")
        if report.measure is not None:
            lines.append(f"measure ({len(report.measure)} atoms):")
            for z, rho in report.measure:
                lines.append(f"  z = {format_scalar(z)}   density {rho:.17g}")
        failed = report.failed_items()
        if failed:
            lines.append("failed: " + "; ".join(failed))
    return lines


def _cmd_extract(problem, tol, fmt):
    p = _require_polynomial(problem)
    gamma = problem.moment_sequence()
    variety = solve_conjugate_system(p, tol)
    try:
        measure = extract_measure(gamma, variety, tol)
    except MeasureExtractionError as exc:
        return 2, [f"no measure: {exc}"]
    lines = []
    if fmt == "structured":
        lines.append(f"count: {len(measure)}")
        for n, (z, rho) in enumerate(measure):
            lines.append(f"atom[{n}].re: {z.real:.17g}")
            lines.append(f"atom[{n}].im: {z.imag:.17g}")
            lines.append(f"atom[{n}].density: {rho:.17g}")
    else:
        lines.append(f"extracted measure with {len(measure)} atom(s):")
        for z, rho in measure:
            lines.append(f"  z = {format_scalar(z)}   density {rho:.17g}")
    return 0, lines


def _cmd_generate(problem, tol, fmt):
    if problem.atoms is None:
        raise ProblemFileError("generate requires an atoms-mode problem file")
    gamma = problem.moment_sequence()
    out = ProblemFile(
        k=problem.k,
        moments=gamma.entries,
        atoms=None,
        polynomial=problem.polynomial,
        tol=problem.tol,
    )
    return 0, serialize_problem(out).splitlines()


def _cmd_grid(problem, tol, fmt, spec):
    p = _require_polynomial(problem)
    return 0, grid_sample(p, spec)


# -- entry point -------------------------------------------------------------------


def _resolve_tol(args, problem):
    if args.tol is not None:
        return args.tol
    if problem is not None and problem.tol is not None:
        return problem.tol
    env = os.environ.get(TOL_ENV_VAR)
    if env:
        try:
            return float(env)
        except ValueError:
            raise ProblemFileError(f"{TOL_ENV_VAR} is not a float: {env!r}") from None
    return DEFAULT_TOL


def _parse_complex_flag(text):
    p = parse_poly(text)
    if p.degree > 0:
        raise ValueError(f"expected a complex number, got {text!r}")
    return to_complex(p.coefficient((0, 0)))


def build_arg_parser():
    ap = argparse.ArgumentParser(
        prog="momentforge",
        description="Decide representability of truncated complex moment sequences "
        "with a polynomial column relation.",
    )
    ap.add_argument(
        "command",
        choices=[
            "matrix",
            "variety",
            "groebner",
            "conditions",
            "check",
            "extract",
            "generate",
            "grid",
        ],
    )
    ap.add_argument("problem", help="path to the problem file")
    ap.add_argument("--tol", type=float, default=None, help="tolerance (default 1e-9)")
    ap.add_argument(
        "--exact",
        action="store_true",
        help="force the exact pipeline where possible",
    )
    ap.add_argument("--output", default=None, help="write output to this path")
    ap.add_argument("--format", choices=["text", "structured"], default="text")
    ap.add_argument("--center", default="0", help="grid center as a complex literal")
    ap.add_argument("--half-width", type=float, default=2.0, dest="half_width")
    ap.add_argument("--samples", type=int, default=64)
    return ap


def run_command(command, problem, tol, fmt="text", exact=False, grid_spec=None):
    """Dispatch; returns (exit_code, list of output lines)."""
    if command == "matrix":
        return _cmd_matrix(problem, tol, fmt)
    if command == "variety":
        return _cmd_variety(problem, tol, fmt)
    if command == "groebner":
        return _cmd_groebner(problem, tol, fmt, exact)
    if command == "conditions":
        return _cmd_conditions(problem, tol, fmt, exact)
    if command == "check":
        return _cmd_check(problem, tol, fmt, exact)
    if command == "extract":
        return _cmd_extract(problem, tol, fmt)
    if command == "generate":
        return _cmd_generate(problem, tol, fmt)
    if command == "grid":
        if grid_spec is None:
            raise ValueError("grid requires a GridSpec")
        return _cmd_grid(problem, tol, fmt, grid_spec)
    raise ValueError(f"unknown command {command!r}")


def main(argv=None):
    ap = build_arg_parser()
    args = ap.parse_args(argv)
    try:
        problem = parse_problem(args.problem)
        tol = _resolve_tol(args, problem)
        grid_spec = None
        if args.command == "grid":
            grid_spec = GridSpec(
                center=_parse_complex_flag(args.center),
                half_width=args.half_width,
                samples=args.samples,
            )
        code, lines = run_command(
            args.command,
            problem,
            tol,
            fmt=args.format,
            exact=args.exact,
            grid_spec=grid_spec,
        )
    except (ProblemFileError, NonFiniteVarietyError, ValueError, OSError) as exc:
        print(f"momentforge {args.command}: error: {exc}", file=sys.stderr)
        return 1
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
