"""Moment sequences, the moment matrix, the Riesz functional, and kernel analysis.

Conventions: gamma[i, j] stands for the integral of conj(z)^i z^j, so the
Riesz functional sends the monomial with w-exponent a and z-exponent b to
gamma[a, b].  Rows and columns of the matrix are labeled by the monomials of
degree <= k listed degree by degree (1, Z, conj Z, Z^2, ...), and the entry at
row (a, b), column (c, d) is gamma[b + c, a + d], which reproduces the block
structure gamma[i, j] ... gamma[i + j, 0] / ... / gamma[0, j + i] ... gamma[j, i].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .poly import Polynomial, deglex_key
from .scalars import GaussianRational, conj_scalar, is_exact_scalar, to_complex


def moment_labels(k):
    """Column labels of the matrix of order k: degree-ascending monomials,
    within a degree by ascending conjugate exponent."""
    out = []
    for d in range(k + 1):
        for a in range(d + 1):
            out.append((a, d - a))
    return out


def matrix_side(k):
    return (k + 1) * (k + 2) // 2


@dataclass(frozen=True)
class MomentSequence:
    """All moments gamma[i, j] for i + j <= 2k."""

    k: int
    entries: dict

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("the order k must be a positive integer")
        entries = dict(self.entries)
        exact = all(is_exact_scalar(v) for v in entries.values())
        norm = {}
        for (i, j), v in entries.items():
            if is_exact_scalar(v):
                v = v if isinstance(v, GaussianRational) else GaussianRational(v)
                if not exact:
                    v = to_complex(v)
            else:
                v = complex(v)
            norm[(int(i), int(j))] = v
        for i in range(2 * self.k + 1):
            for j in range(2 * self.k + 1 - i):
                if (i, j) not in norm:
                    raise ValueError(f"missing moment ({i}, {j})")
        for (i, j), v in norm.items():
            if i + j > 2 * self.k:
                raise ValueError(f"moment ({i}, {j}) exceeds degree 2k")
            mirror = norm[(j, i)]
            if conj_scalar(v) != mirror:
                raise ValueError(f"moments ({i}, {j}) and ({j}, {i}) are not conjugate")
        g00 = norm[(0, 0)]
        if isinstance(g00, GaussianRational):
            ok = g00.im == 0 and g00.re > 0
        else:
            ok = g00.imag == 0 and g00.real > 0
        if not ok:
            raise ValueError("gamma[0, 0] must be real and positive")
        object.__setattr__(self, "entries", norm)

    @property
    def is_exact(self):
        return all(is_exact_scalar(v) for v in self.entries.values())

    def value(self, i, j):
        try:
            return self.entries[(i, j)]
        except KeyError:
            raise ValueError(f"moment ({i}, {j}) is outside the sequence") from None

    def scale(self):
        return max(abs(to_complex(v)) for v in self.entries.values())

    def to_approx(self):
        if not self.is_exact:
            return self
        return MomentSequence(
            self.k, {ij: to_complex(v) for ij, v in self.entries.items()}
        )

    def perturbed(self, i, j, delta):
        """Hermitian single-moment perturbation (both orientations move)."""
        if i == j and (delta != conj_scalar(delta)):
            raise ValueError("a diagonal moment perturbation must be real")
        new = dict(self.entries)
        new[(i, j)] = new[(i, j)] + delta
        if i != j:
            new[(j, i)] = new[(j, i)] + conj_scalar(delta)
        return MomentSequence(self.k, new)


@dataclass(frozen=True)
class MomentMatrix:
    k: int
    labels: tuple
    rows: tuple  # tuple of tuples of scalars

    @property
    def side(self):
        return len(self.labels)

    @property
    def is_exact(self):
        return all(is_exact_scalar(v) for row in self.rows for v in row)

    @property
    def array(self):
        return np.array(
            [[to_complex(v) for v in row] for row in self.rows], dtype=complex
        )

    def entry(self, row_label, col_label):
        return self.rows[self.labels.index(row_label)][self.labels.index(col_label)]

    def coefficient_vector(self, p):
        """The coefficient vector of p in label order; requires deg p <= k."""
        if p.degree > self.k:
            raise ValueError(f"degree {p.degree} exceeds the matrix order {self.k}")
        if p.is_exact:
            return [p.coefficient(m) for m in self.labels]
        return [p.coefficient(m) for m in self.labels]

    def apply(self, p):
        """M(k) acting on the coefficient vector of p; list of scalars."""
        vec = self.coefficient_vector(p)
        out = []
        for row in self.rows:
            acc = None
            for rv, pv in zip(row, vec):
                term = rv * pv
                acc = term if acc is None else acc + term
            out.append(acc)
        return out


def build_moment_matrix(gamma):
    """Hermitian matrix of the Riesz functional on degree <= k monomial products."""
    labels = tuple(moment_labels(gamma.k))
    rows = []
    for (a, b) in labels:
        row = []
        for (c, d) in labels:
            row.append(gamma.value(b + c, a + d))
        rows.append(tuple(row))
    return MomentMatrix(k=gamma.k, labels=labels, rows=tuple(rows))


def riesz(gamma, p):
    """Linear extension of monomial -> moment to polynomials of degree <= 2k."""
    if p.degree > 2 * gamma.k:
        raise ValueError(
            f"degree overflow: deg p = {p.degree} exceeds 2k = {2 * gamma.k}"
        )
    total = None
    for (a, b), c in p.items():
        term = c * gamma.value(a, b)
        total = term if total is None else total + term
    if total is None:
        return GaussianRational(0) if gamma.is_exact else 0j
    return total


@dataclass(frozen=True)
class PsdReport:
    psd: bool
    strict_inner: bool
    min_eigenvalue: float
    inner_min_eigenvalue: float


def psd_check(M, tol=1e-9):
    """Positive semidefiniteness of M(k) and definiteness of the inner M(k-1)."""
    arr = M.array
    eigs = np.linalg.eigvalsh(arr)
    scale = max(float(np.max(np.abs(eigs))), 1.0) if eigs.size else 1.0
    psd = bool(eigs[0] >= -tol * scale)
    inner_side = matrix_side(M.k - 1)
    inner = arr[:inner_side, :inner_side]
    inner_eigs = np.linalg.eigvalsh(inner)
    inner_scale = max(float(np.max(np.abs(inner_eigs))), 1.0) if inner_eigs.size else 1.0
    strict = bool(inner_eigs[0] > tol * inner_scale)
    return PsdReport(
        psd=psd,
        strict_inner=strict,
        min_eigenvalue=float(eigs[0]),
        inner_min_eigenvalue=float(inner_eigs[0]),
    )


def _bareiss_rank(rows):
    """Exact rank by fraction-free elimination over Gaussian rationals."""
    m = [[GaussianRational(v) if not isinstance(v, GaussianRational) else v for v in row]
         for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    prev = GaussianRational(1)
    rank = 0
    row = 0
    for col in range(ncols):
        pivot_row = None
        for r in range(row, nrows):
            if m[r][col]:
                pivot_row = r
                break
        if pivot_row is None:
            continue
        m[row], m[pivot_row] = m[pivot_row], m[row]
        pivot = m[row][col]
        for r in range(row + 1, nrows):
            for c in range(col + 1, ncols):
                m[r][c] = (pivot * m[r][c] - m[r][col] * m[row][c]) / prev
            m[r][col] = GaussianRational(0)
        prev = pivot
        rank += 1
        row += 1
        if row == nrows:
            break
    return rank


def numeric_rank(M, tol=1e-9):
    """Rank: singular values above tol times the largest one; exact matrices
    are ranked by fraction-free elimination instead."""
    if M.is_exact:
        return _bareiss_rank([list(row) for row in M.rows])
    arr = M.array
    svals = np.linalg.svd(arr, compute_uv=False)
    if svals.size == 0 or svals[0] == 0:
        return 0
    return int(np.sum(svals > tol * svals[0]))


@dataclass(frozen=True)
class ColumnRelation:
    polynomial: Polynomial
    vector: tuple
    residual: float


def _exact_kernel(rows, ncols):
    """Kernel basis of an exact matrix via reduced row echelon form."""
    m = [list(r) for r in rows]
    nrows = len(m)
    pivots = []
    row = 0
    for col in range(ncols):
        pivot_row = None
        for r in range(row, nrows):
            if m[r][col]:
                pivot_row = r
                break
        if pivot_row is None:
            continue
        m[row], m[pivot_row] = m[pivot_row], m[row]
        pv = m[row][col]
        m[row] = [v / pv for v in m[row]]
        for r in range(nrows):
            if r != row and m[r][col]:
                f = m[r][col]
                m[r] = [v - f * w for v, w in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    zero = GaussianRational(0)
    for fc in free:
        vec = [zero] * ncols
        vec[fc] = GaussianRational(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -m[r][fc]
        basis.append(vec)
    return basis


def column_relations(M, tol=1e-9):
    """Kernel of M(k) written as monic polynomials with distinct leading
    monomials, each leading monomial absent from every other relation."""
    order = sorted(range(M.side), key=lambda i: deglex_key(M.labels[i]), reverse=True)
    if M.is_exact:
        kernel = _exact_kernel([list(r) for r in M.rows], M.side)
        if not kernel:
            return []
        # Gauss-Jordan on the kernel matrix with columns in descending order
        rows = [[vec[i] for i in order] for vec in kernel]
        ncols = M.side
        pivots = []
        row = 0
        for col in range(ncols):
            pr = next((r for r in range(row, len(rows)) if rows[r][col]), None)
            if pr is None:
                continue
            rows[row], rows[pr] = rows[pr], rows[row]
            pv = rows[row][col]
            rows[row] = [v / pv for v in rows[row]]
            for r in range(len(rows)):
                if r != row and rows[r][col]:
                    f = rows[r][col]
                    rows[r] = [v - f * w for v, w in zip(rows[r], rows[row])]
            pivots.append(col)
            row += 1
            if row == len(rows):
                break
        relations = []
        for r, _pc in zip(rows, pivots):
            terms = {
                M.labels[order[i]]: v for i, v in enumerate(r) if v
            }
            poly = Polynomial(terms)
            vec = tuple(poly.coefficient(lab) for lab in M.labels)
            relations.append(ColumnRelation(polynomial=poly, vector=vec, residual=0.0))
        relations.sort(
            key=lambda rel: deglex_key(rel.polynomial.leading_monomial()), reverse=True
        )
        return relations

    arr = M.array
    u, svals, vh = np.linalg.svd(arr)
    if svals.size == 0:
        return []
    null_mask = svals <= tol * svals[0]
    kernel = vh[null_mask.nonzero()[0], :].conj()
    extra = vh[len(svals):, :].conj() if vh.shape[0] > len(svals) else None
    if extra is not None and extra.size:
        kernel = np.vstack([kernel, extra])
    if kernel.size == 0:
        return []
    rows = kernel[:, order]
    nrows, ncols = rows.shape
    pivots = []
    row = 0
    for col in range(ncols):
        sub = np.abs(rows[row:, col])
        if sub.size == 0:
            break
        best = int(np.argmax(sub)) + row
        if abs(rows[best, col]) <= 1e-12 * max(1.0, float(np.max(np.abs(rows)))):
            continue
        rows[[row, best]] = rows[[best, row]]
        rows[row] = rows[row] / rows[row, col]
        for r in range(nrows):
            if r != row:
                rows[r] = rows[r] - rows[r, col] * rows[row]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    mnorm = float(np.linalg.norm(arr))
    relations = []
    for r_idx, _pc in zip(range(len(pivots)), pivots):
        rvec = rows[r_idx]
        cmax = float(np.max(np.abs(rvec)))
        terms = {}
        for i, v in enumerate(rvec):
            if abs(v) > 1e-12 * cmax:
                terms[M.labels[order[i]]] = complex(v)
        poly = Polynomial(terms).monic()
        vec = np.zeros(M.side, dtype=complex)
        for i, lab in enumerate(M.labels):
            vec[i] = complex(poly.coefficient(lab))
        residual = float(np.linalg.norm(arr @ vec)) / (mnorm if mnorm else 1.0)
        relations.append(
            ColumnRelation(polynomial=poly, vector=tuple(vec.tolist()), residual=residual)
        )
    relations.sort(
        key=lambda rel: deglex_key(rel.polynomial.leading_monomial()), reverse=True
    )
    return relations


def relation_residual(M, p):
    """Scaled norm of M(k) applied to p's coefficient vector."""
    if M.is_exact and p.is_exact:
        out = M.apply(p)
        exact_zero = all(not v for v in out)
        if exact_zero:
            return 0.0
        return float(
            np.linalg.norm([to_complex(v) for v in out])
            / max(np.linalg.norm(M.array), 1e-300)
        )
    arr = M.array
    vec = np.array([to_complex(c) for c in M.coefficient_vector(p)], dtype=complex)
    norm = float(np.linalg.norm(arr))
    pn = float(np.linalg.norm(vec))
    if pn == 0:
        return 0.0
    return float(np.linalg.norm(arr @ vec)) / (max(norm, 1e-300) * pn)
