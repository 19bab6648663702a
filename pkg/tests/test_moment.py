import random
from fractions import Fraction

import numpy as np
import pytest

from momentforge.moment import (
    MomentSequence,
    build_moment_matrix,
    column_relations,
    moment_labels,
    numeric_rank,
    psd_check,
    relation_residual,
    riesz,
)
from momentforge.poly import Polynomial, parse_poly
from momentforge.scalars import GaussianRational
from momentforge.solver import AtomicMeasure, generate_moments


def exact_sequence_from_atoms(atoms, k):
    """atoms: list of (GaussianRational, Fraction)."""
    entries = {}
    for i in range(2 * k + 1):
        for j in range(2 * k + 1 - i):
            total = GaussianRational(0)
            for z, rho in atoms:
                total = total + GaussianRational(rho) * z.conjugate() ** i * z**j
            entries[(i, j)] = total
    return MomentSequence(k, entries)


def all_ones(k=1):
    n = 2 * k
    return MomentSequence(
        k, {(i, j): GaussianRational(1) for i in range(n + 1) for j in range(n + 1 - i)}
    )


class TestMomentSequence:
    def test_validation_missing(self):
        entries = {(0, 0): GaussianRational(1)}
        with pytest.raises(ValueError, match=r"missing moment \(0, 1\)"):
            MomentSequence(1, entries)

    def test_validation_hermitian(self):
        entries = {
            (i, j): GaussianRational(0) for i in range(3) for j in range(3 - i)
        }
        entries[(0, 0)] = GaussianRational(1)
        entries[(0, 1)] = GaussianRational(0, 1)
        entries[(1, 0)] = GaussianRational(0, 1)  # should be -i
        with pytest.raises(ValueError, match="not conjugate"):
            MomentSequence(1, entries)

    def test_validation_positive_mass(self):
        entries = {(i, j): GaussianRational(0) for i in range(3) for j in range(3 - i)}
        with pytest.raises(ValueError, match="positive"):
            MomentSequence(1, entries)

    def test_perturbed_keeps_hermitian(self):
        g = all_ones()
        g2 = g.perturbed(0, 1, 1e-3 * (1 + 1j))
        assert g2.value(1, 0) == complex(g2.value(0, 1)).conjugate()
        with pytest.raises(ValueError):
            g.perturbed(1, 1, 1j)


class TestMatrixStructure:
    def test_labels(self):
        assert moment_labels(2) == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]

    def test_side_for_k3(self):
        atoms = [(GaussianRational(0), Fraction(1))]
        g = exact_sequence_from_atoms(atoms, 3)
        M = build_moment_matrix(g)
        assert M.side == 10

    def test_point_mass_at_origin(self):
        g = exact_sequence_from_atoms([(GaussianRational(0), Fraction(1))], 1)
        M = build_moment_matrix(g)
        arr = M.array
        assert arr[0, 0] == 1
        assert np.count_nonzero(arr) == 1
        assert numeric_rank(M) == 1

    def test_all_ones_rank_one(self):
        M = build_moment_matrix(all_ones())
        assert np.array_equal(M.array, np.ones((3, 3)))
        assert numeric_rank(M) == 1

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_block_rows_match_displayed_pattern(self, k):
        # the degree-(i) x degree-(j) block has top row
        # gamma[i, j], gamma[i+1, j-1], ..., gamma[i+j, 0]
        # and bottom-left entry gamma[0, j+i]
        rng = random.Random(k)
        atoms = [
            (GaussianRational(rng.randint(-2, 2), rng.randint(-2, 2)), Fraction(1))
            for _ in range(3)
        ]
        g = exact_sequence_from_atoms(atoms, k)
        M = build_moment_matrix(g)
        labels = moment_labels(k)
        offset = {}
        pos = 0
        for d in range(k + 1):
            offset[d] = pos
            pos += d + 1
        for i in range(k + 1):
            for j in range(k + 1):
                base_r, base_c = offset[i], offset[j]
                for t in range(j + 1):
                    assert M.rows[base_r][base_c + t] == g.value(i + t, j - t)
                assert M.rows[base_r + i][base_c] == g.value(0, j + i)
                assert M.rows[base_r][base_c + j] == g.value(i + j, 0)
                assert M.rows[base_r + i][base_c + j] == g.value(j, i)

    def test_hermitian(self):
        atoms = [
            (GaussianRational(1, 2), Fraction(2)),
            (GaussianRational(-1, 1), Fraction(1, 2)),
        ]
        g = exact_sequence_from_atoms(atoms, 2)
        arr = build_moment_matrix(g).array
        assert np.allclose(arr, arr.conj().T, atol=0)


class TestRiesz:
    def test_constant(self):
        g = all_ones(1)
        assert riesz(g, Polynomial.constant(1)) == GaussianRational(1)

    def test_degree_overflow(self):
        with pytest.raises(ValueError, match="degree overflow"):
            riesz(all_ones(1), parse_poly("z^3"))

    def test_displayed_reduction_for_integer_basis_element(self):
        # L(g2) = 2i Im(gamma[1,0]) - 4i Im(gamma[2,0]) - 8i Im(gamma[2,1])
        rng = random.Random(1)
        entries = {}
        for i in range(7):
            for j in range(7 - i):
                if j > i:
                    continue
                v = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                if i == j:
                    v = complex(v.real, 0)
                entries[(i, j)] = v
                entries[(j, i)] = v.conjugate()
        entries[(0, 0)] = complex(abs(entries[(0, 0)]) + 1, 0)
        g = MomentSequence(3, entries)
        g2 = parse_poly("-z + w + 2z^2 - 2w^2 + 4z^2w - 4zw^2")
        val = riesz(g, g2)
        expected = (
            2j * entries[(1, 0)].imag
            - 4j * entries[(2, 0)].imag
            - 8j * entries[(2, 1)].imag
        )
        assert abs(val - expected) < 1e-12
        val_z = riesz(g, parse_poly("z") * g2)
        expected_z = (
            -entries[(0, 2)]
            + entries[(1, 1)]
            + 2 * entries[(0, 3)]
            - 2 * entries[(2, 1)]
            + 4 * entries[(1, 3)]
            - 4 * entries[(2, 2)]
        )
        assert abs(val_z - expected_z) < 1e-12

    def test_sesquilinear_identity(self):
        rng = random.Random(7)
        atoms = [
            (GaussianRational(1, 1), Fraction(2)),
            (GaussianRational(0, -1), Fraction(1, 2)),
            (GaussianRational(-2), Fraction(1)),
        ]
        k = 2
        g = exact_sequence_from_atoms(atoms, k)
        M = build_moment_matrix(g)

        def rand_poly():
            terms = {}
            for a in range(k + 1):
                for b in range(k + 1 - a):
                    if rng.random() < 0.7:
                        terms[(a, b)] = GaussianRational(
                            rng.randint(-3, 3), rng.randint(-3, 3)
                        )
            return Polynomial(terms) if terms else Polynomial.constant(1)

        for _ in range(10):
            p, q = rand_poly(), rand_poly()
            vec_p = M.coefficient_vector(p)
            vec_q = M.coefficient_vector(q)
            lhs = GaussianRational(0)
            for qc, row in zip(vec_q, M.rows):
                for pc, val in zip(vec_p, row):
                    lhs = lhs + qc.conjugate() * val * pc
            assert lhs == riesz(g, p * q.conjugate())


class TestPsd:
    def test_all_ones(self):
        rep = psd_check(build_moment_matrix(all_ones()))
        assert rep.psd
        assert abs(rep.min_eigenvalue) < 1e-12

    def test_indefinite(self):
        entries = {(i, j): GaussianRational(0) for i in range(3) for j in range(3 - i)}
        entries[(0, 0)] = GaussianRational(1)
        entries[(1, 1)] = GaussianRational(-1)
        g = MomentSequence(1, entries)
        rep = psd_check(build_moment_matrix(g))
        assert not rep.psd

    def test_seven_atom_matrix(self, seven_point_moments):
        rep = psd_check(build_moment_matrix(seven_point_moments))
        assert rep.psd and rep.strict_inner


class TestRank:
    def test_seven_atoms_in_general_position(self, seven_point_moments):
        assert numeric_rank(build_moment_matrix(seven_point_moments)) == 7

    def test_exact_rank_matches_float(self):
        atoms = [
            (GaussianRational(1, 1), Fraction(1)),
            (GaussianRational(2, -1), Fraction(3)),
            (GaussianRational(0), Fraction(2)),
        ]
        g = exact_sequence_from_atoms(atoms, 2)
        M = build_moment_matrix(g)
        assert M.is_exact
        r_exact = numeric_rank(M)
        r_float = numeric_rank(
            build_moment_matrix(g.to_approx())
        )
        assert r_exact == r_float == 3


class TestColumnRelations:
    def test_all_ones_kernel(self):
        rels = column_relations(build_moment_matrix(all_ones()))
        polys = {r.polynomial for r in rels}
        assert polys == {parse_poly("z - 1"), parse_poly("w - 1")}

    def test_nonsingular_has_none(self):
        atoms = [
            (GaussianRational(1), Fraction(1)),
            (GaussianRational(-1), Fraction(1)),
            (GaussianRational(0, 1), Fraction(1)),
        ]
        g = exact_sequence_from_atoms(atoms, 1)
        assert column_relations(build_moment_matrix(g)) == []

    def test_seven_atom_relations_span_the_basis(self, seven_point_moments):
        M = build_moment_matrix(seven_point_moments)
        rels = column_relations(M)
        assert len(rels) == 3
        assert {r.polynomial.leading_monomial() for r in rels} == {
            (0, 3),
            (1, 2),
            (3, 0),
        }
        for r in rels:
            assert r.residual < 1e-12
        q7 = parse_poly("z^3 - 8iz - 5w")
        assert relation_residual(M, q7) < 1e-12

    def test_relations_vanish_on_atoms(self, seven_point_moments, seven_point_measure):
        M = build_moment_matrix(seven_point_moments)
        for rel in column_relations(M):
            scale = rel.polynomial.coefficient_scale()
            for z, _rho in seven_point_measure:
                val = rel.polynomial.evaluate((z, z.conjugate()))
                assert abs(val) < 1e-9 * scale * 30
