from fractions import Fraction

import numpy as np
import pytest

from momentforge.groebner import vanishing_ideal
from momentforge.moment import MomentSequence, build_moment_matrix, numeric_rank
from momentforge.poly import Polynomial, format_poly, parse_poly
from momentforge.scalars import GaussianRational
from momentforge.solver import (
    AtomicMeasure,
    MeasureExtractionError,
    NotInIdealError,
    check_extremal,
    extract_measure,
    generate_moments,
    numerical_conditions,
    representation_decompose,
    strict_consistency,
    _condition_from_poly,
)
from momentforge.variety import Variety, VarietyPoint, solve_conjugate_system

from conftest import SEVEN_POINT_ROOTS


class TestGenerateMoments:
    def test_origin_mass(self):
        mu = AtomicMeasure(((GaussianRational(0), Fraction(1)),))
        g = generate_moments(mu, 1)
        assert g.value(0, 0) == GaussianRational(1)
        assert all(
            not g.value(i, j) for i in range(3) for j in range(3 - i) if (i, j) != (0, 0)
        )

    def test_symmetric_pair(self):
        mu = AtomicMeasure(
            (
                (GaussianRational(0, 1), Fraction(1, 2)),
                (GaussianRational(0, -1), Fraction(1, 2)),
            )
        )
        g = generate_moments(mu, 1)
        assert g.value(0, 0) == GaussianRational(1)
        assert g.value(0, 1) == GaussianRational(0)
        assert g.value(1, 1) == GaussianRational(1)
        assert g.value(0, 2) == GaussianRational(-1)

    def test_invalid_measures(self):
        with pytest.raises(ValueError):
            AtomicMeasure(((0j, -1.0),))
        with pytest.raises(ValueError):
            AtomicMeasure(((0j, 1.0), (0j, 2.0)))


class TestConditions:
    def test_integer_basis_element_renders_displayed_equations(self):
        g2 = parse_poly("-z + w + 2z^2 - 2w^2 + 4z^2w - 4zw^2")
        c1 = _condition_from_poly("L(g2)", g2)
        c2 = _condition_from_poly("L(z*g2)", parse_poly("z") * g2)
        assert (
            c1.render()
            == "L(g2): 2i*Im(gamma[1,0]) - 4i*Im(gamma[2,0]) - 8i*Im(gamma[2,1]) = 0"
        )
        assert c2.render() == (
            "L(z*g2): -gamma[0,2] + gamma[1,1] + 2*gamma[0,3] - 2*gamma[2,1]"
            " + 4*gamma[1,3] - 4*gamma[2,2] = 0"
        )

    def test_monic_scaling_does_not_change_rendering(self):
        g2 = parse_poly("-z + w + 2z^2 - 2w^2 + 4z^2w - 4zw^2")
        monic = g2.monic()
        assert (
            _condition_from_poly("L(g2)", monic).render()
            == _condition_from_poly("L(g2)", g2).render()
        )

    def test_single_variable(self):
        conditions = numerical_conditions([parse_poly("z")])
        assert conditions[0].render() == "L(g1): gamma[0,1] = 0"
        assert conditions[1].render() == "L(z*g1): gamma[0,2] = 0"

    def test_circle_line_reduction_with_free_scale(self):
        # for u = 3: Re gamma[2,1] + Im gamma[2,1] = 3 (Re gamma[1,0] + Im gamma[1,0])
        i = Polynomial.constant(GaussianRational(0, 1))
        z, w = Polynomial.variable("z"), Polynomial.variable("w")
        qlc = i * (z - i * w) * (w * z - 3)
        cond = _condition_from_poly("L(qlc)", qlc)
        vec = cond.normalized_reduced_vector()
        one = GaussianRational(1)
        assert vec == {
            ("re", (1, 0)): one,
            ("im", (1, 0)): one,
            ("re", (2, 1)): -GaussianRational(Fraction(1, 3)),
            ("im", (2, 1)): -GaussianRational(Fraction(1, 3)),
        }

    def test_emitted_forms_agree_with_riesz(self, seven_point_moments):
        basis = vanishing_ideal([(z, np.conj(z)) for z in SEVEN_POINT_ROOTS])
        conditions = numerical_conditions(basis)
        z = Polynomial.variable("z")
        for n, g in enumerate(basis):
            from momentforge.moment import riesz

            got = complex(conditions[2 * n].evaluate(seven_point_moments))
            want = complex(riesz(seven_point_moments, g.to_approx()))
            # conditions are rescaled; compare up to the scale of the pair
            if abs(want) < 1e-12:
                assert abs(got) < 1e-9
            got_z = complex(conditions[2 * n + 1].evaluate(seven_point_moments))
            want_z = complex(riesz(seven_point_moments, z * g.to_approx()))
            if abs(want_z) < 1e-12:
                assert abs(got_z) < 1e-9


class TestStrictConsistency:
    def test_consistent_instance(self, seven_point_moments, seven_point_cubic):
        basis = vanishing_ideal([(z, np.conj(z)) for z in SEVEN_POINT_ROOTS])
        assert strict_consistency(seven_point_moments, list(basis))

    def test_perturbed_instance(self, seven_point_moments):
        basis = vanishing_ideal([(z, np.conj(z)) for z in SEVEN_POINT_ROOTS])
        g = seven_point_moments.perturbed(2, 2, 0.1)
        assert not strict_consistency(g, list(basis))

    def test_origin_ideal(self):
        mu = AtomicMeasure(((GaussianRational(0), Fraction(1)),))
        g = generate_moments(mu, 1)
        assert strict_consistency(g, [parse_poly("z"), parse_poly("w")])


@pytest.fixture(scope="module")
def cubic_basis():
    from momentforge.groebner import rationalize_basis

    basis = vanishing_ideal([(z, np.conj(z)) for z in SEVEN_POINT_ROOTS])
    return rationalize_basis(basis)


class TestDecompose:

    def test_shifted_element_decomposes(self, cubic_basis):
        qlc_monic = next(g for g in cubic_basis if g.leading_monomial() == (1, 2))
        p = parse_poly("z") * qlc_monic
        dec = representation_decompose(p, cubic_basis, k=3)
        assert dec.degree_bound_ok
        assert dec.max_quotient_degree <= 3
        total = Polynomial.zero()
        for q, g in zip(dec.quotients, cubic_basis):
            total = total + q * g
        assert total == p

    def test_basis_element_is_unit_quotient(self, cubic_basis):
        g0 = cubic_basis[0]
        dec = representation_decompose(g0, cubic_basis, k=3)
        assert dec.quotients[0] == Polynomial.constant(1)
        assert all(q.is_zero for q in dec.quotients[1:])

    def test_unit_not_in_proper_ideal(self, cubic_basis):
        with pytest.raises(NotInIdealError) as err:
            representation_decompose(Polynomial.constant(1), cubic_basis, k=3)
        assert err.value.normal_form == Polynomial.constant(1)


class TestExtract:
    def test_single_atom(self):
        mu = AtomicMeasure(((GaussianRational(2), Fraction(3)),))
        g = generate_moments(mu, 1)
        variety = Variety(
            (VarietyPoint(z=2 + 0j, residual=0.0),), (parse_poly("z - 2"),), 1e-9
        )
        out = extract_measure(g, variety)
        assert len(out) == 1
        (z, rho), = out.atoms
        assert abs(z - 2) < 1e-12 and abs(rho - 3) < 1e-12

    def test_drops_zero_density_atom(self):
        entries = {
            (i, j): GaussianRational(1) for i in range(3) for j in range(3 - i)
        }
        g = MomentSequence(1, entries)
        variety = Variety(
            (
                VarietyPoint(z=1 + 0j, residual=0.0),
                VarietyPoint(z=-1 + 0j, residual=0.0),
            ),
            (parse_poly("z^2 - 1"),),
            1e-9,
        )
        out = extract_measure(g, variety)
        assert len(out) == 1
        (z, rho), = out.atoms
        assert abs(z - 1) < 1e-12 and abs(rho - 1) < 1e-12

    def test_density_round_trip(self, seven_point_cubic):
        densities = [1.0, 2.0, 2.0, 1.0, 1.0, 3.0, 3.0]
        zs = sorted(SEVEN_POINT_ROOTS, key=lambda z: (z.real, z.imag))
        mu = AtomicMeasure(tuple(zip(zs, densities)))
        g = generate_moments(mu, 3)
        variety = solve_conjugate_system(seven_point_cubic)
        out = extract_measure(g, variety)
        got = {z: rho for z, rho in out.atoms}
        for z, rho in mu:
            match = min(got, key=lambda y: abs(y - z))
            assert abs(match - z) < 1e-9
            assert abs(got[match] - rho) <= 1e-8 * rho

    def test_rejects_unsupported_sequence(self):
        mu = AtomicMeasure(((GaussianRational(5), Fraction(1)),))
        g = generate_moments(mu, 1)
        variety = Variety(
            (VarietyPoint(z=1 + 0j, residual=0.0),), (parse_poly("z - 1"),), 1e-9
        )
        with pytest.raises(MeasureExtractionError):
            extract_measure(g, variety)


class TestCheckExtremal:
    def test_seven_point_instance(self, seven_point_moments, seven_point_cubic):
        report = check_extremal(seven_point_moments, seven_point_cubic)
        assert report.verdict == "yes"
        assert report.rank == 7 and report.variety_size == 7 and report.extremal
        assert len(report.basis) == 3
        side = build_moment_matrix(seven_point_moments).side
        assert len(report.basis) == side - report.rank  # card G = nullity
        assert report.conditions_pass and report.strict_consistency_pass
        assert report.measure is not None and len(report.measure) == 7
        for _z, rho in report.measure:
            assert abs(rho - 1.0) < 1e-8

    def test_perturbed_instance_fails_conditions(
        self, seven_point_moments, seven_point_cubic
    ):
        g = seven_point_moments.perturbed(2, 2, Fraction(1, 10))
        report = check_extremal(g, seven_point_cubic)
        assert report.verdict == "no"
        assert any("L(z*g" in item for item in report.failed_items())

    def test_integer_basis_instance(self, integer_basis_moments, integer_basis_cubic):
        report = check_extremal(integer_basis_moments, integer_basis_cubic)
        assert report.verdict == "yes"
        assert report.basis.is_exact
        lms = {g.leading_monomial() for g in report.basis}
        assert lms == {(0, 3), (1, 2), (3, 0)}
        g2 = next(g for g in report.basis if g.leading_monomial() == (1, 2))
        assert g2.scale(4) == parse_poly("-z + w + 2z^2 - 2w^2 + 4z^2w - 4zw^2")

    def test_degree_overflow_rejected(self, seven_point_moments):
        with pytest.raises(ValueError):
            check_extremal(seven_point_moments, parse_poly("z^4"))

    def test_subset_support_is_inconclusive(self, seven_point_cubic):
        # atoms on only five of the seven points: consistent but not extremal
        zs = sorted(SEVEN_POINT_ROOTS, key=lambda z: (z.real, z.imag))[:5]
        mu = AtomicMeasure(tuple((z, 1.0) for z in zs))
        g = generate_moments(mu, 3)
        report = check_extremal(g, seven_point_cubic)
        assert report.verdict == "inconclusive"
        assert report.rank == 5 and report.variety_size == 7
        assert report.conditions_pass and report.strict_consistency_pass

    def test_theorem_condition_equivalence(self, seven_point_moments, seven_point_cubic):
        # conditions (with multipliers 1, z), kernel residuals, and full
        # consistency agree on the consistent and the perturbed instance
        for gamma, expected in [
            (seven_point_moments, True),
            (seven_point_moments.perturbed(1, 2, 1e-2), False),
        ]:
            report = check_extremal(gamma, seven_point_cubic)
            relations_ok = all(c.relation_ok for c in report.basis_checks)
            assert report.conditions_pass == expected
            assert relations_ok == expected
            assert report.strict_consistency_pass == expected
