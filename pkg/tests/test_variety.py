import numpy as np
import pytest

from momentforge.poly import Polynomial, format_poly, parse_poly
from momentforge.scalars import GaussianRational
from momentforge.variety import (
    NonFiniteVarietyError,
    cluster_points,
    repeated_factor,
    solve_conjugate_system,
    squarefree_part,
    sylvester_resultant,
    univariate_roots,
)

from conftest import INTEGER_BASIS_ROOTS, SEVEN_POINT_ROOTS


def rp(text):
    return parse_poly(text, ("x", "y"))


def companion_roots(coeffs):
    """Independent oracle: eigenvalues of the companion matrix."""
    a = np.array([complex(c) for c in coeffs])
    a = np.trim_zeros(a, "b")
    n = len(a) - 1
    C = np.zeros((n, n), dtype=complex)
    C[1:, :-1] = np.eye(n - 1)
    C[:, -1] = -a[:-1] / a[-1]
    return np.sort_complex(np.linalg.eigvals(C))


class TestResultant:
    def test_linear_pair(self):
        r = sylvester_resultant(rp("x + y"), rp("x - y"))
        assert r == rp("2x")

    def test_substitution(self):
        r = sylvester_resultant(rp("y^2 + x"), rp("y - 1"))
        assert r == rp("x + 1")

    def test_degree_zero_rejected(self):
        with pytest.raises(ValueError, match="degree-0"):
            sylvester_resultant(rp("x + 1"), rp("y - 1"))
        with pytest.raises(ValueError):
            sylvester_resultant(rp("x + y"), Polynomial.zero())

    def test_quartic_repeated_factor(self):
        p = parse_poly("z^4 + 4/3z^3 + 2z^2 + 3w + 4z + 11/5")
        re_p, im_p = p.realify()
        res = sylvester_resultant(re_p, im_p)
        assert res.is_exact
        target = rp("8640x^6 + 17280x^5 + 20160x^4 + 1120x^3 - 6672x^2 - 2688x - 303")
        factor = repeated_factor(res, "z")
        assert factor.degree == 6
        # proportional with a single scalar: monic factor times 8640 is the target
        assert factor.scale(8640) == target

    def test_vanishes_exactly_at_shared_roots(self):
        # f = (y - x)(y - 1), g = (y - x)(y + 2) share a root for every x
        f = rp("y^2 - xy - y + x")
        g = rp("y^2 - xy + 2y - 2x")
        r = sylvester_resultant(f, g)
        assert r.is_zero  # common factor => identically zero


class TestSquarefree:
    def test_strips_multiplicity(self):
        # (x - 1)^2 (x + 2) = x^3 - 3x + 2
        p = rp("x^3 - 3x + 2")
        sf = squarefree_part(p, "z")
        assert sf == rp("x^2 + x - 2")
        assert repeated_factor(p, "z") == rp("x - 1")

    def test_squarefree_is_fixed_point(self):
        p = rp("x^3 - 3x + 2")
        sf = squarefree_part(p, "z")
        assert squarefree_part(sf, "z") == sf


class TestRoots:
    def test_quadratic(self):
        roots = univariate_roots([1, 0, 1])
        assert sorted(roots, key=lambda z: z.imag) == [-1j, 1j]

    def test_cube_roots_of_unity(self):
        roots = np.array(univariate_roots([-1, 0, 0, 1]))
        expected = np.sort_complex(np.array([1, np.exp(2j * np.pi / 3), np.exp(-2j * np.pi / 3)]))
        assert np.max(np.abs(np.sort_complex(roots) - expected)) < 1e-12

    def test_sextic_against_companion_oracle(self):
        coeffs = [-303, -2688, -6672, 1120, 20160, 17280, 8640]
        mine = np.sort_complex(np.array(univariate_roots(coeffs)))
        oracle = companion_roots(coeffs)
        assert np.max(np.abs(mine - oracle)) < 1e-10

    def test_random_against_companion_oracle(self):
        rng = np.random.default_rng(42)
        for deg in (3, 5, 8, 12):
            coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
            mine = np.sort_complex(np.array(univariate_roots(list(coeffs))))
            oracle = companion_roots(list(coeffs))
            assert np.max(np.abs(mine - oracle)) < 1e-8

    def test_roots_at_origin(self):
        # x^2 (x - 1)
        roots = sorted(univariate_roots([0, 0, -1, 1]), key=lambda z: z.real)
        assert abs(roots[0]) == 0 and abs(roots[1]) == 0
        assert abs(roots[2] - 1) < 1e-12

    def test_degree_zero_rejected(self):
        with pytest.raises(ValueError):
            univariate_roots([5])
        with pytest.raises(ValueError):
            univariate_roots([])


class TestCluster:
    def test_merges_near_duplicates(self):
        out = cluster_points([1 + 0j, 1 + 1e-12j], 1e-9)
        assert len(out) == 1
        centroid, size = out[0]
        assert size == 2 and abs(centroid - 1) < 1e-9

    def test_keeps_distinct(self):
        out = cluster_points([0j, 1 + 0j], 1e-9)
        assert [size for _, size in out] == [1, 1]

    def test_requires_positive_tol(self):
        with pytest.raises(ValueError):
            cluster_points([0j], 0.0)


class TestConjugateSystem:
    def test_single_point(self):
        v = solve_conjugate_system(parse_poly("z"))
        assert len(v) == 1 and abs(v.zs[0]) == 0

    def test_real_axis_rejected(self):
        with pytest.raises(NonFiniteVarietyError):
            solve_conjugate_system(parse_poly("z - w"))

    def test_real_valued_polynomial_rejected(self):
        # zw - 5 vanishes on the circle |z|^2 = 5
        with pytest.raises(NonFiniteVarietyError):
            solve_conjugate_system(parse_poly("zw - 5"))

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            solve_conjugate_system(parse_poly("3"))
        with pytest.raises(ValueError):
            solve_conjugate_system(Polynomial.zero())

    def test_empty_variety_allowed(self):
        # z - w + 3i: 2i Im z + 3i = 0 needs Im z = -3/2... that line is real.
        # use a polynomial with no zeros of the conjugate form instead:
        # p = z + w + i has Re-part 2x, Im-part 1 -> no solution
        v = solve_conjugate_system(parse_poly("z + w + i"))
        assert len(v) == 0

    def test_seven_point_cubic(self, seven_point_cubic):
        v = solve_conjugate_system(seven_point_cubic)
        assert len(v) == 7
        assert v.all_simple
        got = np.sort_complex(np.array(v.zs))
        want = np.sort_complex(np.array(SEVEN_POINT_ROOTS))
        assert np.max(np.abs(got - want)) < 1e-9

    def test_seven_point_residual_bound(self, seven_point_cubic):
        v = solve_conjugate_system(seven_point_cubic, tol=1e-9)
        scale = seven_point_cubic.coefficient_scale()
        for pt in v:
            bound = 10 * 1e-9 * scale * max(1.0, abs(pt.z)) ** 3
            assert pt.residual <= bound

    def test_exact_evaluation_at_rational_points(self, seven_point_cubic):
        pbar = seven_point_cubic.conjugate()
        for z in [
            GaussianRational(0),
            GaussianRational(1, 2),
            GaussianRational(-1, -2),
            GaussianRational(2, 1),
            GaussianRational(-2, -1),
        ]:
            pt = (z, z.conjugate())
            assert not seven_point_cubic.evaluate(pt)
            assert not pbar.evaluate(pt)

    def test_integer_basis_cubic(self, integer_basis_cubic):
        v = solve_conjugate_system(integer_basis_cubic)
        got = np.sort_complex(np.array(v.zs))
        want = np.sort_complex(np.array(INTEGER_BASIS_ROOTS))
        assert len(v) == 7
        assert np.max(np.abs(got - want)) < 1e-9

    def test_ten_point_quartic(self, ten_point_quartic):
        v = solve_conjugate_system(ten_point_quartic)
        assert len(v) == 10
        assert v.all_simple

    def test_conjugate_coordinate_is_exact(self, seven_point_cubic):
        v = solve_conjugate_system(seven_point_cubic)
        for pt in v:
            z, w = pt.pair
            assert w == z.conjugate()

    def test_khavinson_swiatek_bound_on_family(self):
        # cubic family z^3 - itz - uw keeps at most 7 zeros
        for u, t in [(5.0, 8.0), (3.0, 4.0), (1.0, 1.5), (2.0, 3.9)]:
            p = Polynomial(
                {(0, 3): 1.0, (0, 1): complex(0, -t), (1, 0): complex(-u, 0)}
            )
            v = solve_conjugate_system(p)
            assert len(v) <= 7
