import math

import numpy as np
import pytest

from checkerxi import oracle as orc
from checkerxi.core import CheckerboardMatrix, Permutation, random_rectangular_checkerboard
from checkerxi.errors import MissingPartial, NoConvergence


def m_evaluator(cells=64):
    ev = orc.upper_frechet()
    return orc.CopulaEvaluator(**{**ev.__dict__, "cell_grid": (cells, cells)})


class TestReferenceCopulas:
    def test_independence(self):
        ev = orc.independence()
        assert abs(orc.rho_oracle(ev)) < 1e-12
        assert abs(orc.tau_oracle(ev)) < 1e-12
        assert abs(orc.xi_oracle(ev)) < 1e-12

    def test_upper_frechet(self):
        ev = m_evaluator()
        assert abs(orc.rho_oracle(ev) - 1) < 1e-6
        assert abs(orc.tau_oracle(ev) - 1) < 1e-6
        assert abs(orc.xi_oracle(ev) - 1) < 1e-6

    def test_lower_frechet(self):
        ev = orc.lower_frechet()
        assert abs(orc.rho_oracle(ev) + 1) < 1e-10
        assert abs(orc.tau_oracle(ev) + 1) < 1e-10
        assert abs(orc.xi_oracle(ev) - 1) < 1e-10

    @pytest.mark.parametrize("factory", [orc.independence, orc.upper_frechet, orc.lower_frechet])
    def test_boundary(self, factory):
        assert factory().check_boundary()

    def test_boundary_detects_non_copula(self):
        assert not orc.CopulaEvaluator(cdf=lambda u, v: u * v * 0.5).check_boundary()


class TestCheckerboardExamples:
    def test_delta2(self, delta2):
        ev = orc.checkerboard_evaluator(delta2, "pi")
        assert abs(orc.rho_oracle(ev) - 3 / 8) < 1e-10
        assert abs(orc.tau_oracle(ev) - 1 / 4) < 1e-10

    def test_delta4(self, delta4_exact):
        ev = orc.checkerboard_evaluator(delta4_exact, "pi")
        assert abs(orc.xi_oracle(ev) - 5 / 8) < 1e-10

    def test_check_min(self, delta2):
        ev = orc.checkerboard_evaluator(delta2, "min")
        assert abs(orc.xi_oracle(ev) - 7 / 16) < 1e-8
        lower, upper = orc.tail_oracle(ev)
        assert abs(lower - 0.75) < 1e-4 and abs(upper - 0.75) < 1e-4

    def test_shuffle(self):
        ev = orc.shuffle_evaluator(Permutation((2, 3, 1)))
        assert abs(orc.tau_oracle(ev) - 1 / 9) < 1e-6

    def test_report(self, delta2):
        r = orc.oracle_report(orc.checkerboard_evaluator(delta2, "min"), "min")
        assert r.source.value == "oracle"
        assert (r.rho_s, r.tau, r.xi) == pytest.approx((5 / 8, 9 / 16, 7 / 16), abs=1e-10)


class TestTails:
    def test_m_and_pi(self):
        assert orc.tail_oracle(orc.upper_frechet()) == pytest.approx((1, 1), abs=1e-4)
        assert orc.tail_oracle(orc.independence()) == pytest.approx((0, 0), abs=1e-4)

    def test_no_convergence(self):
        # C(t,t)/t oscillates between two values along dyadic t
        def cdf(u, v):
            t = np.minimum(u, v)
            k = np.round(-np.log2(np.maximum(t, 1e-300)))
            return np.where(k % 2 == 0, t, t * t)

        with pytest.raises(NoConvergence):
            orc.tail_oracle(orc.CopulaEvaluator(cdf=cdf))


class TestQuadrature:
    def test_missing_partials(self):
        ev = orc.CopulaEvaluator(cdf=lambda u, v: u * v)
        with pytest.raises(MissingPartial):
            orc.tau_oracle(ev)
        with pytest.raises(MissingPartial):
            orc.xi_oracle(ev)
        assert abs(orc.rho_oracle(ev)) < 1e-12

    def test_points_validation(self):
        with pytest.raises(ValueError):
            orc.QuadratureSpec(points_per_cell=1)

    @pytest.mark.parametrize("fam", ["pi", "min", "w"])
    @pytest.mark.parametrize("seed", range(5))
    def test_doubling_points_is_stable(self, fam, seed):
        d = random_rectangular_checkerboard(3 + seed % 3, 4, 3, seed)
        ev = orc.checkerboard_evaluator(d, fam)
        lo, hi = orc.QuadratureSpec(4), orc.QuadratureSpec(8)
        for f in (orc.rho_oracle, orc.tau_oracle, orc.xi_oracle):
            assert abs(f(ev, lo) - f(ev, hi)) < 1e-8

    def test_shuffle_doubling(self):
        ev = orc.shuffle_evaluator(Permutation.random(12, 3))
        for f in (orc.rho_oracle, orc.tau_oracle, orc.xi_oracle):
            assert abs(f(ev, orc.QuadratureSpec(4)) - f(ev, orc.QuadratureSpec(8))) < 1e-8

    def test_tau_symmetry(self, delta2):
        d = random_rectangular_checkerboard(5, 5, 3, 8)
        for fam in ("pi", "min"):
            a = orc.tau_oracle(orc.checkerboard_evaluator(d, fam))
            b = orc.tau_oracle(orc.checkerboard_evaluator(d.transpose(), fam))
            assert abs(a - b) < 1e-10
        assert abs(orc.tau_oracle(orc.checkerboard_evaluator(delta2, "pi")) - 0.25) < 1e-10

    def test_explicit_cells(self):
        ev = orc.upper_frechet()
        assert abs(orc.rho_oracle(ev, orc.QuadratureSpec(8, (16, 16))) - 1) < 1e-10


class TestMonteCarlo:
    def test_concordance(self):
        est, se = orc.tau_concordance(orc.upper_frechet().sampler, 1000, 1)
        assert est == 1.0 and se == 0.0

    def test_independence_concordance(self):
        est, se = orc.tau_concordance(orc.independence().sampler, 100_000, 3)
        assert abs(est) < 4 * se + 1e-3

    def test_empirical_cdf(self):
        s = orc.independence().sampler(40_000, 2)
        assert abs(orc.empirical_cdf(s, 0.3, 0.6) - 0.18) < 3 / math.sqrt(40_000)


class TestGaussian:
    def test_xi_formula(self):
        assert orc.gaussian_xi(0.0) == pytest.approx(0.0, abs=1e-15)
        assert orc.gaussian_xi(1.0) == pytest.approx(1.0, abs=1e-15)
        assert orc.GAUSSIAN_FACTOR_XI == pytest.approx(0.30984, abs=1e-5)

    def test_sampler_correlation(self):
        s = orc.gaussian_factor_sampler(1_000_000, 11)
        assert abs(np.corrcoef(s.x, s.y)[0, 1] - 1 / math.sqrt(2)) < 0.005

    def test_deterministic(self):
        a = orc.gaussian_factor_sampler(1, 5)
        b = orc.gaussian_factor_sampler(1, 5)
        assert a.x.tolist() == b.x.tolist() and a.y.tolist() == b.y.tolist()

    def test_marginal_moments(self):
        s = orc.gaussian_factor_sampler(400_000, 1)
        assert abs(s.x.mean()) < 0.01 and abs(s.x.var() - 1) < 0.01
        assert abs(s.y.var() - 2) < 0.02
